// SPDX-License-Identifier: Apache-2.0
//
// maisac: movable-antenna ISAC beamforming and position optimization
// Copyright (C) 2026 The maisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "maisac/bcd.hpp"

#include "maisac/baselines.hpp"
#include "maisac/rx_combiner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace maisac
{
    namespace
    {
        using Clock = std::chrono::steady_clock;

        double seconds_since(Clock::time_point t0)
        {
            return std::chrono::duration<double>(Clock::now() - t0).count();
        }

        Eigen::VectorXd sample_positions(int n, double L, double D, std::mt19937_64 &rng)
        {
            // sorted uniform draws on the spare length, then the fixed gaps added back:
            // the same distribution as rejecting unsorted draws that violate the spacing
            std::uniform_real_distribution<double> u(0, std::max(0.0, L - (n - 1) * D));
            Eigen::VectorXd x(n);
            for (int i = 0; i < n; ++i)
                x(i) = u(rng);
            std::sort(x.begin(), x.end());
            for (int i = 0; i < n; ++i)
                x(i) += i * D;
            return x;
        }

        bool meets_floor(const Eigen::VectorXcd &w, const ArrayLayout &l, const SceneConfig &s, double rel = 0)
        {
            return s.sensing_floor <= 0 || mvdr_snr_closedform(w, l, s) >= s.sensing_floor * (1 - rel);
        }

        RxCombiner combiner(const Eigen::VectorXcd &w, const ArrayLayout &l, const SceneConfig &s)
        {
            try
            {
                return mvdr_combiner(w, l, s).u;
            }
            catch (const DegenerateDirection &)
            {
                // no target gain: any unit combiner gives gamma_r = 0
                return RxCombiner::normalized(rx_steering(l, s.theta_target, s));
            }
        }

        constexpr double floor_slack = 1e-6;
    }

    ArrayLayout init_layout(const SceneConfig &scene, InitStrategy strategy, std::uint64_t seed,
                            const ArrayLayout *provided)
    {
        scene.validate();
        switch (strategy)
        {
        case InitStrategy::uniform:
        {
            const double h = scene.wavelength / 2;
            if (scene.min_spacing > h * (1 + 1e-12) || (scene.n_tx - 1) * h > scene.tx_aperture * (1 + 1e-12) ||
                (scene.n_rx - 1) * h > scene.rx_aperture * (1 + 1e-12))
                throw InvalidParameter("uniform half-wavelength array does not fit the scene");
            return ArrayLayout::uniform(scene.n_tx, scene.n_rx, h);
        }
        case InitStrategy::random_feasible:
        {
            std::mt19937_64 rng(seed);
            Eigen::VectorXd x = sample_positions(scene.n_tx, scene.tx_aperture, scene.min_spacing, rng);
            Eigen::VectorXd y = sample_positions(scene.n_rx, scene.rx_aperture, scene.min_spacing, rng);
            return ArrayLayout(std::move(x), std::move(y));
        }
        case InitStrategy::provided:
            if (!provided)
                throw InvalidParameter("init_layout: no layout provided");
            validate_layout(*provided, scene);
            return *provided;
        }
        throw InvalidParameter("init_layout: unknown strategy");
    }

    void BcdOptions::validate() const
    {
        if (!(eps > 0) || !std::isfinite(eps))
            throw InvalidParameter("eps must be > 0");
        if (max_outer < 1)
            throw InvalidParameter("max_outer must be >= 1");
        if (rank1_candidates < 1)
            throw InvalidParameter("rank1_candidates must be >= 1");
        if (refine.max_iter < 0)
            throw InvalidParameter("refine max_iter must be >= 0");
        if (!(refine.tol >= 0) || !std::isfinite(refine.tol))
            throw InvalidParameter("refine tol must be >= 0");
        if (!(sca.solver.feastol > 0))
            throw InvalidParameter("solver feastol must be > 0");
    }

    std::string to_string(BcdStatus s)
    {
        switch (s)
        {
        case BcdStatus::converged:
            return "converged";
        case BcdStatus::max_iter:
            return "max-iter";
        case BcdStatus::infeasible:
            return "infeasible";
        case BcdStatus::failed:
            return "failed";
        }
        return "unknown";
    }

    Eigen::VectorXcd initial_beam(const ArrayLayout &layout, const SceneConfig &scene, const SensingCapacity &cap)
    {
        const double p = std::sqrt(scene.power_budget);
        const Eigen::VectorXcd h = channel(layout, scene);
        const Eigen::VectorXcd mrt = h.norm() > 0 ? Eigen::VectorXcd(p * h / h.norm())
                                                  : Eigen::VectorXcd(tx_steering(layout, scene.theta_user, scene) * (p / std::sqrt(double(scene.n_tx))));
        if (meets_floor(mrt, layout, scene))
            return mrt;
        const Eigen::VectorXcd at = tx_steering(layout, scene.theta_target, scene);
        const Eigen::VectorXcd tgt = p * at / at.norm();
        auto blend = [&](double t)
        {
            Eigen::VectorXcd v = (1 - t) * mrt + t * tgt;
            const double n = v.norm();
            return n > 0 ? Eigen::VectorXcd(p * v / n) : tgt;
        };
        if (meets_floor(tgt, layout, scene))
        {
            double lo = 0, hi = 1;
            for (int k = 0; k < 60; ++k)
            {
                const double mid = 0.5 * (lo + hi);
                (meets_floor(blend(mid), layout, scene) ? hi : lo) = mid;
            }
            return blend(hi);
        }
        if (cap.ok && cap.W.size() > 0)
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cap.W);
            const Eigen::VectorXcd v = p * es.eigenvectors().col(cap.W.rows() - 1);
            if (meets_floor(v, layout, scene))
                return v;
            try
            {
                const PsiOperators ops = build_psi_operators(layout, scene);
                Eigen::VectorXcd w = extract_rank1(cap.W, ops, scene, 1e-6, 0, 400).w;
                if (meets_floor(w, layout, scene, floor_slack))
                    return w;
            }
            catch (const ExtractionFailure &)
            {
            }
        }
        return {};
    }

    BcdResult run_bcd(const SceneConfig &scene, const BcdOptions &opts)
    {
        scene.validate();
        opts.validate();
        BcdResult res;
        res.stage = "init";
        ArrayLayout layout = init_layout(scene, opts.init, opts.seed, &opts.provided);
        res.initial_layout = layout;
        res.layout = layout;

        const PsiOperators ops0 = build_psi_operators(layout, scene);
        SensingCapacity cap;
        if (scene.sensing_floor > 0)
        {
            cap = max_sensing(ops0, scene, opts.sca.solver);
            if (!cap.ok || cap.gamma_max < scene.sensing_floor)
            {
                res.status = BcdStatus::infeasible;
                res.message = "sensing floor above the attainable maximum " + std::to_string(cap.gamma_max) +
                              " at the initial layout";
                if (cap.ok)
                {
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cap.W);
                    res.w = std::sqrt(scene.power_budget) * es.eigenvectors().col(scene.n_tx - 1);
                    res.u = combiner(res.w, layout, scene).u;
                    res.gamma_t = comm_snr(res.w, layout, scene);
                    res.gamma_r = mvdr_snr_closedform(res.w, layout, scene);
                    res.capacity = capacity(res.gamma_t);
                }
                return res;
            }
        }
        Eigen::VectorXcd w = initial_beam(layout, scene, cap);
        if (w.size() == 0)
        {
            res.status = BcdStatus::infeasible;
            res.message = "no rank-one beam meets the sensing floor at the initial layout";
            return res;
        }

        double gt = comm_snr(w, layout, scene);
        res.initial_gamma_t = gt;
        res.stage.clear();
        RxCombiner u = combiner(w, layout, scene);
        double ratio = 0;
        // Covariance solve plus rank-one extraction at `at`; accepted if feasible and gamma_t >= floor_t
        struct BeamStep
        {
            bool accepted = false;
            Eigen::VectorXcd w;
            double gamma_t = 0;
            double rank_ratio = 0;
            std::string note;
        };
        auto beam_step = [&](const ArrayLayout &at, double floor_t, std::uint64_t seed)
        {
            BeamStep b;
            const PsiOperators ops = build_psi_operators(at, scene);
            // the anchor depends on the layout only, so an unchanged layout gives back the same covariance
            const Eigen::MatrixXcd mrt = scene.power_budget * ops.H / ops.H.trace().real();
            const TxSolveResult sol = solve_W_sca(ops, scene, initial_omega(ops, scene, mrt), opts.sca);
            std::vector<Eigen::VectorXcd> starts;
            if (sol.status != TxStatus::optimal && sol.status != TxStatus::stalled)
                b.note = "w:" + to_string(sol.status) + ";";
            else
            {
                try
                {
                    const Rank1Result r1 =
                        extract_rank1(sol.W, ops, scene, opts.rank1_tol, seed, opts.rank1_candidates);
                    starts.push_back(r1.w);
                    b.rank_ratio = r1.rank_ratio;
                }
                catch (const ExtractionFailure &)
                {
                    b.note = "w:extraction;";
                }
            }
            // the current beam is also climbed from, it may sit above every extracted candidate
            if (meets_floor(w, at, scene, floor_slack))
                starts.push_back(w);
            double best = -1;
            for (const Eigen::VectorXcd &s0 : starts)
            {
                const RefineResult rf = opts.refine.max_iter > 0 ? refine_beam(s0, at, scene, opts.refine)
                                                                 : RefineResult{s0, comm_snr(s0, at, scene), 0};
                if (rf.gamma_t > best && meets_floor(rf.w, at, scene, floor_slack))
                {
                    best = rf.gamma_t;
                    b.w = rf.w;
                }
            }
            if (best >= floor_t)
            {
                b.accepted = true;
                b.gamma_t = best;
            }
            return b;
        };
        // one seed for every pass: re-solving an unchanged layout reproduces the same beam
        const std::uint64_t draw_seed = opts.seed * 1000003ULL + 1;
        bool converged = false, aborted = false;
        try
        {
            for (int t = 1; t <= opts.max_outer; ++t)
            {
                BcdIteration row;
                row.iteration = t;

                auto t0 = Clock::now();
                u = combiner(w, layout, scene);
                row.seconds_u = seconds_since(t0);

                t0 = Clock::now();
                const BeamStep bs = beam_step(layout, gt, draw_seed);
                row.note += bs.note;
                if (bs.accepted)
                {
                    w = bs.w;
                    gt = bs.gamma_t;
                    ratio = bs.rank_ratio;
                    row.w_accepted = true;
                }
                row.seconds_w = seconds_since(t0);

                if (opts.positions == PositionMethod::surrogate)
                {
                    t0 = Clock::now();
                    const PositionResult px = optimize_positions(Side::transmit, layout, w, scene, opts.position);
                    if (px.accepted > 0)
                    {
                        layout = px.layout;
                        gt = comm_snr(w, layout, scene);
                        row.x_accepted = true;
                    }
                    row.seconds_x = seconds_since(t0);
                }
                else if (opts.positions == PositionMethod::gradient)
                {
                    t0 = Clock::now();
                    const PositionResult px = gradient_positions(layout, w, scene, opts.gradient);
                    if (px.accepted > 0)
                    {
                        const double g = comm_snr(w, px.layout, scene);
                        if (g >= gt && meets_floor(w, px.layout, scene, floor_slack))
                        {
                            layout = px.layout;
                            gt = g;
                            row.x_accepted = true;
                        }
                        else
                        {
                            // the penalized ascent left the floor: re-solve the beam at the new layout
                            const BeamStep rep = beam_step(px.layout, gt, draw_seed);
                            if (rep.accepted)
                            {
                                layout = px.layout;
                                w = rep.w;
                                gt = rep.gamma_t;
                                ratio = rep.rank_ratio;
                                row.x_accepted = true;
                            }
                            else
                                row.note += "x:repair" + rep.note + ";";
                        }
                    }
                    row.seconds_x = seconds_since(t0);
                }
                if (opts.positions == PositionMethod::surrogate)
                {
                    t0 = Clock::now();
                    const PositionResult py = optimize_positions(Side::receive, layout, w, scene, opts.position);
                    if (py.accepted > 0)
                    {
                        layout = py.layout;
                        row.y_accepted = true;
                    }
                    row.seconds_y = seconds_since(t0);
                }

                const double prev = res.trace.empty() ? res.initial_gamma_t : res.trace.back().gamma_t;
                row.gamma_t = gt;
                row.gamma_r = mvdr_snr_closedform(w, layout, scene);
                row.capacity = capacity(gt);
                row.rank_ratio = ratio;
                res.trace.push_back(row);
                res.iterations = t;
                if (std::abs(gt - prev) <= opts.eps)
                {
                    converged = true;
                    break;
                }
            }
        }
        catch (const std::exception &e)
        {
            aborted = true;
            res.stage = "outer iteration " + std::to_string(res.iterations + 1);
            res.message = e.what();
        }

        res.w = w;
        res.layout = layout;
        res.u = combiner(w, layout, scene).u;
        res.gamma_t = comm_snr(w, layout, scene);
        res.gamma_r = sensing_snr(w, res.u, layout, scene);
        res.capacity = capacity(res.gamma_t);
        res.rank_ratio = ratio;
        res.status = aborted ? BcdStatus::failed : converged ? BcdStatus::converged : BcdStatus::max_iter;
        if (!meets_floor(w, layout, scene, floor_slack))
        {
            res.status = BcdStatus::failed;
            res.stage = "final audit";
            res.message = "sensing floor violated at the returned iterate";
        }
        return res;
    }

    bool ConstraintAudit::pass() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const AuditCheck &c) { return c.pass; });
    }

    ConstraintAudit audit_solution(const Eigen::VectorXcd &w, const Eigen::VectorXcd &u, const ArrayLayout &layout,
                                   const SceneConfig &scene)
    {
        ConstraintAudit a;
        auto region = [&](const char *name, const Eigen::VectorXd &p, double L)
        {
            const double slack = 1e-9 * std::max(L, 1.0);
            const double lo = p.size() ? p.minCoeff() : 0, hi = p.size() ? p.maxCoeff() : 0;
            const double excess = std::max(-lo, hi - L);
            a.checks.push_back({name, excess, slack, p.size() > 0 && excess <= slack});
        };
        auto spacing = [&](const char *name, const Eigen::VectorXd &p)
        {
            const double g = min_gap(p);
            a.checks.push_back({name, g, scene.min_spacing * (1 - 1e-9), g >= scene.min_spacing * (1 - 1e-9)});
        };
        const bool dims = w.size() == scene.n_tx && u.size() == scene.n_rx && layout.tx().size() == scene.n_tx &&
                          layout.rx().size() == scene.n_rx;
        a.checks.push_back({"dimensions", dims ? 1.0 : 0.0, 1.0, dims});
        if (!dims)
            return a;
        region("tx_region", layout.tx(), scene.tx_aperture);
        region("rx_region", layout.rx(), scene.rx_aperture);
        spacing("tx_spacing", layout.tx());
        spacing("rx_spacing", layout.rx());
        const double pw = w.squaredNorm();
        a.checks.push_back({"power", pw, scene.power_budget * (1 + 1e-9), pw <= scene.power_budget * (1 + 1e-9)});
        const double un = u.norm();
        a.checks.push_back({"combiner_norm", un, 1.0, std::abs(un - 1) <= 1e-9});
        const double gr = un > 0 ? sensing_snr(w, u, layout, scene) : 0.0;
        const double floor = scene.sensing_floor * (1 - 1e-6);
        a.checks.push_back({"sensing_floor", gr, floor, gr >= floor});
        return a;
    }
}
