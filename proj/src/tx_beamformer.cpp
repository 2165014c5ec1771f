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

#include "maisac/tx_beamformer.hpp"
#include "maisac/conic_program.hpp"
#include "maisac/errors.hpp"
#include "maisac/rx_combiner.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace maisac
{
    using conic::ConicProgram;
    using conic::LinExpr;

    namespace
    {
        // tr(W) <= P and W >= 0 plus the Psi expressions
        struct BaseProgram
        {
            ConicProgram prog;
            conic::HermVar W;
            LinExpr psi1_re, psi1_im, psi2, psi3, objective;
        };

        BaseProgram make_base(const PsiOperators &ops, const SceneConfig &scene)
        {
            BaseProgram b;
            b.W = b.prog.add_hermitian("W", int(ops.H.rows()));
            b.prog.add_psd(b.W);
            b.prog.add_nonneg(scene.power_budget - b.prog.trace(b.W));
            std::tie(b.psi1_re, b.psi1_im) = b.prog.trace_product(ops.A1, b.W);
            b.psi2 = b.prog.trace_product(ops.A2, b.W).first;
            b.psi3 = b.prog.trace_product(ops.A3, b.W).first;
            b.objective = (1.0 / scene.comm_noise) * b.prog.trace_product(ops.H, b.W).first;
            return b;
        }

        double sensing_margin(const SceneConfig &scene)
        {
            return scene.sensing_floor * scene.radar_noise / (scene.target_gain * scene.target_gain);
        }

        // the exact constraint: delta^2 |Psi1|^2 <= (Psi2 - g)(N0 + delta^2 Psi3)
        void add_exact_sensing(BaseProgram &b, const SceneConfig &scene, const LinExpr &g)
        {
            const double d = std::abs(scene.clutter_gain);
            if (d == 0)
            {
                b.prog.add_nonneg(b.psi2 - g);
                return;
            }
            b.prog.add_rotated_soc(b.psi2 - g, 0.5 * (scene.radar_noise + d * d * b.psi3),
                                   {d * b.psi1_re, d * b.psi1_im});
        }

        Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd &W) { return 0.5 * (W + W.adjoint()); }

        void fill_result(TxSolveResult &r, const PsiOperators &ops, const SceneConfig &scene)
        {
            r.psi = evaluate_psi(ops, r.W);
            r.objective = covariance_comm_snr(ops, r.W, scene);
        }

        TxStatus map_status(conic::Status s)
        {
            switch (s)
            {
            case conic::Status::optimal:
                return TxStatus::optimal;
            case conic::Status::infeasible:
                return TxStatus::infeasible;
            default:
                return TxStatus::failed;
            }
        }

        bool sensing_ok(const PsiOperators &ops, const Eigen::MatrixXcd &W, const SceneConfig &scene, double rel)
        {
            return covariance_sensing_snr(ops, W, scene) >= scene.sensing_floor * (1 - rel);
        }
    }

    std::string to_string(TxStatus s)
    {
        switch (s)
        {
        case TxStatus::optimal:
            return "optimal";
        case TxStatus::infeasible:
            return "infeasible";
        case TxStatus::stalled:
            return "stalled";
        case TxStatus::failed:
            return "failed";
        }
        return "unknown";
    }

    PsiOperators build_psi_operators(const ArrayLayout &layout, const SceneConfig &scene)
    {
        validate_layout(layout, scene);
        const Eigen::MatrixXcd AP = response_matrix(layout, scene.theta_target, scene);
        const Eigen::MatrixXcd AC = response_matrix(layout, scene.theta_clutter, scene);
        const Eigen::VectorXcd h = channel(layout, scene);
        PsiOperators ops;
        ops.A1 = AP.adjoint() * AC;
        ops.A2 = AP.adjoint() * AP;
        ops.A3 = AC.adjoint() * AC;
        ops.H = h * h.adjoint();
        return ops;
    }

    PsiValues evaluate_psi(const PsiOperators &ops, const Eigen::MatrixXcd &W)
    {
        PsiValues v;
        v.psi1 = (ops.A1 * W).trace();
        v.psi2 = (ops.A2 * W).trace().real();
        v.psi3 = (ops.A3 * W).trace().real();
        return v;
    }

    double covariance_sensing_snr(const PsiOperators &ops, const Eigen::MatrixXcd &W, const SceneConfig &scene)
    {
        const PsiValues v = evaluate_psi(ops, W);
        const double d2 = scene.clutter_gain * scene.clutter_gain;
        const double n0 = scene.radar_noise;
        const double val = scene.target_gain * scene.target_gain / n0 *
                           (v.psi2 - d2 * std::norm(v.psi1) / (n0 + d2 * v.psi3));
        return std::max(val, 0.0);
    }

    double covariance_comm_snr(const PsiOperators &ops, const Eigen::MatrixXcd &W, const SceneConfig &scene)
    {
        return (ops.H * W).trace().real() / scene.comm_noise;
    }

    SensingCapacity max_sensing(const PsiOperators &ops, const SceneConfig &scene, const conic::SolverOptions &opts)
    {
        SensingCapacity cap;
        BaseProgram b = make_base(ops, scene);
        conic::Var t = b.prog.add_scalar("t");
        add_exact_sensing(b, scene, LinExpr(t));
        b.prog.maximize(t);
        const auto sol = b.prog.solve(opts);
        if (sol.status != conic::Status::optimal)
            return cap;
        cap.ok = true;
        cap.W = hermitian_part(sol.value(b.W));
        cap.gamma_max = covariance_sensing_snr(ops, cap.W, scene);
        return cap;
    }

    Eigen::MatrixXcd feasible_start(const PsiOperators &ops, const SceneConfig &scene, const SensingCapacity &cap)
    {
        const double hn = ops.H.trace().real();
        const Eigen::MatrixXcd Wm = scene.power_budget * ops.H / hn;
        if (sensing_ok(ops, Wm, scene, 0) || !cap.ok)
            return Wm;
        // the relaxed sensing function is concave in W, so feasibility along the segment is an interval
        double lo = 0, hi = 1;
        for (int it = 0; it < 60; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            if (sensing_ok(ops, (1 - mid) * cap.W + mid * Wm, scene, 0))
                lo = mid;
            else
                hi = mid;
        }
        return (1 - lo) * cap.W + lo * Wm;
    }

    double initial_omega(const PsiOperators &ops, const SceneConfig &, const Eigen::MatrixXcd &W0)
    {
        const PsiValues v = evaluate_psi(ops, W0);
        return std::max(v.psi2 * v.psi3, 1e-9);
    }

    TxSolveResult solve_W_direct(const PsiOperators &ops, const SceneConfig &scene, const conic::SolverOptions &opts)
    {
        TxSolveResult r;
        BaseProgram b = make_base(ops, scene);
        if (scene.sensing_floor > 0)
        {
            if (scene.target_gain == 0)
            {
                r.status = TxStatus::infeasible;
                r.message = "target gain is zero";
                return r;
            }
            add_exact_sensing(b, scene, LinExpr(sensing_margin(scene)));
        }
        b.prog.maximize(b.objective);
        const auto sol = b.prog.solve(opts);
        r.status = map_status(sol.status);
        r.iterations = 1;
        r.solver_iterations = sol.iterations;
        if (r.status != TxStatus::optimal)
        {
            r.message = "conic solver: " + conic::to_string(sol.status);
            return r;
        }
        r.W = hermitian_part(sol.value(b.W));
        fill_result(r, ops, scene);
        r.objective_trace.push_back(r.objective);
        return r;
    }

    TxSolveResult solve_W_sca(const PsiOperators &ops, const SceneConfig &scene, double omega_init,
                              const ScaOptions &opts)
    {
        if (!(omega_init > 0) || !std::isfinite(omega_init))
            throw InvalidParameter("solve_W_sca: omega_init must be > 0");
        const double d = std::abs(scene.clutter_gain);
        // Without a floor or without clutter the constraint is already convex: nothing to linearize
        if (scene.sensing_floor == 0 || d == 0)
            return solve_W_direct(ops, scene, opts.solver);

        TxSolveResult r;
        if (scene.target_gain == 0)
        {
            r.status = TxStatus::infeasible;
            r.message = "target gain is zero";
            return r;
        }
        const SensingCapacity cap = max_sensing(ops, scene, opts.solver);
        if (!cap.ok)
        {
            r.status = TxStatus::failed;
            r.message = "sensing pre-solve failed";
            return r;
        }
        if (cap.gamma_max < scene.sensing_floor)
        {
            r.status = TxStatus::infeasible;
            r.message = "sensing floor exceeds the attainable maximum " + std::to_string(cap.gamma_max);
            return r;
        }

        const double g = sensing_margin(scene);
        const double n0 = scene.radar_noise;

        // One convex subproblem around the anchor omega0; every feasible point is exactly feasible
        // because the first-order bound on 1/Omega lies below 1/Omega for any anchor.
        auto solve_sub = [&](double omega0, Eigen::MatrixXcd &W) -> conic::Status
        {
            BaseProgram b = make_base(ops, scene);
            // omega = Omega / Omega0 keeps the cone data well scaled
            conic::Var om = b.prog.add_scalar("omega");
            conic::Var s1 = b.prog.add_scalar("s1");
            conic::Var r2 = b.prog.add_scalar("r2");
            const LinExpr Om = omega0 * LinExpr(om);
            b.prog.add_rotated_soc(n0 * b.psi2 + d * d * Om - g * (n0 + d * d * b.psi3), 0.5,
                                   {d * b.psi1_re, d * b.psi1_im});
            b.prog.add_nonneg(b.psi2 - 1e-9);
            b.prog.add_nonneg(b.psi3 - 1e-9);
            b.prog.add_nonneg(LinExpr(om) - 1e-9 / omega0);
            // 1/(Psi2 Psi3) <= (2 Omega0 - Omega) / Omega0^2 as s1^2 <= Psi2 Psi3 / Omega0, r2^2 <= 2 - omega, 1 <= s1 r2
            b.prog.add_rotated_soc(b.psi2, (0.5 / omega0) * b.psi3, {LinExpr(s1)});
            b.prog.add_rotated_soc(2.0 - LinExpr(om), 0.5, {LinExpr(r2)});
            b.prog.add_rotated_soc(s1, 0.5 * LinExpr(r2), {LinExpr(1.0)});
            if (opts.am_gm_branch)
                b.prog.add_rotated_soc(Om, 1.0, {b.psi2, b.psi3});
            b.prog.maximize(b.objective);
            const auto sol = b.prog.solve(opts.solver);
            r.solver_iterations += sol.iterations;
            if (sol.status == conic::Status::optimal)
                W = hermitian_part(sol.value(b.W));
            return sol.status;
        };
        auto product = [&](const Eigen::MatrixXcd &W)
        {
            const PsiValues pv = evaluate_psi(ops, W);
            return std::max(pv.psi2 * pv.psi3, 1e-12);
        };

        // Every anchor gives a restriction of the exact constraint, and the restriction is tight at
        // the optimum when the anchor equals Psi2 Psi3 there. The plain update (anchor <- Psi2 Psi3)
        // crawls when the optimum nulls the clutter, because then nearly every anchor is almost a
        // fixed point. So the anchor is moved in log space along the direction of the plain update
        // with an expanding step, and a trial is kept only if it does not lower the objective.
        double best = -std::numeric_limits<double>::infinity();
        double u_best = 0, t_best = 0;
        int failures = 0;
        bool stalled = false;
        auto trial = [&](double omega0) -> int // 1 accepted, 0 rejected, -1 solver failure
        {
            Eigen::MatrixXcd W;
            const conic::Status st = solve_sub(omega0, W);
            ++r.iterations;
            if (st != conic::Status::optimal)
            {
                stalled = ++failures >= 3;
                return -1;
            }
            failures = 0;
            const double obj = covariance_comm_snr(ops, W, scene);
            if (obj < best - 1e-9 * std::max(1.0, std::abs(best)))
                return 0;
            const bool progress = obj > best;
            best = std::max(best, obj);
            u_best = std::log(omega0);
            t_best = std::log(product(W));
            r.W = W;
            r.objective_trace.push_back(obj);
            return progress ? 1 : 0;
        };

        if (trial(omega_init) != 1 && trial(initial_omega(ops, scene, feasible_start(ops, scene, cap))) != 1)
        {
            r.status = TxStatus::failed;
            r.message = "no SCA subproblem solved";
            return r;
        }
        double h = 0;
        int dir = 0;
        // a single small gain can come from a short first step while the anchor is still far off
        int flat = 0;
        auto small_gain = [&](double before)
        {
            if (best - before > opts.tol * std::max(1.0, std::abs(best)))
            {
                flat = 0;
                return false;
            }
            return ++flat >= 3;
        };
        while (r.iterations < opts.max_iter && !stalled)
        {
            const double delta = t_best - u_best;
            if (std::abs(delta) <= 1e-9)
                break; // anchor reproduces itself
            const int d = delta > 0 ? 1 : -1;
            if (h == 0)
                h = std::abs(delta);
            else if (d != dir)
                h = std::max(0.5 * h, std::abs(delta));
            dir = d;
            const double before = best;
            int res = trial(std::exp(u_best + dir * h));
            if (res == 1)
            {
                if (small_gain(before))
                    break;
                h *= 2;
                continue;
            }
            if (r.iterations < opts.max_iter && !stalled)
                res = trial(std::exp(u_best - dir * h));
            if (res == 1)
            {
                dir = -dir;
                if (small_gain(before))
                    break;
                continue;
            }
            h *= 0.25;
            if (h < 1e-6)
                break;
        }
        r.iterations = std::max(r.iterations, 1);

        fill_result(r, ops, scene);
        r.status = stalled ? TxStatus::stalled : TxStatus::optimal;
        if (opts.am_gm_branch)
        {
            const TxSolveResult exact = solve_W_direct(ops, scene, opts.solver);
            if (exact.status == TxStatus::optimal && r.objective < exact.objective * (1 - 1e-5))
            {
                r.conservative = true;
                r.message = "Omega route is conservative: " + std::to_string(r.objective) + " vs " +
                            std::to_string(exact.objective);
            }
        }
        return r;
    }

    Rank1Result extract_rank1(const Eigen::MatrixXcd &W, const PsiOperators &ops, const SceneConfig &scene,
                              double tol, std::uint64_t seed, int candidates)
    {
        const Eigen::Index n = W.rows();
        if (W.cols() != n || n != ops.H.rows())
            throw InvalidParameter("extract_rank1: covariance has the wrong size");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(W));
        const Eigen::VectorXd lam = es.eigenvalues();
        const double l1 = lam(n - 1);
        if (!(l1 > 0))
            throw InvalidParameter("extract_rank1: covariance has no positive eigenvalue");
        if (lam(0) < -1e-6 * l1)
            throw InvalidParameter("extract_rank1: covariance is not positive semidefinite");

        Rank1Result r;
        r.rank_ratio = n > 1 ? std::max(lam(n - 2), 0.0) / l1 : 0.0;
        auto score = [&](const Eigen::VectorXcd &w, double &gt, double &gr)
        {
            const Eigen::MatrixXcd ww = w * w.adjoint();
            gt = covariance_comm_snr(ops, ww, scene);
            gr = covariance_sensing_snr(ops, ww, scene);
        };
        const Eigen::VectorXcd v1 = es.eigenvectors().col(n - 1);
        if (r.rank_ratio <= tol)
        {
            r.w = std::sqrt(std::min(l1, scene.power_budget)) * v1;
            score(r.w, r.gamma_t, r.gamma_r);
            return r;
        }

        // Both SNRs grow with the beam power, so every candidate is pushed to the full budget
        r.randomized = true;
        const double P = scene.power_budget;
        const Eigen::MatrixXcd F = es.eigenvectors() * lam.cwiseMax(0.0).cwiseSqrt().asDiagonal();
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, std::sqrt(0.5));
        const double floor = scene.sensing_floor * (1 - 1e-6);
        bool found = false;
        double best_t = -1, best_r = -1;
        Eigen::VectorXcd best_w, fallback;
        for (int k = 0; k <= candidates; ++k)
        {
            Eigen::VectorXcd w;
            if (k == 0)
                w = v1;
            else
            {
                Eigen::VectorXcd z(n);
                for (Eigen::Index i = 0; i < n; ++i)
                    z(i) = {g(rng), g(rng)};
                w = F * z;
            }
            const double nw = w.norm();
            if (!(nw > 0))
                continue;
            w *= std::sqrt(P) / nw;
            double gt, gr;
            score(w, gt, gr);
            if (gr >= floor && gt > best_t)
            {
                found = true;
                best_t = gt;
                best_w = w;
            }
            if (gr > best_r)
            {
                best_r = gr;
                fallback = w;
            }
        }
        if (!found)
            throw ExtractionFailure("extract_rank1: no randomized candidate meets the sensing floor", fallback);
        r.w = best_w;
        score(r.w, r.gamma_t, r.gamma_r);
        r.rank_gap_warning = r.gamma_t < 0.99 * covariance_comm_snr(ops, W, scene);
        return r;
    }

    RefineResult refine_beam(const Eigen::VectorXcd &w0, const ArrayLayout &layout, const SceneConfig &scene,
                             const RefineOptions &opts)
    {
        scene.validate();
        validate_layout(layout, scene);
        if (w0.size() != scene.n_tx)
            throw InvalidParameter("refine_beam: beam dimension does not match n_tx");
        const int n = scene.n_tx;
        const double G = scene.sensing_floor, N0 = scene.radar_noise;
        const double s2 = scene.target_gain * scene.target_gain;
        const double d = std::abs(scene.clutter_gain);
        const Eigen::VectorXcd h = channel(layout, scene);
        const Eigen::MatrixXcd AP = response_matrix(layout, scene.theta_target, scene);
        const Eigen::MatrixXcd AC = response_matrix(layout, scene.theta_clutter, scene);

        auto feasible = [&](const Eigen::VectorXcd &w)
        {
            if (w.squaredNorm() > scene.power_budget * (1 + 1e-9))
                return false;
            if (G == 0)
                return true;
            try
            {
                return mvdr_snr_closedform(w, layout, scene) >= G * (1 - 1e-9);
            }
            catch (const DegenerateDirection &)
            {
                return false;
            }
        };

        RefineResult r;
        r.w = w0;
        r.gamma_t = comm_snr(w0, layout, scene);
        if (!feasible(w0))
            return r;

        // b^H w as (real, imaginary) affine expressions of the stacked (Re w, Im w)
        auto inner = [&](const Eigen::VectorXcd &b, const std::vector<conic::Var> &wr, const std::vector<conic::Var> &wi)
        {
            LinExpr re, im;
            for (int i = 0; i < n; ++i)
            {
                re += b(i).real() * LinExpr(wr[i]) + b(i).imag() * LinExpr(wi[i]);
                im += b(i).real() * LinExpr(wi[i]) - b(i).imag() * LinExpr(wr[i]);
            }
            return std::make_pair(re, im);
        };

        for (int it = 0; it < opts.max_iter; ++it)
        {
            const Eigen::VectorXcd &wk = r.w;
            ConicProgram prog;
            std::vector<conic::Var> wr, wi;
            for (int i = 0; i < n; ++i)
            {
                wr.push_back(prog.add_scalar("wr"));
                wi.push_back(prog.add_scalar("wi"));
            }
            std::vector<LinExpr> all;
            for (int i = 0; i < n; ++i)
            {
                all.push_back(LinExpr(wr[i]));
                all.push_back(LinExpr(wi[i]));
            }
            prog.add_soc(LinExpr(std::sqrt(scene.power_budget)), all);

            if (G > 0)
            {
                const Eigen::VectorXcd u = mvdr_combiner(wk, layout, scene).u.u;
                const Eigen::VectorXcd b = AP.adjoint() * u;
                const Eigen::VectorXcd c = AC.adjoint() * u;
                const std::complex<double> b0 = b.dot(wk);
                const auto [bre, bim] = inner(b, wr, wi);
                // tangent of |b^H w|^2 at wk, scaled by 1 / (Gamma N0)
                const LinExpr tangent = 2.0 * (b0.real() * bre + b0.imag() * bim) - std::norm(b0);
                const LinExpr lhs = (s2 / (G * N0)) * tangent - 1.0;
                if (d > 0)
                {
                    const auto [cre, cim] = inner(c, wr, wi);
                    const double sc = d / std::sqrt(N0);
                    prog.add_rotated_soc(lhs, LinExpr(0.5), {sc * cre, sc * cim});
                }
                else
                    prog.add_nonneg(lhs);
            }
            const std::complex<double> h0 = h.dot(wk);
            const double hn = std::max(std::abs(h0), 1e-300);
            const auto [hre, him] = inner(h, wr, wi);
            prog.maximize((h0.real() / hn) * hre + (h0.imag() / hn) * him);

            const conic::ConicSolution sol = prog.solve(opts.solver);
            if (sol.status != conic::Status::optimal)
                break;
            Eigen::VectorXcd w(n);
            for (int i = 0; i < n; ++i)
                w(i) = {sol.value(wr[i]), sol.value(wi[i])};
            if (w.squaredNorm() > scene.power_budget)
                w *= std::sqrt(scene.power_budget) / w.norm();
            const double g = comm_snr(w, layout, scene);
            if (!(g > r.gamma_t) || !feasible(w))
                break;
            const double gain = g - r.gamma_t;
            r.w = w;
            r.gamma_t = g;
            ++r.steps;
            if (gain <= opts.tol * std::max(1.0, g))
                break;
        }
        return r;
    }
}
