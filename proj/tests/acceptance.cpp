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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Usage: acceptance [output-dir]

#include "maisac/conic_program.hpp"
#include "maisac/experiment.hpp"
#include "maisac/position_optimizer.hpp"
#include "maisac/rx_combiner.hpp"
#include "maisac/scene_io.hpp"
#include "maisac/tx_beamformer.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#ifndef MAISAC_CONFIG_DIR
#define MAISAC_CONFIG_DIR "configs"
#endif

using namespace maisac;
namespace fs = std::filesystem;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
        double seconds = 0;
    };

    double now()
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
    }

    std::string fmt(const char *f, double a, double b = 0, double c = 0, double d = 0)
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, f, a, b, c, d);
        return buf;
    }

    double median(std::vector<double> v)
    {
        std::sort(v.begin(), v.end());
        const size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }

    struct Suite
    {
        std::string name;
        ExperimentSpec spec;
        ExperimentResult res;
        std::vector<Snapshot> snapshots; // read back from disk
        double seconds = 0;
    };

    Suite run_suite(const ExperimentSpec &spec, const fs::path &dir)
    {
        Suite s;
        s.name = spec.name;
        s.spec = spec;
        std::cerr << "running " << spec.name << " ...\n";
        const double t0 = now();
        s.res = run_experiment(spec);
        s.seconds = now() - t0;
        write_outputs(spec, s.res, dir.string());
        s.snapshots = parse_snapshots(read_text_file((dir / (spec.name + "_snapshots.jsonl")).string()));
        return s;
    }

    // capacity per (scheme, seed) along the axis
    std::map<std::pair<Scheme, std::uint64_t>, std::vector<double>> curves(const Suite &s)
    {
        std::map<std::pair<Scheme, std::uint64_t>, std::vector<double>> out;
        for (const CellResult &c : s.res.cells) // value-major order
            out[{c.scheme, c.seed}].push_back(c.result.capacity);
        return out;
    }

    Eigen::MatrixXcd interference(const Eigen::VectorXcd &w, const ArrayLayout &l, const SceneConfig &s)
    {
        const Eigen::VectorXcd c = response_matrix(l, s.theta_clutter, s) * w;
        return s.clutter_gain * s.clutter_gain * c * c.adjoint() +
               s.radar_noise * Eigen::MatrixXcd::Identity(s.n_rx, s.n_rx);
    }

    Outcome sherman_morrison()
    {
        std::mt19937_64 rng(101);
        std::uniform_int_distribution<int> nt(1, 8);
        double worst = 0;
        const int nrs[] = {2, 4, 8};
        for (int i = 0; i < 100; ++i)
        {
            SceneConfig s = testing::random_scene(nt(rng), nrs[i % 3], rng);
            const ArrayLayout l = testing::random_layout(s, rng);
            const Eigen::VectorXcd w = testing::random_complex(s.n_tx, rng);
            const Eigen::MatrixXcd E = sherman_morrison_expand(w, l, s);
            worst = std::max(worst, (E - interference(w, l, s).inverse()).cwiseAbs().maxCoeff());
        }
        return {worst <= 1e-10, fmt("max abs error %.2e over 100 instances", worst)};
    }

    Outcome mvdr_optimality()
    {
        std::mt19937_64 rng(202);
        std::uniform_int_distribution<int> dim(1, 8);
        double worst_rel = 0, worst_dom = 0;
        for (int i = 0; i < 50; ++i)
        {
            SceneConfig s = testing::random_scene(dim(rng), dim(rng), rng);
            const ArrayLayout l = testing::random_layout(s, rng);
            const Eigen::VectorXcd w = testing::random_complex(s.n_tx, rng);
            const Eigen::VectorXcd p = response_matrix(l, s.theta_target, s) * w;
            Eigen::LLT<Eigen::MatrixXcd> llt(interference(w, l, s));
            const Eigen::MatrixXcd Li = llt.matrixL().solve(Eigen::MatrixXcd::Identity(s.n_rx, s.n_rx));
            const Eigen::MatrixXcd S = s.target_gain * s.target_gain * p * p.adjoint();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Li * S * Li.adjoint());
            const double lmax = es.eigenvalues().maxCoeff();
            const double g = mvdr_snr_closedform(w, l, s);
            worst_rel = std::max(worst_rel, std::abs(g - lmax) / lmax);
            for (int k = 0; k < 1000; ++k)
            {
                const double r = sensing_snr(w, testing::random_unit(s.n_rx, rng), l, s);
                worst_dom = std::max(worst_dom, (r - g) / g);
            }
        }
        return {worst_rel <= 1e-8 && worst_dom <= 1e-12,
                fmt("closed form vs eigenvalue %.2e rel, best random combiner exceeds by %.2e rel", worst_rel,
                    worst_dom)};
    }

    Outcome sdr_tightness()
    {
        std::mt19937_64 rng(303);
        std::uniform_real_distribution<double> share(0.1, 0.9);
        const int sizes[] = {2, 4, 8};
        int agree = 0, rank_one = 0, honest = 0, within = 0, solved = 0;
        double worst = 0;
        for (int i = 0; i < 100; ++i)
        {
            const int n = sizes[i % 3];
            SceneConfig s = testing::random_scene(n, n, rng);
            const ArrayLayout l = testing::random_layout(s, rng);
            const PsiOperators ops = build_psi_operators(l, s);
            const SensingCapacity cap = max_sensing(ops, s);
            const Eigen::MatrixXcd mrt = s.power_budget * ops.H / ops.H.trace().real();
            const double g0 = covariance_sensing_snr(ops, mrt, s);
            // floors strictly between the MRT value and the attainable maximum, so the constraint binds
            s.sensing_floor = g0 + share(rng) * (cap.gamma_max - g0);
            const TxSolveResult d = solve_W_direct(ops, s);
            const TxSolveResult r = solve_W_sca(ops, s, initial_omega(ops, s, feasible_start(ops, s, cap)));
            if (d.status != TxStatus::optimal || r.status != TxStatus::optimal)
                continue;
            ++solved;
            const double rel = std::abs(r.objective - d.objective) / d.objective;
            worst = std::max(worst, rel);
            agree += rel <= 1e-5;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r.W);
            const Eigen::VectorXd ev = es.eigenvalues();
            if (ev(ev.size() - 2) / ev(ev.size() - 1) <= 1e-6)
            {
                ++rank_one;
                continue;
            }
            // contract: within 1% of the relaxation, or the warning is attached, or a typed failure
            try
            {
                const Rank1Result x = extract_rank1(r.W, ops, s, 1e-6, std::uint64_t(i));
                const bool close = x.gamma_t >= 0.99 * covariance_comm_snr(ops, r.W, s);
                within += close;
                honest += close != x.rank_gap_warning;
            }
            catch (const ExtractionFailure &e)
            {
                honest += e.best_candidate.size() == n;
            }
        }
        const int rest = solved - rank_one;
        const bool pass = solved == 100 && agree == 100 && rank_one >= 95 && honest == rest;
        return {pass, fmt("SCA vs direct worst %.2e rel (%.0f/100 within 1e-5); rank one %.0f/100 (95 needed); ", worst,
                          agree, rank_one) +
                          fmt("of the other %.0f, %.0f follow the extraction contract and %.0f within 1%% of the "
                              "relaxation",
                              rest, honest, within)};
    }

    // best gamma_t over a 0.001 lambda grid of feasible transmit pairs for a fixed two-antenna beam
    double grid_best(const Eigen::VectorXcd &w, const SceneConfig &s)
    {
        const int steps = int(std::lround(s.tx_aperture / 0.001));
        const double k = s.wavenumber() * std::cos(s.theta_user);
        std::vector<std::complex<double>> p(steps + 1);
        for (int i = 0; i <= steps; ++i)
            p[i] = std::conj(s.path_gain * std::polar(1.0, k * s.tx_aperture * i / steps));
        const int gap = int(std::ceil(s.min_spacing / s.tx_aperture * steps - 1e-9));
        double best = 0;
        for (int i = 0; i <= steps; ++i)
            for (int j = i + gap; j <= steps; ++j)
                best = std::max(best, std::norm(p[i] * w(0) + p[j] * w(1)));
        return best / s.comm_noise;
    }

    Outcome position_oracle()
    {
        std::mt19937_64 rng(505);
        double worst = 1, worst_mismatched = 1;
        PositionOptions o;
        o.max_iter = 200;
        o.tol = 1e-10;
        for (int seed = 0; seed < 10; ++seed)
        {
            SceneConfig s = testing::random_scene(2, 2, rng);
            s.sensing_floor = 0;
            s.tx_aperture = 3;
            const ArrayLayout start = testing::random_layout(s, rng);
            const ArrayLayout other = testing::random_layout(s, rng);

            // MRT beam of the layout being optimized, held fixed during the position step
            const Eigen::VectorXcd h = channel(start, s);
            const Eigen::VectorXcd w = std::sqrt(s.power_budget) * h / h.norm();
            worst = std::min(worst, optimize_positions(Side::transmit, start, w, s, o).objective / grid_best(w, s));

            // informational: the MRT beam of another layout, where the step is a local search
            const Eigen::VectorXcd h2 = channel(other, s);
            const Eigen::VectorXcd w2 = std::sqrt(s.power_budget) * h2 / h2.norm();
            worst_mismatched = std::min(worst_mismatched,
                                        optimize_positions(Side::transmit, start, w2, s, o).objective / grid_best(w2, s));
        }
        return {worst >= 0.98, fmt("worst SCA / grid ratio %.5f over 10 seeds (beam of another layout: %.5f)", worst,
                                   worst_mismatched)};
    }

    Outcome fig1_property(const Suite &s)
    {
        bool ok = true;
        std::map<double, std::vector<double>> its;
        int worst_it = 0;
        for (const CellResult &c : s.res.cells)
        {
            if (c.status != "converged" || c.result.iterations > 30)
                ok = false;
            double prev = c.result.initial_gamma_t;
            for (const BcdIteration &it : c.result.trace)
            {
                if (it.gamma_t < prev)
                    ok = false;
                prev = it.gamma_t;
            }
            worst_it = std::max(worst_it, c.result.iterations);
            if (c.scheme == Scheme::ma)
                its[c.value].push_back(c.result.iterations);
        }
        const double m4 = median(its[4]), m8 = median(its[8]);
        return {ok && m8 >= m4,
                fmt("all cells converged, monotone, at most %.0f passes; median passes N=4 %.1f, N=8 %.1f",
                    worst_it, m4, m8)};
    }

    Outcome fig2_property(const Suite &s)
    {
        auto cv = curves(s);
        double worst_rise = -1e300, worst_gap = 1e300;
        bool ok = s.res.all_ok();
        for (const auto &[key, c] : cv)
            for (size_t i = 1; i < c.size(); ++i)
                worst_rise = std::max(worst_rise, c[i] - c[i - 1]);
        for (std::uint64_t seed : s.spec.seeds)
        {
            const auto &ma = cv[{Scheme::ma, seed}];
            const auto &fpa = cv[{Scheme::fpa, seed}];
            for (size_t i = 0; i < ma.size(); ++i)
                worst_gap = std::min(worst_gap, ma[i] - fpa[i]);
        }
        ok = ok && worst_rise <= 1e-7 && worst_gap >= -1e-7 && s.seconds < 600;
        return {ok, fmt("largest capacity rise along the floor %.2e, min MA - FPA %.2e, %.0f s", worst_rise, worst_gap,
                        s.seconds)};
    }

    Outcome fig3_property(const Suite &s)
    {
        auto cv = curves(s);
        double worst_drop = 1e300;
        for (const auto &[key, c] : cv)
            for (size_t i = 1; i < c.size(); ++i)
                worst_drop = std::min(worst_drop, c[i] - c[i - 1]);
        double ma_gd = 1e300, gd_zf = 1e300;
        for (size_t i = 0; i < s.spec.values.size(); ++i)
        {
            std::vector<double> ma, gd, zf;
            for (std::uint64_t seed : s.spec.seeds)
            {
                ma.push_back(cv[{Scheme::ma, seed}][i]);
                gd.push_back(cv[{Scheme::gradient, seed}][i]);
                zf.push_back(cv[{Scheme::zf, seed}][i]);
            }
            ma_gd = std::min(ma_gd, median(ma) - median(gd));
            gd_zf = std::min(gd_zf, median(gd) - median(zf));
        }
        const bool ok = s.res.all_ok() && worst_drop >= -1e-7 && ma_gd >= -1e-7 && gd_zf >= -1e-7;
        return {ok, fmt("smallest capacity step in P %.2e; min median MA - GD %.2e, GD - ZF %.2e", worst_drop, ma_gd,
                        gd_zf)};
    }

    // exact re-evaluation of the stored snapshots
    Outcome sensing_feasibility(const std::vector<const Suite *> &suites)
    {
        int runs = 0, bad = 0, mismatch = 0;
        double worst = 1e300;
        for (const Suite *s : suites)
            for (size_t i = 0; i < s->res.cells.size(); ++i)
            {
                const CellResult &c = s->res.cells[i];
                const Snapshot &p = s->snapshots.at(i);
                if (!c.ok() || p.w.size() == 0)
                    continue;
                const SnrReport r = evaluate(p.w, p.u, p.layout, p.scene);
                if (std::abs(r.gamma_t - p.gamma_t) > 1e-9 * std::max(1.0, p.gamma_t) ||
                    std::abs(r.gamma_r - p.gamma_r) > 1e-9 * std::max(1.0, p.gamma_r))
                    ++mismatch;
                if (c.scheme == Scheme::zf)
                    continue; // the floor is not part of zero forcing
                ++runs;
                const double margin = r.gamma_r / std::max(p.scene.sensing_floor, 1e-300) - 1;
                if (p.scene.sensing_floor > 0)
                    worst = std::min(worst, margin);
                if (r.gamma_r < p.scene.sensing_floor * (1 - 1e-6))
                    ++bad;
            }
        return {bad == 0 && mismatch == 0 && runs > 0,
                fmt("%.0f runs re-evaluated from snapshots, %.0f below the floor, worst relative margin %.2e, "
                    "%.0f snapshot mismatches",
                    runs, bad, worst, mismatch)};
    }

    Outcome audit_suite(const std::vector<const Suite *> &suites)
    {
        int audited = 0, failed = 0;
        std::string first;
        for (const Suite *s : suites)
            for (const CellResult &c : s->res.cells)
            {
                if (!c.ok())
                    continue;
                ++audited;
                for (const AuditCheck &a : audit_solution(c.result.w, c.result.u, c.result.layout, c.scene).checks)
                    if (!a.pass && !(c.scheme == Scheme::zf && a.name == "sensing_floor"))
                    {
                        ++failed;
                        if (first.empty())
                            first = " (first: " + s->name + " " + to_string(c.scheme) + " " + a.name + ")";
                        break;
                    }
            }

        // linearized spacing: any point feasible for the cuts is truly spaced
        std::mt19937_64 rng(909);
        std::uniform_int_distribution<int> nd(2, 6);
        std::uniform_real_distribution<double> u(-1, 1);
        int solves = 0, unsound = 0, unsolved = 0;
        for (int trial = 0; trial < 10000; ++trial)
        {
            const int n = nd(rng);
            const double D = 0.5, L = n * 1.0;
            const Eigen::VectorXd x0 = testing::random_positions(n, L, D, rng);
            conic::ConicProgram p;
            std::vector<conic::Var> x;
            conic::LinExpr obj;
            for (int i = 0; i < n; ++i)
            {
                x.push_back(p.add_scalar("x"));
                p.add_nonneg(conic::LinExpr(x[i]));
                p.add_nonneg(L - conic::LinExpr(x[i]));
                obj += u(rng) * conic::LinExpr(x[i]);
            }
            for (const SpacingCut &c : linearize_min_distance(x0, D))
                p.add_nonneg(c.sign * (conic::LinExpr(x[c.k]) - conic::LinExpr(x[c.l])) - c.bound);
            p.minimize(obj);
            const conic::ConicSolution sol = p.solve();
            if (sol.status != conic::Status::optimal)
            {
                ++unsolved;
                continue;
            }
            ++solves;
            for (int k = 0; k < n; ++k)
                for (int l = k + 1; l < n; ++l)
                    if (std::abs(sol.value(x[k]) - sol.value(x[l])) < D * (1 - 1e-7))
                    {
                        ++unsound;
                        k = n;
                        break;
                    }
        }
        return {failed == 0 && audited > 0 && unsound == 0 && unsolved == 0,
                fmt("%.0f solutions audited, %.0f failing", audited, failed) + first +
                    fmt("; spacing cuts: %.0f solves, %.0f unsound, %.0f unsolved", solves, unsound, unsolved)};
    }

    Outcome determinism(const std::vector<const Suite *> &suites, const fs::path &out)
    {
        int compared = 0, differing = 0;
        std::string which;
        for (const Suite *s : suites)
        {
            ExperimentSpec spec = s->spec;
            spec.threads = spec.threads == 1 ? 2 : 1; // a different worker count on purpose
            const fs::path dir = out / "rerun";
            std::cerr << "re-running " << spec.name << " ...\n";
            write_outputs(spec, run_experiment(spec), dir.string());
            for (const std::string suffix : {".csv", "_trace.csv", "_snapshots.jsonl"})
            {
                const std::string f = spec.name + suffix;
                ++compared;
                if (read_text_file((out / f).string()) != read_text_file((dir / f).string()))
                {
                    ++differing;
                    which += " " + f;
                }
            }
        }
        return {differing == 0, fmt("%.0f output files compared byte for byte, %.0f differ", compared, differing) + which};
    }

    // Small random scenes with an active floor, run through every scheme
    ExperimentSpec random_suite_spec()
    {
        ExperimentSpec e;
        e.name = "random_scenes";
        e.scene.n_tx = e.scene.n_rx = 4;
        e.scene.tx_aperture = e.scene.rx_aperture = 4;
        e.scene.sensing_floor = 0.6;
        e.floor_mode = FloorMode::relative;
        e.axis = SweepAxis::user_angle;
        e.values = {25, 70, 110, 150};
        e.schemes = {Scheme::ma, Scheme::fpa, Scheme::gradient, Scheme::zf};
        e.seeds = {0, 1, 2};
        e.user_jitter_deg = 10;
        return e;
    }
}

int main(int argc, char **argv)
{
    const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
    fs::create_directories(out);
    const std::string cfg = MAISAC_CONFIG_DIR;

    std::vector<std::pair<std::string, std::function<Outcome()>>> early = {
        {"Sherman-Morrison expansion matches the dense inverse", sherman_morrison},
        {"MVDR closed form is the optimal combiner", mvdr_optimality},
        {"relaxation is tight and SCA matches the direct solve", sdr_tightness}};
    std::map<int, Outcome> outcomes;
    std::map<int, std::string> titles;
    const double limits[] = {1, 5, 120};
    for (int i = 0; i < 3; ++i)
    {
        std::cerr << "criterion " << i + 1 << " ...\n";
        const double t0 = now();
        Outcome o = early[i].second();
        o.seconds = now() - t0;
        if (o.seconds >= limits[i])
        {
            o.pass = false;
            o.detail += fmt("; runtime %.1f s over the %.0f s limit", o.seconds, limits[i]);
        }
        outcomes[i + 1] = o;
        titles[i + 1] = early[i].first;
    }
    {
        std::cerr << "criterion 5 ...\n";
        const double t0 = now();
        Outcome o = position_oracle();
        o.seconds = now() - t0;
        if (o.seconds >= 120)
        {
            o.pass = false;
            o.detail += "; over the 120 s limit";
        }
        outcomes[5] = o;
        titles[5] = "two-antenna position update matches the exhaustive grid";
    }

    Suite fig1, fig2, fig3, rnd;
    try
    {
        fig1 = run_suite(load_experiment(cfg + "/fig1.json"), out);
        fig2 = run_suite(load_experiment(cfg + "/fig2.json"), out);
        fig3 = run_suite(load_experiment(cfg + "/fig3.json"), out);
        rnd = run_suite(random_suite_spec(), out);
    }
    catch (const std::exception &e)
    {
        std::cout << "FAIL could not run the sweeps: " << e.what() << "\n";
        return 1;
    }
    const std::vector<const Suite *> all{&fig1, &fig2, &fig3, &rnd};

    auto timed = [](const std::function<Outcome()> &f)
    {
        const double t0 = now();
        Outcome o = f();
        o.seconds = now() - t0;
        return o;
    };
    outcomes[6] = fig1_property(fig1);
    outcomes[6].seconds = fig1.seconds;
    titles[6] = "convergence within 30 passes, larger arrays take at least as long";
    outcomes[7] = fig2_property(fig2);
    outcomes[7].seconds = fig2.seconds;
    titles[7] = "capacity falls with the sensing floor, movable >= fixed";
    outcomes[8] = fig3_property(fig3);
    outcomes[8].seconds = fig3.seconds;
    titles[8] = "capacity grows with power, movable >= gradient >= zero forcing";
    outcomes[4] = timed([&]
                        { return sensing_feasibility(all); });
    titles[4] = "every converged run meets the sensing floor";
    std::cerr << "criterion 9 ...\n";
    outcomes[9] = timed([&]
                        { return audit_suite(all); });
    titles[9] = "constraint audit and spacing-cut soundness";
    outcomes[10] = timed([&]
                         { return determinism({&fig1, &fig3}, out); });
    titles[10] = "seeded reruns reproduce the CSVs";

    int failed = 0;
    for (int i = 1; i <= 10; ++i)
    {
        const Outcome &o = outcomes[i];
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i << ": " << titles[i] << " | " << o.detail
                  << fmt(" | %.1f s", o.seconds) << "\n";
    }
    std::cout << (10 - failed) << "/10 criteria pass\n";
    return failed == 0 ? 0 : 1;
}
