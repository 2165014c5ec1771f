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

#include "catch_amalgamated.hpp"
#include "maisac/bcd.hpp"
#include "maisac/conic_program.hpp"
#include "maisac/errors.hpp"
#include "maisac/rx_combiner.hpp"
#include "maisac/tx_beamformer.hpp"
#include "test_support.hpp"

using namespace maisac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    double mrt_sensing(const PsiOperators &ops, const SceneConfig &s)
    {
        const Eigen::MatrixXcd W = s.power_budget * ops.H / ops.H.trace().real();
        return covariance_sensing_snr(ops, W, s);
    }

    // random scene with a floor between the MRT value and the attainable maximum, so the constraint binds
    struct Instance
    {
        SceneConfig scene;
        ArrayLayout layout;
        PsiOperators ops;
        SensingCapacity cap;
    };

    Instance active_instance(int nt, int nr, std::mt19937_64 &rng, double lo = 0.1, double hi = 0.9)
    {
        Instance in;
        in.scene = testing::random_scene(nt, nr, rng);
        in.layout = testing::random_layout(in.scene, rng);
        in.ops = build_psi_operators(in.layout, in.scene);
        in.cap = max_sensing(in.ops, in.scene);
        const double g0 = mrt_sensing(in.ops, in.scene);
        std::uniform_real_distribution<double> u(lo, hi);
        in.scene.sensing_floor = g0 + u(rng) * (in.cap.gamma_max - g0);
        return in;
    }

    TxSolveResult sca(const PsiOperators &ops, const SceneConfig &s, const SensingCapacity &cap,
                      const ScaOptions &o = {})
    {
        return solve_W_sca(ops, s, initial_omega(ops, s, feasible_start(ops, s, cap)), o);
    }
}

TEST_CASE("identical target and clutter directions give identical operators")
{
    std::mt19937_64 rng(1);
    SceneConfig s = testing::random_scene(4, 3, rng);
    s.theta_clutter = s.theta_target;
    const auto ops = build_psi_operators(testing::random_layout(s, rng), s);
    REQUIRE((ops.A1 - ops.A2).norm() <= 1e-12 * ops.A2.norm());
    REQUIRE((ops.A3 - ops.A2).norm() <= 1e-12 * ops.A2.norm());
}

TEST_CASE("orthogonal receive responses make the cross operator vanish")
{
    SceneConfig s;
    s.n_tx = 3;
    s.n_rx = 2;
    s.rx_aperture = 2.5;
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(3, 0, 1);
    auto inner = [&](double gap)
    {
        const ArrayLayout L(x, Eigen::Vector2d(0, gap));
        return std::abs(rx_steering(L, s.theta_target, s).dot(rx_steering(L, s.theta_clutter, s)));
    };
    // golden section on the gap; the phase difference crosses pi once on [D, 2.5]
    double a = s.min_spacing, b = s.rx_aperture;
    const double r = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it)
    {
        const double c = b - r * (b - a), d = a + r * (b - a);
        if (inner(c) < inner(d))
            b = d;
        else
            a = c;
    }
    const double gap = 0.5 * (a + b);
    REQUIRE(inner(gap) < 1e-9);
    const auto ops = build_psi_operators(ArrayLayout(x, Eigen::Vector2d(0, gap)), s);
    REQUIRE(ops.A1.cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE(ops.A2.norm() > 1);
}

TEST_CASE("trace of the target operator is N_R N_T")
{
    std::mt19937_64 rng(2);
    for (auto [nt, nr] : {std::pair{2, 3}, {4, 4}, {8, 5}})
    {
        SceneConfig s = testing::random_scene(nt, nr, rng);
        const auto ops = build_psi_operators(testing::random_layout(s, rng), s);
        REQUIRE_THAT(ops.A2.trace().real(), WithinRel(double(nt * nr), 1e-13));
        REQUIRE(std::abs(ops.A2.trace().imag()) < 1e-12);
        REQUIRE((ops.A2 - ops.A2.adjoint()).norm() < 1e-12);
        REQUIRE((ops.A3 - ops.A3.adjoint()).norm() < 1e-12);
    }
}

TEST_CASE("zero sensing floor gives the MRT covariance")
{
    std::mt19937_64 rng(3);
    SceneConfig s = testing::random_scene(4, 4, rng);
    s.sensing_floor = 0;
    s.power_budget = 2;
    const ArrayLayout L = testing::random_layout(s, rng);
    const auto ops = build_psi_operators(L, s);
    const Eigen::VectorXcd h = channel(L, s);
    const Eigen::MatrixXcd Wm = s.power_budget * h * h.adjoint() / h.squaredNorm();
    const double expect = s.power_budget * std::norm(s.path_gain) * 4 / s.comm_noise;
    for (const auto &r : {solve_W_direct(ops, s), solve_W_sca(ops, s, 1.0)})
    {
        REQUIRE(r.status == TxStatus::optimal);
        REQUIRE_THAT(r.objective, WithinRel(expect, 1e-7));
        REQUIRE((r.W - Wm).norm() <= 1e-6 * Wm.norm());
    }
}

TEST_CASE("SCA matches the direct solve on small random scenes")
{
    std::mt19937_64 rng(4);
    for (int k = 0; k < 20; ++k)
    {
        const Instance in = active_instance(2, 2, rng);
        const auto d = solve_W_direct(in.ops, in.scene);
        const auto r = sca(in.ops, in.scene, in.cap);
        REQUIRE(d.status == TxStatus::optimal);
        REQUIRE(r.status == TxStatus::optimal);
        REQUIRE_THAT(r.objective, WithinRel(d.objective, 1e-5));
    }
}

TEST_CASE("SCA objective trace is non-decreasing")
{
    std::mt19937_64 rng(5);
    for (int k = 0; k < 6; ++k)
    {
        const Instance in = active_instance(4, 4, rng);
        const auto r = sca(in.ops, in.scene, in.cap);
        REQUIRE(!r.objective_trace.empty());
        for (size_t i = 1; i < r.objective_trace.size(); ++i)
            REQUIRE(r.objective_trace[i] >= r.objective_trace[i - 1] - 1e-9 * std::abs(r.objective_trace[i - 1]));
        REQUIRE_THAT(r.objective, WithinRel(r.objective_trace.back(), 1e-12));
    }
}

TEST_CASE("default scene meets an active floor with no spare margin")
{
    SceneConfig s;
    const ArrayLayout L = ArrayLayout::uniform(s.n_tx, s.n_rx, s.min_spacing);
    const auto ops = build_psi_operators(L, s);
    const auto cap = max_sensing(ops, s);
    s.sensing_floor = 3000;
    REQUIRE(mrt_sensing(ops, s) < s.sensing_floor);
    const auto r = sca(ops, s, cap);
    REQUIRE(r.status == TxStatus::optimal);
    REQUIRE_THAT(r.objective, WithinRel(solve_W_direct(ops, s).objective, 1e-5));
    const double relaxed = covariance_sensing_snr(ops, r.W, s);
    REQUIRE(relaxed >= s.sensing_floor * (1 - 1e-6));
    REQUIRE(relaxed - s.sensing_floor <= 1e-6 * s.sensing_floor);
    const auto w = extract_rank1(r.W, ops, s);
    REQUIRE(mvdr_snr_closedform(w.w, L, s) >= s.sensing_floor * (1 - 1e-6));
    REQUIRE_THAT(w.gamma_r, WithinRel(mvdr_snr_closedform(w.w, L, s), 1e-9));
}

TEST_CASE("without clutter the sensing constraint is linear in the target power")
{
    std::mt19937_64 rng(6);
    SceneConfig s = testing::random_scene(4, 3, rng);
    s.clutter_gain = 0;
    const auto ops = build_psi_operators(testing::random_layout(s, rng), s);
    const auto cap = max_sensing(ops, s);
    const double g0 = mrt_sensing(ops, s);
    s.sensing_floor = 0.5 * (g0 + cap.gamma_max);

    conic::ConicProgram p;
    const auto W = p.add_hermitian("W", 4);
    p.add_psd(W);
    p.add_nonneg(s.power_budget - p.trace(W));
    const double k = s.target_gain * s.target_gain / s.radar_noise;
    p.add_nonneg(k * p.trace_product(ops.A2, W).first - s.sensing_floor);
    p.maximize((1.0 / s.comm_noise) * p.trace_product(ops.H, W).first);
    const auto sol = p.solve();
    REQUIRE(sol.status == conic::Status::optimal);

    const auto d = solve_W_direct(ops, s);
    const auto r = solve_W_sca(ops, s, 1.0);
    REQUIRE(d.status == TxStatus::optimal);
    REQUIRE_THAT(d.objective, WithinRel(sol.objective, 1e-6));
    REQUIRE_THAT(r.objective, WithinRel(sol.objective, 1e-6));
    REQUIRE(k * d.psi.psi2 >= s.sensing_floor * (1 - 1e-6));
}

TEST_CASE("relaxation bounds every feasible rank one beam")
{
    std::mt19937_64 rng(7);
    for (int k = 0; k < 5; ++k)
    {
        const Instance in = active_instance(2, 2, rng, 0.0, 0.6);
        const auto d = solve_W_direct(in.ops, in.scene);
        REQUIRE(d.status == TxStatus::optimal);
        int feasible = 0;
        for (int i = 0; i < 10000; ++i)
        {
            Eigen::VectorXcd w = testing::random_unit(2, rng) * std::sqrt(in.scene.power_budget);
            const Eigen::MatrixXcd ww = w * w.adjoint();
            if (covariance_sensing_snr(in.ops, ww, in.scene) < in.scene.sensing_floor)
                continue;
            ++feasible;
            REQUIRE(covariance_comm_snr(in.ops, ww, in.scene) <= d.objective * (1 + 1e-7));
        }
        REQUIRE(feasible > 0);
    }
}

TEST_CASE("an unreachable floor is reported infeasible")
{
    std::mt19937_64 rng(8);
    SceneConfig s = testing::random_scene(4, 4, rng);
    const auto ops = build_psi_operators(testing::random_layout(s, rng), s);
    const auto cap = max_sensing(ops, s);
    REQUIRE(cap.ok);
    s.sensing_floor = 1.5 * cap.gamma_max;
    REQUIRE(solve_W_direct(ops, s).status == TxStatus::infeasible);
    REQUIRE(solve_W_sca(ops, s, 1.0).status == TxStatus::infeasible);
    REQUIRE_THROWS_AS(solve_W_sca(ops, s, 0.0), InvalidParameter);
}

TEST_CASE("returned Psi values match the returned covariance")
{
    std::mt19937_64 rng(9);
    const Instance in = active_instance(4, 4, rng);
    for (const auto &r : {solve_W_direct(in.ops, in.scene), sca(in.ops, in.scene, in.cap)})
    {
        REQUIRE(r.status == TxStatus::optimal);
        const PsiValues pv = evaluate_psi(in.ops, r.W);
        const double scale = std::max(1.0, r.W.trace().real());
        REQUIRE(std::abs(pv.psi1 - r.psi.psi1) <= 1e-7 * scale);
        REQUIRE(std::abs(pv.psi2 - r.psi.psi2) <= 1e-7 * scale);
        REQUIRE(std::abs(pv.psi3 - r.psi.psi3) <= 1e-7 * scale);
        REQUIRE(r.W.trace().real() <= in.scene.power_budget * (1 + 1e-7));
        REQUIRE(covariance_sensing_snr(in.ops, r.W, in.scene) >= in.scene.sensing_floor * (1 - 1e-6));
    }
}

TEST_CASE("the AM-GM branch never beats the exact optimum")
{
    std::mt19937_64 rng(10);
    const Instance in = active_instance(4, 4, rng);
    ScaOptions o;
    o.am_gm_branch = true;
    const auto r = sca(in.ops, in.scene, in.cap, o);
    const auto d = solve_W_direct(in.ops, in.scene);
    REQUIRE(d.status == TxStatus::optimal);
    if (r.status == TxStatus::optimal || r.status == TxStatus::stalled)
    {
        REQUIRE(r.objective <= d.objective * (1 + 1e-6));
        REQUIRE(r.conservative == (r.objective < d.objective * (1 - 1e-5)));
    }
}

TEST_CASE("rank one covariance gives back its beam")
{
    std::mt19937_64 rng(11);
    SceneConfig s = testing::random_scene(4, 4, rng);
    s.sensing_floor = 0;
    const ArrayLayout L = testing::random_layout(s, rng);
    const auto ops = build_psi_operators(L, s);
    const Eigen::VectorXcd h = channel(L, s);
    const Eigen::VectorXcd w0 = std::sqrt(s.power_budget) * h / h.norm();
    const auto r = extract_rank1(w0 * w0.adjoint(), ops, s);
    REQUIRE(!r.randomized);
    REQUIRE(r.rank_ratio < 1e-12);
    REQUIRE_THAT(std::abs(r.w.dot(w0)), WithinRel(s.power_budget, 1e-10));
    REQUIRE_THAT(r.w.norm(), WithinRel(w0.norm(), 1e-10));
}

TEST_CASE("randomization recovers the dominant coordinate")
{
    SceneConfig s;
    s.n_tx = 2;
    s.sensing_floor = 0;
    PsiOperators ops;
    ops.A1 = ops.A2 = ops.A3 = Eigen::MatrixXcd::Zero(2, 2);
    ops.H = Eigen::MatrixXcd::Zero(2, 2);
    ops.H(0, 0) = 1;
    const Eigen::MatrixXcd W = Eigen::Vector2cd(0.5, 0.5).asDiagonal() * s.power_budget;
    const auto r = extract_rank1(W, ops, s, 1e-6, 3);
    REQUIRE(r.randomized);
    REQUIRE_THAT(r.rank_ratio, WithinAbs(1.0, 1e-12));
    REQUIRE(std::norm(r.w(0)) >= 0.95 * s.power_budget);
    REQUIRE(r.w.squaredNorm() <= s.power_budget * (1 + 1e-12));
}

TEST_CASE("randomization reports the best candidate when nothing is feasible")
{
    std::mt19937_64 rng(12);
    SceneConfig s = testing::random_scene(3, 3, rng);
    const auto ops = build_psi_operators(testing::random_layout(s, rng), s);
    s.sensing_floor = 2 * s.target_gain * s.target_gain * s.power_budget * 9 / s.radar_noise;
    const Eigen::MatrixXcd W = Eigen::MatrixXcd::Identity(3, 3) * (s.power_budget / 3);
    try
    {
        extract_rank1(W, ops, s);
        FAIL("expected an extraction failure");
    }
    catch (const ExtractionFailure &e)
    {
        REQUIRE(e.best_candidate.size() == 3);
        REQUIRE_THAT(e.best_candidate.squaredNorm(), WithinRel(s.power_budget, 1e-12));
    }
    REQUIRE_THROWS_AS(extract_rank1(-W, ops, s), InvalidParameter);
}

TEST_CASE("randomization is reproducible for a fixed seed")
{
    std::mt19937_64 rng(13);
    SceneConfig s = testing::random_scene(4, 4, rng);
    s.sensing_floor = 0;
    const auto ops = build_psi_operators(testing::random_layout(s, rng), s);
    const Eigen::MatrixXcd W = Eigen::MatrixXcd::Identity(4, 4) * 0.25;
    const auto a = extract_rank1(W, ops, s, 1e-6, 42);
    const auto b = extract_rank1(W, ops, s, 1e-6, 42);
    REQUIRE(a.w == b.w);
}

TEST_CASE("refinement without a floor climbs to the matched beam")
{
    std::mt19937_64 rng(41);
    for (int k = 0; k < 5; ++k)
    {
        SceneConfig s = testing::random_scene(4, 3, rng);
        s.sensing_floor = 0;
        const ArrayLayout l = testing::random_layout(s, rng);
        const Eigen::VectorXcd w0 = 0.5 * testing::random_unit(4, rng);
        const RefineResult r = refine_beam(w0, l, s);
        const double mrt = s.power_budget * channel(l, s).squaredNorm() / s.comm_noise;
        CHECK_THAT(r.gamma_t, WithinRel(mrt, 1e-6));
        CHECK(r.w.squaredNorm() <= s.power_budget * (1 + 1e-9));
    }
}

TEST_CASE("refinement keeps the floor and never lowers the link")
{
    std::mt19937_64 rng(42);
    int climbed = 0;
    for (int k = 0; k < 20; ++k)
    {
        const Instance in = active_instance(3, 3, rng);
        const TxSolveResult d = solve_W_direct(in.ops, in.scene);
        REQUIRE(d.status == TxStatus::optimal);
        Rank1Result x;
        try
        {
            x = extract_rank1(d.W, in.ops, in.scene, 1e-6, k);
        }
        catch (const ExtractionFailure &)
        {
            continue;
        }
        const double start = comm_snr(x.w, in.layout, in.scene);
        const RefineResult r = refine_beam(x.w, in.layout, in.scene);
        CHECK(r.gamma_t >= start);
        CHECK_THAT(r.gamma_t, WithinRel(comm_snr(r.w, in.layout, in.scene), 1e-12));
        CHECK(mvdr_snr_closedform(r.w, in.layout, in.scene) >= in.scene.sensing_floor * (1 - 1e-9));
        CHECK(r.w.squaredNorm() <= in.scene.power_budget * (1 + 1e-9));
        // still below the relaxation
        CHECK(r.gamma_t <= d.objective * (1 + 1e-6));
        climbed += r.steps > 0;
    }
    CHECK(climbed > 0);
}

TEST_CASE("refinement leaves a beam below the floor alone")
{
    std::mt19937_64 rng(43);
    const Instance in = active_instance(3, 3, rng, 0.8, 0.9);
    const Eigen::VectorXcd h = channel(in.layout, in.scene);
    const Eigen::VectorXcd mrt = std::sqrt(in.scene.power_budget) * h / h.norm();
    REQUIRE(mvdr_snr_closedform(mrt, in.layout, in.scene) < in.scene.sensing_floor);
    const RefineResult r = refine_beam(mrt, in.layout, in.scene);
    CHECK(r.steps == 0);
    CHECK(r.w == mrt);
}

TEST_CASE("two-antenna refinement against a grid of rank one beams")
{
    // unit-power beams on N_T = 2 are (cos a, sin a e^{j p}) up to a common phase
    std::mt19937_64 rng(44);
    double worst = 1;
    for (int k = 0; k < 10; ++k)
    {
        const Instance in = active_instance(2, 2, rng);
        double best = 0;
        const int steps = 400;
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j < 2 * steps; ++j)
            {
                const double a = 0.5 * std::numbers::pi * i / steps, p = std::numbers::pi * j / steps;
                Eigen::VectorXcd w(2);
                w << std::cos(a), std::sin(a) * std::polar(1.0, p);
                w *= std::sqrt(in.scene.power_budget);
                if (mvdr_snr_closedform(w, in.layout, in.scene) >= in.scene.sensing_floor)
                    best = std::max(best, comm_snr(w, in.layout, in.scene));
            }
        if (best == 0)
            continue;
        const TxSolveResult d = solve_W_direct(in.ops, in.scene);
        REQUIRE(d.status == TxStatus::optimal);
        // when no randomized draw meets the floor, start from the blended beam the driver uses
        Eigen::VectorXcd w0;
        try
        {
            w0 = extract_rank1(d.W, in.ops, in.scene, 1e-6, k).w;
        }
        catch (const ExtractionFailure &)
        {
            w0 = initial_beam(in.layout, in.scene, in.cap);
        }
        REQUIRE(w0.size() == 2);
        const RefineResult r = refine_beam(w0, in.layout, in.scene);
        worst = std::min(worst, r.gamma_t / best);
    }
    CHECK(worst >= 1 - 1e-3);
}
