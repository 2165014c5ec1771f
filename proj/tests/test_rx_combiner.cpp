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
#include "maisac/rx_combiner.hpp"
#include "test_support.hpp"

using namespace maisac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using cd = std::complex<double>;

namespace
{
    Eigen::MatrixXcd interference_covariance(const Eigen::VectorXcd &w, const ArrayLayout &L, const SceneConfig &s)
    {
        const Eigen::VectorXcd c = response_matrix(L, s.theta_clutter, s) * w;
        const double d2 = s.clutter_gain * s.clutter_gain;
        return d2 * c * c.adjoint() + s.radar_noise * Eigen::MatrixXcd::Identity(s.n_rx, s.n_rx);
    }
}

TEST_CASE("without clutter MVDR is the matched filter")
{
    std::mt19937_64 rng(1);
    SceneConfig s = testing::random_scene(4, 5, rng);
    s.clutter_gain = 0;
    const ArrayLayout L = testing::random_layout(s, rng);
    const Eigen::VectorXcd w = testing::random_complex(4, rng);
    const auto r = mvdr_combiner(w, L, s);
    const Eigen::VectorXcd aR = rx_steering(L, s.theta_target, s) / std::sqrt(5.0);
    REQUIRE_THAT(std::abs(aR.dot(r.u.u)), WithinAbs(1.0, 1e-12));
    const double aw = std::norm(tx_steering(L, s.theta_target, s).dot(w));
    const double expect = s.target_gain * s.target_gain * 5 * aw / s.radar_noise;
    REQUIRE_THAT(r.gamma_r_closed, WithinRel(expect, 1e-10));
    REQUIRE_THAT(mvdr_snr_closedform(w, L, s), WithinRel(expect, 1e-10));
}

TEST_CASE("MVDR dominates random unit combiners")
{
    std::mt19937_64 rng(2);
    for (int inst = 0; inst < 10; ++inst)
    {
        SceneConfig s = testing::random_scene(3, 2, rng);
        const ArrayLayout L = testing::random_layout(s, rng);
        const Eigen::VectorXcd w = testing::random_complex(3, rng);
        const auto r = mvdr_combiner(w, L, s);
        REQUIRE_THAT(r.u.u.norm(), WithinAbs(1.0, 1e-12));
        for (int k = 0; k < 1000; ++k)
            REQUIRE(r.gamma_r_closed - sensing_snr(w, testing::random_unit(2, rng), L, s) >= -1e-9 * r.gamma_r_closed);
    }
}

TEST_CASE("MVDR SNR equals the largest generalized eigenvalue")
{
    std::mt19937_64 rng(3);
    for (int inst = 0; inst < 20; ++inst)
    {
        SceneConfig s = testing::random_scene(4, 4, rng);
        const ArrayLayout L = testing::random_layout(s, rng);
        const Eigen::VectorXcd w = testing::random_complex(4, rng);
        const Eigen::VectorXcd p = response_matrix(L, s.theta_target, s) * w;
        const Eigen::MatrixXcd S = s.target_gain * s.target_gain * p * p.adjoint();
        Eigen::LLT<Eigen::MatrixXcd> llt(interference_covariance(w, L, s));
        const Eigen::MatrixXcd Li = llt.matrixL().solve(Eigen::MatrixXcd::Identity(4, 4));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Li * S * Li.adjoint());
        const double lmax = es.eigenvalues()(3);
        const auto r = mvdr_combiner(w, L, s);
        REQUIRE_THAT(r.gamma_r_closed, WithinRel(lmax, 1e-8));
        REQUIRE_THAT(sensing_snr(w, r.u.u, L, s), WithinRel(lmax, 1e-8));
    }
}

TEST_CASE("Sherman-Morrison expansion equals the dense inverse")
{
    std::mt19937_64 rng(4);
    for (int nr : {2, 3, 4, 8})
    {
        SceneConfig s = testing::random_scene(3, nr, rng);
        const ArrayLayout L = testing::random_layout(s, rng);
        const Eigen::VectorXcd w = testing::random_complex(3, rng);
        const Eigen::MatrixXcd X = interference_covariance(w, L, s);
        const Eigen::MatrixXcd E = sherman_morrison_expand(w, L, s);
        REQUIRE((E * X - Eigen::MatrixXcd::Identity(nr, nr)).cwiseAbs().maxCoeff() < 1e-10);
        REQUIRE((E - X.inverse()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("Sherman-Morrison limits")
{
    std::mt19937_64 rng(5);
    SceneConfig s = testing::random_scene(2, 3, rng);
    const ArrayLayout L = testing::random_layout(s, rng);
    // w orthogonal to a_T(theta_clutter) makes A_C w = 0
    const Eigen::VectorXcd ac = tx_steering(L, s.theta_clutter, s);
    Eigen::VectorXcd w = testing::random_complex(2, rng);
    w -= ac * (ac.dot(w) / ac.squaredNorm());
    Eigen::MatrixXcd E = sherman_morrison_expand(w, L, s);
    REQUIRE((E - Eigen::MatrixXcd::Identity(3, 3) / s.radar_noise).cwiseAbs().maxCoeff() < 1e-10);

    // noise-dominated limit: the correction is ||A_C w||^2 / (N0 + ||A_C w||^2) relative to I / N0
    s.radar_noise = 1e6;
    w = testing::random_unit(2, rng);
    E = sherman_morrison_expand(w, L, s);
    const Eigen::MatrixXcd ref = Eigen::MatrixXcd::Identity(3, 3) / s.radar_noise;
    const double c2 = (response_matrix(L, s.theta_clutter, s) * w).squaredNorm();
    REQUIRE((E - ref).cwiseAbs().maxCoeff() <= 1.000001 * c2 / (s.radar_noise + c2) / s.radar_noise);

    SceneConfig one;
    one.n_tx = one.n_rx = 1;
    one.radar_noise = 1e6;
    const ArrayLayout single(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
    const Eigen::MatrixXcd E1 = sherman_morrison_expand(Eigen::VectorXcd::Ones(1), single, one);
    REQUIRE_THAT(E1(0, 0).real(), WithinRel(1 / one.radar_noise, 1e-6));
}

TEST_CASE("closed form equals the dense quotient form")
{
    std::mt19937_64 rng(6);
    for (int inst = 0; inst < 20; ++inst)
    {
        SceneConfig s = testing::random_scene(5, 3, rng);
        s.target_gain = 0.5 + inst * 0.1;
        s.clutter_gain = 0.3 + inst * 0.05;
        const ArrayLayout L = testing::random_layout(s, rng);
        const Eigen::VectorXcd w = testing::random_complex(5, rng);
        const Eigen::VectorXcd p = response_matrix(L, s.theta_target, s) * w;
        const double dense = s.target_gain * s.target_gain *
                             (p.adjoint() * interference_covariance(w, L, s).inverse() * p)(0).real();
        REQUIRE_THAT(mvdr_snr_closedform(w, L, s), WithinRel(dense, 1e-8));
        REQUIRE_THAT(sensing_snr(w, mvdr_combiner(w, L, s).u.u, L, s), WithinRel(dense, 1e-8));
    }
}

TEST_CASE("beam without target gain is degenerate")
{
    std::mt19937_64 rng(7);
    SceneConfig s = testing::random_scene(3, 3, rng);
    const ArrayLayout L = testing::random_layout(s, rng);
    const Eigen::VectorXcd at = tx_steering(L, s.theta_target, s);
    Eigen::VectorXcd w = testing::random_complex(3, rng);
    w -= at * (at.dot(w) / at.squaredNorm());
    REQUIRE_THROWS_AS(mvdr_combiner(w, L, s), DegenerateDirection);
    REQUIRE_THROWS_AS(mvdr_combiner(Eigen::VectorXcd::Zero(3), L, s), InvalidParameter);
}
