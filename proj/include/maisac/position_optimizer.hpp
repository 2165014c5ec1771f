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

#ifndef MAISAC_POSITION_OPTIMIZER_HPP
#define MAISAC_POSITION_OPTIMIZER_HPP

// Antenna position updates for a fixed beam.
//
// Every quantity of interest is a sum of per-antenna phasors exp(j k cos(theta) x_i).
// Around an anchor x0 the phases are written as offsets z_i = k cos(theta) (x_i - x0_i),
// and the cosine/sine terms are bounded with curvature-one quadratics, which gives
//
//   gamma_t(x)        >= concave quadratic in x   (tight at x0)
//   Psi2(x), Psi3(x)  >= concave quadratics        (tight at x0)
//   |cross term(x)|   <= |affine(x)| + sum e_i (x_i - x0_i)^2
//
// so the conic subproblem is an inner approximation of the true feasible set and its
// objective a minorant of the true objective.

#include "maisac/conic_solver.hpp"
#include "maisac/scene.hpp"

#include <complex>
#include <vector>

namespace maisac
{
    enum class Direction
    {
        user,
        target,
        clutter
    };

    // N_R a_T(x, P)^H W a_T(x, P), N_R a_T(x, C)^H W a_T(x, C) and N~ a_T(x, C)^H W a_T(x, P)
    struct QuadraticForms
    {
        double psi2 = 0;
        double psi3 = 0;
        std::complex<double> cross;
    };

    QuadraticForms factorize_quadratics(const ArrayLayout &layout, const Eigen::MatrixXcd &W, const SceneConfig &scene);

    // a_R(y, P)^H a_R(y, C)
    std::complex<double> receive_overlap(const Eigen::VectorXd &y, const SceneConfig &scene);

    // Phi <= Psi2, Phi_bar <= Psi3, Phi_tilde >= |Psi1|^2
    struct SlackTriple
    {
        double phi = 0;
        double phi_bar = 0;
        double phi_tilde = 0;

        // sigma^2 / N0 * (Phi - delta^2 Phi_tilde / (N0 + delta^2 Phi_bar))
        double sensing(const SceneConfig &scene) const;
    };

    struct SurrogateCoefficients
    {
        Eigen::VectorXcd b_user, b_target, b_clutter; // W a_T(x0, theta)
        std::complex<double> n_tilde;                 // a_R(y, P)^H a_R(y, C)
        Eigen::VectorXd offset_user, offset_target, offset_clutter; // rho_i(x0) - arg(b_i), wrapped to (-pi, pi]
        // cross term  a_C^H W a_P ~ const + sum omega_t cos(kappa) + xi_t sin(kappa) + omega_c cos(kappa_bar) + xi_c sin(kappa_bar)
        // (the N~ factor included), kappa = clutter phase offset, kappa_bar = target phase offset
        Eigen::VectorXcd omega_target, xi_target, omega_clutter, xi_clutter;
        std::complex<double> cross_constant;
        double slope_user = 0, slope_target = 0, slope_clutter = 0; // k cos(theta)
        double quad_user = 0, quad_target = 0, quad_clutter = 0;    // a_T(x0)^H W a_T(x0)
        std::complex<double> cross_anchor;                          // a_T(x0, C)^H W a_T(x0, P)
        double w_norm = 0;                                          // largest eigenvalue of W
    };

    struct AuxiliaryVariables
    {
        Eigen::VectorXd kappa, kappa_bar; // clutter / target phase offsets
        Eigen::VectorXd u, u_bar;         // squares
        Eigen::VectorXd zeta, zeta_bar;   // cubes
        Eigen::VectorXd lambda_hat;       // user phase rho_i(x)
        Eigen::VectorXd tau_user, tau_target, tau_clutter; // squared phase offsets against arg(b)
        std::complex<double> eta;         // cross-term expansion value
    };

    struct Surrogate
    {
        Eigen::VectorXd anchor;
        SurrogateCoefficients coef;
        AuxiliaryVariables at_anchor;
    };

    enum class TaylorOrder
    {
        standard, // cos to second order, sin to third order
        fourth    // cos to fourth order
    };

    Surrogate build_surrogate(const Eigen::VectorXd &x_anchor, const Eigen::MatrixXcd &W, const ArrayLayout &layout,
                              const SceneConfig &scene);

    AuxiliaryVariables auxiliary_values(const Surrogate &s, const Eigen::VectorXd &x);

    // sum_i |b_i| cos(rho_i(x) - arg b_i): exact and via the expansion in the phase offsets
    double phasor_sum_exact(const Surrogate &s, Direction d, const Eigen::VectorXd &x);
    double phasor_sum_taylor(const Surrogate &s, Direction d, const Eigen::VectorXd &x,
                             TaylorOrder order = TaylorOrder::standard);

    // first-order cross term a_C0^H W a_P(x) + a_C(x)^H W a_P0 - a_C0^H W a_P0, times N~
    std::complex<double> cross_linear_exact(const Surrogate &s, const Eigen::VectorXd &x);
    std::complex<double> cross_linear_taylor(const Surrogate &s, const Eigen::VectorXd &x,
                                             TaylorOrder order = TaylorOrder::standard);

    // 2/N0' |alpha|^2 Re{a0^H W a(x)} - |alpha|^2 a0^H W a0 / N0', with the cosine sum expanded
    double surrogate_objective(const Surrogate &s, const Eigen::VectorXd &x, const SceneConfig &scene,
                               TaylorOrder order = TaylorOrder::standard);

    // sign * (x_k - x_l) >= bound
    struct SpacingCut
    {
        int k = 0;
        int l = 0;
        double sign = 1;
        double bound = 0;
    };

    // One cut per ordered pair; throws InvalidAnchor if x_ref violates the spacing
    std::vector<SpacingCut> linearize_min_distance(const Eigen::VectorXd &x_ref, double D);

    // Euclidean projection onto {sorted, gaps >= D, lo <= x <= hi}
    Eigen::VectorXd project_positions(const Eigen::VectorXd &x, double D, double lo, double hi);

    struct TrustRegion
    {
        double radius = 0.25; // metres
        double shrink = 0.5;
        double grow = 2.0;
    };

    struct PositionOptions
    {
        TrustRegion trust;
        int max_iter = 20;
        double tol = 1e-6; // relative change of the exact objective
        conic::SolverOptions solver;
    };

    struct SubproblemResult
    {
        bool solved = false;
        Eigen::VectorXd candidate;
        double surrogate = 0; // bound on the exact objective at the candidate
        SlackTriple slack;
    };

    // One convex step around `anchor` on the given side. Positions are confined to [lo, hi].
    SubproblemResult solve_position_subproblem(Side side, const Eigen::VectorXd &anchor, const Eigen::VectorXcd &w,
                                               const ArrayLayout &layout, const SceneConfig &scene, double radius,
                                               double lo, double hi, const conic::SolverOptions &opts = {});

    struct PositionStep
    {
        Eigen::VectorXd anchor;
        Eigen::VectorXd candidate;
        double surrogate = 0;
        double exact_anchor = 0;
        double exact_candidate = 0;
        bool accepted = false;
        double radius = 0;
    };

    struct PositionResult
    {
        ArrayLayout layout;
        std::vector<PositionStep> trace;
        bool no_progress = false;
        int accepted = 0;
        double objective = 0; // gamma_t (transmit) or gamma_r (receive) at the returned layout
    };

    // Transmit side maximizes gamma_t under the sensing floor; receive side maximizes gamma_r.
    PositionResult optimize_positions(Side side, const ArrayLayout &layout, const Eigen::VectorXcd &w,
                                      const SceneConfig &scene, const PositionOptions &opts = {});
}

#endif
