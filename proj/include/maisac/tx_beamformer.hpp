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

#ifndef MAISAC_TX_BEAMFORMER_HPP
#define MAISAC_TX_BEAMFORMER_HPP

// Transmit covariance design by semidefinite relaxation.
//
//     maximize   tr(H W) / N0'
//     subject to tr(W) <= P, W >= 0,
//                sigma^2 / N0 * (Psi2 - delta^2 |Psi1|^2 / (N0 + delta^2 Psi3)) >= Gamma
//
// with Psi_i = tr(A_i W). solve_W_direct poses the sensing constraint as one
// rotated cone; solve_W_sca follows the Omega = Psi2 * Psi3 split with a
// first-order bound on 1 / Omega refreshed every iteration.

#include "maisac/conic_solver.hpp"
#include "maisac/scene.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace maisac
{
    struct PsiOperators
    {
        Eigen::MatrixXcd A1; // A_P^H A_C
        Eigen::MatrixXcd A2; // A_P^H A_P
        Eigen::MatrixXcd A3; // A_C^H A_C
        Eigen::MatrixXcd H;  // h h^H
    };

    PsiOperators build_psi_operators(const ArrayLayout &layout, const SceneConfig &scene);

    enum class TxStatus
    {
        optimal,
        infeasible,
        stalled, // SCA stopped making progress; best iterate returned
        failed   // conic solver did not reach a usable point
    };

    std::string to_string(TxStatus s);

    struct PsiValues
    {
        std::complex<double> psi1;
        double psi2 = 0;
        double psi3 = 0;
    };

    PsiValues evaluate_psi(const PsiOperators &ops, const Eigen::MatrixXcd &W);

    // sigma^2 / N0 * (Psi2 - delta^2 |Psi1|^2 / (N0 + delta^2 Psi3)); for rank one W this is the MVDR SNR
    double covariance_sensing_snr(const PsiOperators &ops, const Eigen::MatrixXcd &W, const SceneConfig &scene);
    double covariance_comm_snr(const PsiOperators &ops, const Eigen::MatrixXcd &W, const SceneConfig &scene);

    struct TxSolveResult
    {
        TxStatus status = TxStatus::failed;
        Eigen::MatrixXcd W;
        double objective = 0; // tr(H W) / N0'
        PsiValues psi;
        std::vector<double> objective_trace; // one entry per accepted SCA iterate
        int iterations = 0;
        int solver_iterations = 0;
        bool conservative = false; // SCA ended measurably below the exact optimum
        std::string message;
    };

    struct ScaOptions
    {
        int max_iter = 100;
        double tol = 1e-8;           // relative change of the objective
        bool am_gm_branch = false;   // add (Psi2^2 + Psi3^2)/2 <= Omega
        conic::SolverOptions solver; // per-subproblem tolerances
    };

    // Largest attainable relaxed sensing SNR under the power budget, with the maximizing covariance
    struct SensingCapacity
    {
        bool ok = false;
        double gamma_max = 0;
        Eigen::MatrixXcd W;
    };

    SensingCapacity max_sensing(const PsiOperators &ops, const SceneConfig &scene,
                                const conic::SolverOptions &opts = {});

    // Feasible starting covariance: MRT blended toward the max-sensing covariance until the floor holds
    Eigen::MatrixXcd feasible_start(const PsiOperators &ops, const SceneConfig &scene, const SensingCapacity &cap);

    double initial_omega(const PsiOperators &ops, const SceneConfig &scene, const Eigen::MatrixXcd &W0);

    TxSolveResult solve_W_direct(const PsiOperators &ops, const SceneConfig &scene,
                                 const conic::SolverOptions &opts = {});

    TxSolveResult solve_W_sca(const PsiOperators &ops, const SceneConfig &scene, double omega_init,
                              const ScaOptions &opts = {});

    struct Rank1Result
    {
        Eigen::VectorXcd w;
        double rank_ratio = 0; // lambda2 / lambda1
        bool randomized = false;
        bool rank_gap_warning = false;
        double gamma_t = 0;
        double gamma_r = 0;
    };

    // Principal eigenvector when rank_ratio <= tol, otherwise Gaussian randomization with a seeded draw.
    // Throws ExtractionFailure when no candidate meets the sensing floor.
    Rank1Result extract_rank1(const Eigen::MatrixXcd &W, const PsiOperators &ops, const SceneConfig &scene,
                              double tol = 1e-6, std::uint64_t seed = 0, int candidates = 200);

    struct RefineOptions
    {
        int max_iter = 30;
        double tol = 1e-9; // relative gain in gamma_t that ends the ascent
        conic::SolverOptions solver;
    };

    struct RefineResult
    {
        Eigen::VectorXcd w;
        double gamma_t = 0;
        int steps = 0; // accepted ascent steps
    };

    // Local ascent on gamma_t over rank-one beams. Each step fixes the combiner at the MVDR solution
    // of the current beam, bounds |h^H w|^2 and the target term from below by their tangents, and
    // solves the resulting SOCP; a step is kept only if it meets the exact floor and raises gamma_t.
    // A start that misses the floor is returned unchanged.
    RefineResult refine_beam(const Eigen::VectorXcd &w0, const ArrayLayout &layout, const SceneConfig &scene,
                             const RefineOptions &opts = {});
}

#endif
