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

#ifndef MAISAC_BCD_HPP
#define MAISAC_BCD_HPP

// Alternating optimization of the receive combiner u, the transmit beam w and
// the antenna positions x, y. Each block is accepted only if it keeps the
// sensing floor and does not lower gamma_t, so the outer trace is monotone.

#include "maisac/position_optimizer.hpp"
#include "maisac/tx_beamformer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace maisac
{
    enum class InitStrategy
    {
        uniform, // n * lambda / 2 from the origin on both sides
        random_feasible,
        provided
    };

    ArrayLayout init_layout(const SceneConfig &scene, InitStrategy strategy, std::uint64_t seed = 0,
                            const ArrayLayout *provided = nullptr);

    enum class PositionMethod
    {
        surrogate, // convex minorant steps
        gradient,  // projected gradient ascent on gamma_t (transmit only)
        frozen
    };

    struct GradientOptions
    {
        int max_iter = 50;
        double first_step = 0.1; // in wavelengths
        double min_step = 1e-4;  // in wavelengths
        double tol = 1e-6;       // relative gain that ends the ascent
    };

    struct BcdOptions
    {
        double eps = 1e-3; // on |gamma_t(t) - gamma_t(t-1)|, linear units
        int max_outer = 50;
        InitStrategy init = InitStrategy::uniform;
        ArrayLayout provided;
        std::uint64_t seed = 0;
        PositionMethod positions = PositionMethod::surrogate;
        ScaOptions sca;
        PositionOptions position;
        GradientOptions gradient;
        double rank1_tol = 1e-6;
        int rank1_candidates = 200;
        RefineOptions refine; // rank-one ascent applied to every beam candidate; max_iter 0 turns it off

        void validate() const;
    };

    enum class BcdStatus
    {
        converged,
        max_iter,
        infeasible,
        failed
    };

    std::string to_string(BcdStatus s);

    struct BcdIteration
    {
        int iteration = 0;
        double gamma_t = 0;
        double gamma_r = 0;
        double capacity = 0;
        double rank_ratio = 0;
        bool w_accepted = false;
        bool x_accepted = false;
        bool y_accepted = false;
        double seconds_u = 0, seconds_w = 0, seconds_x = 0, seconds_y = 0;
        std::string note; // blocks that failed this pass
    };

    struct BcdResult
    {
        BcdStatus status = BcdStatus::failed;
        std::string stage; // where a failure happened, empty otherwise
        std::string message;
        Eigen::VectorXcd w;
        Eigen::VectorXcd u;
        ArrayLayout layout;
        ArrayLayout initial_layout;
        std::vector<BcdIteration> trace;
        double initial_gamma_t = 0;
        double gamma_t = 0;
        double gamma_r = 0;
        double capacity = 0;
        double rank_ratio = 0; // of the last accepted covariance
        int iterations = 0;
    };

    // Feasible rank-one start: MRT blended toward the target beam until the floor holds.
    // Returns an empty vector when no rank-one start is found.
    Eigen::VectorXcd initial_beam(const ArrayLayout &layout, const SceneConfig &scene, const SensingCapacity &cap);

    BcdResult run_bcd(const SceneConfig &scene, const BcdOptions &opts = {});

    // Exact check of every constraint of the joint problem at a returned point
    struct AuditCheck
    {
        std::string name;
        double value = 0;
        double limit = 0;
        bool pass = false;
    };

    struct ConstraintAudit
    {
        std::vector<AuditCheck> checks;
        bool pass() const;
    };

    // Regions and spacing with 1e-9 relative slack, power <= P (1 + 1e-9), | ||u|| - 1 | <= 1e-9,
    // gamma_r(w, u) >= Gamma (1 - 1e-6)
    ConstraintAudit audit_solution(const Eigen::VectorXcd &w, const Eigen::VectorXcd &u, const ArrayLayout &layout,
                                   const SceneConfig &scene);
}

#endif
