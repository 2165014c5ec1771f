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

#ifndef MAISAC_BASELINES_HPP
#define MAISAC_BASELINES_HPP

// Comparison schemes: fixed uniform array, clutter-nulling zero forcing, and
// projected gradient ascent on the transmit positions.

#include "maisac/bcd.hpp"

namespace maisac
{
    enum class Scheme
    {
        ma,       // proposed: convex position steps
        fpa,      // positions frozen at the uniform lambda / 2 array
        zf,       // clutter-nulling MRT on the uniform array
        gradient  // transmit positions by projected gradient ascent
    };

    std::string to_string(Scheme s);
    Scheme scheme_from_string(const std::string &s); // throws InvalidParameter

    BcdResult solve_fpa(const SceneConfig &scene, BcdOptions opts = {});

    // w = sqrt(P) * Pi h / ||Pi h||, Pi removing the clutter steering direction.
    // Throws DegenerateDirection when h is parallel to the clutter steering vector.
    TxBeamformer solve_zf(const ArrayLayout &layout, const SceneConfig &scene);

    BcdResult solve_gradient_positions(const SceneConfig &scene, BcdOptions opts = {});

    // One gradient block: ascent on gamma_t - (1e3 / Gamma) max(0, Gamma - gamma_r)^2 over x.
    // The result may sit slightly below the floor; run_bcd then re-solves the beam at the new layout.
    PositionResult gradient_positions(const ArrayLayout &layout, const Eigen::VectorXcd &w, const SceneConfig &scene,
                                      const GradientOptions &opts = {});
}

#endif
