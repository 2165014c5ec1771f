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

#ifndef MAISAC_RX_COMBINER_HPP
#define MAISAC_RX_COMBINER_HPP

// MVDR receive combiner and the closed-form sensing SNR it attains.
//
// With p = A_P w and c = A_C w the interference-plus-noise covariance is
// Xi = delta^2 c c^H + N0 I, the combiner is u ~ Xi^{-1} p, and
// gamma_r = sigma^2 / N0 * (|p|^2 - delta^2 |c^H p|^2 / (N0 + delta^2 |c|^2)).

#include "maisac/scene.hpp"

namespace maisac
{
    struct MvdrResult
    {
        RxCombiner u;
        double gamma_r_closed = 0;
    };

    // Throws DegenerateDirection when a_T(x, theta_target)^H w vanishes
    MvdrResult mvdr_combiner(const Eigen::VectorXcd &w, const ArrayLayout &layout, const SceneConfig &scene);

    // Xi^{-1} via the rank-one update formula
    Eigen::MatrixXcd sherman_morrison_expand(const Eigen::VectorXcd &w, const ArrayLayout &layout,
                                             const SceneConfig &scene);

    double mvdr_snr_closedform(const Eigen::VectorXcd &w, const ArrayLayout &layout, const SceneConfig &scene);
}

#endif
