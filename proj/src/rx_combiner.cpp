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

#include "maisac/rx_combiner.hpp"

namespace maisac
{
    namespace
    {
        void check_inputs(const Eigen::VectorXcd &w, const ArrayLayout &layout, const SceneConfig &scene)
        {
            if (!(scene.radar_noise > 0))
                throw InvalidParameter("radar_noise must be > 0");
            if (w.size() != scene.n_tx || layout.tx().size() != scene.n_tx || layout.rx().size() != scene.n_rx)
                throw InvalidParameter("beamformer or layout dimension does not match the scene");
            if (!w.allFinite())
                throw InvalidParameter("beamformer has non-finite entries");
        }
    }

    Eigen::MatrixXcd sherman_morrison_expand(const Eigen::VectorXcd &w, const ArrayLayout &layout,
                                             const SceneConfig &scene)
    {
        check_inputs(w, layout, scene);
        const double n0 = scene.radar_noise;
        const double d2 = scene.clutter_gain * scene.clutter_gain;
        const Eigen::VectorXcd c = response_matrix(layout, scene.theta_clutter, scene) * w;
        const Eigen::Index n = scene.n_rx;
        return (Eigen::MatrixXcd::Identity(n, n) - d2 * c * c.adjoint() / (n0 + d2 * c.squaredNorm())) / n0;
    }

    double mvdr_snr_closedform(const Eigen::VectorXcd &w, const ArrayLayout &layout, const SceneConfig &scene)
    {
        check_inputs(w, layout, scene);
        const double n0 = scene.radar_noise;
        const double s2 = scene.target_gain * scene.target_gain;
        const double d2 = scene.clutter_gain * scene.clutter_gain;
        const Eigen::VectorXcd p = response_matrix(layout, scene.theta_target, scene) * w;
        const Eigen::VectorXcd c = response_matrix(layout, scene.theta_clutter, scene) * w;
        const double val = s2 / n0 * (p.squaredNorm() - d2 * std::norm(c.dot(p)) / (n0 + d2 * c.squaredNorm()));
        return std::max(val, 0.0);
    }

    MvdrResult mvdr_combiner(const Eigen::VectorXcd &w, const ArrayLayout &layout, const SceneConfig &scene)
    {
        check_inputs(w, layout, scene);
        const double wn = w.norm();
        if (!(wn > 0))
            throw InvalidParameter("mvdr_combiner: beamformer is zero");
        const Eigen::VectorXcd at = tx_steering(layout, scene.theta_target, scene);
        if (std::abs(at.dot(w)) <= 1e-12 * wn * std::sqrt(double(scene.n_tx)))
            throw DegenerateDirection("mvdr_combiner: beamformer has no gain toward the target");
        const Eigen::VectorXcd p = response_matrix(layout, scene.theta_target, scene) * w;
        MvdrResult r;
        r.u = RxCombiner::normalized(sherman_morrison_expand(w, layout, scene) * p);
        r.gamma_r_closed = mvdr_snr_closedform(w, layout, scene);
        return r;
    }
}
