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

#ifndef MAISAC_TEST_SUPPORT_HPP
#define MAISAC_TEST_SUPPORT_HPP

#include "maisac/scene.hpp"

#include <random>

namespace maisac::testing
{
    inline Eigen::VectorXcd random_complex(int n, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> g;
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i)
            v(i) = {g(rng), g(rng)};
        return v;
    }

    inline Eigen::VectorXcd random_unit(int n, std::mt19937_64 &rng)
    {
        Eigen::VectorXcd v = random_complex(n, rng);
        return v / v.norm();
    }

    // Sorted positions in [0, L] with gaps >= D: uniform gaps of D plus a random share of the spare length
    inline Eigen::VectorXd random_positions(int n, double L, double D, std::mt19937_64 &rng)
    {
        std::uniform_real_distribution<double> u(0, 1);
        const double spare = L - (n - 1) * D;
        Eigen::VectorXd cuts(n);
        for (int i = 0; i < n; ++i)
            cuts(i) = spare * u(rng);
        std::sort(cuts.begin(), cuts.end());
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i)
            x(i) = cuts(i) + i * D;
        return x;
    }

    inline SceneConfig random_scene(int nt, int nr, std::mt19937_64 &rng)
    {
        std::uniform_real_distribution<double> ang(20, 160);
        SceneConfig s;
        s.n_tx = nt;
        s.n_rx = nr;
        s.tx_aperture = nt * s.wavelength;
        s.rx_aperture = nr * s.wavelength;
        s.theta_target = deg2rad(ang(rng));
        s.theta_clutter = deg2rad(ang(rng));
        s.theta_user = deg2rad(ang(rng));
        std::normal_distribution<double> g;
        s.path_gain = {g(rng), g(rng)};
        return s;
    }

    inline ArrayLayout random_layout(const SceneConfig &s, std::mt19937_64 &rng)
    {
        return ArrayLayout(random_positions(s.n_tx, s.tx_aperture, s.min_spacing, rng),
                           random_positions(s.n_rx, s.rx_aperture, s.min_spacing, rng));
    }
}

#endif
