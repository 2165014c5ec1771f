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

#include "maisac/baselines.hpp"

#include "maisac/rx_combiner.hpp"

#include <cmath>

namespace maisac
{
    std::string to_string(Scheme s)
    {
        switch (s)
        {
        case Scheme::ma:
            return "ma";
        case Scheme::fpa:
            return "fpa";
        case Scheme::zf:
            return "zf";
        case Scheme::gradient:
            return "gradient";
        }
        return "unknown";
    }

    Scheme scheme_from_string(const std::string &s)
    {
        if (s == "ma")
            return Scheme::ma;
        if (s == "fpa")
            return Scheme::fpa;
        if (s == "zf")
            return Scheme::zf;
        if (s == "gradient")
            return Scheme::gradient;
        throw InvalidParameter("unknown scheme '" + s + "' (expected ma, fpa, zf or gradient)");
    }

    BcdResult solve_fpa(const SceneConfig &scene, BcdOptions opts)
    {
        opts.init = InitStrategy::uniform;
        opts.positions = PositionMethod::frozen;
        return run_bcd(scene, opts);
    }

    BcdResult solve_gradient_positions(const SceneConfig &scene, BcdOptions opts)
    {
        opts.positions = PositionMethod::gradient;
        return run_bcd(scene, opts);
    }

    TxBeamformer solve_zf(const ArrayLayout &layout, const SceneConfig &scene)
    {
        scene.validate();
        validate_layout(layout, scene);
        if (scene.n_tx < 2)
            throw InvalidParameter("solve_zf: needs at least two transmit antennas");
        const Eigen::VectorXcd h = channel(layout, scene);
        const Eigen::VectorXcd c = tx_steering(layout, scene.theta_clutter, scene);
        const Eigen::VectorXcd ph = h - c * (c.dot(h) / c.squaredNorm());
        if (ph.norm() <= 1e-9 * h.norm() || !(h.norm() > 0))
            throw DegenerateDirection("solve_zf: channel is parallel to the clutter steering vector");
        return TxBeamformer::checked(std::sqrt(scene.power_budget) * ph / ph.norm(), scene.power_budget);
    }

    PositionResult gradient_positions(const ArrayLayout &layout, const Eigen::VectorXcd &w, const SceneConfig &scene,
                                      const GradientOptions &opts)
    {
        scene.validate();
        validate_layout(layout, scene);
        if (w.size() != scene.n_tx || !w.allFinite())
            throw InvalidParameter("gradient_positions: bad beamformer");
        const double G = scene.sensing_floor;
        const double weight = G > 0 ? 1e3 / G : 0.0;
        const double gain = std::norm(scene.path_gain) / scene.comm_noise;
        const double s = scene.wavenumber() * std::cos(scene.theta_user);
        const double lam = scene.wavelength;

        auto at = [&](const Eigen::VectorXd &x) { return layout.with(Side::transmit, x); };
        auto penalty = [&](const Eigen::VectorXd &x)
        {
            if (weight == 0)
                return 0.0;
            const double v = std::max(0.0, G - mvdr_snr_closedform(w, at(x), scene));
            return weight * v * v;
        };
        auto value = [&](const Eigen::VectorXd &x) { return comm_snr(w, at(x), scene) - penalty(x); };
        auto gradient = [&](const Eigen::VectorXd &x)
        {
            const int n = int(x.size());
            std::complex<double> S = 0;
            for (int i = 0; i < n; ++i)
                S += std::polar(1.0, -s * x(i)) * w(i);
            Eigen::VectorXd g(n);
            for (int i = 0; i < n; ++i)
            {
                const std::complex<double> dS = std::complex<double>(0, -s) * std::polar(1.0, -s * x(i)) * w(i);
                g(i) = gain * 2 * (std::conj(S) * dS).real();
            }
            if (penalty(x) > 0)
            {
                const double h = 1e-7 * lam;
                for (int i = 0; i < n; ++i)
                {
                    Eigen::VectorXd xp = x, xm = x;
                    xp(i) += h;
                    xm(i) -= h;
                    g(i) -= (penalty(xp) - penalty(xm)) / (2 * h);
                }
            }
            return g;
        };

        PositionResult res;
        res.layout = layout;
        Eigen::VectorXd x = layout.tx();
        double f = value(x);
        res.objective = comm_snr(w, layout, scene);
        for (int it = 0; it < opts.max_iter; ++it)
        {
            const Eigen::VectorXd g = gradient(x);
            const double gmax = g.cwiseAbs().maxCoeff();
            if (!(gmax > 0))
                break;
            const Eigen::VectorXd dir = g / gmax;
            bool moved = false;
            for (double step = opts.first_step * lam; step >= opts.min_step * lam; step /= 2)
            {
                const Eigen::VectorXd xn = project_positions(x + step * dir, scene.min_spacing, 0.0, scene.tx_aperture);
                const double fn = value(xn);
                PositionStep st;
                st.anchor = x;
                st.candidate = xn;
                st.surrogate = fn;
                st.exact_anchor = comm_snr(w, at(x), scene);
                st.exact_candidate = comm_snr(w, at(xn), scene);
                st.radius = step;
                st.accepted = fn > f && positions_feasible(xn, scene.tx_aperture, scene.min_spacing);
                res.trace.push_back(st);
                if (st.accepted)
                {
                    const double rel = (fn - f) / std::max(1.0, std::abs(f));
                    x = xn;
                    f = fn;
                    ++res.accepted;
                    moved = rel > opts.tol;
                    break;
                }
            }
            if (!moved)
                break;
        }
        res.layout = at(x);
        res.objective = comm_snr(w, res.layout, scene);
        res.no_progress = res.accepted == 0;
        return res;
    }
}
