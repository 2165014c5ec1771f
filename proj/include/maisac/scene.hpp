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

#ifndef MAISAC_SCENE_HPP
#define MAISAC_SCENE_HPP

// Physical scene, array geometry and exact SNR evaluation.
//
// Geometry is one-dimensional: every antenna sits on a line segment and the
// phase seen at element n for a far-field direction theta (measured from the
// array axis) is (2 pi / lambda) * position_n * cos(theta).

#include "maisac/errors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace maisac
{
    template <typename Scalar>
    using RVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    template <typename Scalar>
    using CVec = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
    template <typename Scalar>
    using CMat = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

    enum class Side
    {
        transmit,
        receive
    };

    template <typename Scalar>
    constexpr Scalar deg2rad(Scalar deg) { return deg * std::numbers::pi_v<Scalar> / Scalar(180); }
    template <typename Scalar>
    constexpr Scalar rad2deg(Scalar rad) { return rad * Scalar(180) / std::numbers::pi_v<Scalar>; }

    // All physical constants and problem parameters. Angles in radians.
    template <typename Scalar>
    struct BasicScene
    {
        Scalar wavelength = 1;                            // lambda [m]
        int n_tx = 8;                                     // N_T
        int n_rx = 8;                                     // N_R
        Scalar theta_target = deg2rad<Scalar>(30);        // target direction
        Scalar theta_clutter = deg2rad<Scalar>(60);       // clutter direction
        Scalar theta_user = deg2rad<Scalar>(45);          // communication user direction
        Scalar target_gain = 1;                           // sigma
        Scalar clutter_gain = 1;                          // delta
        std::complex<Scalar> path_gain = 1;               // alpha
        Scalar radar_noise = Scalar(0.01);                // N0 [W]
        Scalar comm_noise = Scalar(0.01);                 // N0' [W]
        Scalar power_budget = 1;                          // P [W]
        Scalar sensing_floor = 1000;                      // Gamma, linear
        Scalar min_spacing = Scalar(0.5);                 // D [m]
        Scalar tx_aperture = 8;                           // L_T, transmit positions live in [0, L_T]
        Scalar rx_aperture = 8;                           // L_R

        Scalar wavenumber() const { return Scalar(2) * std::numbers::pi_v<Scalar> / wavelength; }

        // Throws InvalidParameter naming the first violated invariant
        void validate() const
        {
            auto need = [](bool ok, const char *msg)
            {
                if (!ok)
                    throw InvalidParameter(msg);
            };
            auto finite = [](Scalar v)
            { return std::isfinite(v); };
            need(finite(wavelength) && wavelength > 0, "wavelength must be > 0");
            need(n_tx >= 1, "n_tx must be >= 1");
            need(n_rx >= 1, "n_rx must be >= 1");
            need(finite(radar_noise) && radar_noise > 0, "radar_noise must be > 0");
            need(finite(comm_noise) && comm_noise > 0, "comm_noise must be > 0");
            need(finite(power_budget) && power_budget > 0, "power_budget must be > 0");
            need(finite(sensing_floor) && sensing_floor >= 0, "sensing_floor must be >= 0");
            need(finite(min_spacing) && min_spacing > 0, "min_spacing must be > 0");
            need(finite(target_gain) && finite(clutter_gain), "reflection gains must be finite");
            need(finite(path_gain.real()) && finite(path_gain.imag()), "path_gain must be finite");
            const Scalar pi = std::numbers::pi_v<Scalar>;
            for (Scalar a : {theta_target, theta_clutter, theta_user})
                need(finite(a) && a > 0 && a < pi, "angles must lie in (0, pi)");
            need(finite(tx_aperture) && tx_aperture >= Scalar(n_tx - 1) * min_spacing * (1 - Scalar(1e-12)),
                 "tx_aperture cannot hold n_tx antennas at min_spacing");
            need(finite(rx_aperture) && rx_aperture >= Scalar(n_rx - 1) * min_spacing * (1 - Scalar(1e-12)),
                 "rx_aperture cannot hold n_rx antennas at min_spacing");
        }
    };

    using SceneConfig = BasicScene<double>;

    // Transmit positions x and receive positions y, stored sorted ascending.
    template <typename Scalar>
    class BasicLayout
    {
    public:
        BasicLayout() = default;
        BasicLayout(RVec<Scalar> x, RVec<Scalar> y) : x_(std::move(x)), y_(std::move(y))
        {
            for (Scalar v : x_)
                if (!std::isfinite(v))
                    throw InvalidParameter("layout: non-finite transmit position");
            for (Scalar v : y_)
                if (!std::isfinite(v))
                    throw InvalidParameter("layout: non-finite receive position");
            std::sort(x_.begin(), x_.end());
            std::sort(y_.begin(), y_.end());
        }

        const RVec<Scalar> &tx() const { return x_; }
        const RVec<Scalar> &rx() const { return y_; }
        const RVec<Scalar> &positions(Side s) const { return s == Side::transmit ? x_ : y_; }

        BasicLayout with(Side s, RVec<Scalar> p) const
        {
            return s == Side::transmit ? BasicLayout(std::move(p), y_) : BasicLayout(x_, std::move(p));
        }

        // Uniform placement n * spacing starting at 0 on both sides
        static BasicLayout uniform(int n_tx, int n_rx, Scalar spacing)
        {
            return BasicLayout(RVec<Scalar>::LinSpaced(n_tx, 0, spacing * Scalar(n_tx - 1)),
                               RVec<Scalar>::LinSpaced(n_rx, 0, spacing * Scalar(n_rx - 1)));
        }

    private:
        RVec<Scalar> x_;
        RVec<Scalar> y_;
    };

    using ArrayLayout = BasicLayout<double>;

    // Smallest gap between consecutive entries of a sorted vector (infinity for < 2 entries)
    template <typename Scalar>
    Scalar min_gap(const RVec<Scalar> &sorted)
    {
        Scalar g = std::numeric_limits<Scalar>::infinity();
        for (Eigen::Index i = 1; i < sorted.size(); ++i)
            g = std::min(g, sorted(i) - sorted(i - 1));
        return g;
    }

    // True iff positions lie in [0, aperture] (with relative slack) and are spaced >= D (1 - rel_tol)
    template <typename Scalar>
    bool positions_feasible(const RVec<Scalar> &sorted, Scalar aperture, Scalar spacing, Scalar rel_tol = Scalar(1e-9))
    {
        if (sorted.size() == 0)
            return false;
        const Scalar slack = rel_tol * std::max<Scalar>(aperture, 1);
        if (sorted.minCoeff() < -slack || sorted.maxCoeff() > aperture + slack)
            return false;
        return min_gap(sorted) >= spacing * (1 - rel_tol);
    }

    template <typename Scalar>
    void validate_layout(const BasicLayout<Scalar> &layout, const BasicScene<Scalar> &scene)
    {
        if (layout.tx().size() != scene.n_tx || layout.rx().size() != scene.n_rx)
            throw InvalidParameter("layout dimensions do not match n_tx/n_rx");
        if (!positions_feasible(layout.tx(), scene.tx_aperture, scene.min_spacing))
            throw InvalidParameter("transmit positions violate aperture or spacing");
        if (!positions_feasible(layout.rx(), scene.rx_aperture, scene.min_spacing))
            throw InvalidParameter("receive positions violate aperture or spacing");
    }

    // Field response: entry n = exp(j (2 pi / lambda) positions[n] cos(theta))
    template <typename Derived>
    CVec<typename Derived::Scalar> steering(const Eigen::MatrixBase<Derived> &positions,
                                            typename Derived::Scalar theta,
                                            typename Derived::Scalar wavelength)
    {
        using Scalar = typename Derived::Scalar;
        if (!(wavelength > 0) || !std::isfinite(wavelength))
            throw InvalidParameter("steering: wavelength must be > 0");
        const Scalar k = Scalar(2) * std::numbers::pi_v<Scalar> / wavelength * std::cos(theta);
        CVec<Scalar> a(positions.size());
        for (Eigen::Index n = 0; n < positions.size(); ++n)
        {
            if (!std::isfinite(positions(n)))
                throw InvalidParameter("steering: non-finite position");
            a(n) = std::polar(Scalar(1), k * positions(n));
        }
        return a;
    }

    template <typename Scalar>
    CVec<Scalar> tx_steering(const BasicLayout<Scalar> &layout, Scalar theta, const BasicScene<Scalar> &scene)
    {
        return steering(layout.tx(), theta, scene.wavelength);
    }

    template <typename Scalar>
    CVec<Scalar> rx_steering(const BasicLayout<Scalar> &layout, Scalar theta, const BasicScene<Scalar> &scene)
    {
        return steering(layout.rx(), theta, scene.wavelength);
    }

    // A(x, y, theta) = a_R(y, theta) a_T(x, theta)^H, N_R x N_T, rank one
    template <typename Scalar>
    CMat<Scalar> response_matrix(const BasicLayout<Scalar> &layout, Scalar theta, const BasicScene<Scalar> &scene)
    {
        if (layout.tx().size() != scene.n_tx || layout.rx().size() != scene.n_rx)
            throw InvalidParameter("response_matrix: layout dimensions do not match scene");
        return rx_steering(layout, theta, scene) * tx_steering(layout, theta, scene).adjoint();
    }

    // h = alpha a_T(x, theta_user)
    template <typename Scalar>
    CVec<Scalar> channel(const BasicLayout<Scalar> &layout, const BasicScene<Scalar> &scene)
    {
        return scene.path_gain * tx_steering(layout, scene.theta_user, scene);
    }

    // sigma^2 |u^H A_P w|^2 / (delta^2 |u^H A_C w|^2 + N0 ||u||^2)
    template <typename Scalar>
    Scalar sensing_snr(const CVec<Scalar> &w, const CVec<Scalar> &u, const BasicLayout<Scalar> &layout,
                       const BasicScene<Scalar> &scene)
    {
        if (!(scene.radar_noise > 0))
            throw InvalidParameter("sensing_snr: radar_noise must be > 0");
        if (w.size() != scene.n_tx || u.size() != scene.n_rx)
            throw InvalidParameter("sensing_snr: dimension mismatch");
        const std::complex<Scalar> sig = u.dot(response_matrix(layout, scene.theta_target, scene) * w);
        const std::complex<Scalar> clu = u.dot(response_matrix(layout, scene.theta_clutter, scene) * w);
        const Scalar s2 = scene.target_gain * scene.target_gain;
        const Scalar d2 = scene.clutter_gain * scene.clutter_gain;
        return s2 * std::norm(sig) / (d2 * std::norm(clu) + scene.radar_noise * u.squaredNorm());
    }

    // |h^H w|^2 / N0'
    template <typename Scalar>
    Scalar comm_snr(const CVec<Scalar> &w, const BasicLayout<Scalar> &layout, const BasicScene<Scalar> &scene)
    {
        if (w.size() != scene.n_tx)
            throw InvalidParameter("comm_snr: dimension mismatch");
        return std::norm(channel(layout, scene).dot(w)) / scene.comm_noise;
    }

    template <typename Scalar>
    Scalar capacity(Scalar gamma_t) { return std::log2(Scalar(1) + gamma_t); }

    struct SnrReport
    {
        double gamma_r = 0;
        double gamma_t = 0;
        double capacity = 0;
    };

    inline SnrReport evaluate(const Eigen::VectorXcd &w, const Eigen::VectorXcd &u, const ArrayLayout &layout,
                              const SceneConfig &scene)
    {
        SnrReport r;
        r.gamma_r = sensing_snr(w, u, layout, scene);
        r.gamma_t = comm_snr(w, layout, scene);
        r.capacity = capacity(r.gamma_t);
        return r;
    }

    // Transmit beamformer with ||w||^2 <= P (1 + 1e-9)
    struct TxBeamformer
    {
        Eigen::VectorXcd w;

        static TxBeamformer checked(Eigen::VectorXcd w, double power_budget)
        {
            if (w.squaredNorm() > power_budget * (1 + 1e-9))
                throw InvalidParameter("beamformer exceeds the power budget");
            return TxBeamformer{std::move(w)};
        }
    };

    // Unit-norm receive combiner
    struct RxCombiner
    {
        Eigen::VectorXcd u;

        static RxCombiner normalized(const Eigen::VectorXcd &v)
        {
            const double n = v.norm();
            if (!(n > 0) || !std::isfinite(n))
                throw InvalidParameter("combiner must be nonzero and finite");
            return RxCombiner{v / n};
        }
    };
}

#endif
