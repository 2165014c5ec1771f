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

#ifndef MAISAC_REALIFY_HPP
#define MAISAC_REALIFY_HPP

// Hermitian <-> real symmetric embedding H -> [[Re H, -Im H], [Im H, Re H]].
// Eigenvalues of the embedding are those of H, each repeated twice.

#include "maisac/errors.hpp"

#include <Eigen/Dense>
#include <complex>

namespace maisac
{
    inline bool is_hermitian(const Eigen::MatrixXcd &H, double tol = 1e-10)
    {
        if (H.rows() != H.cols())
            return false;
        const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
        return (H - H.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
    }

    inline Eigen::MatrixXd realify(const Eigen::MatrixXcd &H)
    {
        if (!is_hermitian(H))
            throw InvalidParameter("realify: input is not Hermitian");
        const Eigen::Index n = H.rows();
        Eigen::MatrixXd R(2 * n, 2 * n);
        R.topLeftCorner(n, n) = H.real();
        R.bottomRightCorner(n, n) = H.real();
        R.topRightCorner(n, n) = -H.imag();
        R.bottomLeftCorner(n, n) = H.imag();
        return R;
    }

    inline Eigen::MatrixXcd derealify(const Eigen::MatrixXd &R)
    {
        const Eigen::Index m = R.rows();
        if (R.cols() != m || m % 2 != 0)
            throw InvalidParameter("derealify: input must be square of even order");
        const Eigen::Index n = m / 2;
        const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
        const double err = std::max((R.topLeftCorner(n, n) - R.bottomRightCorner(n, n)).cwiseAbs().maxCoeff(),
                                    (R.topRightCorner(n, n) + R.bottomLeftCorner(n, n)).cwiseAbs().maxCoeff());
        if (err > 1e-10 * scale || (R - R.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw InvalidParameter("derealify: input is not a realified Hermitian matrix");
        Eigen::MatrixXcd H(n, n);
        H.real() = 0.5 * (R.topLeftCorner(n, n) + R.bottomRightCorner(n, n));
        H.imag() = 0.5 * (R.bottomLeftCorner(n, n) - R.topRightCorner(n, n));
        return H;
    }
}

#endif
