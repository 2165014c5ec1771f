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

#ifndef MAISAC_CONIC_SOLVER_HPP
#define MAISAC_CONIC_SOLVER_HPP

// Dense primal-dual interior-point solver for linear cone programs
//
//     minimize    c'x
//     subject to  G x + s = h,  A x = b,  s in K
//
// where K is a product of a nonnegative orthant, second-order cones and
// real symmetric PSD cones. PSD blocks are stored as svec (lower triangle,
// column major, off-diagonal entries scaled by sqrt(2)) so that the standard
// inner product on the stacked vector equals the trace inner product.
//
// The iteration follows the homogeneous self-dual embedding with
// Nesterov-Todd scaling and a Mehrotra predictor-corrector, which gives
// certificates of primal or dual infeasibility when no optimum exists.

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace maisac::conic
{
    struct ConeDims
    {
        int nonneg = 0;
        std::vector<int> soc; // cone sizes, first entry is the bound t
        std::vector<int> psd; // matrix orders

        int size() const;   // length of s and z
        int degree() const; // nonneg + #soc + sum(psd)
    };

    enum class Status
    {
        optimal,
        infeasible, // primal infeasible, certificate in (y, z)
        unbounded,  // dual infeasible, certificate in (x, s)
        numerical_limit
    };

    std::string to_string(Status s);

    struct StandardForm
    {
        Eigen::VectorXd c;
        Eigen::MatrixXd G;
        Eigen::VectorXd h;
        Eigen::MatrixXd A;
        Eigen::VectorXd b;
        ConeDims cones;

        void check() const; // throws BuildError on inconsistent dimensions
    };

    struct SolverOptions
    {
        double feastol = 1e-9; // residuals; the gap tolerances stay tighter
        double abstol = 1e-10;
        double reltol = 1e-10;
        // When the iteration stalls before reaching the targets above, the last iterate that met
        // these looser ones (or the targets, if looser) is returned as optimal with reduced_accuracy set
        double feastol_inacc = 1e-7;
        double abstol_inacc = 1e-8;
        double reltol_inacc = 1e-8;
        int max_iter = 100;
    };

    struct StandardResult
    {
        Status status = Status::numerical_limit;
        Eigen::VectorXd x, s, y, z;
        double primal_objective = 0;
        double dual_objective = 0;
        double primal_residual = 0; // scaled, max over equality and cone rows
        double dual_residual = 0;
        double gap = 0;
        int iterations = 0;
        bool reduced_accuracy = false;
    };

    StandardResult solve_standard(const StandardForm &problem, const SolverOptions &opts = {});

    Eigen::VectorXd svec(const Eigen::MatrixXd &X);
    Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd> &v, int order);

    // Smallest "eigenvalue" of a cone vector: min over blocks of s_i, t - ||x||, lambda_min(S)
    double min_cone_eigenvalue(const Eigen::VectorXd &s, const ConeDims &cones);
}

#endif
