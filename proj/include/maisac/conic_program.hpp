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

#ifndef MAISAC_CONIC_PROGRAM_HPP
#define MAISAC_CONIC_PROGRAM_HPP

// Small modeling layer on top of solve_standard: scalar and Hermitian matrix
// variables, sparse affine expressions, and the constraint kinds the
// beamforming and position subproblems need.
//
// A Hermitian n x n variable W is stored as n^2 real unknowns: the diagonal
// d_i = W_ii, then for each i < j the pair (a_ij, b_ij) with W_ij = a_ij + j b_ij.
// Its PSD constraint is posed on the real symmetric embedding
// [[Re W, -Im W], [Im W, Re W]].

#include "maisac/conic_solver.hpp"

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace maisac::conic
{
    struct Var
    {
        int program = -1;
        int index = -1;
    };

    struct HermVar
    {
        int program = -1;
        int order = 0;
        int offset = -1; // first real unknown
    };

    // Sparse affine expression sum_k coef_k * x_k + constant
    class LinExpr
    {
    public:
        LinExpr() = default;
        LinExpr(double constant) : constant_(constant) {}
        LinExpr(const Var &v);

        LinExpr &operator+=(const LinExpr &o);
        LinExpr &operator-=(const LinExpr &o);
        LinExpr &operator*=(double a);
        LinExpr operator-() const;

        double constant() const { return constant_; }
        int program() const { return program_; }
        const std::vector<std::pair<int, double>> &terms() const { return terms_; }

        // Used by ConicProgram to attach raw unknown indices
        static LinExpr raw(int program, std::vector<std::pair<int, double>> terms, double constant = 0);

    private:
        void merge(const LinExpr &o, double scale);

        std::vector<std::pair<int, double>> terms_; // sorted by index, no duplicates
        double constant_ = 0;
        int program_ = -1; // -1 for a pure constant
    };

    LinExpr operator+(LinExpr a, const LinExpr &b);
    LinExpr operator-(LinExpr a, const LinExpr &b);
    LinExpr operator*(double s, LinExpr a);
    LinExpr operator*(LinExpr a, double s);

    struct ConicSolution
    {
        Status status = Status::numerical_limit;
        double objective = 0;
        int iterations = 0;
        Eigen::VectorXd values; // all real unknowns
        double primal_residual = 0;
        double dual_residual = 0;

        double value(const Var &v) const;
        double value(const LinExpr &e) const;
        Eigen::MatrixXcd value(const HermVar &h) const;
    };

    class ConicProgram
    {
    public:
        ConicProgram();

        Var add_scalar(const std::string &name);
        HermVar add_hermitian(const std::string &name, int order);

        LinExpr real_part(const HermVar &h, int i, int j) const;
        LinExpr imag_part(const HermVar &h, int i, int j) const;
        // Real and imaginary parts of tr(M W)
        std::pair<LinExpr, LinExpr> trace_product(const Eigen::MatrixXcd &M, const HermVar &h) const;
        LinExpr trace(const HermVar &h) const;

        void add_equality(const LinExpr &e);                                          // e == 0
        void add_nonneg(const LinExpr &e);                                            // e >= 0
        void add_soc(const LinExpr &t, const std::vector<LinExpr> &xs);               // ||xs|| <= t
        void add_rotated_soc(const LinExpr &u, const LinExpr &v, const std::vector<LinExpr> &xs); // ||xs||^2 <= 2 u v, u, v >= 0
        void add_psd(const HermVar &h);

        void minimize(const LinExpr &e);
        void maximize(const LinExpr &e);

        int num_unknowns() const { return int(names_.size()); }
        StandardForm standard_form() const;
        // Plain-text dump of the standard form (for external checking)
        std::string listing() const;
        ConicSolution solve(const SolverOptions &opts = {}) const;

    private:
        void own(const LinExpr &e) const;

        int id_;
        std::vector<std::string> names_;
        std::vector<LinExpr> equalities_;
        std::vector<LinExpr> nonneg_;
        std::vector<std::vector<LinExpr>> socs_;
        std::vector<HermVar> psd_;
        LinExpr objective_;
        bool maximize_ = false;
    };
}

#endif
