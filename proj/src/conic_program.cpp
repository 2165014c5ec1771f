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

#include "maisac/conic_program.hpp"
#include "maisac/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

namespace maisac::conic
{
    namespace
    {
        std::atomic<int> next_program_id{0};

        int pair_index(int n, int i, int j) { return i * n - i * (i + 1) / 2 + (j - i - 1); }
    }

    LinExpr::LinExpr(const Var &v) : program_(v.program)
    {
        if (v.program < 0 || v.index < 0)
            throw BuildError("expression uses an unregistered variable");
        terms_.push_back({v.index, 1.0});
    }

    LinExpr LinExpr::raw(int program, std::vector<std::pair<int, double>> terms, double constant)
    {
        LinExpr e(constant);
        std::sort(terms.begin(), terms.end());
        for (const auto &[i, c] : terms)
        {
            if (!e.terms_.empty() && e.terms_.back().first == i)
                e.terms_.back().second += c;
            else
                e.terms_.push_back({i, c});
        }
        e.program_ = e.terms_.empty() ? -1 : program;
        return e;
    }

    void LinExpr::merge(const LinExpr &o, double scale)
    {
        if (o.program_ >= 0)
        {
            if (program_ >= 0 && program_ != o.program_)
                throw BuildError("expression mixes variables from different programs");
            program_ = o.program_;
        }
        std::vector<std::pair<int, double>> out;
        out.reserve(terms_.size() + o.terms_.size());
        size_t a = 0, b = 0;
        while (a < terms_.size() || b < o.terms_.size())
        {
            if (b == o.terms_.size() || (a < terms_.size() && terms_[a].first < o.terms_[b].first))
                out.push_back(terms_[a++]);
            else if (a == terms_.size() || o.terms_[b].first < terms_[a].first)
            {
                out.push_back({o.terms_[b].first, scale * o.terms_[b].second});
                ++b;
            }
            else
            {
                out.push_back({terms_[a].first, terms_[a].second + scale * o.terms_[b].second});
                ++a;
                ++b;
            }
        }
        terms_ = std::move(out);
        constant_ += scale * o.constant_;
    }

    LinExpr &LinExpr::operator+=(const LinExpr &o)
    {
        merge(o, 1.0);
        return *this;
    }

    LinExpr &LinExpr::operator-=(const LinExpr &o)
    {
        merge(o, -1.0);
        return *this;
    }

    LinExpr &LinExpr::operator*=(double a)
    {
        for (auto &t : terms_)
            t.second *= a;
        constant_ *= a;
        return *this;
    }

    LinExpr LinExpr::operator-() const
    {
        LinExpr r = *this;
        r *= -1.0;
        return r;
    }

    LinExpr operator+(LinExpr a, const LinExpr &b) { return a += b; }
    LinExpr operator-(LinExpr a, const LinExpr &b) { return a -= b; }
    LinExpr operator*(double s, LinExpr a) { return a *= s; }
    LinExpr operator*(LinExpr a, double s) { return a *= s; }

    double ConicSolution::value(const Var &v) const
    {
        if (v.index < 0 || v.index >= values.size())
            throw BuildError("solution has no value for this variable");
        return values(v.index);
    }

    double ConicSolution::value(const LinExpr &e) const
    {
        double r = e.constant();
        for (const auto &[i, c] : e.terms())
        {
            if (i >= values.size())
                throw BuildError("solution has no value for this expression");
            r += c * values(i);
        }
        return r;
    }

    Eigen::MatrixXcd ConicSolution::value(const HermVar &h) const
    {
        const int n = h.order;
        if (h.offset < 0 || h.offset + n * n > values.size())
            throw BuildError("solution has no value for this matrix variable");
        Eigen::MatrixXcd W(n, n);
        for (int i = 0; i < n; ++i)
        {
            W(i, i) = values(h.offset + i);
            for (int j = i + 1; j < n; ++j)
            {
                const int k = h.offset + n + 2 * pair_index(n, i, j);
                W(i, j) = {values(k), values(k + 1)};
                W(j, i) = std::conj(W(i, j));
            }
        }
        return W;
    }

    ConicProgram::ConicProgram() : id_(next_program_id++) {}

    Var ConicProgram::add_scalar(const std::string &name)
    {
        names_.push_back(name);
        return Var{id_, int(names_.size()) - 1};
    }

    HermVar ConicProgram::add_hermitian(const std::string &name, int order)
    {
        if (order < 1)
            throw BuildError("matrix variable order must be >= 1");
        HermVar h{id_, order, int(names_.size())};
        for (int i = 0; i < order; ++i)
            names_.push_back(name + "[" + std::to_string(i) + "," + std::to_string(i) + "]");
        for (int i = 0; i < order; ++i)
            for (int j = i + 1; j < order; ++j)
            {
                const std::string idx = "[" + std::to_string(i) + "," + std::to_string(j) + "]";
                names_.push_back("re " + name + idx);
                names_.push_back("im " + name + idx);
            }
        return h;
    }

    LinExpr ConicProgram::real_part(const HermVar &h, int i, int j) const
    {
        if (h.program != id_)
            throw BuildError("matrix variable is not registered in this program");
        if (i == j)
            return LinExpr::raw(id_, {{h.offset + i, 1.0}});
        if (i > j)
            std::swap(i, j);
        return LinExpr::raw(id_, {{h.offset + h.order + 2 * pair_index(h.order, i, j), 1.0}});
    }

    LinExpr ConicProgram::imag_part(const HermVar &h, int i, int j) const
    {
        if (h.program != id_)
            throw BuildError("matrix variable is not registered in this program");
        if (i == j)
            return LinExpr(0.0);
        const double sgn = i < j ? 1.0 : -1.0;
        if (i > j)
            std::swap(i, j);
        return LinExpr::raw(id_, {{h.offset + h.order + 2 * pair_index(h.order, i, j) + 1, sgn}});
    }

    std::pair<LinExpr, LinExpr> ConicProgram::trace_product(const Eigen::MatrixXcd &M, const HermVar &h) const
    {
        if (h.program != id_)
            throw BuildError("matrix variable is not registered in this program");
        const int n = h.order;
        if (M.rows() != n || M.cols() != n)
            throw BuildError("trace_product: coefficient matrix has the wrong size");
        std::vector<std::pair<int, double>> re, im;
        for (int i = 0; i < n; ++i)
        {
            re.push_back({h.offset + i, M(i, i).real()});
            im.push_back({h.offset + i, M(i, i).imag()});
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
            {
                const int k = h.offset + n + 2 * pair_index(n, i, j);
                const std::complex<double> ca = M(i, j) + M(j, i);
                const std::complex<double> cb = std::complex<double>(0, 1) * (M(j, i) - M(i, j));
                re.push_back({k, ca.real()});
                re.push_back({k + 1, cb.real()});
                im.push_back({k, ca.imag()});
                im.push_back({k + 1, cb.imag()});
            }
        return {LinExpr::raw(id_, std::move(re)), LinExpr::raw(id_, std::move(im))};
    }

    LinExpr ConicProgram::trace(const HermVar &h) const
    {
        return trace_product(Eigen::MatrixXcd::Identity(h.order, h.order), h).first;
    }

    void ConicProgram::own(const LinExpr &e) const
    {
        if (e.program() >= 0 && e.program() != id_)
            throw BuildError("constraint references a variable from another program");
        for (const auto &t : e.terms())
            if (t.first >= int(names_.size()))
                throw BuildError("constraint references an unregistered variable");
    }

    void ConicProgram::add_equality(const LinExpr &e)
    {
        own(e);
        equalities_.push_back(e);
    }

    void ConicProgram::add_nonneg(const LinExpr &e)
    {
        own(e);
        nonneg_.push_back(e);
    }

    void ConicProgram::add_soc(const LinExpr &t, const std::vector<LinExpr> &xs)
    {
        own(t);
        std::vector<LinExpr> cone{t};
        for (const auto &x : xs)
        {
            own(x);
            cone.push_back(x);
        }
        socs_.push_back(std::move(cone));
    }

    void ConicProgram::add_rotated_soc(const LinExpr &u, const LinExpr &v, const std::vector<LinExpr> &xs)
    {
        // ||xs||^2 <= 2uv  <=>  ||((u - v)/sqrt2, xs)|| <= (u + v)/sqrt2
        const double r = 1 / std::sqrt(2.0);
        std::vector<LinExpr> rest{r * (u - v)};
        rest.insert(rest.end(), xs.begin(), xs.end());
        add_soc(r * (u + v), rest);
    }

    void ConicProgram::add_psd(const HermVar &h)
    {
        if (h.program != id_ || h.offset < 0)
            throw BuildError("PSD constraint on an unregistered matrix variable");
        psd_.push_back(h);
    }

    void ConicProgram::minimize(const LinExpr &e)
    {
        own(e);
        objective_ = e;
        maximize_ = false;
    }

    void ConicProgram::maximize(const LinExpr &e)
    {
        own(e);
        objective_ = e;
        maximize_ = true;
    }

    StandardForm ConicProgram::standard_form() const
    {
        const int n = num_unknowns();
        StandardForm f;
        f.c = Eigen::VectorXd::Zero(n);
        for (const auto &[i, c] : objective_.terms())
            f.c(i) += maximize_ ? -c : c;

        f.A = Eigen::MatrixXd::Zero(int(equalities_.size()), n);
        f.b = Eigen::VectorXd::Zero(int(equalities_.size()));
        for (size_t r = 0; r < equalities_.size(); ++r)
        {
            for (const auto &[i, c] : equalities_[r].terms())
                f.A(r, i) += c;
            f.b(r) = -equalities_[r].constant();
        }

        f.cones.nonneg = int(nonneg_.size());
        for (const auto &s : socs_)
            f.cones.soc.push_back(int(s.size()));
        for (const auto &h : psd_)
            f.cones.psd.push_back(2 * h.order);
        const int m = f.cones.size();
        f.G = Eigen::MatrixXd::Zero(m, n);
        f.h = Eigen::VectorXd::Zero(m);

        // row r of s = h - G x equals expression e: G = -coef(e), h = const(e)
        int row = 0;
        auto put = [&](const LinExpr &e, double scale)
        {
            for (const auto &[i, c] : e.terms())
                f.G(row, i) -= scale * c;
            f.h(row) += scale * e.constant();
            ++row;
        };
        for (const auto &e : nonneg_)
            put(e, 1.0);
        for (const auto &s : socs_)
            for (const auto &e : s)
                put(e, 1.0);
        const double sq2 = std::sqrt(2.0);
        for (const auto &h : psd_)
        {
            const int p = h.order;
            // entry (r, c) of [[Re W, -Im W], [Im W, Re W]]
            auto entry = [&](int r, int c) -> LinExpr
            {
                const bool rb = r >= p, cb = c >= p;
                const int i = rb ? r - p : r, j = cb ? c - p : c;
                if (rb == cb)
                    return real_part(h, i, j);
                return rb ? imag_part(h, i, j) : -imag_part(h, i, j);
            };
            for (int c = 0; c < 2 * p; ++c)
                for (int r = c; r < 2 * p; ++r)
                    put(entry(r, c), r == c ? 1.0 : sq2);
        }
        return f;
    }

    std::string ConicProgram::listing() const
    {
        const StandardForm f = standard_form();
        std::ostringstream os;
        os.precision(17);
        os << "# minimize c'x  subject to  G x + s = h,  A x = b,  s in K\n";
        os << "# psd blocks are svec-packed (lower triangle, column major, off-diagonal scaled by sqrt(2))\n";
        os << "dims " << f.c.size() << " " << f.G.rows() << " " << f.A.rows() << "\n";
        os << "cone nonneg " << f.cones.nonneg << "\n";
        for (int q : f.cones.soc)
            os << "cone soc " << q << "\n";
        for (int p : f.cones.psd)
            os << "cone psd " << p << "\n";
        for (int i = 0; i < f.c.size(); ++i)
            os << "var " << i << " " << names_[i] << "\n";
        for (int i = 0; i < f.c.size(); ++i)
            if (f.c(i) != 0)
                os << "c " << i << " " << f.c(i) << "\n";
        for (int r = 0; r < f.G.rows(); ++r)
            for (int i = 0; i < f.G.cols(); ++i)
                if (f.G(r, i) != 0)
                    os << "G " << r << " " << i << " " << f.G(r, i) << "\n";
        for (int r = 0; r < f.h.size(); ++r)
            if (f.h(r) != 0)
                os << "h " << r << " " << f.h(r) << "\n";
        for (int r = 0; r < f.A.rows(); ++r)
            for (int i = 0; i < f.A.cols(); ++i)
                if (f.A(r, i) != 0)
                    os << "A " << r << " " << i << " " << f.A(r, i) << "\n";
        for (int r = 0; r < f.b.size(); ++r)
            if (f.b(r) != 0)
                os << "b " << r << " " << f.b(r) << "\n";
        return os.str();
    }

    ConicSolution ConicProgram::solve(const SolverOptions &opts) const
    {
        const StandardForm f = standard_form();
        const StandardResult r = solve_standard(f, opts);
        ConicSolution s;
        s.status = r.status;
        s.iterations = r.iterations;
        s.values = r.x.size() == f.c.size() ? r.x : Eigen::VectorXd::Zero(f.c.size());
        s.primal_residual = r.primal_residual;
        s.dual_residual = r.dual_residual;
        if (s.status == Status::optimal)
            s.objective = s.value(objective_);
        return s;
    }
}
