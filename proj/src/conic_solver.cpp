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

#include "maisac/conic_solver.hpp"
#include "maisac/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace maisac::conic
{
    using Eigen::MatrixXd;
    using Eigen::VectorXd;

    namespace
    {
        constexpr double kInf = std::numeric_limits<double>::infinity();
        const double kSqrt2 = std::sqrt(2.0);

        int svec_len(int p) { return p * (p + 1) / 2; }

        // NT scaling of one second-order cone: W = beta (2 v v' - J)
        struct SocScale
        {
            double beta = 1;
            VectorXd v;
        };

        // NT scaling of one PSD cone: W(Z) = R' Z R, W^{-T}(S) = R^{-1} S R^{-T}
        struct PsdScale
        {
            MatrixXd R, Rinv;
            VectorXd lambda; // eigenvalues of the scaled point
        };

        struct Scaling
        {
            VectorXd d; // nonneg block: W = diag(d)
            std::vector<SocScale> soc;
            std::vector<PsdScale> psd;
            VectorXd lambda; // W z = W^{-T} s
        };

        enum class Op
        {
            W,
            WT,
            Winv,
            WinvT
        };

        // J x for a second-order cone block
        VectorXd hyperbolic_reflect(const Eigen::Ref<const VectorXd> &x)
        {
            VectorXd r = -x;
            r(0) = x(0);
            return r;
        }

        double j_norm(const Eigen::Ref<const VectorXd> &x)
        {
            const double t = x.tail(x.size() - 1).norm();
            const double a = (x(0) - t) * (x(0) + t);
            return a > 0 ? std::sqrt(a) : 0.0;
        }

        // Applies the scaling (or a variant) in place to one stacked cone vector
        void apply(const Scaling &sc, const ConeDims &k, Op op, Eigen::Ref<VectorXd> v)
        {
            int off = 0;
            for (int i = 0; i < k.nonneg; ++i)
                v(i) = (op == Op::W || op == Op::WT) ? v(i) * sc.d(i) : v(i) / sc.d(i);
            off = k.nonneg;
            for (size_t j = 0; j < k.soc.size(); ++j)
            {
                const int n = k.soc[j];
                auto blk = v.segment(off, n);
                const SocScale &s = sc.soc[j];
                if (op == Op::W || op == Op::WT)
                {
                    const double vx = s.v.dot(blk);
                    VectorXd r = 2.0 * vx * s.v - hyperbolic_reflect(blk);
                    blk = s.beta * r;
                }
                else
                {
                    const VectorXd Jv = hyperbolic_reflect(s.v);
                    const double vJx = Jv.dot(blk);
                    VectorXd r = 2.0 * vJx * Jv - hyperbolic_reflect(blk);
                    blk = r / s.beta;
                }
                off += n;
            }
            for (size_t j = 0; j < k.psd.size(); ++j)
            {
                const int p = k.psd[j];
                const int q = svec_len(p);
                const PsdScale &s = sc.psd[j];
                MatrixXd X = smat(v.segment(off, q), p);
                MatrixXd Y;
                switch (op)
                {
                case Op::W:
                    Y = s.R.transpose() * X * s.R;
                    break;
                case Op::WT:
                    Y = s.R * X * s.R.transpose();
                    break;
                case Op::Winv:
                    Y = s.Rinv.transpose() * X * s.Rinv;
                    break;
                case Op::WinvT:
                    Y = s.Rinv * X * s.Rinv.transpose();
                    break;
                }
                v.segment(off, q) = svec(Y);
                off += q;
            }
        }

        VectorXd applied(const Scaling &sc, const ConeDims &k, Op op, VectorXd v)
        {
            apply(sc, k, op, v);
            return v;
        }

        VectorXd identity(const ConeDims &k)
        {
            VectorXd e = VectorXd::Zero(k.size());
            e.head(k.nonneg).setOnes();
            int off = k.nonneg;
            for (int n : k.soc)
            {
                e(off) = 1;
                off += n;
            }
            for (int p : k.psd)
            {
                e.segment(off, svec_len(p)) = svec(MatrixXd::Identity(p, p));
                off += svec_len(p);
            }
            return e;
        }

        // Jordan product u o v
        VectorXd jordan(const VectorXd &u, const VectorXd &v, const ConeDims &k)
        {
            VectorXd r(u.size());
            r.head(k.nonneg) = u.head(k.nonneg).cwiseProduct(v.head(k.nonneg));
            int off = k.nonneg;
            for (int n : k.soc)
            {
                r(off) = u.segment(off, n).dot(v.segment(off, n));
                r.segment(off + 1, n - 1) = u(off) * v.segment(off + 1, n - 1) + v(off) * u.segment(off + 1, n - 1);
                off += n;
            }
            for (int p : k.psd)
            {
                const int q = svec_len(p);
                const MatrixXd U = smat(u.segment(off, q), p);
                const MatrixXd V = smat(v.segment(off, q), p);
                r.segment(off, q) = svec(0.5 * (U * V + V * U));
                off += q;
            }
            return r;
        }

        // Solves lambda o x = r for x, lambda being the scaled point (diagonal in PSD blocks)
        VectorXd jordan_solve(const Scaling &sc, const VectorXd &r, const ConeDims &k)
        {
            const VectorXd &l = sc.lambda;
            VectorXd x(r.size());
            x.head(k.nonneg) = r.head(k.nonneg).cwiseQuotient(l.head(k.nonneg));
            int off = k.nonneg;
            for (int n : k.soc)
            {
                const auto lb = l.segment(off, n);
                const auto rb = r.segment(off, n);
                const double det = (lb(0) - lb.tail(n - 1).norm()) * (lb(0) + lb.tail(n - 1).norm());
                const double x0 = (lb(0) * rb(0) - lb.tail(n - 1).dot(rb.tail(n - 1))) / det;
                x(off) = x0;
                x.segment(off + 1, n - 1) = (rb.tail(n - 1) - x0 * lb.tail(n - 1)) / lb(0);
                off += n;
            }
            for (size_t j = 0; j < k.psd.size(); ++j)
            {
                const int p = k.psd[j];
                const int q = svec_len(p);
                const VectorXd &lam = sc.psd[j].lambda;
                MatrixXd R = smat(r.segment(off, q), p);
                for (int c = 0; c < p; ++c)
                    for (int i = 0; i < p; ++i)
                        R(i, c) *= 2.0 / (lam(i) + lam(c));
                x.segment(off, q) = svec(R);
                off += q;
            }
            return x;
        }

        // Largest alpha with lambda + alpha d in the cone (lambda being the scaled point)
        double max_step(const Scaling &sc, const VectorXd &d, const ConeDims &k)
        {
            const VectorXd &l = sc.lambda;
            double alpha = kInf;
            for (int i = 0; i < k.nonneg; ++i)
                if (d(i) < 0)
                    alpha = std::min(alpha, -l(i) / d(i));
            int off = k.nonneg;
            for (int n : k.soc)
            {
                const auto lb = l.segment(off, n);
                const auto db = d.segment(off, n);
                const double a = (db(0) - db.tail(n - 1).norm()) * (db(0) + db.tail(n - 1).norm());
                const double b = 2.0 * (lb(0) * db(0) - lb.tail(n - 1).dot(db.tail(n - 1)));
                const double c = (lb(0) - lb.tail(n - 1).norm()) * (lb(0) + lb.tail(n - 1).norm());
                double root = kInf;
                const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300});
                if (std::abs(a) <= 1e-14 * scale)
                {
                    if (b < 0)
                        root = -c / b;
                }
                else
                {
                    const double disc = b * b - 4 * a * c;
                    if (disc >= 0)
                    {
                        const double sq = std::sqrt(disc);
                        const double qq = -0.5 * (b + (b >= 0 ? sq : -sq));
                        for (double r : {qq / a, qq != 0 ? c / qq : kInf})
                            if (r > 0)
                                root = std::min(root, r);
                    }
                }
                alpha = std::min(alpha, root);
                off += n;
            }
            for (size_t j = 0; j < k.psd.size(); ++j)
            {
                const int p = k.psd[j];
                const int q = svec_len(p);
                const VectorXd isq = sc.psd[j].lambda.cwiseSqrt().cwiseInverse();
                const MatrixXd M = isq.asDiagonal() * smat(d.segment(off, q), p) * isq.asDiagonal();
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
                const double mn = es.eigenvalues()(0);
                if (mn < 0)
                    alpha = std::min(alpha, -1.0 / mn);
                off += q;
            }
            return alpha;
        }

        std::optional<Scaling> compute_scaling(const VectorXd &s, const VectorXd &z, const ConeDims &k)
        {
            Scaling sc;
            sc.lambda.resize(s.size());
            sc.d = (s.head(k.nonneg).cwiseQuotient(z.head(k.nonneg))).cwiseSqrt();
            sc.lambda.head(k.nonneg) = (s.head(k.nonneg).cwiseProduct(z.head(k.nonneg))).cwiseSqrt();
            if (!sc.d.allFinite() || (k.nonneg > 0 && sc.d.minCoeff() <= 0))
                return std::nullopt;
            int off = k.nonneg;
            for (int n : k.soc)
            {
                const VectorXd sb = s.segment(off, n);
                const VectorXd zb = z.segment(off, n);
                const double sn = j_norm(sb), zn = j_norm(zb);
                if (!(sn > 0) || !(zn > 0))
                    return std::nullopt;
                const VectorXd s_bar = sb / sn, z_bar = zb / zn;
                const double gamma = std::sqrt(0.5 * (1 + s_bar.dot(z_bar)));
                const VectorXd w_bar = (s_bar + hyperbolic_reflect(z_bar)) / (2 * gamma);
                SocScale ss;
                ss.beta = std::sqrt(sn / zn);
                ss.v = w_bar;
                ss.v(0) += 1;
                ss.v /= std::sqrt(2 * (w_bar(0) + 1));
                const double vz = ss.v.dot(zb);
                sc.lambda.segment(off, n) = ss.beta * (2 * vz * ss.v - hyperbolic_reflect(zb));
                sc.soc.push_back(std::move(ss));
                off += n;
            }
            for (int p : k.psd)
            {
                const int q = svec_len(p);
                Eigen::LLT<MatrixXd> ls(smat(s.segment(off, q), p)), lz(smat(z.segment(off, q), p));
                if (ls.info() != Eigen::Success || lz.info() != Eigen::Success)
                    return std::nullopt;
                const MatrixXd Ls = ls.matrixL(), Lz = lz.matrixL();
                Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
                const VectorXd sig = svd.singularValues();
                if (!(sig.minCoeff() > 0))
                    return std::nullopt;
                PsdScale ps;
                ps.R = Ls * svd.matrixV() * sig.cwiseSqrt().cwiseInverse().asDiagonal();
                ps.Rinv = sig.cwiseSqrt().cwiseInverse().asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
                ps.lambda = sig;
                sc.lambda.segment(off, q) = svec(MatrixXd(sig.asDiagonal()));
                sc.psd.push_back(std::move(ps));
                off += q;
            }
            if (!sc.lambda.allFinite())
                return std::nullopt;
            return sc;
        }

        Scaling identity_scaling(const ConeDims &k)
        {
            Scaling sc;
            sc.d = VectorXd::Ones(k.nonneg);
            for (int n : k.soc)
            {
                SocScale ss;
                ss.v = VectorXd::Zero(n);
                ss.v(0) = 1;
                sc.soc.push_back(ss);
            }
            for (int p : k.psd)
                sc.psd.push_back(PsdScale{MatrixXd::Identity(p, p), MatrixXd::Identity(p, p), VectorXd::Ones(p)});
            sc.lambda = identity(k);
            return sc;
        }

        // Solves [0 A' G'; A 0 0; G 0 -W'W] [x; y; z] = [bx; by; bz]
        class KktSolver
        {
        public:
            KktSolver(const StandardForm &P, const Scaling &sc) : P_(P), sc_(sc) {}

            bool factor()
            {
                const int n = int(P_.c.size()), p = int(P_.b.size());
                Ghat_ = P_.G;
                for (int j = 0; j < Ghat_.cols(); ++j)
                    apply(sc_, P_.cones, Op::WinvT, Ghat_.col(j));
                if (p == 0)
                {
                    // QR of the scaled G instead of forming G'G keeps near-degenerate optima solvable
                    qr_.compute(Ghat_);
                    use_qr_ = qr_.rank() == n;
                    if (use_qr_)
                        return true;
                }
                use_qr_ = false;
                MatrixXd M = Ghat_.transpose() * Ghat_;
                MatrixXd K = MatrixXd::Zero(n + p, n + p);
                K.topLeftCorner(n, n) = M;
                K.topRightCorner(n, p) = P_.A.transpose();
                K.bottomLeftCorner(p, n) = P_.A;
                lu_.compute(K);
                return true;
            }

            bool solve(VectorXd &x, VectorXd &y, VectorXd &z) const
            {
                const VectorXd bx = x, by = y, bz = z;
                solve_once(x, y, z);
                // iterative refinement on the unreduced system; the reduced matrix squares the conditioning
                double last = std::numeric_limits<double>::infinity();
                for (int pass = 0; pass < 4; ++pass)
                {
                    VectorXd rx = bx - P_.A.transpose() * y - P_.G.transpose() * z;
                    VectorXd ry = by - P_.A * x;
                    VectorXd rz = bz - P_.G * x + applied(sc_, P_.cones, Op::WT, applied(sc_, P_.cones, Op::W, z));
                    const double nr = std::sqrt(rx.squaredNorm() + ry.squaredNorm() + rz.squaredNorm());
                    if (!(nr < 0.5 * last))
                        break;
                    last = nr;
                    solve_once(rx, ry, rz);
                    x += rx;
                    y += ry;
                    z += rz;
                }
                return x.allFinite() && y.allFinite() && z.allFinite();
            }

        private:
            void solve_once(VectorXd &x, VectorXd &y, VectorXd &z) const
            {
                const int n = int(P_.c.size()), p = int(P_.b.size());
                const VectorXd t = applied(sc_, P_.cones, Op::WinvT, z);
                if (use_qr_)
                {
                    // G'G = P R'R P', and G't = P R' (Q't).head(n)
                    const auto R = qr_.matrixR().topLeftCorner(n, n).template triangularView<Eigen::Upper>();
                    VectorXd v = qr_.colsPermutation().transpose() * x;
                    R.transpose().solveInPlace(v);
                    const VectorXd qt = qr_.householderQ().adjoint() * t;
                    v += qt.head(n);
                    R.solveInPlace(v);
                    x = qr_.colsPermutation() * v;
                    y.resize(0);
                }
                else
                {
                    const VectorXd r1 = x + Ghat_.transpose() * t;
                    VectorXd rhs(n + p);
                    rhs << r1, y;
                    const VectorXd sol = lu_.solve(rhs);
                    x = sol.head(n);
                    y = sol.tail(p);
                }
                z = applied(sc_, P_.cones, Op::Winv, Ghat_ * x - t);
            }

            const StandardForm &P_;
            const Scaling &sc_;
            MatrixXd Ghat_;
            Eigen::ColPivHouseholderQR<MatrixXd> qr_;
            Eigen::PartialPivLU<MatrixXd> lu_;
            bool use_qr_ = false;
        };

        double block_min_eig(const VectorXd &s, const ConeDims &k)
        {
            double mn = kInf;
            for (int i = 0; i < k.nonneg; ++i)
                mn = std::min(mn, s(i));
            int off = k.nonneg;
            for (int n : k.soc)
            {
                mn = std::min(mn, s(off) - s.segment(off + 1, n - 1).norm());
                off += n;
            }
            for (int p : k.psd)
            {
                const int q = svec_len(p);
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(smat(s.segment(off, q), p), Eigen::EigenvaluesOnly);
                mn = std::min(mn, es.eigenvalues()(0));
                off += q;
            }
            return mn;
        }

        // Moves v into the cone interior the same way for primal and dual starting points
        void push_interior(VectorXd &v, const ConeDims &k, const VectorXd &e)
        {
            if (k.size() == 0)
                return;
            const double ts = -block_min_eig(v, k);
            const double nrm = v.norm();
            if (ts >= -1e-8 * std::max(nrm, 1.0))
                v += (1 + ts) * e;
        }
    }

    int ConeDims::size() const
    {
        int m = nonneg;
        for (int n : soc)
            m += n;
        for (int p : psd)
            m += svec_len(p);
        return m;
    }

    int ConeDims::degree() const
    {
        return nonneg + int(soc.size()) + std::accumulate(psd.begin(), psd.end(), 0);
    }

    std::string to_string(Status s)
    {
        switch (s)
        {
        case Status::optimal:
            return "optimal";
        case Status::infeasible:
            return "infeasible";
        case Status::unbounded:
            return "unbounded";
        case Status::numerical_limit:
            return "numerical-limit";
        }
        return "unknown";
    }

    void StandardForm::check() const
    {
        const Eigen::Index n = c.size(), m = cones.size();
        if (G.rows() != m || G.cols() != n || h.size() != m)
            throw BuildError("conic standard form: G/h dimensions do not match the cone sizes");
        if (A.cols() != n || A.rows() != b.size())
            throw BuildError("conic standard form: A/b dimensions are inconsistent");
        if (cones.nonneg < 0)
            throw BuildError("conic standard form: negative orthant size");
        for (int q : cones.soc)
            if (q < 1)
                throw BuildError("conic standard form: second-order cone of size < 1");
        for (int p : cones.psd)
            if (p < 1)
                throw BuildError("conic standard form: PSD cone of order < 1");
        if (!c.allFinite() || !G.allFinite() || !h.allFinite() || !A.allFinite() || !b.allFinite())
            throw BuildError("conic standard form: non-finite data");
    }

    VectorXd svec(const MatrixXd &X)
    {
        const int p = int(X.rows());
        VectorXd v(svec_len(p));
        int i = 0;
        for (int c = 0; c < p; ++c)
            for (int r = c; r < p; ++r)
                v(i++) = r == c ? X(r, c) : kSqrt2 * 0.5 * (X(r, c) + X(c, r));
        return v;
    }

    MatrixXd smat(const Eigen::Ref<const VectorXd> &v, int p)
    {
        MatrixXd X(p, p);
        int i = 0;
        for (int c = 0; c < p; ++c)
            for (int r = c; r < p; ++r)
            {
                const double val = r == c ? v(i) : v(i) / kSqrt2;
                X(r, c) = val;
                X(c, r) = val;
                ++i;
            }
        return X;
    }

    double min_cone_eigenvalue(const VectorXd &s, const ConeDims &cones) { return block_min_eig(s, cones); }

    StandardResult solve_standard(const StandardForm &P, const SolverOptions &opts)
    {
        P.check();
        const ConeDims &k = P.cones;
        const int n = int(P.c.size()), m = k.size(), p = int(P.b.size());
        const double deg = k.degree();
        const VectorXd e = identity(k);

        StandardResult res;
        res.status = Status::numerical_limit;

        const double resx0 = std::max(1.0, P.c.norm());
        const double resy0 = std::max(1.0, P.b.norm());
        const double resz0 = std::max(1.0, P.h.norm());

        // Starting point from two least-squares problems with W = I
        VectorXd x, y, z, s;
        {
            const Scaling I = identity_scaling(k);
            KktSolver kkt(P, I);
            kkt.factor();
            x = VectorXd::Zero(n);
            y = P.b;
            VectorXd zz = P.h;
            if (!kkt.solve(x, y, zz))
                return res;
            s = -zz;

            VectorXd dx = -P.c, dy = VectorXd::Zero(p);
            z = VectorXd::Zero(m);
            if (!kkt.solve(dx, dy, z))
                return res;
            y = dy;
            push_interior(s, k, e);
            push_interior(z, k, e);
        }
        double tau = 1, kappa = 1;

        auto finish = [&](Status st, int it)
        {
            res.status = st;
            res.iterations = it;
            res.x = x;
            res.y = y;
            res.z = z;
            res.s = s;
        };

        // last iterate meeting the loose tolerances, kept unscaled
        struct Saved
        {
            VectorXd x, y, z, s;
            double tau = 0, pres = 0, dres = 0, gap = 0, pcost = 0, dcost = 0;
            int it = 0;
        };
        std::optional<Saved> loose;
        const double loose_feas = std::max(opts.feastol, opts.feastol_inacc);
        const double loose_abs = std::max(opts.abstol, opts.abstol_inacc);
        const double loose_rel = std::max(opts.reltol, opts.reltol_inacc);

        for (int it = 0; it <= opts.max_iter; ++it)
        {
            const VectorXd hrx = -P.A.transpose() * y - P.G.transpose() * z;
            const VectorXd hry = P.A * x;
            const VectorXd hrz = s + P.G * x;
            const double hresx = hrx.norm(), hresy = hry.norm(), hresz = hrz.norm();
            const VectorXd rx = hrx - P.c * tau;
            const VectorXd ry = hry - P.b * tau;
            const VectorXd rz = hrz - P.h * tau;
            const double cx = P.c.dot(x), by = P.b.dot(y), hz = P.h.dot(z);
            const double rt = kappa + cx + by + hz;
            const double gap = s.dot(z);
            const double mu = (gap + tau * kappa) / (deg + 1);
            const double pcost = cx / tau, dcost = -(by + hz) / tau;
            double relgap = kInf;
            if (pcost < 0)
                relgap = gap / -pcost;
            else if (dcost > 0)
                relgap = gap / dcost;
            const double pres = std::max(ry.norm() / resy0, rz.norm() / resz0) / tau;
            const double dres = rx.norm() / resx0 / tau;
            const double pinfres = (hz + by < 0) ? hresx / resx0 / (-hz - by) : kInf;
            const double dinfres = (cx < 0) ? std::max(hresy / resy0, hresz / resz0) / (-cx) : kInf;

            res.primal_residual = pres;
            res.dual_residual = dres;
            res.gap = gap / (tau * tau);
            res.primal_objective = pcost;
            res.dual_objective = dcost;

            if (pres <= opts.feastol && dres <= opts.feastol &&
                (gap / (tau * tau) <= opts.abstol || relgap <= opts.reltol))
            {
                x /= tau;
                y /= tau;
                s /= tau;
                z /= tau;
                finish(Status::optimal, it);
                return res;
            }
            if (pres <= loose_feas && dres <= loose_feas &&
                (gap / (tau * tau) <= loose_abs || relgap <= loose_rel))
                loose = Saved{x, y, z, s, tau, pres, dres, gap / (tau * tau), pcost, dcost, it};
            if (pinfres <= opts.feastol)
            {
                const double scale = -hz - by;
                y /= scale;
                z /= scale;
                finish(Status::infeasible, it);
                return res;
            }
            if (dinfres <= opts.feastol)
            {
                x /= -cx;
                s /= -cx;
                finish(Status::unbounded, it);
                return res;
            }
            if (it == opts.max_iter)
                break;

            auto sc_opt = compute_scaling(s, z, k);
            if (!sc_opt)
                break;
            const Scaling &sc = *sc_opt;
            KktSolver kkt(P, sc);
            if (!kkt.factor())
                break;

            // Direction associated with the tau column
            VectorXd x1 = -P.c, y1 = P.b, z1 = P.h;
            if (!kkt.solve(x1, y1, z1))
                break;
            const double q1 = P.c.dot(x1) + P.b.dot(y1) + P.h.dot(z1);

            const VectorXd &lam = sc.lambda;
            const VectorXd lamsq = jordan(lam, lam, k);

            struct Dir
            {
                VectorXd dx, dy, dz, ds; // dz, ds in scaled coordinates
                VectorXd dz_orig, ds_orig;
                double dtau = 0, dkappa = 0;
            };

            // eta: fraction of the linear residual removed; rc/rk: complementarity targets
            auto direction = [&](double eta, const VectorXd &rc, double rk, Dir &d) -> bool
            {
                const VectorXd r_hat = jordan_solve(sc, rc, k);
                // Newton system in the (x, y, z) block; signs follow the embedding residuals
                VectorXd bx = eta * rx;
                VectorXd by_ = -eta * ry;
                VectorXd bz = -eta * rz - applied(sc, k, Op::WT, r_hat);
                // rx here is -(A'y + G'z + c tau), so -eta * r_x(std) = eta * rx
                if (!kkt.solve(bx, by_, bz))
                    return false;
                const double q2 = P.c.dot(bx) + P.b.dot(by_) + P.h.dot(bz);
                const double r_tau = rt;
                const double denom = kappa - tau * q1;
                d.dtau = (rk + tau * (eta * r_tau + q2)) / denom;
                d.dx = bx + d.dtau * x1;
                d.dy = by_ + d.dtau * y1;
                const VectorXd dz = bz + d.dtau * z1;
                d.dkappa = -eta * r_tau - P.c.dot(d.dx) - P.b.dot(d.dy) - P.h.dot(dz);
                d.dz = applied(sc, k, Op::W, dz);
                d.ds = r_hat - d.dz;
                // the original-space slack step satisfies the linear rows exactly
                d.dz_orig = dz;
                d.ds_orig = -eta * rz + d.dtau * P.h - P.G * d.dx;
                return d.dx.allFinite() && std::isfinite(d.dtau);
            };

            auto step_length = [&](const Dir &d)
            {
                double a = std::min(max_step(sc, d.dz, k), max_step(sc, d.ds, k));
                if (d.dtau < 0)
                    a = std::min(a, -tau / d.dtau);
                if (d.dkappa < 0)
                    a = std::min(a, -kappa / d.dkappa);
                return a;
            };

            Dir aff;
            if (!direction(1.0, -lamsq, -tau * kappa, aff))
                break;
            const double a_aff = std::min(1.0, step_length(aff));
            const double sigma = std::pow(1.0 - a_aff, 3);

            Dir cmb;
            const VectorXd rc = -lamsq + sigma * mu * e - jordan(aff.dz, aff.ds, k);
            const double rk = -tau * kappa + sigma * mu - aff.dtau * aff.dkappa;
            if (!direction(1.0 - sigma, rc, rk, cmb))
                break;
            const double a = std::min(1.0, 0.99 * step_length(cmb));

            x += a * cmb.dx;
            y += a * cmb.dy;
            tau += a * cmb.dtau;
            kappa += a * cmb.dkappa;
            z += a * cmb.dz_orig;
            s += a * cmb.ds_orig;
            res.iterations = it + 1;
        }

        if (loose)
        {
            x = loose->x / loose->tau;
            y = loose->y / loose->tau;
            z = loose->z / loose->tau;
            s = loose->s / loose->tau;
            res.primal_residual = loose->pres;
            res.dual_residual = loose->dres;
            res.gap = loose->gap;
            res.primal_objective = loose->pcost;
            res.dual_objective = loose->dcost;
            res.reduced_accuracy = true;
            finish(Status::optimal, res.iterations);
            return res;
        }
        // Best effort: report the current iterate rescaled
        if (tau > 0)
        {
            x /= tau;
            y /= tau;
            s /= tau;
            z /= tau;
        }
        finish(Status::numerical_limit, res.iterations);
        return res;
    }
}
