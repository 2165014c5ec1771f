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

#include "maisac/position_optimizer.hpp"

#include "maisac/conic_program.hpp"
#include "maisac/rx_combiner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace maisac
{
    namespace
    {
        using conic::LinExpr;
        using cd = std::complex<double>;
        constexpr double pi = std::numbers::pi;

        double wrap(double a)
        {
            a = std::remainder(a, 2 * pi);
            return a <= -pi ? a + 2 * pi : a;
        }

        double cos_series(double z, TaylorOrder o)
        {
            const double z2 = z * z;
            return o == TaylorOrder::fourth ? 1 - z2 / 2 + z2 * z2 / 24 : 1 - z2 / 2;
        }

        double sin_series(double z) { return z - z * z * z / 6; }

        double slope(const SceneConfig &s, Direction d)
        {
            const double th = d == Direction::user ? s.theta_user : d == Direction::target ? s.theta_target : s.theta_clutter;
            return s.wavenumber() * std::cos(th);
        }

        // Psi2 - delta^2 |Psi1|^2 / (N0 + delta^2 Psi3)
        double effective_psi(const QuadraticForms &q, const SceneConfig &s)
        {
            const double d2 = s.clutter_gain * s.clutter_gain;
            return q.psi2 - d2 * std::norm(q.cross) / (s.radar_noise + d2 * q.psi3);
        }

        const Eigen::VectorXcd &coef_b(const SurrogateCoefficients &c, Direction d)
        {
            return d == Direction::user ? c.b_user : d == Direction::target ? c.b_target : c.b_clutter;
        }

        const Eigen::VectorXd &coef_offset(const SurrogateCoefficients &c, Direction d)
        {
            return d == Direction::user ? c.offset_user : d == Direction::target ? c.offset_target : c.offset_clutter;
        }

        double coef_slope(const SurrogateCoefficients &c, Direction d)
        {
            return d == Direction::user ? c.slope_user : d == Direction::target ? c.slope_target : c.slope_clutter;
        }

        // quad - 2 sum |b_i| (sin(phi_i) z_i + z_i^2 / 2) with z_i = s d_i and v_i >= d_i^2:
        // a lower bound on a^H W a that is tight at d = 0
        LinExpr quadratic_minorant(const SurrogateCoefficients &c, Direction dir, const std::vector<conic::Var> &d,
                                   const std::vector<conic::Var> &v, double quad)
        {
            const Eigen::VectorXcd &b = coef_b(c, dir);
            const Eigen::VectorXd &off = coef_offset(c, dir);
            const double s = coef_slope(c, dir);
            LinExpr e(quad);
            for (size_t i = 0; i < d.size(); ++i)
            {
                const double m = std::abs(b(i));
                e -= (2 * m * std::sin(off(i)) * s) * LinExpr(d[i]);
                e -= (m * s * s) * LinExpr(v[i]);
            }
            return e;
        }
    }

    double SlackTriple::sensing(const SceneConfig &scene) const
    {
        const double s2 = scene.target_gain * scene.target_gain;
        const double d2 = scene.clutter_gain * scene.clutter_gain;
        return s2 / scene.radar_noise * (phi - d2 * phi_tilde / (scene.radar_noise + d2 * phi_bar));
    }

    std::complex<double> receive_overlap(const Eigen::VectorXd &y, const SceneConfig &scene)
    {
        return steering(y, scene.theta_target, scene.wavelength).dot(steering(y, scene.theta_clutter, scene.wavelength));
    }

    QuadraticForms factorize_quadratics(const ArrayLayout &layout, const Eigen::MatrixXcd &W, const SceneConfig &scene)
    {
        if (W.rows() != scene.n_tx || W.cols() != scene.n_tx || layout.tx().size() != scene.n_tx ||
            layout.rx().size() != scene.n_rx)
            throw InvalidParameter("factorize_quadratics: dimension mismatch");
        const Eigen::VectorXcd ap = tx_steering(layout, scene.theta_target, scene);
        const Eigen::VectorXcd ac = tx_steering(layout, scene.theta_clutter, scene);
        QuadraticForms q;
        q.psi2 = scene.n_rx * ap.dot(W * ap).real();
        q.psi3 = scene.n_rx * ac.dot(W * ac).real();
        q.cross = receive_overlap(layout.rx(), scene) * ac.dot(W * ap);
        return q;
    }

    Surrogate build_surrogate(const Eigen::VectorXd &x_anchor, const Eigen::MatrixXcd &W, const ArrayLayout &layout,
                              const SceneConfig &scene)
    {
        if (x_anchor.size() != scene.n_tx || W.rows() != scene.n_tx || W.cols() != scene.n_tx)
            throw InvalidParameter("build_surrogate: dimension mismatch");
        if (!x_anchor.allFinite())
            throw InvalidParameter("build_surrogate: non-finite anchor");
        Surrogate s;
        s.anchor = x_anchor;
        SurrogateCoefficients &c = s.coef;
        const double lam = scene.wavelength;
        const Eigen::VectorXcd au = steering(x_anchor, scene.theta_user, lam);
        const Eigen::VectorXcd ap = steering(x_anchor, scene.theta_target, lam);
        const Eigen::VectorXcd ac = steering(x_anchor, scene.theta_clutter, lam);
        c.b_user = W * au;
        c.b_target = W * ap;
        c.b_clutter = W * ac;
        c.slope_user = slope(scene, Direction::user);
        c.slope_target = slope(scene, Direction::target);
        c.slope_clutter = slope(scene, Direction::clutter);
        c.quad_user = au.dot(c.b_user).real();
        c.quad_target = ap.dot(c.b_target).real();
        c.quad_clutter = ac.dot(c.b_clutter).real();
        c.cross_anchor = ac.dot(c.b_target);
        c.n_tilde = receive_overlap(layout.rx(), scene);

        const Eigen::Index n = x_anchor.size();
        auto offsets = [&](const Eigen::VectorXcd &b, double sl)
        {
            Eigen::VectorXd o(n);
            for (Eigen::Index i = 0; i < n; ++i)
                o(i) = wrap(sl * x_anchor(i) - std::arg(b(i)));
            return o;
        };
        c.offset_user = offsets(c.b_user, c.slope_user);
        c.offset_target = offsets(c.b_target, c.slope_target);
        c.offset_clutter = offsets(c.b_clutter, c.slope_clutter);

        // a_C0^H W a_P(x) = sum conj(bC_i) e^{j rhoP0_i} e^{j kappa_bar_i}
        // a_C(x)^H W a_P0 = sum bP_i e^{-j rhoC0_i} e^{-j kappa_i}
        const cd J(0, 1);
        c.omega_clutter.resize(n);
        c.xi_clutter.resize(n);
        c.omega_target.resize(n);
        c.xi_target.resize(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const cd beta = c.n_tilde * std::conj(c.b_clutter(i)) * ap(i);
            const cd gam = c.n_tilde * c.b_target(i) * std::conj(ac(i));
            c.omega_clutter(i) = beta;
            c.xi_clutter(i) = J * beta;
            c.omega_target(i) = gam;
            c.xi_target(i) = -J * gam;
        }
        c.cross_constant = -c.n_tilde * c.cross_anchor;

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(W, Eigen::EigenvaluesOnly);
        c.w_norm = std::max(es.eigenvalues().maxCoeff(), 0.0);

        s.at_anchor = auxiliary_values(s, x_anchor);
        return s;
    }

    AuxiliaryVariables auxiliary_values(const Surrogate &s, const Eigen::VectorXd &x)
    {
        if (x.size() != s.anchor.size())
            throw InvalidParameter("auxiliary_values: dimension mismatch");
        const SurrogateCoefficients &c = s.coef;
        const Eigen::VectorXd d = x - s.anchor;
        AuxiliaryVariables a;
        a.kappa = c.slope_clutter * d;
        a.kappa_bar = c.slope_target * d;
        a.u = a.kappa.cwiseAbs2();
        a.u_bar = a.kappa_bar.cwiseAbs2();
        a.zeta = a.kappa.cwiseProduct(a.u);
        a.zeta_bar = a.kappa_bar.cwiseProduct(a.u_bar);
        a.lambda_hat = c.slope_user * x;
        auto tau = [&](const Eigen::VectorXcd &b, double sl)
        {
            Eigen::VectorXd t(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i)
                t(i) = std::pow(wrap(sl * x(i) - std::arg(b(i))), 2);
            return t;
        };
        a.tau_user = tau(c.b_user, c.slope_user);
        a.tau_target = tau(c.b_target, c.slope_target);
        a.tau_clutter = tau(c.b_clutter, c.slope_clutter);
        a.eta = cross_linear_taylor(s, x);
        return a;
    }

    double phasor_sum_exact(const Surrogate &s, Direction dir, const Eigen::VectorXd &x)
    {
        const Eigen::VectorXcd &b = coef_b(s.coef, dir);
        const Eigen::VectorXd &off = coef_offset(s.coef, dir);
        const double sl = coef_slope(s.coef, dir);
        double sum = 0;
        for (Eigen::Index i = 0; i < x.size(); ++i)
            sum += std::abs(b(i)) * std::cos(off(i) + sl * (x(i) - s.anchor(i)));
        return sum;
    }

    double phasor_sum_taylor(const Surrogate &s, Direction dir, const Eigen::VectorXd &x, TaylorOrder order)
    {
        const Eigen::VectorXcd &b = coef_b(s.coef, dir);
        const Eigen::VectorXd &off = coef_offset(s.coef, dir);
        const double sl = coef_slope(s.coef, dir);
        double sum = 0;
        for (Eigen::Index i = 0; i < x.size(); ++i)
        {
            const double z = sl * (x(i) - s.anchor(i));
            sum += std::abs(b(i)) * (std::cos(off(i)) * cos_series(z, order) - std::sin(off(i)) * sin_series(z));
        }
        return sum;
    }

    std::complex<double> cross_linear_exact(const Surrogate &s, const Eigen::VectorXd &x)
    {
        const SurrogateCoefficients &c = s.coef;
        cd sum = c.cross_constant;
        for (Eigen::Index i = 0; i < x.size(); ++i)
        {
            const double d = x(i) - s.anchor(i);
            sum += c.omega_clutter(i) * std::polar(1.0, c.slope_target * d);
            sum += c.omega_target(i) * std::polar(1.0, -c.slope_clutter * d);
        }
        return sum;
    }

    std::complex<double> cross_linear_taylor(const Surrogate &s, const Eigen::VectorXd &x, TaylorOrder order)
    {
        const SurrogateCoefficients &c = s.coef;
        cd sum = c.cross_constant;
        for (Eigen::Index i = 0; i < x.size(); ++i)
        {
            const double d = x(i) - s.anchor(i);
            const double kb = c.slope_target * d, k = c.slope_clutter * d;
            sum += c.omega_clutter(i) * cos_series(kb, order) + c.xi_clutter(i) * sin_series(kb);
            sum += c.omega_target(i) * cos_series(k, order) + c.xi_target(i) * sin_series(k);
        }
        return sum;
    }

    double surrogate_objective(const Surrogate &s, const Eigen::VectorXd &x, const SceneConfig &scene,
                               TaylorOrder order)
    {
        const double g = std::norm(scene.path_gain) / scene.comm_noise;
        return g * (2 * phasor_sum_taylor(s, Direction::user, x, order) - s.coef.quad_user);
    }

    std::vector<SpacingCut> linearize_min_distance(const Eigen::VectorXd &x_ref, double D)
    {
        if (!(D > 0) || !x_ref.allFinite())
            throw InvalidParameter("linearize_min_distance: bad arguments");
        std::vector<SpacingCut> cuts;
        const int n = int(x_ref.size());
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
            {
                if (k == l)
                    continue;
                const double gap = x_ref(k) - x_ref(l);
                if (std::abs(gap) < D * (1 - 1e-9))
                    throw InvalidAnchor("reference positions closer than the minimum spacing");
                cuts.push_back({k, l, gap > 0 ? 1.0 : -1.0, D});
            }
        return cuts;
    }

    Eigen::VectorXd project_positions(const Eigen::VectorXd &x, double D, double lo, double hi)
    {
        const Eigen::Index n = x.size();
        if (n == 0)
            return x;
        if (hi - lo < double(n - 1) * D * (1 - 1e-12))
            throw InvalidParameter("project_positions: interval cannot hold the antennas");
        std::vector<double> z(x.data(), x.data() + n);
        std::sort(z.begin(), z.end());
        for (Eigen::Index i = 0; i < n; ++i)
            z[i] -= double(i) * D;
        // pool adjacent violators for a nondecreasing fit
        std::vector<double> mean;
        std::vector<int> count;
        for (double v : z)
        {
            mean.push_back(v);
            count.push_back(1);
            while (mean.size() > 1 && mean[mean.size() - 2] > mean.back())
            {
                const double m = mean.back();
                const int c = count.back();
                mean.pop_back();
                count.pop_back();
                mean.back() = (mean.back() * count.back() + m * c) / (count.back() + c);
                count.back() += c;
            }
        }
        const double top = std::max(lo, hi - double(n - 1) * D);
        Eigen::VectorXd out(n);
        Eigen::Index i = 0;
        for (size_t b = 0; b < mean.size(); ++b)
            for (int c = 0; c < count[b]; ++c, ++i)
                out(i) = std::clamp(mean[b], lo, top) + double(i) * D;
        return out;
    }

    SubproblemResult solve_position_subproblem(Side side, const Eigen::VectorXd &anchor, const Eigen::VectorXcd &w,
                                               const ArrayLayout &layout, const SceneConfig &scene, double radius,
                                               double lo, double hi, const conic::SolverOptions &opts)
    {
        const bool tx = side == Side::transmit;
        const int n = int(anchor.size());
        if (n != (tx ? scene.n_tx : scene.n_rx) || w.size() != scene.n_tx)
            throw InvalidParameter("solve_position_subproblem: dimension mismatch");
        if (!(radius > 0))
            throw InvalidParameter("solve_position_subproblem: radius must be > 0");
        const double D = scene.min_spacing;
        const double slack = 1e-9 * std::max(1.0, hi - lo);
        if (anchor.minCoeff() < lo - slack || anchor.maxCoeff() > hi + slack)
            throw InvalidAnchor("anchor outside the allowed interval");
        for (int i = 1; i < n; ++i)
            if (anchor(i) < anchor(i - 1))
                throw InvalidAnchor("anchor must be sorted");
        const auto cuts = linearize_min_distance(anchor, D);

        conic::ConicProgram prog;
        std::vector<conic::Var> d, v;
        for (int i = 0; i < n; ++i)
        {
            d.push_back(prog.add_scalar("d" + std::to_string(i)));
            v.push_back(prog.add_scalar("v" + std::to_string(i)));
            prog.add_rotated_soc(LinExpr(v[i]), 0.5, {LinExpr(d[i])});
            prog.add_nonneg(LinExpr(d[i]) + radius);
            prog.add_nonneg(radius - LinExpr(d[i]));
            prog.add_nonneg(LinExpr(d[i]) + (anchor(i) - lo));
            prog.add_nonneg((hi - anchor(i)) - LinExpr(d[i]));
        }
        for (const SpacingCut &c : cuts)
            if (c.l == c.k + 1)
                prog.add_nonneg(c.sign * (LinExpr(d[c.k]) - LinExpr(d[c.l])) + (c.sign * (anchor(c.k) - anchor(c.l)) - c.bound));

        SubproblemResult res;
        const double n0 = scene.radar_noise;
        const double del = scene.clutter_gain;
        const double d2 = del * del;
        const double s2 = scene.target_gain * scene.target_gain;
        const Eigen::MatrixXcd W = w * w.adjoint();
        conic::Var t = prog.add_scalar("t");
        LinExpr phi, phi_bar, m;
        double n_abs = 0, b_abs = 0;

        if (tx)
        {
            const ArrayLayout here = layout.with(Side::transmit, anchor);
            const Surrogate sur = build_surrogate(anchor, W, here, scene);
            const SurrogateCoefficients &c = sur.coef;
            const double gain = std::norm(scene.path_gain) / scene.comm_noise;
            prog.maximize(gain * quadratic_minorant(c, Direction::user, d, v, c.quad_user));

            phi = double(scene.n_rx) * quadratic_minorant(c, Direction::target, d, v, c.quad_target);
            phi_bar = double(scene.n_rx) * quadratic_minorant(c, Direction::clutter, d, v, c.quad_clutter);
            n_abs = std::abs(c.n_tilde);
            // |a_C^H W a_P| <= |B0 + j sum g_i d_i| + sum e_i v_i
            const cd J(0, 1);
            const Eigen::VectorXcd ap = steering(anchor, scene.theta_target, scene.wavelength);
            const Eigen::VectorXcd ac = steering(anchor, scene.theta_clutter, scene.wavelength);
            LinExpr re(c.cross_anchor.real()), im(c.cross_anchor.imag());
            m = LinExpr(t);
            const double sp = c.slope_target, sc = c.slope_clutter;
            for (int i = 0; i < n; ++i)
            {
                const cd g = J * (sp * std::conj(c.b_clutter(i)) * ap(i) - sc * c.b_target(i) * std::conj(ac(i)));
                re += g.real() * LinExpr(d[i]);
                im += g.imag() * LinExpr(d[i]);
                const double e = (std::abs(c.b_clutter(i)) * sp * sp + std::abs(c.b_target(i)) * sc * sc) / 2 +
                                 c.w_norm * std::abs(sc * sp);
                m += e * LinExpr(v[i]);
            }
            prog.add_soc(LinExpr(t), {re, im});

            if (scene.sensing_floor > 0 && s2 > 0)
            {
                const QuadraticForms q = factorize_quadratics(here, W, scene);
                const double g = std::min(scene.sensing_floor * n0 / s2, effective_psi(q, scene) * (1 - 1e-9));
                if (d2 > 0 && n_abs > 0)
                    prog.add_rotated_soc(phi - g, 0.5 * (n0 + d2 * phi_bar), {(del * n_abs) * m});
                else
                    prog.add_nonneg(phi - g);
            }
        }
        else
        {
            // minimize a majorant of |N~(y)| = |sum exp(j s y_n)|
            const double s = scene.wavenumber() * (std::cos(scene.theta_clutter) - std::cos(scene.theta_target));
            cd n0t = 0;
            LinExpr re, im;
            for (int i = 0; i < n; ++i)
            {
                const double ph = s * anchor(i);
                n0t += std::polar(1.0, ph);
                re -= (s * std::sin(ph)) * LinExpr(d[i]);
                im += (s * std::cos(ph)) * LinExpr(d[i]);
            }
            re += n0t.real();
            im += n0t.imag();
            prog.add_soc(LinExpr(t), {re, im});
            m = LinExpr(t);
            for (int i = 0; i < n; ++i)
                m += (s * s / 2) * LinExpr(v[i]);
            prog.minimize(m);
        }

        const conic::ConicSolution sol = prog.solve(opts);
        if (sol.status != conic::Status::optimal)
            return res;
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i)
            x(i) = anchor(i) + sol.value(d[i]);
        res.solved = true;
        res.candidate = project_positions(x, D, lo, hi);
        if (tx)
        {
            res.surrogate = sol.objective;
            res.slack.phi = sol.value(phi);
            res.slack.phi_bar = sol.value(phi_bar);
            res.slack.phi_tilde = std::pow(n_abs * sol.value(m), 2);
        }
        else
        {
            const QuadraticForms q = factorize_quadratics(layout, W, scene);
            const double nt = std::abs(receive_overlap(layout.rx(), scene));
            b_abs = nt > 0 ? std::abs(q.cross) / nt : 0;
            res.slack.phi = q.psi2;
            res.slack.phi_bar = q.psi3;
            res.slack.phi_tilde = std::pow(sol.objective * b_abs, 2);
            res.surrogate = res.slack.sensing(scene);
        }
        return res;
    }

    PositionResult optimize_positions(Side side, const ArrayLayout &layout, const Eigen::VectorXcd &w,
                                      const SceneConfig &scene, const PositionOptions &opts)
    {
        scene.validate();
        validate_layout(layout, scene);
        if (w.size() != scene.n_tx || !w.allFinite())
            throw InvalidParameter("optimize_positions: bad beamformer");
        const bool tx = side == Side::transmit;
        const double aperture = tx ? scene.tx_aperture : scene.rx_aperture;
        const double floor = scene.sensing_floor * (1 - 1e-6);

        auto exact = [&](const Eigen::VectorXd &p)
        {
            const ArrayLayout l = layout.with(side, p);
            return tx ? comm_snr(w, l, scene) : mvdr_snr_closedform(w, l, scene);
        };
        auto sensing_ok = [&](const Eigen::VectorXd &p)
        {
            return !tx || scene.sensing_floor <= 0 || mvdr_snr_closedform(w, layout.with(side, p), scene) >= floor;
        };

        PositionResult res;
        res.layout = layout;
        Eigen::VectorXd anchor = layout.positions(side);
        double f = exact(anchor);
        res.objective = f;
        const int n = int(anchor.size());
        // a single element sees only a common phase; on the receive side nothing depends on y without clutter
        if (n < 2 || (!tx && (scene.clutter_gain == 0 || scene.theta_clutter == scene.theta_target)))
            return res;

        const double r_min = 1e-4 * scene.wavelength;
        double r = std::min(opts.trust.radius, aperture);
        for (int it = 0; it < opts.max_iter && r >= r_min; ++it)
        {
            PositionStep step;
            step.anchor = anchor;
            step.radius = r;
            step.exact_anchor = f;
            const SubproblemResult sub = solve_position_subproblem(side, anchor, w, res.layout, scene, r, 0.0, aperture,
                                                                   opts.solver);
            if (!sub.solved)
            {
                step.candidate = anchor;
                step.exact_candidate = f;
                res.trace.push_back(step);
                r *= opts.trust.shrink;
                continue;
            }
            step.candidate = sub.candidate;
            step.surrogate = sub.surrogate;
            if ((sub.candidate - anchor).cwiseAbs().maxCoeff() <= 1e-9 * scene.wavelength)
            {
                step.exact_candidate = f;
                res.trace.push_back(step);
                break;
            }
            const double fc = exact(sub.candidate);
            step.exact_candidate = fc;
            const bool feasible = positions_feasible(sub.candidate, aperture, scene.min_spacing) && sensing_ok(sub.candidate);
            const double scale = std::max(1.0, std::abs(f));
            step.accepted = feasible && fc >= f;
            res.trace.push_back(step);
            if (step.accepted)
            {
                const double gain = fc - f;
                anchor = sub.candidate;
                f = fc;
                res.layout = res.layout.with(side, anchor);
                ++res.accepted;
                r = std::min(r * opts.trust.grow, aperture);
                if (gain <= opts.tol * scale)
                    break;
            }
            else
            {
                if (feasible && fc >= f - opts.tol * scale)
                    break;
                r *= opts.trust.shrink;
            }
        }
        res.no_progress = res.accepted == 0;
        res.objective = f;
        return res;
    }
}
