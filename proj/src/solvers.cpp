#include "hnlab/solvers.hpp"

#include "hnlab/errors.hpp"
#include "hnlab/spectral.hpp"
#include "hnlab/torus_lattice.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hnlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string num(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

void check_section(long degree, const SectionField& s, const Grid& grid, const char* what) {
    if (s.grid() != grid) throw std::invalid_argument(std::string(what) + " lives on a different grid");
    if (s.link->degree() != degree)
        throw std::invalid_argument(std::string(what) + " has twist degree " + std::to_string(s.link->degree()) +
                                    ", expected " + std::to_string(degree));
}

double dbar_norm(const SectionField& s) { return covariant_dbar(*s.link, s).norm(); }

bool is_zero(const SectionField& s) {
    return std::all_of(s.values.begin(), s.values.end(), [](const cplx& z) { return z == cplx(0.0); });
}

// Smallest eigenvalue of the Lanczos tridiagonal assembled from CG coefficients.
double lanczos_min(const std::vector<double>& alpha, const std::vector<double>& beta) {
    const auto m = static_cast<Eigen::Index>(alpha.size());
    if (m == 0) return std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd diag(m), off(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index i = 0; i < m; ++i) {
        diag(i) = 1.0 / alpha[i];
        if (i > 0) diag(i) += beta[i - 1] / alpha[i - 1];
        if (i + 1 < m) off(i) = std::sqrt(beta[i]) / alpha[i];
    }
    if (m == 1) return diag(0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

} // namespace

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
}

NewtonReport kazdan_warner_newton(double kappa, const ScalarField& w, const ScalarField& f, const SolverConfig& cfg) {
    cfg.validate();
    if (w.grid != f.grid) throw std::invalid_argument("coefficient fields live on different grids");
    const Grid& g = f.grid;
    const Spectral fft(g);
    const std::size_t N = g.size();
    NewtonReport rep{ScalarField(g), 0, {}, std::numeric_limits<double>::infinity(), 0};

    if (sup_abs(w.values) == 0.0) {
        // Linear case: -kappa Lap u = f.
        ScalarField rhs = f;
        for (double& v : rhs.values) v /= -kappa;
        rep.u = fft.poisson_solve(rhs);
        rep.residual_history.push_back(0.0);
        return rep;
    }

    std::vector<double>& u = rep.u.values;
    auto residual = [&](const std::vector<double>& uu, std::vector<double>& r) {
        ScalarField tmp(g);
        tmp.values = uu;
        const ScalarField lap = fft.laplacian(tmp);
        for (std::size_t k = 0; k < N; ++k)
            r[k] = -kappa * lap.values[k] + w.values[k] * std::exp(2.0 * uu[k]) - f.values[k];
    };

    std::vector<double> r(N), q(N), delta(N), res(N), z(N), p(N), jp(N), trial(N), rtrial(N);
    residual(u, r);
    for (int it = 0;; ++it) {
        const double rsup = sup_abs(r);
        rep.residual_history.push_back(rsup);
        rep.iterations = it;
        if (rsup <= cfg.tol) break;
        if (it >= cfg.max_iter)
            throw NonconvergenceError("Newton did not reach tol " + num(cfg.tol) + " in " +
                                          std::to_string(cfg.max_iter) + " iterations (residual " + num(rsup) + ")",
                                      rep.residual_history);

        double qmean = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            q[k] = 2.0 * w.values[k] * std::exp(2.0 * u[k]);
            qmean += q[k];
        }
        qmean /= static_cast<double>(N);
        auto jac = [&](const std::vector<double>& v, std::vector<double>& out) {
            ScalarField tmp(g);
            tmp.values = v;
            const ScalarField lap = fft.laplacian(tmp);
            for (std::size_t k = 0; k < N; ++k) out[k] = -kappa * lap.values[k] + q[k] * v[k];
        };
        auto precond = [&](const std::vector<double>& v, std::vector<double>& out) {
            ScalarField tmp(g);
            tmp.values = v;
            out = fft.apply_symbol(tmp, [&](double k2) { return 1.0 / (kappa * k2 + qmean); }).values;
        };

        // PCG for J delta = -r.
        std::fill(delta.begin(), delta.end(), 0.0);
        for (std::size_t k = 0; k < N; ++k) res[k] = -r[k];
        precond(res, z);
        p = z;
        double rz = dot(res, z);
        const double r0 = std::sqrt(dot(res, res));
        std::vector<double> alphas, betas;
        for (int cg = 0; cg < 1000 && std::sqrt(dot(res, res)) > 1e-13 * r0; ++cg) {
            jac(p, jp);
            const double pjp = dot(p, jp);
            if (!(pjp > 0.0))
                throw NonconvergenceError("Newton Jacobian lost positive definiteness", rep.residual_history);
            const double a = rz / pjp;
            for (std::size_t k = 0; k < N; ++k) {
                delta[k] += a * p[k];
                res[k] -= a * jp[k];
            }
            precond(res, z);
            const double rz_next = dot(res, z);
            const double b = rz_next / rz;
            alphas.push_back(a);
            betas.push_back(b);
            for (std::size_t k = 0; k < N; ++k) p[k] = z[k] + b * p[k];
            rz = rz_next;
            ++rep.linear_iterations;
        }
        rep.min_ritz = std::min(rep.min_ritz, lanczos_min(alphas, betas));

        // Backtracking on the L2 merit.
        const double merit = std::sqrt(dot(r, r));
        double lambda = cfg.damping;
        for (;;) {
            for (std::size_t k = 0; k < N; ++k) trial[k] = u[k] + lambda * delta[k];
            residual(trial, rtrial);
            const double m = std::sqrt(dot(rtrial, rtrial));
            if (std::isfinite(m) && (m <= (1.0 - 1e-4 * lambda) * merit || sup_abs(rtrial) <= cfg.tol)) break;
            lambda *= 0.5;
            if (lambda < 1e-10)
                throw NonconvergenceError("Newton line search stagnated at residual " + num(rsup),
                                          rep.residual_history);
        }
        u.swap(trial);
        r.swap(rtrial);
    }
    return rep;
}

HeSolution he_line_solve(long degree, const std::optional<ScalarField>& target, const Grid& grid,
                         const SolverConfig& cfg) {
    cfg.validate();
    if (!target) return {ScalarField(grid), 0.0};
    const ScalarField& g = *target;
    if (g.grid != grid) throw std::invalid_argument("target lives on a different grid");
    const double total = g.integral();
    const double scale = std::max({1.0, std::abs(static_cast<double>(degree)), g.sup_norm() * grid.volume()});
    if (std::abs(total - degree) > 1e-10 * scale)
        throw ObstructionError("obstructed target: integral " + num(total) + " differs from degree " +
                               std::to_string(degree));
    ScalarField rhs(grid);
    const double base = static_cast<double>(degree) / grid.volume();
    for (std::size_t k = 0; k < rhs.values.size(); ++k) rhs.values[k] = kTwoPi * (base - g.values[k]);
    const double m = rhs.mean();
    for (double& v : rhs.values) v -= m;
    HeSolution out{poisson_solve(rhs), 0.0};
    const ScalarField phi = line_density(degree, out.psi);
    for (std::size_t k = 0; k < phi.values.size(); ++k)
        out.residual = std::max(out.residual, std::abs(phi.values[k] - g.values[k]));
    if (out.residual > cfg.tol * std::max(1.0, g.sup_norm()))
        throw NonconvergenceError("Hermitian-Einstein solve missed tolerance", {out.residual});
    return out;
}

VortexSolution vortex_solve(long degree, const SectionField& phi0, double tau, const Grid& grid,
                            const SolverConfig& cfg) {
    cfg.validate();
    check_section(degree, phi0, grid, "phi0");
    VortexSolution out{ScalarField(grid), 0, {}};
    out.dbar_residual = dbar_norm(phi0);
    if (out.dbar_residual >= 1e-8)
        throw std::invalid_argument("phi0 is not numerically holomorphic (dbar residual " +
                                    num(out.dbar_residual) + ")");
    const double vol = grid.volume();
    if (is_zero(phi0)) {
        if (std::abs(tau * vol - degree) > 1e-12 * std::max(1.0, std::abs(static_cast<double>(degree))))
            throw ObstructionError("no solution: integral obstruction (phi0 = 0 forces tau*vol = degree, got tau*vol = " +
                                   num(tau * vol) + ")");
        out.residual_history = {0.0};
        out.min_ritz = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    if (tau * vol <= degree)
        throw ObstructionError("no solution: integral obstruction (tau*vol = " + num(tau * vol) +
                               " must exceed degree " + std::to_string(degree) + " when phi0 != 0)");

    ScalarField w(grid), f(grid, tau - degree / vol);
    for (std::size_t k = 0; k < w.values.size(); ++k) w.values[k] = std::norm(phi0.values[k]) / kTwoPi;
    NewtonReport nr = kazdan_warner_newton(1.0 / kTwoPi, w, f, cfg);
    out.psi = std::move(nr.u);
    out.iterations = nr.iterations;
    out.residual_history = std::move(nr.residual_history);
    out.residual = out.residual_history.back();
    out.min_ritz = nr.min_ritz;
    double s = 0.0;
    for (std::size_t k = 0; k < w.values.size(); ++k)
        s += std::norm(phi0.values[k]) * std::exp(2.0 * out.psi.values[k]);
    out.section_norm_h = s * grid.cell_area();
    out.identity_residual = std::abs(degree + out.section_norm_h / kTwoPi - tau * vol);
    return out;
}

CoupledVortexSolution coupled_vortex_solve(long d1, long d2, const SectionField& phi0, double tau,
                                           const Grid& grid, const SolverConfig& cfg) {
    cfg.validate();
    check_section(d1 - d2, phi0, grid, "Phi0");
    const bool zero = is_zero(phi0);
    if (!zero && d1 < d2)
        throw std::invalid_argument("a nonzero Phi0 in Hom(L2, L1) needs d1 >= d2");
    const double dres = dbar_norm(phi0);
    if (dres >= 1e-8)
        throw std::invalid_argument("Phi0 is not numerically holomorphic (dbar residual " + num(dres) + ")");

    const double vol = grid.volume();
    CoupledVortexSolution out{ScalarField(grid), ScalarField(grid), 0.0, 0.0, 0, {}};
    out.tau = tau;
    out.tau_prime = static_cast<double>(d1 + d2) / vol - tau;
    const double drive = (tau - out.tau_prime) - static_cast<double>(d1 - d2) / vol;
    if (zero) {
        if (std::abs(drive) * vol > 1e-12 * std::max(1.0, std::abs(static_cast<double>(d1))))
            throw ObstructionError("no solution: integral obstruction (Phi0 = 0 forces tau*vol = d1, got " +
                                   num(tau * vol) + ")");
        out.residual_history = {0.0};
        out.min_ritz = std::numeric_limits<double>::quiet_NaN();
    } else {
        if (drive * vol <= 0.0)
            throw ObstructionError("no solution: integral obstruction (tau*vol = " + num(tau * vol) +
                                   " must exceed d1 = " + std::to_string(d1) + " when Phi0 != 0)");
        // psi1 + psi2 is harmonic, hence constant; gauge it to zero and solve for chi = psi1 - psi2.
        ScalarField w(grid), f(grid, drive);
        for (std::size_t k = 0; k < w.values.size(); ++k)
            w.values[k] = std::norm(phi0.values[k]) / std::numbers::pi;
        NewtonReport nr = kazdan_warner_newton(1.0 / kTwoPi, w, f, cfg);
        for (std::size_t k = 0; k < w.values.size(); ++k) {
            out.psi1.values[k] = 0.5 * nr.u.values[k];
            out.psi2.values[k] = -0.5 * nr.u.values[k];
        }
        out.iterations = nr.iterations;
        out.residual_history = std::move(nr.residual_history);
        out.min_ritz = nr.min_ritz;
    }

    const ScalarField phi1 = line_density(d1, out.psi1);
    const ScalarField phi2 = line_density(d2, out.psi2);
    double s = 0.0;
    out.phi1_margin = out.phi2_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < phi1.values.size(); ++k) {
        const double b = std::norm(phi0.values[k]) * std::exp(2.0 * (out.psi1.values[k] - out.psi2.values[k]));
        s += b;
        out.residual1 = std::max(out.residual1, std::abs(phi1.values[k] + b / kTwoPi - tau));
        out.residual2 = std::max(out.residual2, std::abs(phi2.values[k] - b / kTwoPi - out.tau_prime));
        out.phi1_margin = std::min(out.phi1_margin, tau - phi1.values[k]);
        out.phi2_margin = std::min(out.phi2_margin, phi2.values[k] - out.tau_prime);
    }
    out.section_norm_h = s * grid.cell_area();
    out.identity1 = std::abs(d1 + out.section_norm_h / kTwoPi - tau * vol);
    out.identity2 = std::abs(d2 - out.section_norm_h / kTwoPi - out.tau_prime * vol);
    return out;
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, double floor) {
    if (x.size() != y.size()) throw std::invalid_argument("fit arrays differ in length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.0 && y[i] >= floor && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    PowerFit fit;
    fit.used = static_cast<int>(lx.size());
    if (fit.used < 2) {
        fit.exponent = fit.intercept = fit.rms = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    const double n = fit.used;
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < fit.used; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < fit.used; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    double ss = 0.0;
    for (int i = 0; i < fit.used; ++i) {
        const double e = ly[i] - (fit.intercept + fit.exponent * lx[i]);
        ss += e * e;
    }
    fit.rms = std::sqrt(ss / n);
    return fit;
}

SweepReport theorem5_sweep(long d1, long d2, const SectionField& beta_raw, const std::vector<double>& t_values,
                           const Grid& grid, const SolverConfig& cfg) {
    cfg.validate();
    if (t_values.empty()) throw std::invalid_argument("empty t list");
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        if (!(t_values[i] >= 0.0) || !std::isfinite(t_values[i]))
            throw std::invalid_argument("t values must be finite and nonnegative");
        if (i > 0 && !(t_values[i] < t_values[i - 1])) throw std::invalid_argument("t values must decrease");
    }
    check_section(d1 - d2, beta_raw, grid, "beta");

    SweepReport rep;
    rep.d1 = d1;
    rep.d2 = d2;
    const HarmonicProjection hp = harmonic_project(beta_raw);
    rep.harmonic_residual = hp.adjoint_residual;
    for (const cplx& z : hp.beta.values) rep.beta_sup = std::max(rep.beta_sup, std::abs(z));
    const HeSolution h1 = he_line_solve(d1, std::nullopt, grid, cfg);
    const HeSolution h2 = he_line_solve(d2, std::nullopt, grid, cfg);

    const double vol = grid.volume();
    const double mu1 = d1 / vol, mu2 = d2 / vol, mu = 0.5 * (mu1 + mu2);
    const Rational qvol = exact_from_double(vol);
    const std::vector<Rational> witness_slopes = {Rational(d1) / qvol, Rational(d1 + d2) / (2 * qvol)};

    std::vector<double> ts, ds;
    for (double t : t_values) {
        const MetricData md = MetricData::extension(h1.psi, h2.psi, hp.beta, t);
        const CurvatureField F = extension_curvature(d1, d2, md);
        SweepPoint pt;
        pt.t = t;
        for (const auto& m : F.values) {
            const double a = m(0, 0).real() - mu1;
            const double b = m(1, 1).real() - mu2;
            const double rad = std::hypot(0.5 * (a - b), std::abs(m(0, 1)));
            pt.deviation = std::max(pt.deviation, std::abs(0.5 * (a + b)) + rad);
        }
        const EigRange er = eig_range(F);
        pt.offdiag_sup = F.offdiag_sup();
        pt.m_achieved = er.max;
        pt.ym_energy = ym_energy(F, mu);
        pt.domination_margin = dominated_by(F, pt.m_achieved, BoundSide::upper).margin;
        pt.guan_consistent = guan_bound_check(witness_slopes, exact_from_double(pt.m_achieved), BoundSide::upper);
        rep.points.push_back(pt);
        ts.push_back(t);
        ds.push_back(pt.deviation);
    }
    const PowerFit fit = fit_power_law(ts, ds, 1e3 * std::numeric_limits<double>::epsilon());
    rep.fitted_exponent = fit.exponent;
    rep.fit_intercept = fit.intercept;
    rep.fit_residual = fit.rms;
    rep.fit_points = fit.used;
    rep.monotone = true;
    for (std::size_t i = 1; i < ds.size(); ++i)
        if (ds[i] > ds[i - 1] * (1.0 + 1e-12) + 1e-15) rep.monotone = false;
    return rep;
}

InfMReport inf_m_estimate(const BundleModel& model, const std::vector<double>& t_values, const Grid& grid,
                          const SolverConfig& cfg, const std::optional<SectionField>& beta) {
    cfg.validate();
    const Rational qvol = exact_from_double(grid.volume());
    const CurveModel curve{1, qvol};
    InfMReport rep;
    rep.mu1 = mu1(model, curve);
    const double mu1d = rep.mu1.get_d();
    std::vector<Rational> sub_slopes;

    const Ext2* ext = model.ext2();
    if (!ext || !ext->class_nonzero) {
        // Split model: the orthogonal sum of constant-curvature metrics is Hermitian-Einstein on each factor.
        std::vector<std::int64_t> degrees =
            ext ? std::vector<std::int64_t>{ext->d_sub, ext->d_quot} : model.direct_sum()->degrees;
        double m = -std::numeric_limits<double>::infinity();
        double margin = std::numeric_limits<double>::infinity();
        for (std::int64_t d : degrees) {
            const CurvatureField F = line_curvature(static_cast<long>(d), ScalarField(grid));
            m = std::max(m, eig_range(F).max);
            sub_slopes.push_back(Rational(d) / qvol);
        }
        for (std::int64_t d : degrees)
            margin = std::min(margin, dominated_by(line_curvature(static_cast<long>(d), ScalarField(grid)), m,
                                                   BoundSide::upper).margin);
        const std::vector<double> ts = t_values.empty() ? std::vector<double>{0.0} : t_values;
        rep.t_values = ts;
        rep.m_values.assign(ts.size(), m);
        rep.domination_margins.assign(ts.size(), margin);
        rep.attained = m == mu1d;
        rep.layers_agree = margin >= -1e-12 && guan_bound_check(sub_slopes, exact_from_double(m), BoundSide::upper);
        return rep;
    }

    if (ext->d_sub > ext->d_quot)
        throw ObstructionError("unrealizable on genus 1: a nonsplit extension with d_sub > d_quot would have "
                               "Ext^1(L_quot, L_sub) = H^1(L_sub - L_quot) = 0, so it splits");
    if (ext->d_sub < ext->d_quot)
        throw std::invalid_argument("unsupported model: nonsplit extension with d_sub < d_quot is stable and "
                                    "needs a rank-2 Hermitian-Einstein solve");
    if (t_values.empty()) throw std::invalid_argument("empty t list");
    for (double t : t_values)
        if (!(t > 0.0)) throw std::invalid_argument("nonsplit models need t > 0");

    const long d = static_cast<long>(ext->d_sub);
    SectionField b = beta ? *beta : SectionField(background_connection(grid, 0), std::vector<cplx>(grid.size(), 1.0));
    const SweepReport sw = theorem5_sweep(d, d, b, t_values, grid, cfg);
    rep.layers_agree = true;
    for (const SweepPoint& p : sw.points) {
        rep.t_values.push_back(p.t);
        rep.m_values.push_back(p.m_achieved);
        rep.domination_margins.push_back(p.domination_margin);
        rep.layers_agree = rep.layers_agree && p.domination_margin >= -1e-12 && p.guan_consistent;
    }
    for (std::size_t i = 1; i < rep.m_values.size(); ++i)
        rep.halving_ratios.push_back((rep.m_values[i] - mu1d) / (rep.m_values[i - 1] - mu1d));
    rep.attained = std::any_of(rep.m_values.begin(), rep.m_values.end(), [&](double m) { return m <= mu1d; });
    return rep;
}

} // namespace hnlab
