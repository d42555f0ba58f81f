#include "hnlab/torus_lattice.hpp"

#include "hnlab/eigensolver.hpp"
#include "hnlab/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hnlab {

LinkPtr background_connection(const Grid& grid, int degree) {
    const int n = grid.n();
    if (4L * std::abs(static_cast<long>(degree)) > static_cast<long>(n) * n)
        throw std::invalid_argument("flux too dense for grid: |degree| = " + std::to_string(std::abs(degree)) +
                                    " exceeds n^2/4 = " + std::to_string(n * n / 4));
    const double theta = 2.0 * std::numbers::pi * degree / (static_cast<double>(n) * n);
    std::vector<cplx> ux(grid.size(), 1.0);
    std::vector<cplx> uy(grid.size(), 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) uy[grid.index(i, j)] = std::polar(1.0, theta * i);
    // Closing the x-direction: the transition function across ix = n-1 -> 0.
    for (int j = 0; j < n; ++j) ux[grid.index(n - 1, j)] = std::polar(1.0, -theta * n * j);
    return std::make_shared<const LinkField>(grid, degree, std::move(ux), std::move(uy));
}

namespace {

void check_twist(const LinkField& link, const SectionField& s) {
    if (s.grid() != link.grid()) throw std::invalid_argument("grid mismatch between section and link field");
    if (s.link->degree() != link.degree())
        throw std::invalid_argument("section twist degree " + std::to_string(s.link->degree()) +
                                    " does not match link degree " + std::to_string(link.degree()));
}

LinkPtr share(const LinkField& link, const SectionField& s) {
    return s.link.get() == &link ? s.link : std::make_shared<const LinkField>(link);
}

double euclid_norm(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& z : v) s += std::norm(z);
    return std::sqrt(s);
}

} // namespace

void apply_dbar(const LinkField& link, const cplx* in, cplx* out) {
    const std::size_t N = link.grid().size();
    const double c = 0.25 / link.grid().spacing(); // (1/2) * (1/2h)
    std::vector<cplx> a(N), b(N), ta(N), tb(N);
    link.shift_x(in, a.data());
    link.shift_y(in, b.data());
    for (std::size_t k = 0; k < N; ++k) {
        a[k] -= in[k];
        b[k] -= in[k];
    }
    link.shift_y(a.data(), ta.data());
    link.shift_x(b.data(), tb.data());
    const cplx I(0.0, 1.0);
    for (std::size_t k = 0; k < N; ++k) out[k] = c * ((a[k] + ta[k]) + I * (b[k] + tb[k]));
}

void apply_dbar_adjoint(const LinkField& link, const cplx* in, cplx* out) {
    const std::size_t N = link.grid().size();
    const double c = 0.25 / link.grid().spacing();
    std::vector<cplx> p(N), q(N), tp(N), tq(N);
    // Dx^* = (T_x^* - 1)(1 + T_y^*),  Dy^* = (T_y^* - 1)(1 + T_x^*)
    link.shift_y_adj(in, p.data());
    link.shift_x_adj(in, q.data());
    for (std::size_t k = 0; k < N; ++k) {
        p[k] += in[k];
        q[k] += in[k];
    }
    link.shift_x_adj(p.data(), tp.data());
    link.shift_y_adj(q.data(), tq.data());
    const cplx I(0.0, 1.0);
    for (std::size_t k = 0; k < N; ++k) out[k] = c * ((tp[k] - p[k]) - I * (tq[k] - q[k]));
}

void apply_lattice_laplacian(const LinkField& link, const cplx* in, cplx* out) {
    const std::size_t N = link.grid().size();
    std::vector<cplx> t(N);
    for (std::size_t k = 0; k < N; ++k) out[k] = 4.0 * in[k];
    link.shift_x(in, t.data());
    for (std::size_t k = 0; k < N; ++k) out[k] -= t[k];
    link.shift_x_adj(in, t.data());
    for (std::size_t k = 0; k < N; ++k) out[k] -= t[k];
    link.shift_y(in, t.data());
    for (std::size_t k = 0; k < N; ++k) out[k] -= t[k];
    link.shift_y_adj(in, t.data());
    for (std::size_t k = 0; k < N; ++k) out[k] -= t[k];
}

SectionField covariant_dbar(const LinkField& link, const SectionField& s) {
    check_twist(link, s);
    SectionField out(share(link, s));
    apply_dbar(link, s.values.data(), out.values.data());
    return out;
}

SectionField dbar_adjoint(const LinkField& link, const SectionField& w) {
    check_twist(link, w);
    SectionField out(share(link, w));
    apply_dbar_adjoint(link, w.values.data(), out.values.data());
    return out;
}

SectionField covariant_d_central(const LinkField& link, const SectionField& w) {
    check_twist(link, w);
    const std::size_t N = link.grid().size();
    const double c = 0.25 / link.grid().spacing();
    std::vector<cplx> xp(N), xm(N), yp(N), ym(N);
    link.shift_x(w.values.data(), xp.data());
    link.shift_x_adj(w.values.data(), xm.data());
    link.shift_y(w.values.data(), yp.data());
    link.shift_y_adj(w.values.data(), ym.data());
    SectionField out(share(link, w));
    const cplx I(0.0, 1.0);
    for (std::size_t k = 0; k < N; ++k) out.values[k] = c * ((xp[k] - xm[k]) - I * (yp[k] - ym[k]));
    return out;
}

SectionField lattice_laplacian(const LinkField& link, const SectionField& s) {
    check_twist(link, s);
    SectionField out(share(link, s));
    apply_lattice_laplacian(link, s.values.data(), out.values.data());
    return out;
}

HarmonicProjection harmonic_project(const SectionField& beta, const HarmonicOptions& opts) {
    const LinkField& link = *beta.link;
    const std::size_t N = beta.values.size();
    std::vector<cplx> r(N), p(N), dp(N), ap(N), alpha(N, 0.0);
    apply_dbar_adjoint(link, beta.values.data(), r.data());
    const double bnorm = euclid_norm(r);
    // ||dbar^*|| <= 1/h, so this scale keeps already-harmonic input from chasing roundoff
    const double scale = std::max(bnorm, euclid_norm(beta.values) / link.grid().spacing());
    std::vector<double> history;
    int it = 0;
    if (bnorm > 0.0) {
        p = r;
        double rr = bnorm * bnorm;
        history.push_back(1.0);
        while (std::sqrt(rr) > opts.tol * scale) {
            if (it >= opts.max_iter)
                throw NonconvergenceError("harmonic projection did not converge in " + std::to_string(it) +
                                              " CG iterations",
                                          history);
            apply_dbar(link, p.data(), dp.data());
            apply_dbar_adjoint(link, dp.data(), ap.data());
            double pap = 0.0;
            for (const cplx& z : dp) pap += std::norm(z);
            if (!(pap > 0.0)) break;
            const double a = rr / pap;
            double rr_next = 0.0;
            for (std::size_t k = 0; k < N; ++k) {
                alpha[k] += a * p[k];
                r[k] -= a * ap[k];
                rr_next += std::norm(r[k]);
            }
            const double b = rr_next / rr;
            for (std::size_t k = 0; k < N; ++k) p[k] = r[k] + b * p[k];
            rr = rr_next;
            ++it;
            history.push_back(std::sqrt(rr) / bnorm);
        }
    }
    std::vector<cplx> da(N);
    apply_dbar(link, alpha.data(), da.data());
    SectionField out(beta.link);
    for (std::size_t k = 0; k < N; ++k) out.values[k] = beta.values[k] - da[k];
    std::vector<cplx> check(N);
    apply_dbar_adjoint(link, out.values.data(), check.data());
    return {std::move(out), euclid_norm(check) * link.grid().spacing(), it};
}

namespace {

using RawOp = void (*)(const LinkField&, const cplx*, cplx*);

struct NearKernel {
    Eigen::MatrixXcd resolved; // Euclidean-orthonormal columns
    std::vector<double> singular_values;
    std::size_t near = 0;
    double gap = 0.0;
    int passes = 0;
};

// Numerical kernel of `first` (dbar or its adjoint) via the normal operator
// second * first, then the doubler filter.
NearKernel near_kernel(const LinkField& link, RawOp first, RawOp second, const SectionOptions& opts) {
    const auto dim = static_cast<Eigen::Index>(link.grid().size());
    const int k = static_cast<int>(std::min<Eigen::Index>(dim, std::abs(link.degree()) + opts.extra));
    std::vector<cplx> tmp(static_cast<std::size_t>(dim));
    BlockOperator normal = [&](const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) {
        out.resize(in.rows(), in.cols());
        for (Eigen::Index j = 0; j < in.cols(); ++j) {
            first(link, in.col(j).data(), tmp.data());
            second(link, tmp.data(), out.col(j).data());
        }
    };
    const double h = link.grid().spacing();
    NearKernel nk;
    SubspaceOptions so;
    so.seed = opts.seed;
    const EigenPairs ep = lowest_eigenpairs(normal, dim, k, 4.0 / (h * h), so);
    if (!ep.converged)
        throw NonconvergenceError("subspace iteration for the dbar kernel did not converge",
                                  std::vector<double>(ep.residuals.data(), ep.residuals.data() + ep.residuals.size()));
    nk.passes = ep.passes;
    Eigen::VectorXcd dv(dim);
    for (int j = 0; j < k; ++j) {
        first(link, ep.vectors.col(j).data(), dv.data());
        nk.singular_values.push_back(dv.norm());
    }
    // The Ritz values are sorted; the norms can cross by roundoff inside the kernel.
    std::vector<double> sv = nk.singular_values;
    std::sort(sv.begin(), sv.end());
    nk.singular_values = sv;

    std::size_t cut = 0;
    double best = 0.0;
    for (int j = 0; j + 1 < k; ++j) {
        const double ratio = sv[j] > 0.0 ? sv[j + 1] / sv[j] : std::numeric_limits<double>::infinity();
        if (ratio > best) {
            best = ratio;
            cut = static_cast<std::size_t>(j) + 1;
        }
    }
    nk.near = cut;
    nk.gap = best;
    if (!(best >= opts.min_gap))
        throw std::runtime_error("ill-resolved kernel, refine grid (singular-value gap ratio " +
                                 std::to_string(best) + ")");

    const Eigen::MatrixXcd v = ep.vectors.leftCols(static_cast<Eigen::Index>(cut));
    Eigen::MatrixXcd lv(dim, v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j) apply_lattice_laplacian(link, v.col(j).data(), lv.col(j).data());
    const Eigen::MatrixXcd m = v.adjoint() * lv;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
    Eigen::Index keep = 0;
    for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
        const double q = es.eigenvalues()(j);
        if (std::abs(q - opts.resolution_cut) < 1.0)
            throw std::runtime_error("ill-resolved kernel, refine grid (mode with lattice quotient " +
                                     std::to_string(q) + ")");
        if (q < opts.resolution_cut) ++keep;
    }
    nk.resolved = v * es.eigenvectors().leftCols(keep);
    return nk;
}

} // namespace

HoloSections holo_sections(const LinkPtr& link, const SectionOptions& opts) {
    NearKernel nk = near_kernel(*link, &apply_dbar, &apply_dbar_adjoint, opts);
    HoloSections out;
    out.singular_values = nk.singular_values;
    out.near_kernel = nk.near;
    out.gap_ratio = nk.gap;
    const double h = link->grid().spacing();
    const std::size_t N = link->grid().size();
    std::vector<cplx> d(N);
    for (Eigen::Index j = 0; j < nk.resolved.cols(); ++j) {
        SectionField s(link);
        for (std::size_t k = 0; k < N; ++k) s.values[k] = nk.resolved(static_cast<Eigen::Index>(k), j) / h;
        apply_dbar(*link, s.values.data(), d.data());
        out.dbar_residuals.push_back(euclid_norm(d) * h);
        out.sections.push_back(std::move(s));
    }
    return out;
}

DbarIndex dbar_index(const LinkPtr& link, const SectionOptions& opts) {
    const NearKernel ker = near_kernel(*link, &apply_dbar, &apply_dbar_adjoint, opts);
    const NearKernel cok = near_kernel(*link, &apply_dbar_adjoint, &apply_dbar, opts);
    DbarIndex out;
    out.kernel = static_cast<std::size_t>(ker.resolved.cols());
    out.cokernel = static_cast<std::size_t>(cok.resolved.cols());
    out.kernel_gap = ker.gap;
    out.cokernel_gap = cok.gap;
    return out;
}

} // namespace hnlab
