#include "hnlab/hermitian_fields.hpp"

#include "hnlab/spectral.hpp"
#include "hnlab/torus_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hnlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCellSign = 1.0;

void check_same_grid(const Grid& a, const Grid& b) {
    if (a != b) throw std::invalid_argument("fields live on different grids");
}

// Closed-form eigenvalues of a Hermitian 2x2 matrix.
std::pair<double, double> eig2(const Eigen::Matrix2cd& m) {
    const double a = m(0, 0).real();
    const double b = m(1, 1).real();
    const double mid = 0.5 * (a + b);
    const double rad = std::hypot(0.5 * (a - b), std::abs(m(0, 1)));
    return {mid - rad, mid + rad};
}

// Central covariant (1,0) derivative on the cell lattice. Cell values are held
// in the frame of their lower-left site; transport between neighbouring cells
// picks up the flux of the half-cell strip between the two paths.
std::vector<cplx> cell_d_central(const LinkField& link, const std::vector<cplx>& w) {
    const Grid& g = link.grid();
    const std::size_t N = g.size();
    const double c = 0.25 / g.spacing();
    std::vector<double> a(N);
    for (std::size_t k = 0; k < N; ++k) a[k] = link.plaquette_angle(k);
    const auto& ux = link.ux();
    const auto& uy = link.uy();
    const cplx I(0.0, 1.0);
    std::vector<cplx> out(N);
    for (std::size_t k = 0; k < N; ++k) {
        const int i = g.ix(k), j = g.iy(k);
        const std::size_t xp = g.index(i + 1, j), xm = g.index(i - 1, j);
        const std::size_t yp = g.index(i, j + 1), ym = g.index(i, j - 1);
        const double fx = 0.25 * (a[k] + a[xp]);
        const double fxm = 0.25 * (a[xm] + a[k]);
        const double fy = 0.25 * (a[k] + a[yp]);
        const double fym = 0.25 * (a[ym] + a[k]);
        const cplx fwd_x = std::conj(ux[k]) * std::polar(1.0, kCellSign * fx) * w[xp];
        const cplx bwd_x = ux[xm] * std::polar(1.0, -kCellSign * fxm) * w[xm];
        const cplx fwd_y = std::conj(uy[k]) * std::polar(1.0, -kCellSign * fy) * w[yp];
        const cplx bwd_y = uy[ym] * std::polar(1.0, kCellSign * fym) * w[ym];
        out[k] = c * ((fwd_x - bwd_x) - I * (fwd_y - bwd_y));
    }
    return out;
}

} // namespace

MetricData MetricData::line(ScalarField psi) {
    MetricData m{1, std::move(psi), std::nullopt, std::nullopt, 0.0};
    return m;
}

MetricData MetricData::extension(ScalarField psi1, ScalarField psi2, SectionField beta, double t) {
    check_same_grid(psi1.grid, psi2.grid);
    check_same_grid(psi1.grid, beta.grid());
    if (!(t >= 0.0)) throw std::invalid_argument("extension scale t must be nonnegative");
    MetricData m{2, std::move(psi1), std::move(psi2), std::move(beta), t};
    return m;
}

CurvatureField::CurvatureField(const Grid& g, int r) : grid(g), rank(r), values(g.size(), Eigen::Matrix2cd::Zero()) {
    if (r != 1 && r != 2) throw std::invalid_argument("curvature fields have rank 1 or 2");
}

ScalarField CurvatureField::entry(int i, int j) const {
    ScalarField out(grid);
    for (std::size_t k = 0; k < values.size(); ++k) out.values[k] = values[k](i, j).real();
    return out;
}

ScalarField CurvatureField::trace() const {
    ScalarField out(grid);
    for (std::size_t k = 0; k < values.size(); ++k)
        out.values[k] = rank == 1 ? values[k](0, 0).real() : values[k].trace().real();
    return out;
}

double CurvatureField::chern_weil_degree() const { return trace().integral(); }

double CurvatureField::offdiag_sup() const {
    if (rank == 1) return 0.0;
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v(0, 1)));
    return m;
}

ScalarField line_density(long degree, const ScalarField& psi) {
    const ScalarField lap = spectral_laplacian(psi);
    ScalarField out(psi.grid);
    const double base = static_cast<double>(degree) / psi.grid.volume();
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = base - lap.values[k] / kTwoPi;
    return out;
}

CurvatureField line_curvature(long degree, const ScalarField& psi) {
    const ScalarField phi = line_density(degree, psi);
    CurvatureField out(psi.grid, 1);
    for (std::size_t k = 0; k < phi.values.size(); ++k) out.values[k](0, 0) = phi.values[k];
    return out;
}

CurvatureField extension_curvature(long d1, long d2, const MetricData& metric) {
    if (metric.rank != 2 || !metric.psi2 || !metric.beta)
        throw std::invalid_argument("extension curvature needs rank-2 metric data");
    const Grid& g = metric.grid();
    const SectionField& beta = *metric.beta;
    check_same_grid(g, metric.psi2->grid);
    check_same_grid(g, beta.grid());
    if (beta.link->degree() != d1 - d2)
        throw std::invalid_argument("twist mismatch: beta has degree " + std::to_string(beta.link->degree()) +
                                    ", expected d1 - d2 = " + std::to_string(d1 - d2));

    const Spectral fft(g);
    const ScalarField lap1 = fft.laplacian(metric.psi1);
    const ScalarField lap2 = fft.laplacian(*metric.psi2);
    const double t = metric.t;
    const std::size_t N = g.size();
    const double h = g.spacing();

    // beta lives on cells (lower-left site index). chi is averaged to cell centres,
    // o is differenced on the cell lattice and averaged back to sites.
    std::vector<double> chi(N), chif(N);
    for (std::size_t k = 0; k < N; ++k) chi[k] = metric.psi1.values[k] - metric.psi2->values[k];
    for (std::size_t k = 0; k < N; ++k) {
        const int i = g.ix(k), j = g.iy(k);
        chif[k] = 0.25 * (chi[k] + chi[g.index(i + 1, j)] + chi[g.index(i, j + 1)] + chi[g.index(i + 1, j + 1)]);
    }

    // w = e^chi v is beta in an h-unitary frame of Hom(L2, L1).
    const LinkField& link = *beta.link;
    SectionField w(beta.link);
    for (std::size_t k = 0; k < N; ++k) w.values[k] = std::exp(chif[k]) * beta.values[k];
    const std::vector<cplx> dw = cell_d_central(link, w.values);

    const cplx I(0.0, 1.0);
    const double r2 = std::numbers::sqrt2;
    std::vector<cplx> of(N);
    for (std::size_t k = 0; k < N; ++k) {
        const int i = g.ix(k), j = g.iy(k);
        const double dx = (chif[g.index(i + 1, j)] - chif[g.index(i - 1, j)]) / (2.0 * h);
        const double dy = (chif[g.index(i, j + 1)] - chif[g.index(i, j - 1)]) / (2.0 * h);
        of[k] = (t / kTwoPi) * r2 * (dw[k] + 0.5 * (dx - I * dy) * w.values[k]);
    }
    // Cell -> site: average of the four surrounding cells, both transport orders.
    std::vector<cplx> ax(N), ay(N), axy(N), ayx(N), os(N);
    link.shift_x_adj(of.data(), ax.data());
    link.shift_y_adj(of.data(), ay.data());
    link.shift_y_adj(ax.data(), axy.data());
    link.shift_x_adj(ay.data(), ayx.data());
    for (std::size_t k = 0; k < N; ++k) os[k] = 0.25 * (of[k] + ax[k] + ay[k] + 0.5 * (axy[k] + ayx[k]));

    CurvatureField out(g, 2);
    for (std::size_t k = 0; k < N; ++k) {
        const int i = g.ix(k), j = g.iy(k);
        const double b2 = 0.25 * (std::norm(w.values[k]) + std::norm(w.values[g.index(i - 1, j)]) +
                                  std::norm(w.values[g.index(i, j - 1)]) + std::norm(w.values[g.index(i - 1, j - 1)]));
        const double phi1 = d1 / g.volume() - lap1.values[k] / kTwoPi;
        const double phi2 = d2 / g.volume() - lap2.values[k] / kTwoPi;
        auto& m = out.values[k];
        m(0, 0) = phi1 + t * t * b2 / kTwoPi;
        m(1, 1) = phi2 - t * t * b2 / kTwoPi;
        m(0, 1) = os[k];
        m(1, 0) = std::conj(os[k]);
    }
    return out;
}

EigRange eig_range(const CurvatureField& f) {
    EigRange out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                 ScalarField(f.grid), ScalarField(f.grid)};
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        const auto& m = f.values[k];
        double lo, hi;
        if (f.rank == 1) {
            if (std::abs(m(0, 0).imag()) > 1e-10) throw std::invalid_argument("curvature field is not Hermitian");
            lo = hi = m(0, 0).real();
        } else {
            const double skew = std::max({std::abs(m(0, 0).imag()), std::abs(m(1, 1).imag()),
                                          std::abs(m(0, 1) - std::conj(m(1, 0)))});
            if (skew > 1e-10) throw std::invalid_argument("curvature field is not Hermitian");
            std::tie(lo, hi) = eig2(m);
        }
        out.lambda_min.values[k] = lo;
        out.lambda_max.values[k] = hi;
        out.min = std::min(out.min, lo);
        out.max = std::max(out.max, hi);
    }
    return out;
}

Domination dominated_by(const CurvatureField& f, double m, BoundSide side) {
    const EigRange r = eig_range(f);
    Domination d;
    d.margin = side == BoundSide::upper ? m - r.max : r.min - m;
    d.holds = d.margin >= -1e-12;
    return d;
}

MetricData transport_metric(const MetricData& metric, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("gauge scale must be positive");
    if (metric.rank == 1) return metric;
    MetricData out = metric;
    for (double& v : out.psi2->values) v += std::log(s);
    return out;
}

MetricData transform_structure(const MetricData& metric, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("gauge scale must be positive");
    MetricData out = metric;
    if (metric.rank == 2) out.t = metric.t / s;
    return out;
}

double gauge_transport_check(const CurvatureField& transformed, const CurvatureField& metric) {
    check_same_grid(transformed.grid, metric.grid);
    if (transformed.rank != metric.rank) throw std::invalid_argument("curvature ranks differ");
    const EigRange a = eig_range(transformed);
    const EigRange b = eig_range(metric);
    double d = 0.0;
    for (std::size_t k = 0; k < a.lambda_min.values.size(); ++k) {
        d = std::max(d, std::abs(a.lambda_min.values[k] - b.lambda_min.values[k]));
        d = std::max(d, std::abs(a.lambda_max.values[k] - b.lambda_max.values[k]));
    }
    return d;
}

CurvatureField dual_curvature(const CurvatureField& f) {
    CurvatureField out(f.grid, f.rank);
    for (std::size_t k = 0; k < f.values.size(); ++k) out.values[k] = -f.values[k].transpose();
    return out;
}

double ym_energy(const CurvatureField& f, double mu) {
    double s = 0.0;
    for (const auto& m : f.values) {
        if (f.rank == 1)
            s += std::norm(m(0, 0) - mu);
        else
            s += (m - mu * Eigen::Matrix2cd::Identity()).squaredNorm();
    }
    return s * f.grid.cell_area();
}

} // namespace hnlab
