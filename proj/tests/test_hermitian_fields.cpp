#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hnlab/hermitian_fields.hpp"
#include "hnlab/spectral.hpp"
#include "hnlab/torus_lattice.hpp"
#include "support.hpp"

#include <cmath>

using namespace hnlab;
using hnlab::test::kTwoPi;

namespace {

CurvatureField constant_field(const Grid& g, const Eigen::Matrix2cd& m, int rank = 2) {
    CurvatureField f(g, rank);
    for (auto& v : f.values) v = m;
    return f;
}

Eigen::Matrix2cd diag(double a, double b) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

MetricData random_extension(const Grid& g, long delta, std::mt19937_64& rng, double t) {
    return MetricData::extension(test::random_potential(g, rng), test::random_potential(g, rng),
                                 test::random_section(background_connection(g, static_cast<int>(delta)), rng), t);
}

SectionField constant_beta(const Grid& g, cplx c) {
    SectionField b(background_connection(g, 0));
    for (auto& z : b.values) z = c;
    return b;
}

} // namespace

TEST_CASE("line_curvature examples") {
    const Grid g = make_grid(32, 2.0);
    const CurvatureField f = line_curvature(3, ScalarField(g));
    CHECK(f.rank == 1);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(f.values[k](0, 0).real() == doctest::Approx(1.5).epsilon(1e-15));

    // prescribe a density g_target and invert the Poisson equation by hand
    std::mt19937_64 rng(31);
    const ScalarField bump = test::random_potential(g, rng, 0.5);
    ScalarField rhs(g);
    for (std::size_t k = 0; k < g.size(); ++k) rhs.values[k] = -kTwoPi * bump.values[k];
    const ScalarField psi = poisson_solve(rhs);
    const ScalarField phi = line_density(3, psi);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(phi.values[k] - (1.5 + bump.values[k])) < 1e-12);
}

TEST_CASE("extension_curvature examples") {
    const Grid g = make_grid(32, 1.0);
    SectionField zero(background_connection(g, 1));
    const CurvatureField split = extension_curvature(2, 1, MetricData::extension(ScalarField(g), ScalarField(g), zero, 1.0));
    for (std::size_t k = 0; k < g.size(); ++k) CHECK((split.values[k] - diag(2, 1)).norm() < 1e-14);

    // covariantly constant beta: diagonal shift t^2|c|^2/2pi, no off-diagonal term
    const cplx c(0.6, -0.8);
    const double t = 0.3, shift = t * t * std::norm(c) / kTwoPi;
    const CurvatureField at = extension_curvature(0, 0, MetricData::extension(ScalarField(g), ScalarField(g), constant_beta(g, c), t));
    CHECK(at.offdiag_sup() < 1e-10);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK((at.values[k] - diag(shift, -shift)).norm() < 1e-14);
    const EigRange r = eig_range(at);
    CHECK(r.min == doctest::Approx(-shift).epsilon(1e-12));
    CHECK(r.max == doctest::Approx(shift).epsilon(1e-12));

    CHECK_THROWS_WITH(extension_curvature(2, 0, MetricData::extension(ScalarField(g), ScalarField(g), zero, 1.0)),
                      doctest::Contains("twist mismatch"));
}

TEST_CASE("property: discrete Chern-Weil for ranks 1 and 2") {
    std::mt19937_64 rng(32);
    const Grid g = make_grid(32, 1.7);
    for (long d = -3; d <= 3; ++d) {
        CHECK(std::abs(line_curvature(d, test::random_potential(g, rng)).chern_weil_degree() - d) < 1e-10);
        const long d2 = static_cast<long>(test::uniform_int(rng, -3, 3));
        const CurvatureField f = extension_curvature(d, d2, random_extension(g, d - d2, rng, 0.7));
        CHECK(std::abs(f.chern_weil_degree() - (d + d2)) < 1e-10);
    }
}

TEST_CASE("property: extension trace is the sum of the line densities") {
    std::mt19937_64 rng(33);
    const Grid g = make_grid(16, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const long d1 = static_cast<long>(test::uniform_int(rng, -2, 2));
        const long d2 = static_cast<long>(test::uniform_int(rng, -2, 2));
        const MetricData m = random_extension(g, d1 - d2, rng, 1.3);
        const ScalarField tr = extension_curvature(d1, d2, m).trace();
        const ScalarField p1 = line_density(d1, m.psi1), p2 = line_density(d2, *m.psi2);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(tr.values[k] - p1.values[k] - p2.values[k]) < 1e-12);
    }
}

TEST_CASE("property: off-diagonal term of a harmonic twisted beta shrinks under refinement") {
    std::mt19937_64 rng(34);
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        const Grid g = make_grid(n, 1.0);
        SectionField beta = harmonic_project(test::random_section(background_connection(g, -1), rng)).beta;
        const double s = test::sup_abs(beta.values);
        for (auto& z : beta.values) z /= s;
        const double o = extension_curvature(0, 1, MetricData::extension(ScalarField(g), ScalarField(g), beta, 1.0)).offdiag_sup();
        if (prev > 0.0) CHECK(prev / o >= 2.0);
        prev = o;
    }
}

TEST_CASE("eig_range examples") {
    const Grid g = make_grid(8, 1.0);
    const EigRange a = eig_range(constant_field(g, diag(1, 0)));
    CHECK(a.min == 0.0);
    CHECK(a.max == 1.0);

    std::mt19937_64 rng(35);
    const ScalarField psi = test::random_potential(g, rng);
    const CurvatureField line = line_curvature(2, psi);
    const ScalarField phi = line_density(2, psi);
    const EigRange b = eig_range(line);
    CHECK(b.min == *std::min_element(phi.values.begin(), phi.values.end()));
    CHECK(b.max == *std::max_element(phi.values.begin(), phi.values.end()));

    Eigen::Matrix2cd bad = diag(1, 0);
    bad(0, 1) = 1e-6;
    CHECK_THROWS(eig_range(constant_field(g, bad)));
}

TEST_CASE("dominated_by examples") {
    const Grid g = make_grid(8, 1.0);
    const CurvatureField f = constant_field(g, diag(1, 0));
    const Domination up = dominated_by(f, 1.0, BoundSide::upper);
    CHECK(up.holds);
    CHECK(up.margin == 0.0);
    CHECK_FALSE(dominated_by(f, 0.99, BoundSide::upper).holds);
    CHECK(dominated_by(f, 0.0, BoundSide::lower).holds);
    CHECK_FALSE(dominated_by(f, 0.01, BoundSide::lower).holds);

    const double t = 0.25, m = t * t / kTwoPi;
    const CurvatureField at = extension_curvature(0, 0, MetricData::extension(ScalarField(g), ScalarField(g), constant_beta(g, 1.0), t));
    const Domination d = dominated_by(at, m, BoundSide::upper);
    CHECK(d.holds);
    CHECK(std::abs(d.margin) < 1e-15);
}

TEST_CASE("property: eig_range max is always a dominating bound with zero margin") {
    std::mt19937_64 rng(36);
    const Grid g = make_grid(16, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const CurvatureField f = extension_curvature(1, -1, random_extension(g, 2, rng, 0.9));
        const EigRange r = eig_range(f);
        const Domination up = dominated_by(f, r.max, BoundSide::upper);
        const Domination lo = dominated_by(f, r.min, BoundSide::lower);
        CHECK(up.holds);
        CHECK(up.margin == 0.0);
        CHECK(lo.holds);
        CHECK(lo.margin == 0.0);
    }
}

TEST_CASE("gauge_transport_check examples") {
    std::mt19937_64 rng(37);
    const Grid g = make_grid(16, 1.0);
    const MetricData m = random_extension(g, 0, rng, 1.0);
    CHECK(gauge_transport_check(extension_curvature(0, 0, transform_structure(m, 1.0)),
                                extension_curvature(0, 0, transport_metric(m, 1.0))) == 0.0);
    const CurvatureField line = line_curvature(1, test::random_potential(g, rng));
    CHECK(gauge_transport_check(line, line) == 0.0);
    for (double s : {0.5, 0.1}) {
        const MetricData at = MetricData::extension(test::random_potential(g, rng), test::random_potential(g, rng),
                                                    constant_beta(g, 1.0), 1.0);
        CHECK(gauge_transport_check(extension_curvature(0, 0, transform_structure(at, s)),
                                    extension_curvature(0, 0, transport_metric(at, s))) <= 1e-10);
    }
}

TEST_CASE("property: conjugation invariance across random rank-2 metrics") {
    std::mt19937_64 rng(38);
    const Grid g = make_grid(16, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const long d1 = static_cast<long>(test::uniform_int(rng, -2, 2));
        const long d2 = static_cast<long>(test::uniform_int(rng, -2, 2));
        const MetricData m = random_extension(g, d1 - d2, rng, 0.8);
        const double s = std::exp(std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
        const CurvatureField a = extension_curvature(d1, d2, transform_structure(m, s));
        const CurvatureField b = extension_curvature(d1, d2, transport_metric(m, s));
        CHECK(gauge_transport_check(a, b) <= 1e-10);
    }
}

TEST_CASE("dual_curvature examples and properties") {
    const Grid g = make_grid(8, 1.0);
    const CurvatureField d = dual_curvature(constant_field(g, diag(2, -0.5)));
    for (const auto& v : d.values) CHECK((v - diag(-2, 0.5)).norm() == 0.0);

    std::mt19937_64 rng(39);
    const Grid h = make_grid(16, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const CurvatureField f = extension_curvature(1, 0, random_extension(h, 1, rng, 1.1));
        const CurvatureField df = dual_curvature(f);
        const EigRange a = eig_range(f), b = eig_range(df);
        CHECK(b.min == -a.max);
        CHECK(b.max == -a.min);
        for (std::size_t k = 0; k < h.size(); ++k) {
            CHECK(std::abs(b.lambda_min.values[k] + a.lambda_max.values[k]) <= 1e-14);
            CHECK(std::abs(b.lambda_max.values[k] + a.lambda_min.values[k]) <= 1e-14);
        }
        const CurvatureField ddf = dual_curvature(df);
        for (std::size_t k = 0; k < h.size(); ++k) CHECK((ddf.values[k] - f.values[k]).norm() == 0.0);
    }
}

TEST_CASE("ym_energy examples") {
    const Grid g = make_grid(16, 3.0);
    CHECK(ym_energy(line_curvature(6, ScalarField(g)), 2.0) == doctest::Approx(0.0));
    const double m1 = 1.5, m2 = -0.5;
    const double e = ym_energy(constant_field(g, diag(m1, m2)), (m1 + m2) / 2);
    CHECK(e == doctest::Approx(3.0 * (m1 - m2) * (m1 - m2) / 2).epsilon(1e-13));
}
