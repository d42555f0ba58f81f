#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hnlab/errors.hpp"
#include "hnlab/solvers.hpp"
#include "hnlab/spectral.hpp"
#include "hnlab/torus_lattice.hpp"
#include "support.hpp"

#include <cmath>

using namespace hnlab;
using hnlab::test::kTwoPi;

namespace {

SectionField constant_beta(const Grid& g, cplx c) {
    SectionField b(background_connection(g, 0));
    for (auto& z : b.values) z = c;
    return b;
}

std::vector<double> halvings(double t0, int count) {
    std::vector<double> ts;
    for (int i = 0; i < count; ++i) ts.push_back(std::ldexp(t0, -i));
    return ts;
}

const SectionField& degree_one_section() {
    static const SectionField s = holo_sections(background_connection(make_grid(32, 1.0), 1)).sections.at(0);
    return s;
}

} // namespace

TEST_CASE("SolverConfig validation") {
    CHECK_NOTHROW(SolverConfig{}.validate());
    CHECK_THROWS(SolverConfig{0.0, 50, 1.0}.validate());
    CHECK_THROWS(SolverConfig{1e-10, 0, 1.0}.validate());
    CHECK_THROWS(SolverConfig{1e-10, 50, 0.0}.validate());
    CHECK_THROWS(SolverConfig{1e-10, 50, 1.5}.validate());
}

TEST_CASE("kazdan_warner_newton recovers a manufactured solution") {
    std::mt19937_64 rng(41);
    const Grid g = make_grid(32, 1.0);
    const ScalarField u = test::random_potential(g, rng, 0.4);
    ScalarField w(g), f(g);
    const ScalarField lap = spectral_laplacian(u);
    const double kappa = 1.0 / kTwoPi;
    for (std::size_t k = 0; k < g.size(); ++k) {
        w.values[k] = 1.0 + 0.5 * std::cos(kTwoPi * g.x(k));
        f.values[k] = -kappa * lap.values[k] + w.values[k] * std::exp(2 * u.values[k]);
    }
    const NewtonReport rep = kazdan_warner_newton(kappa, w, f, {1e-12, 50, 1.0});
    CHECK(test::sup_diff(rep.u.values, u.values) < 1e-10);
    CHECK(rep.residual_history.back() <= 1e-12);
    CHECK(rep.min_ritz > 0.0);
    CHECK(rep.iterations <= 20);
}

TEST_CASE("he_line_solve examples") {
    const Grid g = make_grid(32, 2.0);
    const HeSolution flat = he_line_solve(3, std::nullopt, g);
    CHECK(flat.psi.sup_norm() == 0.0);
    CHECK(flat.residual == 0.0);

    // target deg/vol + a cos(2 pi x/L): psi = -2 pi a (L/2pi)^2 cos / ... from Phi = deg/vol - Lap psi / 2pi
    const double a = 0.4, L = g.side();
    ScalarField target(g), expected(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double c = std::cos(kTwoPi * g.x(k) / L);
        target.values[k] = 1.5 + a * c;
        expected.values[k] = kTwoPi * a * (L / kTwoPi) * (L / kTwoPi) * c;
    }
    const HeSolution s = he_line_solve(3, target, g);
    CHECK(test::sup_diff(s.psi.values, expected.values) < 1e-12);
    CHECK(std::abs(s.psi.mean()) < 1e-14);

    ScalarField off(g, 1.6);
    CHECK_THROWS_AS(he_line_solve(3, off, g), ObstructionError);
    CHECK_THROWS_WITH(he_line_solve(3, off, g), doctest::Contains("obstructed target"));
}

TEST_CASE("property: he_line_solve roundtrips through line_curvature") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 8; ++trial) {
        const Grid g = make_grid(32, 0.5 + trial);
        const long d = static_cast<long>(test::uniform_int(rng, -4, 4));
        ScalarField target = test::random_potential(g, rng, 2.0);
        for (double& v : target.values) v += d / g.volume();
        const HeSolution s = he_line_solve(d, target, g);
        CHECK(test::sup_diff(line_density(d, s.psi).values, target.values) <= 1e-10);
        CHECK(std::abs(s.psi.mean()) < 1e-12);
    }
}

TEST_CASE("vortex_solve examples") {
    const Grid g = make_grid(32, 1.0);
    SUBCASE("zero section reduces to the Hermitian-Einstein metric") {
        const VortexSolution v = vortex_solve(1, SectionField(background_connection(g, 1)), 1.0, g);
        CHECK(v.psi.sup_norm() == 0.0);
        CHECK_THROWS_AS(vortex_solve(1, SectionField(background_connection(g, 1)), 2.0, g), ObstructionError);
    }
    SUBCASE("degree 1, tau 2") {
        const VortexSolution v = vortex_solve(1, degree_one_section(), 2.0, g);
        CHECK(v.residual < 1e-10);
        CHECK(v.iterations <= 20);
        CHECK(std::abs(v.section_norm_h - kTwoPi) < 1e-6);
        CHECK(v.identity_residual <= 1e-9);
        CHECK(v.min_ritz > 0.0);
        for (std::size_t i = 1; i < v.residual_history.size(); ++i)
            CHECK(v.residual_history[i] < v.residual_history[i - 1]);
    }
    SUBCASE("degree 1, tau 1 is obstructed") {
        CHECK_THROWS_AS(vortex_solve(1, degree_one_section(), 1.0, g), ObstructionError);
        CHECK_THROWS_WITH(vortex_solve(1, degree_one_section(), 1.0, g), doctest::Contains("no solution: integral obstruction"));
    }
    SUBCASE("non-holomorphic input is rejected") {
        std::mt19937_64 rng(43);
        CHECK_THROWS_AS(vortex_solve(1, test::random_section(background_connection(g, 1), rng), 2.0, g),
                        std::invalid_argument);
    }
}

TEST_CASE("property: vortex integrated identity across tau") {
    const Grid g = make_grid(32, 1.0);
    for (double tau : {1.25, 1.5, 3.0, 6.0}) {
        const SolverConfig cfg;
        const VortexSolution v = vortex_solve(1, degree_one_section(), tau, g, cfg);
        CHECK(v.identity_residual <= 10 * cfg.tol);
        CHECK(std::abs(v.section_norm_h - kTwoPi * (tau - 1.0)) <= 10 * kTwoPi * cfg.tol);
        CHECK(v.min_ritz > 0.0);
    }
}

TEST_CASE("coupled_vortex_solve examples") {
    const Grid g = make_grid(32, 1.0);
    SUBCASE("zero Phi0 decouples") {
        const CoupledVortexSolution c = coupled_vortex_solve(1, 0, SectionField(background_connection(g, 1)), 1.0, g);
        CHECK(c.psi1.sup_norm() == 0.0);
        CHECK(c.psi2.sup_norm() == 0.0);
        CHECK(c.tau_prime == 0.0);
    }
    SUBCASE("d1 = 1, d2 = 0, tau = 2") {
        const CoupledVortexSolution c = coupled_vortex_solve(1, 0, degree_one_section(), 2.0, g);
        CHECK(c.tau_prime == -1.0);
        CHECK(c.residual1 < 1e-10);
        CHECK(c.residual2 < 1e-10);
        CHECK(std::abs(c.section_norm_h - kTwoPi) < 1e-6);
        CHECK(c.identity1 < 1e-5);
        CHECK(c.identity2 < 1e-5);
        CHECK(c.phi1_margin >= -1e-8);
        CHECK(c.phi2_margin >= -1e-8);
        // the two integrated identities add up to r1 tau + r2 tau' = d1 + d2
        CHECK(c.tau + c.tau_prime == 1.0);
    }
}

TEST_CASE("fit_power_law against exact power laws") {
    const std::vector<double> x = {0.5, 0.25, 0.125, 0.0625};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * v * v);
    const PowerFit f = fit_power_law(x, y, 0.0);
    CHECK(f.exponent == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.used == 4);
    y.back() = 1e-20;
    const PowerFit g = fit_power_law(x, y, 1e-15);
    CHECK(g.used == 3);
    CHECK(g.exponent == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("theorem5_sweep examples") {
    const Grid g = make_grid(32, 1.0);
    const cplx c(0.8, 0.6);
    const std::vector<double> ts = {0.5, 0.25, 0.125, 0.0};
    const SweepReport r = theorem5_sweep(0, 0, constant_beta(g, c), ts, g);
    REQUIRE(r.points.size() == 4);
    for (const SweepPoint& p : r.points) {
        const double closed = p.t * p.t * std::norm(c) / kTwoPi;
        CHECK(std::abs(p.deviation - closed) < 1e-10);
        CHECK(p.offdiag_sup < 1e-10);
        CHECK(std::abs(p.m_achieved - closed) < 1e-12);
        CHECK(p.domination_margin == 0.0);
        CHECK(p.guan_consistent);
    }
    CHECK(r.points.back().deviation == 0.0);
    CHECK(r.fitted_exponent == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.monotone);
    for (std::size_t i = 1; i < r.points.size(); ++i) CHECK(r.points[i].ym_energy < r.points[i - 1].ym_energy);

    CHECK_THROWS_WITH(theorem5_sweep(0, 0, constant_beta(g, c), {}, g), doctest::Contains("empty t list"));
    CHECK_THROWS(theorem5_sweep(0, 0, constant_beta(g, c), {0.1, 0.2}, g));
}

TEST_CASE("property: t^2 law for harmonic beta") {
    std::mt19937_64 rng(44);
    const Grid g = make_grid(64, 1.0);
    const std::vector<double> ts = halvings(0.25, 7);
    SUBCASE("untwisted random beta") {
        const SweepReport r = theorem5_sweep(0, 0, test::random_section(background_connection(g, 0), rng), ts, g);
        CHECK(r.fitted_exponent >= 1.95);
        CHECK(r.fitted_exponent <= 2.05);
        CHECK(r.monotone);
    }
    SUBCASE("twisted random beta, normalized") {
        SectionField b = harmonic_project(test::random_section(background_connection(g, -1), rng)).beta;
        const double s = test::sup_abs(b.values);
        for (auto& z : b.values) z /= s;
        const SweepReport r = theorem5_sweep(0, 1, b, ts, g);
        CHECK(r.fitted_exponent >= 1.9);
        CHECK(r.fitted_exponent <= 2.1);
        for (const SweepPoint& p : r.points) CHECK(p.guan_consistent);
    }
}

TEST_CASE("inf_m_estimate examples") {
    const Grid g = make_grid(16, 1.0);
    const InfMReport split = inf_m_estimate(BundleModel::parse("sum:1,0"), {0.1}, g);
    CHECK(split.mu1 == 1);
    REQUIRE(split.m_values.size() == 1);
    CHECK(split.m_values[0] == 1.0);
    CHECK(split.attained);
    CHECK(split.layers_agree);

    const InfMReport at = inf_m_estimate(BundleModel::parse("ext2:0,0,nz"), {0.1}, g);
    CHECK(at.mu1 == 0);
    CHECK(at.m_values[0] == doctest::Approx(0.01 / kTwoPi).epsilon(1e-12));
    CHECK_FALSE(at.attained);

    const InfMReport sweep = inf_m_estimate(BundleModel::parse("ext2:0,0,nz"), halvings(0.25, 5), g);
    for (double q : sweep.halving_ratios) CHECK(q == doctest::Approx(0.25).epsilon(0.02));
    CHECK(sweep.layers_agree);

    CHECK_THROWS_AS(inf_m_estimate(BundleModel::parse("ext2:1,0,nz"), {0.1}, g), ObstructionError);
}
