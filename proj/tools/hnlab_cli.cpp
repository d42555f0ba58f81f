// hnlab: command-line front end for the exact and lattice layers.
//
// Exit codes: 0 success, 2 analytic obstruction, 1 anything else.

#include "hnlab/errors.hpp"
#include "hnlab/exact_stability.hpp"
#include "hnlab/field_io.hpp"
#include "hnlab/hermitian_fields.hpp"
#include "hnlab/reports.hpp"
#include "hnlab/solvers.hpp"
#include "hnlab/torus_lattice.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hnlab;

namespace {

struct Options {
    std::string bundle;
    std::int64_t phi_deg = 0;
    std::string tau = "1";
    int grid = 64;
    double vol = 1.0;
    double tol = 1e-10;
    int max_iter = 50;
    double t_min = 1.0 / 256.0;
    double t_max = 0.25;
    int t_points = 7;
    std::uint64_t seed = 1;
    std::string out;
    std::string csv;

    // command specific
    int rank = 2;
    std::int64_t degree = 1;
    std::string sigma;
    std::string triple = "1,0,1,0";
    std::string sub;
    std::vector<std::string> witnesses;
    std::string target = "const";
    std::int64_t d1 = 1;
    std::int64_t d2 = 0;
    std::string model = "atiyah";
    std::string beta = "const:1";
    double scale = 0.5;
    std::string field_out;
};

std::vector<std::int64_t> parse_ints(const std::string& text, std::size_t expect, const char* what) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const long long v = std::stoll(item, &used);
        if (used != item.size()) throw std::invalid_argument(std::string("bad integer in ") + what + ": '" + item + "'");
        out.push_back(v);
    }
    if (out.size() != expect)
        throw std::invalid_argument(std::string(what) + " needs " + std::to_string(expect) + " comma-separated integers");
    return out;
}

TripleModel parse_triple(const std::string& text) {
    const auto v = parse_ints(text, 4, "--triple");
    TripleModel t;
    t.r1 = static_cast<int>(v[0]);
    t.d1 = v[1];
    t.r2 = static_cast<int>(v[2]);
    t.d2 = v[3];
    if (t.r1 < 1 || t.r2 < 1) throw std::invalid_argument("triple ranks must be positive");
    return t;
}

Subtriple parse_sub(const std::string& text) {
    const auto v = parse_ints(text, 4, "--sub");
    return {static_cast<int>(v[0]), v[1], static_cast<int>(v[2]), v[3]};
}

Witness parse_witness(const std::string& text) {
    // rank,degree,phi|nophi
    std::stringstream ss(text);
    std::string r, d, p;
    if (!std::getline(ss, r, ',') || !std::getline(ss, d, ',') || !std::getline(ss, p, ','))
        throw std::invalid_argument("witness must look like 'rank,degree,phi' or 'rank,degree,nophi'");
    if (p != "phi" && p != "nophi") throw std::invalid_argument("witness flag must be 'phi' or 'nophi'");
    return {std::stoi(r), std::stoll(d), p == "phi"};
}

CurveModel curve(const Options& o) { return {1, exact_from_double(o.vol)}; }
Grid grid(const Options& o) { return make_grid(o.grid, o.vol); }
SolverConfig solver(const Options& o) { return {o.tol, o.max_iter, 1.0}; }

std::vector<double> t_values(const Options& o) {
    if (o.t_points < 1) throw std::invalid_argument("--t-points must be positive");
    if (!(o.t_min > 0.0) || !(o.t_max >= o.t_min)) throw std::invalid_argument("need 0 < t-min <= t-max");
    if (o.t_points == 1) return {o.t_max};
    std::vector<double> ts;
    for (int i = 0; i < o.t_points; ++i)
        ts.push_back(o.t_max * std::pow(o.t_min / o.t_max, static_cast<double>(i) / (o.t_points - 1)));
    return ts;
}

ScalarField random_potential(const Grid& g, std::mt19937_64& rng, double amp) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField f(g);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
            if (a == 0 && b == 0) continue;
            const double c = amp * u(rng) / (a * a + b * b), ph = two_pi * u(rng);
            for (std::size_t k = 0; k < g.size(); ++k)
                f.values[k] += c * std::cos(two_pi * (a * g.x(k) + b * g.y(k)) / g.side() + ph);
        }
    const double m = f.mean();
    for (double& v : f.values) v -= m;
    return f;
}

SectionField make_beta(const std::string& spec, const Grid& g, long twist, std::mt19937_64& rng) {
    SectionField b(background_connection(g, static_cast<int>(twist)));
    if (spec.rfind("const:", 0) == 0) {
        const double c = std::stod(spec.substr(6));
        for (auto& z : b.values) z = c;
    } else if (spec == "random") {
        std::normal_distribution<double> nd;
        for (auto& z : b.values) z = {nd(rng), nd(rng)};
    } else {
        throw std::invalid_argument("--beta must be 'const:<c>' or 'random'");
    }
    return b;
}

// First holomorphic section of the given degree, or zero when there is none.
SectionField first_section(const Grid& g, long degree, Json& info) {
    const LinkPtr link = background_connection(g, static_cast<int>(degree));
    const HoloSections hs = holo_sections(link);
    info = to_json(hs);
    if (hs.sections.empty()) return SectionField(link);
    return hs.sections.front();
}

void emit(const Options& o, const Json& report, std::optional<PlotKind> csv_kind) {
    const std::string text = dump(report);
    if (o.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + o.out);
        f << text;
        std::cout << report["command"].get<std::string>() << ": report written to " << o.out << "\n";
    }
    if (!o.csv.empty()) {
        if (!csv_kind) throw std::invalid_argument("this command has no plot series for --csv");
        std::ofstream f(o.csv, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + o.csv);
        f << emit_plotdata(report, *csv_kind);
    }
}

Json pair_inputs(const Options& o) { return {{"bundle", o.bundle}, {"phi_deg", o.phi_deg}}; }

PairModel make_pair(const Options& o) {
    std::optional<std::vector<Witness>> ws;
    if (!o.witnesses.empty()) {
        ws.emplace();
        for (const auto& w : o.witnesses) ws->push_back(parse_witness(w));
    }
    return PairModel(BundleModel::parse(o.bundle), o.phi_deg, ws);
}

void cmd_hn(const Options& o) {
    const BundleModel b = BundleModel::parse(o.bundle);
    Json r = make_report("hn", {{"bundle", b.to_string()}}, {});
    const HNData hn = hn_filtration(b, curve(o));
    r["result"] = to_json(hn);
    r["result"]["rank"] = b.rank();
    r["result"]["degree"] = b.degree();
    emit(o, r, std::nullopt);
}

void cmd_mu1(const Options& o) {
    const BundleModel b = BundleModel::parse(o.bundle);
    Json r = make_report("mu1", {{"bundle", b.to_string()}}, {});
    const Rational m = mu1(b, curve(o));
    const Rational md = mu1_dual(b, curve(o));
    r["result"] = {{"mu1", to_string(m)}, {"mu1_dual", to_string(md)}, {"minus_mu1_dual", to_string(Rational(-md))},
                   {"slope", to_string(slope(b.rank(), b.degree(), curve(o)))}};
    emit(o, r, std::nullopt);
}

void cmd_tau_stable(const Options& o) {
    const PairModel p = make_pair(o);
    const Rational tau = parse_rational(o.tau);
    Json in = pair_inputs(o);
    in["tau"] = to_string(tau);
    Json r = make_report("tau-stable", in, {});
    r["result"] = to_json(tau_stable_pair(p, tau, curve(o)));
    emit(o, r, std::nullopt);
}

void cmd_tau_interval(const Options& o) {
    const PairModel p = make_pair(o);
    Json r = make_report("tau-interval", pair_inputs(o), {});
    const auto iv = tau_interval(p, curve(o));
    r["result"] = {{"interval", to_string(iv)}, {"mu1", to_string(mu1(p.bundle, curve(o)))},
                   {"pair_inf", to_string(pair_inf(p, curve(o)))}};
    if (iv) {
        r["result"]["lo"] = to_string(iv->lo);
        r["result"]["hi"] = to_string(iv->hi);
    }
    const int R = p.bundle.rank();
    if (R > 1) {
        const Rational mu = slope(R, p.bundle.degree(), curve(o));
        const Rational hi = Rational(R) / Rational(R - 1) * mu;
        r["result"]["annotation_range"] = "(" + to_string(mu1(p.bundle, curve(o))) + ", " + to_string(hi) +
                                          ") from the R/(R-1) mu(E) bound; not used for the interval";
    } else {
        r["result"]["annotation_range"] = "undefined for rank 1";
    }
    emit(o, r, std::nullopt);
}

void cmd_sigma(const Options& o) {
    Json in = {{"rank", o.rank}, {"degree", o.degree}};
    Json result;
    if (!o.sigma.empty()) {
        const Rational s = parse_rational(o.sigma);
        in["sigma"] = to_string(s);
        const Rational t = tau_of_sigma(o.rank, o.degree, s, curve(o));
        result = {{"tau", to_string(t)}, {"roundtrip_sigma", to_string(sigma_of_tau(o.rank, o.degree, t, curve(o)))}};
    } else {
        const Rational t = parse_rational(o.tau);
        in["tau"] = to_string(t);
        const Rational s = sigma_of_tau(o.rank, o.degree, t, curve(o));
        result = {{"sigma", to_string(s)}, {"roundtrip_tau", to_string(tau_of_sigma(o.rank, o.degree, s, curve(o)))}};
    }
    Json r = make_report("sigma", in, {});
    r["result"] = result;
    emit(o, r, std::nullopt);
}

void cmd_triple_theta(const Options& o) {
    const TripleModel t = parse_triple(o.triple);
    const Subtriple s = o.sub.empty() ? Subtriple{t.r1, t.d1, t.r2, t.d2} : parse_sub(o.sub);
    const Rational tau = parse_rational(o.tau);
    Json r = make_report("triple-theta", {{"triple", o.triple}, {"sub", o.sub.empty() ? o.triple : o.sub},
                                          {"tau", to_string(tau)}}, {});
    const Rational th = theta_tau(t, s, tau, curve(o));
    r["result"] = {{"theta", to_string(th)}, {"negative", th < 0}};
    emit(o, r, std::nullopt);
}

void cmd_tau_prime(const Options& o) {
    const TripleModel t = parse_triple(o.triple);
    const Rational tau = parse_rational(o.tau);
    Json r = make_report("tau-prime", {{"triple", o.triple}, {"tau", to_string(tau)}}, {});
    r["result"] = {{"tau_prime", to_string(tau_prime_of_tau(t, tau))}};
    emit(o, r, std::nullopt);
}

void cmd_he_solve(const Options& o) {
    const Grid g = grid(o);
    const SolverConfig cfg = solver(o);
    std::optional<ScalarField> target;
    if (o.target.rfind("cos:", 0) == 0) {
        const double a = std::stod(o.target.substr(4));
        ScalarField t(g);
        for (std::size_t k = 0; k < g.size(); ++k)
            t.values[k] = o.degree / o.vol + a * std::cos(2.0 * std::numbers::pi * g.x(k) / g.side());
        target = std::move(t);
    } else if (o.target.rfind("shift:", 0) == 0) {
        target = ScalarField(g, o.degree / o.vol + std::stod(o.target.substr(6)));
    } else if (o.target != "const") {
        throw std::invalid_argument("--target must be 'const', 'cos:<a>' or 'shift:<c>'");
    }
    Json r = make_report("he-solve", {{"degree", o.degree}, {"target", o.target}}, {g, cfg, std::nullopt});
    const HeSolution s = he_line_solve(o.degree, target, g, cfg);
    const CurvatureField F = line_curvature(o.degree, s.psi);
    r["result"] = {{"residual_sup", s.residual}, {"psi_sup", s.psi.sup_norm()}, {"psi_mean", s.psi.mean()},
                   {"curvature", curvature_summary(F)}};
    add_check(r, "chern_weil", std::abs(F.chern_weil_degree() - o.degree) < 1e-10,
              1e-10 - std::abs(F.chern_weil_degree() - o.degree));
    if (!o.field_out.empty()) write_binary(o.field_out, snapshot(s.psi));
    emit(o, r, std::nullopt);
}

void cmd_vortex(const Options& o) {
    const Grid g = grid(o);
    const SolverConfig cfg = solver(o);
    const double tau = parse_rational(o.tau).get_d();
    Json r = make_report("vortex", {{"degree", o.degree}, {"tau", o.tau}}, {g, cfg, std::nullopt});
    Json info;
    const SectionField phi0 = first_section(g, o.degree, info);
    r["sections"] = info;
    const VortexSolution v = vortex_solve(o.degree, phi0, tau, g, cfg);
    r["result"] = to_json(v);
    r["series"]["vortex_residual"] = v.residual_history;
    add_check(r, "converged", v.residual <= cfg.tol, cfg.tol - v.residual);
    add_check(r, "integrated_identity", v.identity_residual <= 10 * cfg.tol, 10 * cfg.tol - v.identity_residual);
    if (!std::isnan(v.min_ritz)) add_check(r, "jacobian_positive", v.min_ritz > 0.0, v.min_ritz);
    if (!o.field_out.empty()) write_binary(o.field_out, snapshot(v.psi));
    emit(o, r, PlotKind::vortex_residual);
}

void cmd_coupled(const Options& o) {
    const Grid g = grid(o);
    const SolverConfig cfg = solver(o);
    const double tau = parse_rational(o.tau).get_d();
    const TripleModel t{1, o.d1, 1, o.d2, {}};
    Json r = make_report("coupled-vortex", {{"d1", o.d1}, {"d2", o.d2}, {"tau", o.tau}}, {g, cfg, std::nullopt});
    Json info;
    const SectionField phi0 = first_section(g, o.d1 - o.d2, info);
    r["sections"] = info;
    const CoupledVortexSolution c = coupled_vortex_solve(o.d1, o.d2, phi0, tau, g, cfg);
    r["result"] = to_json(c);
    r["result"]["tau_prime_exact"] = to_string(tau_prime_of_tau(t, parse_rational(o.tau)));
    r["series"]["vortex_residual"] = c.residual_history;
    add_check(r, "phi1_le_tau", c.phi1_margin >= -1e-8, c.phi1_margin);
    add_check(r, "phi2_ge_tau_prime", c.phi2_margin >= -1e-8, c.phi2_margin);
    emit(o, r, PlotKind::vortex_residual);
}

void cmd_sections(const Options& o) {
    const Grid g = grid(o);
    const LinkPtr link = background_connection(g, static_cast<int>(o.degree));
    Json r = make_report("sections", {{"degree", o.degree}}, {g, std::nullopt, std::nullopt});
    const HoloSections hs = holo_sections(link);
    const DbarIndex idx = dbar_index(link);
    r["result"] = to_json(hs);
    r["result"]["index"] = {{"kernel", idx.kernel}, {"cokernel", idx.cokernel}, {"index", idx.index()},
                            {"kernel_gap", idx.kernel_gap}, {"cokernel_gap", idx.cokernel_gap}};
    r["result"]["total_flux_over_2pi"] = link->total_flux() / (2.0 * std::numbers::pi);
    add_check(r, "index_equals_degree", idx.index() == o.degree, 0.0);
    emit(o, r, std::nullopt);
}

std::pair<long, long> sweep_degrees(const std::string& model) {
    if (model == "atiyah") return {0, 0};
    if (model.rfind("ext:", 0) == 0) {
        const auto v = parse_ints(model.substr(4), 2, "--model ext");
        return {static_cast<long>(v[0]), static_cast<long>(v[1])};
    }
    throw std::invalid_argument("--model must be 'atiyah' or 'ext:<d1>,<d2>'");
}

void cmd_sweep(const Options& o) {
    const Grid g = grid(o);
    const SolverConfig cfg = solver(o);
    const auto [d1, d2] = sweep_degrees(o.model);
    std::mt19937_64 rng(o.seed);
    const SectionField beta = make_beta(o.beta, g, d1 - d2, rng);
    const std::vector<double> ts = t_values(o);
    Json r = make_report("sweep-t", {{"model", o.model}, {"beta", o.beta}, {"t_values", ts}}, {g, cfg, o.seed});
    const SweepReport s = theorem5_sweep(d1, d2, beta, ts, g, cfg);
    r["result"] = to_json(s);
    r["series"]["sweep"] = sweep_series(s);
    add_check(r, "deviation_monotone", s.monotone, 0.0);
    for (const SweepPoint& p : s.points)
        add_check(r, "dominated_by_m_achieved", p.domination_margin >= -1e-12 && p.guan_consistent, p.domination_margin);
    emit(o, r, PlotKind::sweep);
}

void cmd_inf_m(const Options& o) {
    const Grid g = grid(o);
    const SolverConfig cfg = solver(o);
    const BundleModel b = BundleModel::parse(o.bundle);
    const std::vector<double> ts = t_values(o);
    Json r = make_report("inf-m", {{"bundle", b.to_string()}, {"t_values", ts}}, {g, cfg, std::nullopt});
    const InfMReport m = inf_m_estimate(b, ts, g, cfg);
    r["result"] = to_json(m);
    add_check(r, "layers_agree", m.layers_agree, 0.0);
    emit(o, r, std::nullopt);
}

MetricData random_metric(const Grid& g, long d1, long d2, std::mt19937_64& rng, double t) {
    ScalarField p1 = random_potential(g, rng, 0.3);
    ScalarField p2 = random_potential(g, rng, 0.3);
    SectionField beta = make_beta("random", g, d1 - d2, rng);
    beta = harmonic_project(beta).beta;
    return MetricData::extension(std::move(p1), std::move(p2), std::move(beta), t);
}

void cmd_gauge(const Options& o) {
    const Grid g = grid(o);
    const auto [d1, d2] = sweep_degrees(o.model);
    std::mt19937_64 rng(o.seed);
    const MetricData m = random_metric(g, d1, d2, rng, 1.0);
    const CurvatureField transformed = extension_curvature(d1, d2, transform_structure(m, o.scale));
    const CurvatureField metric = extension_curvature(d1, d2, transport_metric(m, o.scale));
    const double disc = gauge_transport_check(transformed, metric);
    Json r = make_report("gauge-check", {{"model", o.model}, {"scale", o.scale}}, {g, std::nullopt, o.seed});
    r["result"] = {{"discrepancy", disc}, {"transformed", curvature_summary(transformed)},
                   {"metric", curvature_summary(metric)}};
    add_check(r, "conjugation_invariance", disc <= 1e-10, 1e-10 - disc);
    emit(o, r, std::nullopt);
}

void cmd_dual(const Options& o) {
    const Grid g = grid(o);
    const auto [d1, d2] = sweep_degrees(o.model);
    std::mt19937_64 rng(o.seed);
    const CurvatureField F = extension_curvature(d1, d2, random_metric(g, d1, d2, rng, 0.5));
    const CurvatureField D = dual_curvature(F);
    const CurvatureField DD = dual_curvature(D);
    const EigRange a = eig_range(F), b = eig_range(D);
    double neg = 0.0, twice = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        neg = std::max(neg, std::abs(b.lambda_min.values[k] + a.lambda_max.values[k]));
        neg = std::max(neg, std::abs(b.lambda_max.values[k] + a.lambda_min.values[k]));
        twice = std::max(twice, (DD.values[k] - F.values[k]).cwiseAbs().maxCoeff());
    }
    Json r = make_report("dual-check", {{"model", o.model}}, {g, std::nullopt, o.seed});
    r["result"] = {{"eigen_negation_error", neg}, {"double_dual_error", twice}, {"primal", curvature_summary(F)},
                   {"dual", curvature_summary(D)}};
    r["series"]["eig_hist"] = eig_histogram(a);
    add_check(r, "eigenvalues_negate", neg <= 1e-14, 1e-14 - neg);
    add_check(r, "double_dual_identity", twice == 0.0, -twice);
    emit(o, r, PlotKind::eig_hist);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hnlab: slope stability and Hermitian-Einstein lattice laboratory"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--out", o.out, "write the JSON report here instead of stdout");
        c->add_option("--vol", o.vol, "curve volume")->check(CLI::PositiveNumber);
    };
    auto numeric = [&](CLI::App* c) {
        common(c);
        c->add_option("--grid", o.grid, "grid points per side (power of two >= 8)");
        c->add_option("--tol", o.tol, "solver residual target");
        c->add_option("--max-iter", o.max_iter, "Newton iteration cap");
        c->add_option("--seed", o.seed, "seed for randomized fields");
        c->add_option("--field-out", o.field_out, "binary snapshot of the solved potential");
    };
    auto t_range = [&](CLI::App* c) {
        c->add_option("--t-min", o.t_min, "smallest t");
        c->add_option("--t-max", o.t_max, "largest t");
        c->add_option("--t-points", o.t_points, "number of geometrically spaced t values");
        c->add_option("--csv", o.csv, "plot data output");
    };

    std::map<std::string, std::function<void(const Options&)>> handlers;
    auto sub = [&](const std::string& name, const std::string& help, std::function<void(const Options&)> fn) {
        handlers[name] = std::move(fn);
        return app.add_subcommand(name, help);
    };

    auto* hn = sub("hn", "Harder-Narasimhan filtration of a bundle model", cmd_hn);
    common(hn);
    hn->add_option("--bundle", o.bundle, "sum:3,3,1 | ext2:1,0,nz | ext2:0,0,z")->required();

    auto* m1 = sub("mu1", "top HN slope and its dual", cmd_mu1);
    common(m1);
    m1->add_option("--bundle", o.bundle)->required();

    auto* ts = sub("tau-stable", "tau-stability of a holomorphic pair", cmd_tau_stable);
    common(ts);
    ts->add_option("--bundle", o.bundle)->required();
    ts->add_option("--phi-deg", o.phi_deg, "degree of the subsheaf generated by the section")->required();
    ts->add_option("--tau", o.tau)->required();
    ts->add_option("--witness", o.witnesses, "rank,degree,phi|nophi (repeatable)");

    auto* ti = sub("tau-interval", "interval of tau for which the pair is stable", cmd_tau_interval);
    common(ti);
    auto* bopt = ti->add_option("--bundle", o.bundle);
    auto* ropt = ti->add_option("--rank2", o.bundle, "alias of --bundle");
    bopt->excludes(ropt);
    ti->add_option("--phi-deg", o.phi_deg)->required();
    ti->add_option("--witness", o.witnesses, "rank,degree,phi|nophi (repeatable)");

    auto* sg = sub("sigma", "sigma <-> tau conversion", cmd_sigma);
    common(sg);
    sg->add_option("--rank", o.rank)->check(CLI::PositiveNumber);
    sg->add_option("--degree", o.degree);
    sg->add_option("--tau", o.tau);
    sg->add_option("--sigma", o.sigma, "convert sigma to tau instead");

    auto* th = sub("triple-theta", "theta_tau of a subtriple", cmd_triple_theta);
    common(th);
    th->add_option("--triple", o.triple, "r1,d1,r2,d2")->required();
    th->add_option("--sub", o.sub, "r1',d1',r2',d2' (default: the full triple)");
    th->add_option("--tau", o.tau)->required();

    auto* tp = sub("tau-prime", "tau' from the triple constraint", cmd_tau_prime);
    common(tp);
    tp->add_option("--triple", o.triple, "r1,d1,r2,d2")->required();
    tp->add_option("--tau", o.tau)->required();

    auto* he = sub("he-solve", "Hermitian-Einstein metric on a line bundle", cmd_he_solve);
    numeric(he);
    he->add_option("--degree", o.degree);
    he->add_option("--target", o.target, "const | cos:<a> | shift:<c>");

    auto* vx = sub("vortex", "abelian tau-vortex equation", cmd_vortex);
    numeric(vx);
    vx->add_option("--degree", o.degree);
    vx->add_option("--tau", o.tau)->required();
    vx->add_option("--csv", o.csv, "Newton residual history");

    auto* cv = sub("coupled-vortex", "coupled vortex equations, r1 = r2 = 1", cmd_coupled);
    numeric(cv);
    cv->add_option("--d1", o.d1);
    cv->add_option("--d2", o.d2);
    cv->add_option("--tau", o.tau)->required();
    cv->add_option("--csv", o.csv, "Newton residual history");

    auto* sc = sub("sections", "holomorphic sections and the discrete index", cmd_sections);
    numeric(sc);
    sc->add_option("--degree", o.degree);

    auto* sw = sub("sweep-t", "deviation from the HN block diagonal along the gauge family", cmd_sweep);
    numeric(sw);
    t_range(sw);
    sw->add_option("--model", o.model, "atiyah | ext:<d1>,<d2>");
    sw->add_option("--beta", o.beta, "const:<c> | random");

    auto* im = sub("inf-m", "achieved upper bounds m(t) against mu1", cmd_inf_m);
    numeric(im);
    t_range(im);
    im->add_option("--bundle", o.bundle)->required();

    auto* gc = sub("gauge-check", "conjugation identity for g = diag(1, s)", cmd_gauge);
    numeric(gc);
    gc->add_option("--model", o.model, "atiyah | ext:<d1>,<d2>");
    gc->add_option("--scale", o.scale, "s in g = diag(1, s)")->check(CLI::PositiveNumber);

    auto* dc = sub("dual-check", "curvature of the dual bundle", cmd_dual);
    numeric(dc);
    dc->add_option("--model", o.model, "atiyah | ext:<d1>,<d2>");
    dc->add_option("--csv", o.csv, "eigenvalue histogram");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (ti->parsed() && o.bundle.empty()) throw std::invalid_argument("tau-interval needs --bundle or --rank2");
        for (auto* s : app.get_subcommands()) handlers.at(s->get_name())(o);
    } catch (const ObstructionError& e) {
        std::cerr << "obstruction: " << e.what() << "\n";
        return 2;
    } catch (const NonconvergenceError& e) {
        std::cerr << "nonconvergence: " << e.what() << "\n  residual history:";
        for (double r : e.history()) std::cerr << " " << r;
        std::cerr << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
