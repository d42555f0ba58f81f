#include "hnlab/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hnlab {

namespace {

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt(const Json& x) { return x.is_null() ? std::string("nan") : fmt(x.get<double>()); }

const Json& series(const Json& report, const char* key) {
    if (!report.contains("series") || !report["series"].contains(key))
        throw std::invalid_argument(std::string("report has no '") + key + "' series");
    const Json& s = report["series"][key];
    if (s.empty()) throw std::invalid_argument(std::string("'") + key + "' series is empty");
    return s;
}

} // namespace

Json make_report(const std::string& command, Json inputs, const Provenance& prov) {
    Json p = {{"version", kHnlabVersion}, {"conventions", kConventionSheet}};
    if (prov.grid) p["grid"] = {{"n", prov.grid->n()}, {"volume", prov.grid->volume()}, {"spacing", prov.grid->spacing()}};
    if (prov.solver)
        p["solver"] = {{"tol", prov.solver->tol}, {"max_iter", prov.solver->max_iter}, {"damping", prov.solver->damping}};
    if (prov.seed) p["seed"] = *prov.seed;
    return {{"command", command}, {"inputs", std::move(inputs)}, {"provenance", std::move(p)}, {"checks", Json::array()}};
}

void add_check(Json& report, const std::string& name, bool pass, double margin) {
    report["checks"].push_back({{"name", name}, {"pass", pass}, {"margin", margin}});
}

Json to_json(const HNData& hn) {
    Json q = Json::array();
    for (const auto& x : hn.quotients) q.push_back({x.rank, to_string(x.slope)});
    return {{"quotients", q}, {"mu1", to_string(hn.mu1)}};
}

Json to_json(const PairStability& ps) {
    Json v = Json::array();
    for (const auto& x : ps.violations)
        v.push_back({{"rank", x.witness.rank}, {"degree", x.witness.degree}, {"contains_phi", x.witness.contains_phi},
                     {"condition", x.condition}, {"value", to_string(x.value)}});
    Json w = Json::array();
    for (const auto& x : ps.witnesses_used)
        w.push_back({{"rank", x.rank}, {"degree", x.degree}, {"contains_phi", x.contains_phi}});
    return {{"stable", ps.stable}, {"violations", v}, {"witnesses", w}, {"semantics", "witness-set"}};
}

Json to_json(const HoloSections& hs) {
    return {{"count", hs.sections.size()},
            {"near_kernel", hs.near_kernel},
            {"gap_ratio", hs.gap_ratio},
            {"singular_values", hs.singular_values},
            {"dbar_residuals", hs.dbar_residuals}};
}

Json to_json(const VortexSolution& v) {
    return {{"iterations", v.iterations},
            {"residual_sup", v.residual},
            {"section_norm_h", v.section_norm_h},
            {"identity_residual", v.identity_residual},
            {"jacobian_min_ritz", v.min_ritz},
            {"dbar_residual", v.dbar_residual},
            {"psi_sup", v.psi.sup_norm()}};
}

Json to_json(const CoupledVortexSolution& c) {
    return {{"tau", c.tau},
            {"tau_prime", c.tau_prime},
            {"iterations", c.iterations},
            {"residual1_sup", c.residual1},
            {"residual2_sup", c.residual2},
            {"section_norm_h", c.section_norm_h},
            {"identity1", c.identity1},
            {"identity2", c.identity2},
            {"phi1_margin", c.phi1_margin},
            {"phi2_margin", c.phi2_margin},
            {"jacobian_min_ritz", c.min_ritz}};
}

Json to_json(const SweepReport& s) {
    return {{"d1", s.d1},
            {"d2", s.d2},
            {"fitted_exponent", s.fitted_exponent},
            {"fit_intercept", s.fit_intercept},
            {"fit_residual", s.fit_residual},
            {"fit_points", s.fit_points},
            {"harmonic_residual", s.harmonic_residual},
            {"beta_sup", s.beta_sup},
            {"monotone", s.monotone}};
}

Json sweep_series(const SweepReport& s) {
    Json rows = Json::array();
    for (const SweepPoint& p : s.points)
        rows.push_back({{"t", p.t},
                        {"D", p.deviation},
                        {"offdiag_sup", p.offdiag_sup},
                        {"m_achieved", p.m_achieved},
                        {"ym_energy", p.ym_energy},
                        {"domination_margin", p.domination_margin},
                        {"guan_consistent", p.guan_consistent}});
    return rows;
}

Json to_json(const InfMReport& r) {
    return {{"mu1", to_string(r.mu1)},
            {"t_values", r.t_values},
            {"m_values", r.m_values},
            {"attained", r.attained},
            {"halving_ratios", r.halving_ratios},
            {"domination_margins", r.domination_margins},
            {"layers_agree", r.layers_agree}};
}

Json curvature_summary(const CurvatureField& f) {
    const EigRange r = eig_range(f);
    return {{"rank", f.rank},
            {"lambda_min", r.min},
            {"lambda_max", r.max},
            {"chern_weil_degree", f.chern_weil_degree()},
            {"offdiag_sup", f.offdiag_sup()}};
}

Json eig_histogram(const EigRange& r, int bins) {
    if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
    const double lo = r.min;
    const double hi = r.max > r.min ? r.max : r.min + 1.0;
    std::vector<double> edges_lo, edges_hi;
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    const double w = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) {
        edges_lo.push_back(lo + b * w);
        edges_hi.push_back(lo + (b + 1) * w);
    }
    auto add = [&](double x) {
        const int b = std::clamp(static_cast<int>((x - lo) / w), 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    };
    for (double x : r.lambda_min.values) add(x);
    for (double x : r.lambda_max.values) add(x);
    return {{"bin_lo", edges_lo}, {"bin_hi", edges_hi}, {"count", counts}};
}

PlotKind parse_plot_kind(const std::string& text) {
    if (text == "sweep") return PlotKind::sweep;
    if (text == "vortex-residual") return PlotKind::vortex_residual;
    if (text == "eig-hist") return PlotKind::eig_hist;
    throw std::invalid_argument("unknown plot kind '" + text + "'");
}

std::string emit_plotdata(const Json& report, PlotKind kind) {
    std::string out;
    switch (kind) {
    case PlotKind::sweep: {
        const Json& s = series(report, "sweep");
        out = "t,D,offdiag_sup,m_achieved,ym_energy\n";
        for (const Json& p : s)
            out += fmt(p.at("t")) + "," + fmt(p.at("D")) + "," + fmt(p.at("offdiag_sup")) + "," +
                   fmt(p.at("m_achieved")) + "," + fmt(p.at("ym_energy")) + "\n";
        break;
    }
    case PlotKind::vortex_residual: {
        const Json& s = series(report, "vortex_residual");
        out = "iter,residual_sup\n";
        for (std::size_t i = 0; i < s.size(); ++i) out += std::to_string(i) + "," + fmt(s[i]) + "\n";
        break;
    }
    case PlotKind::eig_hist: {
        const Json& s = series(report, "eig_hist");
        out = "bin_lo,bin_hi,count\n";
        for (std::size_t i = 0; i < s.at("count").size(); ++i)
            out += fmt(s["bin_lo"][i]) + "," + fmt(s["bin_hi"][i]) + "," + std::to_string(s["count"][i].get<long>()) + "\n";
        break;
    }
    }
    return out;
}

std::string dump(const Json& report) { return report.dump(2) + "\n"; }

} // namespace hnlab
