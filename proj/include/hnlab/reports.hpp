#pragma once

// JSON reports and CSV plot data. Reports are built from std::map-backed
// JSON objects, so key order and number formatting are deterministic.

#include "hnlab/exact_stability.hpp"
#include "hnlab/hermitian_fields.hpp"
#include "hnlab/solvers.hpp"
#include "hnlab/torus_lattice.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace hnlab {

inline constexpr const char* kHnlabVersion = "0.3.0";

using Json = nlohmann::json;

struct Provenance {
    std::optional<Grid> grid;
    std::optional<SolverConfig> solver;
    std::optional<std::uint64_t> seed;
};

/// Skeleton {command, inputs, provenance, checks: []}.
Json make_report(const std::string& command, Json inputs, const Provenance& prov);

/// Appends {name, pass, margin} to report["checks"].
void add_check(Json& report, const std::string& name, bool pass, double margin);

Json to_json(const HNData& hn);
Json to_json(const PairStability& ps);
Json to_json(const HoloSections& hs);
Json to_json(const VortexSolution& v);
Json to_json(const CoupledVortexSolution& c);
Json to_json(const SweepReport& s);
Json to_json(const InfMReport& r);
/// Per-t rows for the "sweep" series.
Json sweep_series(const SweepReport& s);
/// min/max eigenvalue, Chern-Weil degree, off-diagonal sup.
Json curvature_summary(const CurvatureField& f);
Json eig_histogram(const EigRange& r, int bins = 20);

enum class PlotKind { sweep, vortex_residual, eig_hist };
PlotKind parse_plot_kind(const std::string& text);

/// CSV with fixed headers:
///   sweep: t,D,offdiag_sup,m_achieved,ym_energy
///   vortex-residual: iter,residual_sup
///   eig-hist: bin_lo,bin_hi,count
std::string emit_plotdata(const Json& report, PlotKind kind);

/// Canonical serialization (two-space indent, trailing newline).
std::string dump(const Json& report);

} // namespace hnlab
