#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hnlab/field_io.hpp"
#include "hnlab/reports.hpp"
#include "hnlab/torus_lattice.hpp"
#include "support.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace hnlab;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / (std::string("hnlab_test_") + name)).string();
}

SweepReport small_sweep() {
    const Grid g = make_grid(16, 1.0);
    SectionField b(background_connection(g, 0));
    for (auto& z : b.values) z = 1.0;
    return theorem5_sweep(0, 0, b, {0.5, 0.25}, g);
}

} // namespace

TEST_CASE("report skeleton carries provenance and the convention sheet") {
    const Grid g = make_grid(32, 1.0);
    const Json r = make_report("demo", {{"x", 1}}, {g, SolverConfig{}, 7});
    CHECK(r["command"] == "demo");
    CHECK(r["inputs"]["x"] == 1);
    CHECK(r["provenance"]["conventions"] == kConventionSheet);
    CHECK(r["provenance"]["version"] == kHnlabVersion);
    CHECK(r["provenance"]["grid"]["n"] == 32);
    CHECK(r["provenance"]["solver"]["tol"] == 1e-10);
    CHECK(r["provenance"]["seed"] == 7);
    CHECK(r["checks"].is_array());
    CHECK(r["checks"].empty());
    CHECK_FALSE(make_report("bare", Json::object(), {})["provenance"].contains("grid"));
}

TEST_CASE("exact results serialize as fraction strings") {
    const Json hn = to_json(hn_filtration(BundleModel::parse("sum:3,3,1")));
    CHECK(hn.dump() == R"({"mu1":"3","quotients":[[2,"3"],[1,"1"]]})");
    const Json ps = to_json(tau_stable_pair(PairModel(BundleModel::parse("ext2:1,1,nz"), 0), 2));
    CHECK(ps["stable"] == false);
    CHECK(ps["violations"][0]["value"].is_string());
}

TEST_CASE("emit_plotdata schemas") {
    Json r = make_report("sweep-t", Json::object(), {});
    r["series"]["sweep"] = sweep_series(small_sweep());
    const std::string csv = emit_plotdata(r, PlotKind::sweep);
    CHECK(csv.rfind("t,D,offdiag_sup,m_achieved,ym_energy\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("\n0.5,") != std::string::npos);

    r["series"]["vortex_residual"] = {1.0, 0.25};
    CHECK(emit_plotdata(r, PlotKind::vortex_residual) == "iter,residual_sup\n0,1\n1,0.25\n");

    const Grid g = make_grid(8, 1.0);
    r["series"]["eig_hist"] = eig_histogram(eig_range(line_curvature(1, ScalarField(g))), 4);
    const std::string hist = emit_plotdata(r, PlotKind::eig_hist);
    CHECK(hist.rfind("bin_lo,bin_hi,count\n", 0) == 0);
    CHECK(hist.find(",128\n") != std::string::npos); // all 2 * 64 eigenvalues in one bin
}

TEST_CASE("emit_plotdata rejects missing or empty series") {
    Json r = make_report("x", Json::object(), {});
    CHECK_THROWS_WITH(emit_plotdata(r, PlotKind::sweep), doctest::Contains("no 'sweep' series"));
    r["series"]["sweep"] = Json::array();
    CHECK_THROWS_WITH(emit_plotdata(r, PlotKind::sweep), doctest::Contains("empty"));
    CHECK(parse_plot_kind("vortex-residual") == PlotKind::vortex_residual);
    CHECK_THROWS(parse_plot_kind("histogram"));
}

TEST_CASE("property: report bytes are deterministic") {
    for (int trial = 0; trial < 3; ++trial) {
        const SweepReport s = small_sweep();
        Json a = make_report("sweep-t", {{"model", "atiyah"}}, {make_grid(16, 1.0), SolverConfig{}, 3});
        a["result"] = to_json(s);
        a["series"]["sweep"] = sweep_series(s);
        Json b = make_report("sweep-t", {{"model", "atiyah"}}, {make_grid(16, 1.0), SolverConfig{}, 3});
        b["series"]["sweep"] = sweep_series(small_sweep());
        b["result"] = to_json(small_sweep());
        CHECK(dump(a) == dump(b));
        CHECK(dump(a).back() == '\n');
    }
}

TEST_CASE("field snapshots roundtrip through binary and JSON") {
    std::mt19937_64 rng(51);
    const Grid g = make_grid(16, 2.5);
    const ScalarField psi = test::random_potential(g, rng);
    const SectionField s = test::random_section(background_connection(g, -2), rng);
    const CurvatureField f = line_curvature(1, psi);

    const std::string path = temp_path("scalar.bin");
    write_binary(path, snapshot(psi));
    const ScalarField back = to_scalar(read_binary(path));
    CHECK(back.grid == g);
    CHECK(back.values == psi.values);

    write_binary(path, snapshot(s));
    const SectionField sb = to_section(read_binary(path));
    CHECK(sb.link->degree() == -2);
    CHECK(sb.values == s.values);

    const FieldSnapshot fj = from_json(to_json(snapshot(f)));
    CHECK(fj.kind == FieldKind::herm2);
    CHECK(fj.values == snapshot(f).values);
    CHECK_THROWS(to_section(snapshot(psi)));

    std::ofstream(path, std::ios::binary) << "HNFD";
    CHECK_THROWS_WITH(read_binary(path), doctest::Contains("truncated"));
    std::ofstream(path, std::ios::binary) << "NOPE....";
    CHECK_THROWS_WITH(read_binary(path), doctest::Contains("not a field file"));
    std::remove(path.c_str());
}
