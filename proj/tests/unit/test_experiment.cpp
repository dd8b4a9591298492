#include "crm/config_io.hpp"
#include "crm/errors.hpp"
#include "crm/experiment.hpp"
#include "crm/export.hpp"
#include "crm/presets.hpp"
#include "crm/scan.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace crm;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("crm-unit-" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("engine names") {
    for (auto e : {Engine::Ode, Engine::Ssa, Engine::Ibm, Engine::Analytic, Engine::Stability,
                   Engine::Hopf, Engine::Lyapunov, Engine::FrSurface, Engine::Scan})
        CHECK(engine_from_string(to_string(e)) == e);
    CHECK_THROWS_AS(engine_from_string("euler"), InvalidConfig);
}

TEST_CASE("scan axis values") {
    ScanAxis lin{"delta", 0.0, 1.0, 5};
    const auto v = lin.values();
    REQUIRE(v.size() == 5);
    CHECK(v[1] == doctest::Approx(0.25));
    ScanAxis lg{"d_intra", 0.01, 1.0, 3, true};
    CHECK(lg.values()[1] == doctest::Approx(0.1));
}

TEST_CASE("named parameters") {
    auto c = make_preset("fig1e").config;
    CHECK(is_parameter("delta", c));
    CHECK(is_parameter("D2", c));
    CHECK_FALSE(is_parameter("D3", c));
    CHECK_FALSE(is_parameter("zeta", c));
    set_parameter(c, "delta", 0.5);
    CHECK(c.D(0) == doctest::Approx(1.5 * c.D(1)));
    CHECK(get_parameter(c, "delta") == doctest::Approx(0.5));
    set_parameter(c, "d_intra", 0.7);
    CHECK(c.d_intra(0) == 0.7);
    CHECK(c.d_intra(1) == 0.7);
    set_parameter(c, "K0", 42.0);
    CHECK(c.resources[0].carrying_capacity == 42.0);
    CHECK_THROWS_AS(set_parameter(c, "a_inter", 0.1), InvalidConfig);
}

TEST_CASE("spec validation names the field") {
    auto s = make_preset("fig1e");
    s.run.samples = 1;
    CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("samples"), InvalidConfig);
    s = make_preset("fig1e");
    s.initial_C.resize(3);
    CHECK_THROWS_AS(validate(s), InvalidConfig);
    s = make_preset("figS9e");
    s.hopf.reset();
    CHECK_THROWS_AS(validate(s), InvalidConfig);
}

TEST_CASE("rank abundance") {
    Vec a(4);
    a << 0.5, 3.0, 1e-5, 2.0;
    const auto all = rank_abundance(a);
    REQUIRE(all.size() == 4);
    CHECK(all[0].species == 1);
    CHECK(all[0].rank == 1);
    CHECK(all[3].species == 2);
    const auto live = rank_abundance(a, true);
    CHECK(live.size() == 3);

    std::ostringstream os;
    write_rank_csv(os, live);
    CHECK(os.str().rfind("rank,species,abundance\n1,C2,3\n", 0) == 0);
}

TEST_CASE("small coexistence scan") {
    const auto base = make_preset("figS8e").config;
    ScanOptions opts;
    opts.overlay_bound = true;
    opts.threads = 1;
    const std::array<ScanAxis, 2> axes{ScanAxis{"delta", 0.5, 3.0, 2}, ScanAxis{"d_intra", 0.5, 0.5, 1}};
    const auto scan = scan_coexistence(base, axes, opts);
    REQUIRE(scan.cells.size() == 2);
    CHECK(scan.at(0, 0).outcome == CellOutcome::StableCoexistence);
    CHECK(scan.at(1, 0).outcome == CellOutcome::Extinction);
    CHECK(scan.at(0, 0).delta_bar > 0.5);

    auto chasing = base;
    chasing.scenario = Scenario::ChasingOnly;
    chasing.a_intra.setZero();
    CHECK_THROWS_AS(scan_coexistence(chasing, axes, opts), InvalidConfig);
}

TEST_CASE("run_experiment writes outputs and a replayable manifest") {
    auto s = make_preset("figS5c");
    s.run.t_end = 2e4;
    s.run.samples = 101;
    s.output_dir = scratch_dir("ode");
    const auto summary = run_experiment(s);
    CHECK(fs::exists(summary.directory / "trajectory.csv"));
    CHECK(fs::exists(summary.directory / "outcome.json"));
    const auto manifest = summary.directory / "manifest.json";
    REQUIRE(fs::exists(manifest));

    auto replay = load_spec(manifest);
    CHECK(replay.name == s.name);
    CHECK(replay.run.t_end == s.run.t_end);
    replay.output_dir = scratch_dir("ode-replay");
    const auto again = run_experiment(replay);
    CHECK(slurp(summary.directory / "trajectory.csv") == slurp(again.directory / "trajectory.csv"));
}

TEST_CASE("run_experiment for the other engines") {
    SUBCASE("ssa") {
        auto s = make_preset("fig2c");
        s.run.t_end = 500;
        s.run.runs = 2;
        s.output_dir = scratch_dir("ssa");
        const auto r = run_experiment(s);
        CHECK(fs::exists(r.directory / "ssa.csv"));
        CHECK(fs::exists(r.directory / "ensemble.csv"));
    }
    SUBCASE("ibm") {
        auto s = make_preset("fig2mo");
        s.run.t_end = 20;
        s.output_dir = scratch_dir("ibm");
        const auto r = run_experiment(s);
        CHECK(fs::exists(r.directory / "ibm.csv"));
        CHECK(fs::exists(r.directory / "snapshot.csv"));
    }
    SUBCASE("analytic") {
        auto s = make_preset("fig1e");
        s.engine = Engine::Analytic;
        s.output_dir = scratch_dir("analytic");
        const auto r = run_experiment(s);
        CHECK(slurp(r.directory / "analytic.json").find("closed_form") != std::string::npos);
    }
    SUBCASE("stability") {
        auto s = make_preset("figS6a");
        s.output_dir = scratch_dir("stability");
        const auto r = run_experiment(s);
        CHECK(slurp(r.directory / "stability.json").find("Unstable") != std::string::npos);
    }
    SUBCASE("surface") {
        auto s = make_preset("figS2a");
        s.surface->points = 5;
        s.output_dir = scratch_dir("surface");
        const auto r = run_experiment(s);
        CHECK(fs::exists(r.directory / "fr_surface.csv"));
    }
}

TEST_CASE("default output root follows the environment") {
    ::setenv("CRM_OUTPUT_ROOT", "/tmp/crm-root-test", 1);
    CHECK(default_output_root() == fs::path("/tmp/crm-root-test"));
    ::unsetenv("CRM_OUTPUT_ROOT");
    CHECK(default_output_root() == fs::path("crm-out"));
}
