#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fpme/cli/commands.hpp"
#include "fpme/cli/config.hpp"
#include "fpme/cli/datum.hpp"
#include "fpme/cli/manifest.hpp"
#include "fpme/cli/plot.hpp"
#include "fpme/error.hpp"
#include "fpme/io.hpp"

#include <filesystem>
#include <fstream>

using namespace fpme;
using namespace fpme::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fpme_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunConfig small(const fs::path& out, FlagValues extra = {}) {
    FlagValues flags{{"n", "64"}, {"output_dir", out.string()}, {"samples", "2000"}};
    flags.insert(flags.end(), extra.begin(), extra.end());
    return parse_config(std::nullopt, flags);
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(read_text(p)); }

}  // namespace

TEST_CASE("flags alone give a valid config") {
    const RunConfig c = parse_config(std::nullopt, {{"a", "0"}, {"b", "2"}, {"n", "40"}, {"s", "0.3"}, {"m", "3"}});
    CHECK(c.a == 0.0);
    CHECK(c.b == 2.0);
    CHECK(c.n == 40);
    CHECK(c.alpha == doctest::Approx(0.5));
}

TEST_CASE("default alpha follows m") {
    CHECK(parse_config(std::nullopt, {{"m", "2"}}).alpha == 1.0);
    CHECK(parse_config(std::nullopt, {{"m", "2"}, {"alpha", "0.7"}}).alpha == 0.7);
}

TEST_CASE("preconditions are enforced at parse time") {
    CHECK_THROWS_AS(parse_config(std::nullopt, {{"s", "1.2"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(std::nullopt, {{"m", "1"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(std::nullopt, {{"n", "7"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(std::nullopt, {{"h", "1.0"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(std::nullopt, {{"a", "1"}, {"b", "1"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(std::nullopt, {{"datum", "zigzag"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(std::nullopt, {{"n_images", "8"}}), ConfigError);
    try {
        parse_config(std::nullopt, {{"s", "1.2"}});
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("--s:", 0) == 0);
    }
}

TEST_CASE("config file: comments, overrides and line-precise errors") {
    const fs::path dir = scratch("config");
    const fs::path file = dir / "run.cfg";
    write_text_atomic(file, "# comment\n\nn = 96   # trailing\ns = 0.4\nm = 3\n");
    const RunConfig c = parse_config(file, {{"s", "0.6"}});
    CHECK(c.n == 96);
    CHECK(c.s == 0.6);
    CHECK(c.alpha == 0.5);

    write_text_atomic(file, "n = 96\n\ns = 1.5\n");
    try {
        parse_config(file, {});
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("run.cfg:3:") != std::string::npos);
    }
    write_text_atomic(file, "n 96\n");
    CHECK_THROWS_WITH_AS(parse_config(file, {}), doctest::Contains("run.cfg:1:"), ConfigError);
    write_text_atomic(file, "colour = red\n");
    CHECK_THROWS_WITH_AS(parse_config(file, {}), doctest::Contains("unknown key"), ConfigError);
    CHECK_THROWS_AS(parse_config(dir / "absent.cfg", {}), ConfigError);
}

TEST_CASE("datum presets") {
    CHECK(std::get<GroundDatum>(parse_datum("ground").preset).sign == 1);
    CHECK(std::get<GroundDatum>(parse_datum("minus_ground").preset).sign == -1);
    const DatumSpec b = parse_datum(" -bump_mix(0.01, -0.5, 0.3, 0.2) ");
    CHECK(b.negated);
    CHECK(std::get<BumpMixDatum>(b.preset).neg_scale == 0.2);
    CHECK(std::get<RandomDatum>(parse_datum("random(7, 0.5)").preset).seed == 7);
    CHECK(std::get<FileDatum>(parse_datum("file(u0.csv)").preset).path == "u0.csv");
    CHECK_THROWS_AS(parse_datum("random(1.5, 2)"), ConfigError);
    CHECK_THROWS_AS(parse_datum("bump_mix(1, 2)"), ConfigError);

    const Grid g = make_grid(-1.0, 1.0, 32);
    const GridFunction r1 = random_sine_mix(g, 3, 0.4);
    const GridFunction r2 = random_sine_mix(g, 3, 0.4);
    CHECK((r1.values() - r2.values()).isZero(0.0));
    CHECK((random_sine_mix(g, 3, 0.8).values() - 2.0 * r1.values()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((random_sine_mix(g, 4, 0.4).values() - r1.values()).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("check: exit 0, complete manifest, deterministic CSV") {
    const fs::path d1 = scratch("check1");
    const fs::path d2 = scratch("check2");
    CHECK(run_command("check", small(d1)) == kSuccess);
    CHECK(run_command("check", small(d2)) == kSuccess);
    CHECK(read_text(d1 / "check.csv") == read_text(d2 / "check.csv"));
    CHECK(read_text(d1 / "invariants.csv") == read_text(d2 / "invariants.csv"));
    const auto m = load_json(d1 / "manifest.json");
    CHECK(m["all_passed"] == true);
    for (const std::string& name : invariant_registry("check")) CHECK(m["invariants"][name]["pass"] == true);
    CHECK(m.contains("wall_clock_seconds"));
    CHECK(m["config"]["alpha"] == "1");
    std::ifstream in(d1 / "check.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "case,a,b,m,lhs,rhs,pass");
}

TEST_CASE("ground-state output") {
    const fs::path d = scratch("ground");
    REQUIRE(run_command("ground-state", small(d)) == kSuccess);
    const auto rec = load_json(d / "ground_state.json");
    CHECK(rec["lambda1"].get<double>() > 0.0);
    CHECK(rec["Lambda1"].get<double>() < 0.0);
    CHECK(rec["residuals"]["critical"].get<double>() <= 1e-8);
    const GridFunction w = read_csv(d / "ground_state.csv", make_grid(-1.0, 1.0, 64));
    CHECK(w.values().minCoeff() > 0.0);
}

TEST_CASE("evolve writes the ledger, snapshots and a plot script") {
    const fs::path d = scratch("evolve");
    REQUIRE(run_command("evolve", small(d, {{"T", "1"}, {"snapshots", "0,0.5,1"}})) == kSuccess);
    const std::string ledger = read_text(d / "ledger.csv");
    CHECK(ledger.rfind("t,energy,cum_dissipation,dist_plus,dist_minus,mass\n", 0) == 0);
    CHECK(fs::exists(d / "snap_t0.csv"));
    CHECK(fs::exists(d / "snap_t0.5.csv"));
    CHECK(fs::exists(d / "snap_t1.csv"));
    const std::string script = read_text(d / "plot.py");
    CHECK(script.find("\"energy\"") != std::string::npos);
    CHECK(script.find("ledger.csv") != std::string::npos);
    const auto m = load_json(d / "manifest.json");
    for (const std::string& name : invariant_registry("evolve")) CHECK(m["invariants"][name]["pass"] == true);

    const fs::path d2 = scratch("evolve2");
    REQUIRE(run_command("evolve", small(d2, {{"T", "1"}, {"snapshots", "0,0.5,1"}})) == kSuccess);
    CHECK(read_text(d2 / "ledger.csv") == ledger);
}

TEST_CASE("evolve from a file datum") {
    const fs::path d = scratch("filedatum");
    const Grid g = make_grid(-1.0, 1.0, 64);
    write_csv(d / "u0.csv", random_sine_mix(g, 5, 0.3));
    CHECK(run_command("evolve", small(d, {{"T", "0.2"}, {"file", (d / "u0.csv").string()}, {"plot", "false"}})) ==
          kSuccess);
    CHECK_FALSE(fs::exists(d / "plot.py"));
    CHECK(run_command("evolve", small(d, {{"T", "0.2"}, {"file", (d / "none.csv").string()}})) == kConfigError);
}

TEST_CASE("selection on mirrored data reports sign -1") {
    const fs::path d = scratch("selection");
    REQUIRE(run_command("selection", small(d, {{"datum", "-bump_mix(0.008, -0.8, 0.4)"}, {"lambda2_est", "-6e-5"}})) ==
            kSuccess);
    const auto rec = load_json(d / "selection.json");
    CHECK(rec["verdict"]["sign"] == -1);
    CHECK(rec["verdict"]["converged"] == true);
    CHECK(rec["prediction"] == 0);
    CHECK(rec["branch"] == "not-applicable");
}

TEST_CASE("landscape outputs") {
    const fs::path d = scratch("landscape");
    REQUIRE(run_command("landscape", small(d, {{"n_images", "16"}})) == kSuccess);
    const auto rec = load_json(d / "landscape.json");
    CHECK(rec["lambda_star"].get<double>() > rec["Lambda1"].get<double>());
    CHECK(rec["saddle_residual"].get<double>() <= 1e-4);
    CHECK(fs::exists(d / "image_000.csv"));
    CHECK(fs::exists(d / "image_015.csv"));
    CHECK(read_text(d / "profile.csv").rfind("tau,energy,bound\n", 0) == 0);
    const std::string script = read_text(d / "plot.py");
    CHECK(script.find("\"tau\"") != std::string::npos);
}

TEST_CASE("exit codes") {
    const fs::path d = scratch("codes");
    // forcing a tolerance below what the solver reaches is an invariant violation
    CHECK(run_command("ground-state", small(d, {{"tol_nehari", "1e-40"}})) == kInvariantViolation);
    CHECK(run_command("warp", small(d)) == kConfigError);
}

TEST_CASE("plot script emission") {
    const fs::path d = scratch("plot");
    CHECK_THROWS_AS(emit_plot_script(d), Error);
    CHECK_THROWS_AS(emit_plot_script(std::vector<fs::path>{d / "missing.csv"}, d / "plot.py"), Error);
    write_text_atomic(d / "profile.csv", "tau,energy,bound\n0,1,\n1,2,\n");
    const fs::path script = emit_plot_script(d);
    CHECK(script == d / "plot.py");
    CHECK(read_text(script).find("\"tau\"") != std::string::npos);
}

TEST_CASE("manifest registry and missing entries") {
    RunConfig c;
    RunManifest m("evolve", c);
    m.record("lyapunov", true);
    CHECK_FALSE(m.complete());
    CHECK_FALSE(m.all_passed());
    const auto j = m.deterministic_json();
    CHECK(j["invariants"]["eed"]["pass"] == false);
    CHECK_FALSE(j.contains("wall_clock_seconds"));
    CHECK(invariant_registry("check").size() >= 8);
}
