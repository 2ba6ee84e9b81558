#include "thermo/config.hpp"
#include "thermo/format.hpp"
#include "thermo/run.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace thermo;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("thermo_cli_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool has_issue(const ParseResult& r, const std::string& kind, const std::string& field) {
  for (const auto& i : r.issues) {
    if (i.kind == kind && i.field == field) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("minimal config fills defaults") {
    const auto r = parse_config("run.command = pressure\n");
    REQUIRE(r.ok());
    RunConfig expected;
    expected.command = Command::Pressure;
    CHECK(*r.config == expected);
    CHECK(r.config->system.alphabet == 2);
    CHECK(r.config->seed == 1);
  }

  TEST_CASE("comments, spacing and bracketed matrices") {
    const auto r = parse_config(
        "# golden mean\n"
        "run.command = pressure   # trailing comment\n"
        "  system.transition=[[1,1],[1,0]]\n"
        "\n"
        "potential.values = [0, 1e-3]\n"
        "run.seed = 18446744073709551615\n");
    REQUIRE(r.ok());
    CHECK(r.config->system.transition == std::vector<std::vector<int>>{{1, 1}, {1, 0}});
    CHECK(r.config->potential.values[1] == 1e-3);
    CHECK(r.config->seed == 18446744073709551615ULL);
  }

  TEST_CASE("increasing alpha is a validation error") {
    const auto r = parse_config(
        "run.command = cocycle\n"
        "cocycle.generators = [[[2,0],[0,0.5]], [[2,0],[0,0.5]]]\n"
        "cocycle.alpha = [0, 1]\n");
    CHECK_FALSE(r.ok());
    REQUIRE(has_issue(r, "ValidationError", "alpha"));
    for (const auto& i : r.issues) {
      if (i.field == "alpha") CHECK(i.reason == "must be nonincreasing");
    }
  }

  TEST_CASE("temperature range is validated") {
    CHECK(has_issue(parse_config("run.command = zero-temp\nsweep.t_max = 501\n"), "ValidationError", "sweep.t_max"));
    CHECK(has_issue(parse_config("run.command = zero-temp\nsweep.t_max = 0\n"), "ValidationError", "sweep.t_max"));
    CHECK(parse_config("run.command = zero-temp\nsweep.t_max = 500\n").ok());
  }

  TEST_CASE("unknown keys report their line") {
    const auto r = parse_config("run.command = pressure\nfoo = 3\n");
    CHECK_FALSE(r.ok());
    REQUIRE(r.issues.size() == 1);
    CHECK(r.issues[0].kind == "ParseError");
    CHECK(r.issues[0].line == 2);
    CHECK(r.issues[0].field == "foo");
  }

  TEST_CASE("every problem is reported") {
    const auto r = parse_config(
        "run.command = pressure\n"
        "nonsense line\n"
        "system.alphabet = two\n"
        "bogus.key = 1\n"
        "run.seed = 1\n"
        "run.seed = 2\n"
        "potential.values = [1, \n");
    CHECK(r.issues.size() == 5);
    CHECK(has_issue(r, "ParseError", ""));
    CHECK(has_issue(r, "ValidationError", "system.alphabet"));
    CHECK(has_issue(r, "ParseError", "bogus.key"));
    CHECK(has_issue(r, "ParseError", "run.seed"));
    CHECK(has_issue(r, "ParseError", "potential.values"));
  }

  TEST_CASE("range validation") {
    CHECK(has_issue(parse_config("run.command = zero-temp\nsweep.ratio = 1\n"), "ValidationError", "sweep.ratio"));
    CHECK(has_issue(parse_config("run.command = lyapunov\ncocycle.generators = [[[1]]]\ncocycle.n_steps = 10\n"),
                    "ValidationError", "cocycle.n_steps"));
    CHECK(has_issue(parse_config("run.command = mp-scan\nmp.t_grid = [0.5, 5]\n"), "ValidationError", "mp.t_grid"));
    CHECK(has_issue(parse_config("run.command = mp-scan\nmp.depth = 30\n"), "ValidationError", "mp.depth"));
    CHECK(has_issue(parse_config("run.command = beta-shift\nsystem.beta = 1\n"), "ValidationError", "system.beta"));
    CHECK(has_issue(parse_config("run.command = axioms\naxioms.engine = magic\n"), "ValidationError", "axioms.engine"));
    CHECK(has_issue(parse_config("run.command = warp\n"), "ValidationError", "run.command"));
    CHECK(has_issue(parse_config("system.alphabet = 3\n"), "ValidationError", "run.command"));
  }

  TEST_CASE("serialize then parse reproduces the config") {
    RunConfig c;
    c.command = Command::Cocycle;
    c.seed = 987654321;
    c.tol = 1.0 / 3.0;
    c.system.alphabet = 3;
    c.system.transition = {{1, 1, 0}, {0, 1, 1}, {1, 0, 1}};
    c.system.label = "three cycle";
    c.potential.depth = 2;
    c.potential.values = {0.1, -2.5e-7, 3.0, 1e300, 0.0, -0.0, 4.0};
    c.measure.kind = "markov-grid";
    c.measure.stochastic = {{0.5, 0.5}, {1.0, 0.0}};
    c.cocycle.generators = {{{2.0, 0.0}, {0.0, 0.5}}, {{1.0, 1.0}, {0.0, 1.0}}};
    c.cocycle.alpha = {1.0, 0.1};
    c.mp.t_grid = {0.5, 1.0, 1.1};
    c.axioms.engine = "separated-set";
    const auto text = serialize_config(c);
    const auto r = parse_config(text);
    REQUIRE(r.ok());
    CHECK(*r.config == c);
    CHECK(serialize_config(*r.config) == text);

    RunConfig defaults;
    defaults.command = Command::MpScan;
    const auto again = parse_config(serialize_config(defaults));
    REQUIRE(again.ok());
    CHECK(*again.config == defaults);
  }

  TEST_CASE("reals use twelve significant digits") {
    CHECK(format_real(0.48121182505960347) == "0.48121182506");
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(-1.5) == "-1.5");
    CHECK(format_real(1e-20) == "1e-20");
  }

  TEST_CASE("pressure run writes CSV and summary") {
    const auto dir = scratch_dir("pressure");
    auto r = parse_config("run.command = pressure\nsystem.transition = [[1,1],[1,0]]\n");
    REQUIRE(r.ok());
    const auto outcome = run(*r.config, {dir, true});
    CHECK(outcome.exit_code == 0);
    CHECK(std::abs(outcome.scalars.at("value") - 0.481212) <= 1e-6);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["command"] == "pressure");
    CHECK(summary["status"] == "ok");
    CHECK(summary["seed"] == 1);
    CHECK(summary["version"] == std::string(kLibraryVersion));
    CHECK(summary["wall_time_seconds"].is_number());
    CHECK(std::abs(summary["scalars"]["value"].get<double>() - 0.481212) <= 1e-6);
    CHECK(slurp(dir / "pressure.csv").rfind("n,value_n,lower,upper\n1,0.69314718056,", 0) == 0);
  }

  TEST_CASE("axioms run passes on the full shift") {
    const auto dir = scratch_dir("axioms");
    auto r = parse_config("run.command = axioms\naxioms.samples = 200\n");
    REQUIRE(r.ok());
    const auto outcome = run(*r.config, {dir, true});
    CHECK(outcome.exit_code == 0);
    CHECK(std::filesystem::exists(dir / "axioms.csv"));
  }

  TEST_CASE("overflow is reported with its error name") {
    const auto dir = scratch_dir("overflow");
    auto r = parse_config("run.command = zero-temp\npotential.values = [0, 10]\nsweep.t_max = 100\n");
    REQUIRE(r.ok());
    const auto outcome = run(*r.config, {dir, true});
    CHECK(outcome.exit_code == 1);
    CHECK(outcome.error_name == "OverflowGuard");
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["error"] == "OverflowGuard");
    CHECK(summary["exit_code"] == 1);
  }

  TEST_CASE("failed checks exit with code 2") {
    const auto dir = scratch_dir("check");
    // Depth 1 cannot see the memory of this chain, so the dual entropy
    // exceeds the entropy by about 0.25.
    auto r = parse_config(
        "run.command = dual-entropy\nmeasure.kind = markov\n"
        "measure.stochastic = [[0.9, 0.1], [0.2, 0.8]]\nmeasure.depth = 1\n");
    REQUIRE(r.ok());
    const auto outcome = run(*r.config, {dir, true});
    CHECK(outcome.exit_code == 2);
    CHECK(outcome.status == "check-failed");
    CHECK(outcome.scalars.at("max_gap") > 0.2);
  }

  TEST_CASE("configuration issues are summarized") {
    const auto dir = scratch_dir("issues");
    const auto r = parse_config("run.command = pressure\nfoo = 1\n");
    const auto outcome = report_config_issues(r.issues, {dir, true});
    CHECK(outcome.exit_code == 1);
    CHECK(outcome.error_name == "ParseError");
    CHECK(std::filesystem::exists(dir / "summary.json"));
  }
}
