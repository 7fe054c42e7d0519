#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vpb/io/commands.hpp"
#include "vpb/io/config.hpp"
#include "vpb/io/csv.hpp"
#include "vpb/io/manifest.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <clocale>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

using namespace vpb;
using namespace vpb::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vpb_test_cli_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Runs the CLI and returns its exit status.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(VPB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

const char* kSmallRun = R"([velocity]
count = 12
radius = 6
[space]
count = 16
[run]
eps = 0.5
seed = 3
[solver]
t_end = 0.1
record_every = 2
[initial]
preset = random_macro
)";

}  // namespace

TEST_CASE("parse_config") {
  SUBCASE("minimal file fills defaults and echoes them") {
    const auto c = parse_config_text("[run]\neps = 0.25\n");
    CHECK(c.eps == 0.25);
    CHECK(c.gamma == 1.0);
    CHECK(c.velocity_count == 16);
    CHECK(c.scheme == "strang");
    const auto echo = c.echo();
    bool found = false;
    for (const auto& [k, v] : echo)
      if (k == "run.eps") found = (v == "0.25");
    CHECK(found);
    CHECK(echo.size() > 30);
  }
  SUBCASE("empty document is valid") { CHECK_NOTHROW(parse_config_text("")); }
  SUBCASE("gamma = -3 is out of range") {
    try {
      parse_config_text("[model]\ngamma = -3\n");
      FAIL("no error");
    } catch (const ConfigError& e) {
      REQUIRE(e.problems().size() == 1);
      CHECK(e.problems()[0].find("gamma") != std::string::npos);
    }
  }
  SUBCASE("two errors are reported in one pass") {
    try {
      parse_config_text("[model]\ngamma = -3\n[run]\neps = 2\n");
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(e.problems().size() == 2);
      const std::string all = e.what();
      CHECK(all.find("gamma") != std::string::npos);
      CHECK(all.find("eps") != std::string::npos);
    }
  }
  SUBCASE("unknown keys and sections are rejected") {
    CHECK_THROWS_AS(parse_config_text("[run]\nepsilon = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[runs]\neps = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("eps = 0.5\n"), ConfigError);
  }
  SUBCASE("malformed values and unknown presets") {
    CHECK_THROWS_AS(parse_config_text("[velocity]\ncount = twelve\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[initial]\npreset = vortex\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[solver]\nscheme = rk4\n"), ConfigError);
  }
  SUBCASE("lists") {
    const auto c = parse_config_text("[run]\neps_list = 1, 0.5,0.25\n");
    CHECK(c.eps_list == std::vector<double>{1.0, 0.5, 0.25});
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(parse_config("/nonexistent/vpb.ini"), ConfigError); }
  SUBCASE("shipped configs parse") {
    for (const auto& e : fs::directory_iterator(fs::path(VPB_SOURCE_DIR) / "tools" / "configs")) {
      CAPTURE(e.path().string());
      CHECK_NOTHROW(parse_config(e.path().string()));
    }
  }
}

TEST_CASE("timeseries CSV") {
  const fs::path dir = scratch("csv");
  SUBCASE("empty series gives a header-only file") {
    TimeSeries ts;
    ts.labels = {"t", "a", "b"};
    write_timeseries(ts, (dir / "e.csv").string());
    CHECK(slurp(dir / "e.csv") == "t,a,b\n");
    CHECK(read_timeseries((dir / "e.csv").string()).rows.empty());
  }
  SUBCASE("round trip is bit-exact") {
    TimeSeries ts;
    ts.labels = {"t", "x", "y"};
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int r = 0; r < 50; ++r) ts.add_row({r * 0.1, U(rng) * std::pow(10.0, r % 20 - 10), std::exp(U(rng) * 300)});
    ts.add_row({5.0, std::numeric_limits<double>::min(), -std::numeric_limits<double>::max()});
    write_timeseries(ts, (dir / "r.csv").string());
    const auto back = read_timeseries((dir / "r.csv").string());
    CHECK(back.labels == ts.labels);
    REQUIRE(back.rows.size() == ts.rows.size());
    for (std::size_t r = 0; r < ts.rows.size(); ++r)
      for (std::size_t c = 0; c < 3; ++c) CHECK(back.rows[r][c] == ts.rows[r][c]);
  }
  SUBCASE("'.' decimal regardless of locale") {
    const char* old = std::setlocale(LC_ALL, nullptr);
    const std::string saved = old ? old : "C";
    std::setlocale(LC_NUMERIC, "de_DE.UTF-8");  // no-op when the locale is absent
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-1.25e-7) == "-1.25e-07");
    CHECK(format_double(3.0) == "3");
    std::setlocale(LC_ALL, saved.c_str());
  }
  SUBCASE("contract violations") {
    TimeSeries ts;
    ts.labels = {"x"};
    CHECK_THROWS(write_timeseries(ts, (dir / "bad.csv").string()));
    TimeSeries ok;
    ok.labels = {"t", "a"};
    CHECK_THROWS(ok.add_row({1.0}));
    CHECK_THROWS_AS(write_timeseries(ok, "/nonexistent/dir/x.csv"), std::runtime_error);
  }
}

TEST_CASE("manifest") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const fs::path dir = scratch("manifest");
  {
    RunArtifacts art((dir / "out").string(), "unit", ScenarioConfig{});
    TimeSeries ts;
    ts.labels = {"t", "v"};
    ts.add_row({0.0, 1.0});
    art.write_csv("series.csv", ts);
    art.write_json("report.json", Json{{"k", 1}});
    art.finalize(0);
  }
  const Json m = read_json(dir / "out" / "manifest.json");
  CHECK(m["subcommand"] == "unit");
  CHECK(m["exit_code"] == 0);
  CHECK(m["code_version"] == code_version());
  CHECK(m.contains("config"));
  REQUIRE(m["files"].size() == 2);
  for (const auto& f : m["files"]) {
    const fs::path p = dir / "out" / f["name"].get<std::string>();
    CHECK(f["sha256"] == sha256_file(p.string()));
    CHECK(f["bytes"].get<std::uintmax_t>() == fs::file_size(p));
  }
}

TEST_CASE("vpb CLI") {
  const fs::path dir = scratch("cli");
  write_text(dir / "small.ini", kSmallRun);
  SUBCASE("nonlinear-run with t_end = 0: manifest and a single record") {
    std::string text = kSmallRun;
    text.replace(text.find("t_end = 0.1"), 11, "t_end = 0");
    write_text(dir / "zero.ini", text);
    CHECK(run_cli("nonlinear-run --config " + (dir / "zero.ini").string() + " --out " + (dir / "z").string()) == 0);
    const auto ts = read_timeseries((dir / "z" / "timeseries.csv").string());
    CHECK(ts.labels.front() == "t");
    REQUIRE(ts.rows.size() == 1);
    CHECK(ts.rows[0][0] == 0.0);
    const Json m = read_json(dir / "z" / "manifest.json");
    CHECK(m["exit_code"] == 0);
    for (const auto& f : m["files"])
      CHECK(f["sha256"] == sha256_file((dir / "z" / f["name"].get<std::string>()).string()));
  }
  SUBCASE("deterministic CSVs for a fixed config and seed") {
    for (const char* sub : {"a", "b"})
      REQUIRE(run_cli("nonlinear-run --config " + (dir / "small.ini").string() + " --out " + (dir / sub).string()) == 0);
    CHECK(slurp(dir / "a" / "timeseries.csv") == slurp(dir / "b" / "timeseries.csv"));
    CHECK(slurp(dir / "a" / "timeseries.csv").size() > 100);
    // --seed overrides the config seed and changes the random data.
    REQUIRE(run_cli("nonlinear-run --config " + (dir / "small.ini").string() + " --seed 99 --out " + (dir / "c").string()) == 0);
    CHECK(slurp(dir / "a" / "timeseries.csv") != slurp(dir / "c" / "timeseries.csv"));
  }
  SUBCASE("config error exits 2 with a failure record") {
    write_text(dir / "bad.ini", "[model]\ngamma = -3\n[run]\neps = 2\n");
    CHECK(run_cli("nonlinear-run --config " + (dir / "bad.ini").string() + " --out " + (dir / "bad").string()) == 2);
    const Json f = read_json(dir / "bad" / "failure.json");
    CHECK(f["exit_code"] == 2);
    CHECK(run_cli("nonlinear-run") == 2);
    CHECK(run_cli("no-such-command --config x") == 2);
  }
  SUBCASE("numeric breakdown exits 3") {
    std::string text = kSmallRun;
    text.replace(text.find("[initial]"), 9, "[initial]\namplitude = 1e200");
    write_text(dir / "blow.ini", text);
    CHECK(run_cli("nonlinear-run --config " + (dir / "blow.ini").string() + " --out " + (dir / "blow").string()) == 3);
    const Json f = read_json(dir / "blow" / "failure.json");
    CHECK(f["exit_code"] == 3);
    CHECK(fs::exists(dir / "blow" / "manifest.json"));
  }
  SUBCASE("failed gate exits 4") {
    // A strong field over a long time breaks the Jacobian bracket.
    write_text(dir / "gate.ini", "[run]\neps_list = 1\n[characteristics]\nfield = 5\nt_scale = 3\n");
    CHECK(run_cli("characteristics --config " + (dir / "gate.ini").string() + " --out " + (dir / "gate").string()) == 4);
    const Json r = read_json(dir / "gate" / "report.json");
    CHECK(r["gate_passed"] == false);
    CHECK(r["rows"][0]["bracket_margin"].get<double>() > 1.0);
    CHECK(read_json(dir / "gate" / "failure.json")["kind"] == "gate");
    CHECK(read_json(dir / "gate" / "manifest.json")["exit_code"] == 4);
  }
  SUBCASE("subcommand list") {
    const auto names = subcommand_names();
    for (const char* n : {"operator-audit", "linear-decay", "nonlinear-run", "nsfp-run", "hydro-limit", "characteristics",
                          "nu-tilde-check"})
      CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
}
