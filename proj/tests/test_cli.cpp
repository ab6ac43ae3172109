#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "branewave/table_io.hpp"
#include "scenario.hpp"

using namespace branewave;
using branewave::cli::ConfigError;
using branewave::cli::Scenario;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("branewave_cli_" + name);
  fs::remove_all(p);
  return p;
}

// Exit status of the CLI with the given arguments; output is discarded.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(BRANEWAVE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario parsed(const std::string& text) {
  Scenario s;
  s.command = "spectrum";
  cli::apply_config_text(s, text);
  return s;
}

}  // namespace

TEST_CASE("scenario keys, config text and validation") {
  const Scenario j = parsed(R"({"alpha": -0.3, "M": 1.5, "c": "inf", "seed": 7, "tau_star": 0.25})");
  CHECK(j.alpha == -0.3);
  CHECK(j.M == 1.5);
  CHECK(j.dirichlet);
  CHECK(j.seed == 7);
  CHECK(j.tau_star == 0.25);
  const Scenario kv = parsed("# comment\nalpha = -0.7\nc = 2.5\ntau-end = 3\n\nxi_max = 4\n");
  CHECK(kv.alpha == -0.7);
  CHECK(kv.c == 2.5);
  CHECK(!kv.dirichlet);
  CHECK(kv.resolved_tau_end() == 3.0);
  CHECK(kv.xi_max == 4.0);
  CHECK_NOTHROW(kv.validate());

  auto field_of = [](auto&& f) {
    try {
      f();
    } catch (const ConfigError& e) {
      return e.field;
    }
    return std::string("none");
  };
  CHECK(field_of([] { parsed("bogus = 1"); }) == "bogus");
  CHECK(field_of([] { parsed("alpha = minus one"); }) == "alpha");
  CHECK(field_of([] { parsed("{\"alpha\": "); }) == "config");
  CHECK(field_of([] { parsed("alpha = 0.5").validate(); }) == "alpha");
  CHECK(field_of([] { parsed("M = -1").validate(); }) == "M");
  CHECK(field_of([] { parsed("c = nan").validate(); }) == "c");
  CHECK(field_of([] { parsed("tau-star = 1\ntau-end = 0.5").validate(); }) == "tau-end");
  CHECK(field_of([] {
          Scenario s = parsed("M = 1");
          s.command = "graviton";
          s.validate();
        }) == "M");
  CHECK(field_of([] {
          Scenario s;
          s.command = "bogus";
          s.validate();
        }) == "command");
  Scenario d;
  d.command = "modes";
  CHECK(d.resolved_tau_end() == 12.0);
  d.command = "tower";
  CHECK(d.resolved_tau_end() == 2.0);
  CHECK(d.to_json()["c"] == 0.0);
}

TEST_CASE("spectrum of the massless Neumann operator is a single zero") {
  const fs::path out = scratch("spectrum");
  REQUIRE(run_cli("spectrum --alpha=-0.5 --M=0 --c=0 --out " + out.string()) == 0);
  const Table t = read_table((out / "spectrum.csv").string());
  REQUIRE(t.rows.size() == 1);
  CHECK(std::fabs(t.column("eigenvalue")[0]) < 1e-9);
  CHECK(std::fabs(t.column("residual")[0]) < 1e-9);
  CHECK(t.header["config"]["alpha"] == -0.5);
  CHECK(t.header["config"]["command"] == "spectrum");
  fs::remove_all(out);
}

TEST_CASE("limit profile table for unit data") {
  const fs::path out = scratch("profile");
  REQUIRE(run_cli("modes --kappa=0 --profile --out " + out.string()) == 0);
  const Table t = read_table((out / "modes_profile.csv").string());
  const auto xi = t.column("xi"), re = t.column("phi_re"), im = t.column("phi_im");
  REQUIRE(xi.size() == 201);
  double worst = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const double exact = xi[k] == 0.0 ? 1.0 : std::sin(xi[k]) / xi[k];
    worst = std::max({worst, std::fabs(re[k] - exact), std::fabs(im[k])});
  }
  CHECK(worst < 1e-8);
  // --profile outside kappa = 0 is a configuration error.
  const fs::path bad = scratch("profile_bad");
  CHECK(run_cli("modes --kappa=1 --profile --out " + bad.string()) == 1);
  CHECK(!fs::exists(bad));
  fs::remove_all(out);
}

TEST_CASE("configuration errors exit 1 and write nothing") {
  const fs::path out = scratch("malformed");
  const fs::path cfg = fs::temp_directory_path() / "branewave_cli_malformed.conf";
  {
    std::ofstream f(cfg);
    f << "alpha = -0.5\nthis line is not a key value pair\n";
  }
  CHECK(run_cli("spectrum --config " + cfg.string() + " --out " + out.string()) == 1);
  CHECK(!fs::exists(out));
  CHECK(run_cli("spectrum --alpha=2 --out " + out.string()) == 1);
  CHECK(run_cli("spectrum --config /nonexistent/file --out " + out.string()) == 1);
  CHECK(run_cli("spectrum --bogus 3 --out " + out.string()) == 1);
  CHECK(run_cli("graviton --M=1 --out " + out.string()) == 1);
  CHECK(!fs::exists(out));
  fs::remove(cfg);
}

TEST_CASE("numerical failures exit 2 with a diagnostic") {
  const fs::path out = scratch("failure");
  // A Robin constant this negative drives the oracle past its growth guard.
  CHECK(run_cli("oracle-check --c=-30 --tau-end=10 --trials=1 --n-rho=100 --out " + out.string()) == 2);
  const std::string diag = slurp(out / "diagnostic.json");
  CHECK(diag.find("numerical failure") != std::string::npos);
  CHECK(diag.find("\"config\"") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("reruns are byte-identical") {
  const fs::path out = scratch("rerun");
  for (const std::string cmd :
       {"spectrum --alpha=-0.3 --M=1 --c=-1", "modes --kappa=4 --tau-end=6", "tower --M=1 --c=0.5 --xi-panels=2",
        "oracle-check --M=1 --c=0.5 --trials=1 --seed=9"}) {
    const std::string name = cmd.substr(0, cmd.find(' '));
    REQUIRE(run_cli(cmd + " --out " + out.string()) == 0);
    std::vector<std::pair<fs::path, std::string>> first;
    for (const auto& e : fs::directory_iterator(out)) first.emplace_back(e.path(), slurp(e.path()));
    REQUIRE(!first.empty());
    REQUIRE(run_cli(cmd + " --out " + out.string()) == 0);
    for (const auto& [p, text] : first) {
      INFO(cmd << ": " << p.filename().string());
      CHECK(slurp(p) == text);
    }
    fs::remove_all(out);
  }
}

TEST_CASE("spectrum output matches the golden files") {
  for (const std::string alpha : {"-0.5", "-0.1", "-0.9"}) {
    const fs::path out = scratch("golden" + alpha);
    REQUIRE(run_cli("spectrum --alpha=" + alpha + " --M=0 --c=0 --out " + out.string()) == 0);
    const Table now = read_table((out / "spectrum.csv").string());
    const Table gold = read_table(std::string(BRANEWAVE_GOLDEN_DIR) + "/spectrum_alpha" + alpha + ".csv");
    INFO("alpha = " << alpha);
    CHECK(now.columns == gold.columns);
    REQUIRE(now.rows.size() == gold.rows.size());
    REQUIRE(gold.rows.size() == 1);
    CHECK(std::fabs(gold.column("eigenvalue")[0]) < 1e-9);
    CHECK(std::fabs(now.column("eigenvalue")[0] - gold.column("eigenvalue")[0]) < 1e-12);
    CHECK(std::fabs(now.column("normalizer")[0] / gold.column("normalizer")[0] - 1.0) < 1e-12);
    nlohmann::json a = now.header, b = gold.header;
    a["config"].erase("out");
    b["config"].erase("out");
    CHECK(a == b);
    fs::remove_all(out);
  }
}
