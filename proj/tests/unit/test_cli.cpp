#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "lab/config.hpp"
#include "lab/output.hpp"

using namespace mckean::lab;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MCKEAN_TEST_DATA_DIR;
const fs::path kBinary = MCKEAN_LAB_BINARY;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mckean-unit-" + name);
  fs::remove_all(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = "\"" + kBinary.string() + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json kuramoto_doc() {
  return Json::parse(R"({
    "experiment": "steady-states",
    "seed": 0,
    "model": {"domain": "torus", "confining": "zero", "interaction": "kuramoto", "beta": 3.0}
  })");
}

int errors(const ParseResult& r) {
  int n = 0;
  for (const auto& d : r.diagnostics) n += d.level == Level::kError;
  return n;
}

}  // namespace

TEST_CASE("config validation") {
  SUBCASE("valid config, no errors") {
    const auto r = parse_config(kData / "phase_scan_kuramoto.json");
    CHECK(errors(r) == 0);
    REQUIRE(r.config.has_value());
    CHECK(r.config->experiment == "phase-scan");
    CHECK(r.config->numerics.real("beta_step") == doctest::Approx(0.1));
    CHECK(r.config->numerics.size("k_max") == 64);  // default
  }
  SUBCASE("non-positive beta gives one diagnostic") {
    const auto r = parse_config(kData / "negative_beta.json");
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].key == "model.beta");
    CHECK_FALSE(r.config.has_value());
  }
  SUBCASE("missing beta names the key") {
    const auto r = parse_config(kData / "missing_beta.json");
    REQUIRE(errors(r) == 1);
    CHECK(r.diagnostics[0].key == "model.beta");
    CHECK(format(r.diagnostics[0]).find("model.beta") != std::string::npos);
  }
  SUBCASE("declared convexity contradicted by a custom potential") {
    const auto r = parse_config(kData / "custom_potential.json");
    CHECK(errors(r) == 0);
    REQUIRE_FALSE(r.diagnostics.empty());
    CHECK(r.diagnostics[0].level == Level::kWarning);
  }
  SUBCASE("every problem is collected") {
    auto doc = kuramoto_doc();
    doc["colour"] = "blue";
    doc["model"]["beta"] = "hot";
    doc["numerics"] = {{"M", 100}, {"bogus", 1}};
    const auto r = parse_config(doc, kData);
    CHECK(errors(r) == 3);
    CHECK_FALSE(r.config.has_value());
  }
  SUBCASE("grid sizes are powers of two") {
    auto doc = kuramoto_doc();
    doc["numerics"] = {{"M", 100}};
    const auto r = parse_config(doc, kData);
    REQUIRE(errors(r) == 1);
    for (const auto& d : r.diagnostics) {
      if (d.level == Level::kError) CHECK(d.key == "numerics.M");
    }
  }
  SUBCASE("experiment and domain must agree") {
    auto doc = kuramoto_doc();
    doc["experiment"] = "meanfield";
    doc["numerics"] = {{"dt", 1e-3}, {"t_end", 1.0}};
    CHECK(errors(parse_config(doc, kData)) == 0);
    doc["experiment"] = "lln";
    doc["model"]["domain"] = "line";
    doc["model"]["interaction"] = "quadratic";
    doc["model"]["confining"] = "double-well";
    doc["numerics"] = {{"Ns", {8, 16}}};
    CHECK(errors(parse_config(doc, kData)) >= 1);
  }
  SUBCASE("overrides win") {
    Overrides o;
    o.seed = 99;
    o.output = "elsewhere";
    const auto r = parse_config(kuramoto_doc(), kData, o);
    REQUIRE(r.config.has_value());
    CHECK(r.config->seed == 99);
    CHECK(r.config->output == fs::path("elsewhere"));
    CHECK(r.config->echo()["seed"] == 99);
  }
}

TEST_CASE("CSV formatting") {
  CsvTable t({"a", "b"});
  t.row({0.1, 2.0});
  CHECK(t.str() == "a,b\n0.10000000000000001,2\n");
  CHECK_THROWS(t.row({1.0}));
  CHECK(sha256_text("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("exit codes") {
  const auto out = scratch("exit");
  CHECK(run("steady-states --config \"" + (kData / "missing_beta.json").string() + "\" --out \"" +
            out.string() + "\"") == 3);
  CHECK(run("steady-states --config \"" + (kData / "missing_beta.json").string() + "\" --validate") == 3);
  CHECK(run("phase-scan --config \"" + (kData / "phase_scan_kuramoto.json").string() + "\" --validate") == 0);
  CHECK(run("phase-scan --config /nonexistent/config.json") == 3);
  CHECK(run("no-such-experiment --config \"" + (kData / "phase_scan_kuramoto.json").string() + "\"") == 3);
  CHECK(run("--version") == 0);
}

TEST_CASE("phase scan finds the Kuramoto transition") {
  const auto out = scratch("phase");
  REQUIRE(run("phase-scan --config \"" + (kData / "phase_scan_kuramoto.json").string() +
              "\" --out \"" + out.string() + "\"") == 0);
  const auto summary = read_json(out / "summary.json");
  const double beta_c = summary["beta_c"].get<double>();
  CHECK(beta_c >= 1.9);
  CHECK(beta_c <= 2.1);
  const auto manifest = read_json(out / "manifest.json");
  CHECK(manifest["partial"] == false);
  CHECK(manifest["files"].size() >= 2);
  CHECK(read_text(out / "scan.csv").rfind("beta,r,", 0) == 0);
}

TEST_CASE("repeated runs give identical checksums") {
  const auto out = scratch("det");
  const std::string cfg = "simulate --config \"" + (kData / "simulate_kuramoto.json").string() +
                          "\" --out \"" + out.string() + "\"";
  REQUIRE(run(cfg) == 0);
  const auto first = read_json(out / "manifest.json");
  REQUIRE(run(cfg) == 0);
  const auto second = read_json(out / "manifest.json");
  CHECK(first["config_sha256"] == second["config_sha256"]);
  CHECK(first["files"] == second["files"]);
  CHECK(first["files"].size() >= 3);

  REQUIRE(run(cfg + " --seed 8") == 0);
  const auto other = read_json(out / "manifest.json");
  CHECK(other["config_sha256"] != first["config_sha256"]);
  CHECK(other["files"][0]["sha256"] != first["files"][0]["sha256"]);
}
