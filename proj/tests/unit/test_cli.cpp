#include <cstdint>
#include <cstdio>

#include "cli_runner.hpp"
#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

const cli::fs::path& root() {
  static const auto p = cli::scratch_root("cli");
  return p;
}

cli::fs::path config(const std::string& name, const std::string& text) {
  const auto p = root() / (name + ".cfg");
  cli::write(p, text);
  return p;
}

std::uint64_t fnv(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ull;
  return h;
}

}  // namespace

TEST_CASE("exit code 2: configuration and usage errors") {
  const auto missing = config("missing", "grid.N = 16\n");
  auto r = cli::run({"lift", "--config", missing.string(), "--out", (root() / "e2a").string()}, root());
  CHECK(r.code == 2);
  CHECK(r.err.find("missing required config key kernel.H") != std::string::npos);

  r = cli::run({"lift", "--config", (root() / "absent.cfg").string()}, root());
  CHECK(r.code == 2);
  r = cli::run({"lift"}, root());
  CHECK(r.code == 2);
  r = cli::run({"transmogrify", "--config", missing.string()}, root());
  CHECK(r.code == 2);
  const auto unknown = config("unknown", "kernel.H = 0.3\nkernel.Hurst = 0.3\n");
  r = cli::run({"lift", "--config", unknown.string(), "--out", (root() / "e2b").string()}, root());
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown config key kernel.Hurst") != std::string::npos);
  const auto bad_input = config("bad_input", "kernel.H = 0.3\nverify.input = /nonexistent/x.prp\n");
  r = cli::run({"verify", "--config", bad_input.string(), "--out", (root() / "e2c").string()}, root());
  CHECK(r.code == 2);
}

TEST_CASE("exit code 3: numerical failure") {
  const auto cfg = config("blowup", "kernel.H = 0.3\ngrid.N = 64\nmodel.sigma.family = linear\n"
                                    "model.sigma.params = 0, 400\nmodel.S0 = 1\nrde.paths = 2\n");
  const auto r = cli::run({"rde", "--config", cfg.string(), "--out", (root() / "e3").string()}, root());
  CHECK(r.code == 3);
  CHECK(r.err.find("admissible range") != std::string::npos);
}

TEST_CASE("exit code 4: insufficient Monte Carlo data") {
  const auto cfg = config("sparse", "kernel.H = 0.3\ngrid.N = 64\nmc.check = ldp\nmc.paths = 200\nmc.z = 3\nmodel.S0 = 1\n");
  const auto r = cli::run({"mc", "--config", cfg.string(), "--out", (root() / "e4").string()}, root());
  CHECK(r.code == 4);
  CHECK(r.err.find("exceedances") != std::string::npos);
}

TEST_CASE("manifest records config, seed, hash and outputs") {
  const std::string text = "kernel.H = 0.3\ngrid.N = 64\nlift.paths = 2\n";
  const auto cfg = config("manifest", text);
  const auto out = root() / "manifest";
  const auto r = cli::run({"lift", "--config", cfg.string(), "--out", out.string(), "--seed", "42"}, root());
  REQUIRE(r.code == 0);
  const auto m = json::parse(cli::slurp(out / "manifest.json"));
  CHECK(m["command"] == "lift");
  CHECK(m["seed"] == 42);
  // --seed enters the explicit configuration, so it is part of the hash.
  const std::string explicit_text = "grid.N = 64\nkernel.H = 0.3\nlift.paths = 2\nrng.seed = 42\n";
  CHECK(m["config"] == explicit_text);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv(explicit_text)));
  CHECK(m["config_hash"] == hex);
  CHECK(m["resolved_config"]["path.alpha"] == "0.4");
  CHECK(m["resolved_config"]["rng.seed"] == "42");
  CHECK(m["summary"]["paths"] == 2);
  for (const auto& name : {"lift_0.prp", "lift_1.prp", "lift_0.csv", "holder_0.csv"}) {
    CHECK(cli::fs::exists(out / name));
    bool listed = false;
    for (const auto& o : m["outputs"]) listed = listed || o.dump().find(name) != std::string::npos;
    CHECK_MESSAGE(listed, name);
  }
  CHECK(cli::slurp(out / "lift_0.prp").substr(0, 4) == "PRP1");
  const auto timing = json::parse(cli::slurp(out / "timing.json"));
  CHECK(timing["runtime_seconds"].get<double>() >= 0.0);
}

TEST_CASE("verify reads a saved lift and reports pass in JSON") {
  const auto lift_cfg = config("for_verify", "kernel.H = 0.3\ngrid.N = 128\n");
  const auto lifted = root() / "for_verify";
  REQUIRE(cli::run({"lift", "--config", lift_cfg.string(), "--out", lifted.string()}, root()).code == 0);
  const auto cfg = config("verify_input", "kernel.H = 0.3\nverify.triples = 200\nverify.input = " +
                                              (lifted / "lift_0.prp").string() + "\n");
  const auto out = root() / "verify_input";
  REQUIRE(cli::run({"verify", "--config", cfg.string(), "--out", out.string()}, root()).code == 0);
  const auto report = json::parse(cli::slurp(out / "verify.json"));
  CHECK(report["summary"]["pass"] == true);
  CHECK(report["checks"].size() == 7);
}

TEST_CASE("integrate writes RP1 dumps") {
  const auto cfg = config("integrate_rp", "kernel.H = 0.3\ngrid.N = 64\nmodel.f.family = exponential\n");
  const auto out = root() / "integrate_rp";
  REQUIRE(cli::run({"integrate", "--config", cfg.string(), "--out", out.string()}, root()).code == 0);
  const auto rp = cli::slurp(out / "integral_0.rp");
  REQUIRE(rp.size() == 4 + 24 + 16 * 65);
  CHECK(rp.compare(0, 4, std::string("RP1\0", 4)) == 0);
  const auto m = json::parse(cli::slurp(out / "manifest.json"));
  CHECK(m["summary"]["paths"][0]["Y1_0T"].size() == 1);
}

TEST_CASE("repeated runs with one seed are byte-identical") {
  for (const auto& [command, text] : cli::determinism_cases()) {
    const auto cfg = config("repeat_" + command, text);
    const auto a = root() / ("repeat_" + command + "_a"), b = root() / ("repeat_" + command + "_b");
    REQUIRE(cli::run({command, "--config", cfg.string(), "--out", a.string(), "--seed", "42"}, root()).code == 0);
    REQUIRE(cli::run({command, "--config", cfg.string(), "--out", b.string(), "--seed", "42"}, root()).code == 0);
    CHECK_MESSAGE(cli::first_difference(cli::snapshot(a), cli::snapshot(b)).empty(), command);
  }
}

TEST_CASE("outputs do not depend on the thread count") {
  for (const auto& [command, text] : cli::determinism_cases()) {
    const auto cfg = config("threads_" + command, text);
    std::map<std::string, std::string> reference;
    for (const char* threads : {"1", "4", "8"}) {
      const auto out = root() / ("threads_" + command + "_" + threads);
      const auto r = cli::run({command, "--config", cfg.string(), "--out", out.string(), "--seed", "7", "--threads",
                               threads},
                              root());
      REQUIRE_MESSAGE(r.code == 0, (command + ": " + r.err));
      const auto files = cli::snapshot(out);
      if (reference.empty())
        reference = files;
      else
        CHECK_MESSAGE(cli::first_difference(reference, files).empty(), (command + " threads=" + threads));
      const auto timing = json::parse(cli::slurp(out / "timing.json"));
      CHECK(timing["threads"] == std::stoi(threads));
    }
  }
}

TEST_CASE("PARPATH_THREADS sets the default thread count") {
  const auto cfg = config("env_threads", "kernel.H = 0.3\ngrid.N = 64\n");
  const auto out = root() / "env_threads";
  REQUIRE(cli::run({"lift", "--config", cfg.string(), "--out", out.string()}, root(), "PARPATH_THREADS=3").code == 0);
  CHECK(json::parse(cli::slurp(out / "timing.json"))["threads"] == 3);
  REQUIRE(cli::run({"lift", "--config", cfg.string(), "--out", out.string(), "--threads", "2"}, root(),
                   "PARPATH_THREADS=3")
              .code == 0);
  CHECK(json::parse(cli::slurp(out / "timing.json"))["threads"] == 2);
}

TEST_CASE("a different seed changes the lift") {
  const auto cfg = config("seeds", "kernel.H = 0.3\ngrid.N = 64\n");
  const auto a = root() / "seed_1", b = root() / "seed_2";
  REQUIRE(cli::run({"lift", "--config", cfg.string(), "--out", a.string(), "--seed", "1"}, root()).code == 0);
  REQUIRE(cli::run({"lift", "--config", cfg.string(), "--out", b.string(), "--seed", "2"}, root()).code == 0);
  CHECK(cli::slurp(a / "lift_0.prp") != cli::slurp(b / "lift_0.prp"));
}
