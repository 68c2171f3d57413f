// Batch driver over the C API. Every run writes manifest.json (bit-stable for a
// fixed config and seed) and timing.json (wall clock, thread count).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parpath/parpath.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Failure carrying a C API status; mapped to the exit-code contract in main.
struct Failure {
  pp_status status;
  std::string message;
};

void check(pp_status status) {
  if (status != PP_OK) throw Failure{status, pp_last_error()};
}

int exit_code(pp_status status) {
  switch (status) {
    case PP_OK:
      return 0;
    case PP_ERR_NUMERICAL:
    case PP_ERR_INTERNAL:
      return 3;
    case PP_ERR_INSUFFICIENT_DATA:
      return 4;
    default:  // config, unreadable or malformed inputs, bad arguments
      return 2;
  }
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using Config = Handle<pp_config, pp_config_free>;
using Prp = Handle<pp_prp, pp_prp_free>;
using Integral = Handle<pp_integral, pp_integral_free>;
using Table = Handle<pp_table, pp_table_free>;

// Integral values print as JSON integers (counts, indices).
ordered_json number_json(double v) {
  if (!std::isfinite(v)) return nullptr;
  if (v == std::floor(v) && std::abs(v) < 9.0e15) return static_cast<int64_t>(v);
  return v;
}

ordered_json meta_json(const pp_table* t) {
  ordered_json out = ordered_json::object();
  for (std::size_t k = 0; k < pp_table_meta_count(t); ++k) {
    const std::string key = pp_table_meta_key(t, k);
    if (pp_table_meta_is_number(t, k)) {
      out[key] = number_json(pp_table_meta_number(t, k));
    } else {
      const std::string text = pp_table_meta_text(t, k);
      if (text == "true" || text == "false")
        out[key] = text == "true";
      else
        out[key] = text;
    }
  }
  return out;
}

ordered_json rows_json(const pp_table* t) {
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < pp_table_rows(t); ++r) {
    ordered_json row = ordered_json::object();
    for (std::size_t c = 0; c < pp_table_columns(t); ++c) {
      const std::string name = pp_table_column_name(t, c);
      if (pp_table_cell_is_number(t, r, c)) {
        row[name] = number_json(pp_table_cell_number(t, r, c));
      } else {
        const std::string text = pp_table_cell_text(t, r, c);
        if (text == "true" || text == "false")
          row[name] = text == "true";
        else
          row[name] = text;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{PP_ERR_IO, "cannot open " + path.string() + " for writing"};
  out << text;
  if (!out) throw Failure{PP_ERR_IO, "write failed for " + path.string()};
}

struct Run {
  std::string command;
  pp_config* cfg;
  fs::path out_dir;
  std::vector<std::string> outputs;
  ordered_json summary = ordered_json::object();

  std::string path(const std::string& name) {
    outputs.push_back(name);
    return (out_dir / name).string();
  }
  void table_csv(const pp_table* t, const std::string& name) { check(pp_table_write_csv(t, path(name).c_str())); }
  uint64_t read_u64(const char* key, uint64_t fallback) {
    uint64_t v = 0;
    check(pp_config_read_u64(cfg, key, fallback, &v));
    return v;
  }
  std::string read_string(const char* key, const char* fallback) {
    const char* v = nullptr;
    check(pp_config_read_string(cfg, key, fallback, &v));
    return v;
  }
};

void load_or_lift(Run& run, const char* input_key, Prp& prp) {
  const std::string input = run.read_string(input_key, "");
  if (!input.empty())
    check(pp_prp_load(input.c_str(), prp.out()));
  else
    check(pp_lift_new(run.cfg, 0, prp.out()));
}

void cmd_lift(Run& run) {
  const uint64_t paths = run.read_u64("lift.paths", 1);
  if (paths == 0) throw Failure{PP_ERR_CONFIG, "lift.paths must be positive"};
  for (uint64_t p = 0; p < paths; ++p) {
    Prp prp;
    check(pp_lift_new(run.cfg, p, prp.out()));
    const std::string stem = "lift_" + std::to_string(p);
    check(pp_prp_save(prp.get(), run.path(stem + ".prp").c_str()));
    check(pp_prp_write_csv(prp.get(), run.path(stem + ".csv").c_str()));
    if (p == 0) {
      pp_prp_info info{};
      check(pp_prp_get_info(prp.get(), &info));
      run.summary["N"] = info.N;
      run.summary["alpha"] = info.alpha;
      run.summary["beta"] = info.beta;
      run.summary["index_set_size"] = info.level1;
      run.summary["pair_set_size"] = info.level2;
      Table holder;
      check(pp_holder_table(prp.get(), "auto", holder.out()));
      run.table_csv(holder.get(), "holder_0.csv");
      run.summary["holder"] = meta_json(holder.get());
    }
  }
  run.summary["paths"] = paths;
}

void cmd_verify(Run& run) {
  Prp prp;
  load_or_lift(run, "verify.input", prp);
  Table verify;
  check(pp_verify_table(prp.get(), run.cfg, verify.out()));
  run.table_csv(verify.get(), "verify.csv");
  const std::string scheme = run.read_string("verify.scheme", "auto");
  Table holder;
  check(pp_holder_table(prp.get(), scheme.c_str(), holder.out()));
  run.table_csv(holder.get(), "holder.csv");

  ordered_json report = ordered_json::object();
  report["checks"] = rows_json(verify.get());
  report["summary"] = meta_json(verify.get());
  report["holder"] = rows_json(holder.get());
  write_file(run.path("verify.json"), report.dump(2) + "\n");
  run.summary = meta_json(verify.get());
}

void cmd_integrate(Run& run) {
  const std::string input = run.read_string("integrate.input", "");
  const uint64_t paths = input.empty() ? run.read_u64("integrate.paths", 1) : 1;
  if (paths == 0) throw Failure{PP_ERR_CONFIG, "integrate.paths must be positive"};
  ordered_json per_path = ordered_json::array();
  for (uint64_t p = 0; p < paths; ++p) {
    Prp prp;
    if (!input.empty())
      check(pp_prp_load(input.c_str(), prp.out()));
    else
      check(pp_lift_new(run.cfg, p, prp.out()));
    Integral integral;
    check(pp_integrate(prp.get(), run.cfg, integral.out()));
    const std::string stem = "integral_" + std::to_string(p);
    check(pp_integral_save(integral.get(), run.path(stem + ".rp").c_str()));
    check(pp_integral_write_csv(integral.get(), run.path(stem + ".csv").c_str()));
    Table trace;
    check(pp_integral_trace(integral.get(), trace.out()));
    run.table_csv(trace.get(), "trace_" + std::to_string(p) + ".csv");

    const std::size_t d = pp_integral_dim(integral.get());
    std::vector<double> y1(d), y2(d * d);
    const std::size_t N = pp_integral_cells(integral.get());
    check(pp_integral_level1(integral.get(), 0, N, y1.data()));
    check(pp_integral_level2(integral.get(), 0, N, y2.data()));
    ordered_json entry = meta_json(trace.get());
    entry["path"] = p;
    entry["Y1_0T"] = y1;
    entry["Y2_0T"] = y2;
    per_path.push_back(std::move(entry));
  }
  run.summary["paths"] = per_path;
}

void cmd_rde(Run& run) {
  Table t;
  check(pp_rde_table(run.cfg, t.out()));
  run.table_csv(t.get(), "rde.csv");
  run.summary = meta_json(t.get());
}

void cmd_rate(Run& run) {
  Table t, g;
  check(pp_rate_table(run.cfg, t.out(), g.out()));
  run.table_csv(t.get(), "rate.csv");
  run.table_csv(g.get(), "minimizers.csv");
  run.summary = meta_json(t.get());
  run.summary["rows"] = rows_json(t.get());
}

void cmd_smile(Run& run) {
  Table t;
  check(pp_smile_table(run.cfg, t.out()));
  run.table_csv(t.get(), "smile.csv");
  run.summary = meta_json(t.get());
  run.summary["rows"] = rows_json(t.get());
}

void cmd_mc(Run& run) {
  Table t;
  check(pp_mc_table(run.cfg, t.out()));
  const std::string check_name = run.read_string("mc.check", "");
  run.table_csv(t.get(), "mc_" + check_name + ".csv");
  run.summary = meta_json(t.get());
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

ordered_json config_json(pp_config* cfg) {
  ordered_json resolved = ordered_json::object();
  const std::size_t n = pp_config_resolved_count(cfg);
  for (std::size_t k = 0; k < n; ++k) resolved[pp_config_resolved_key(cfg, k)] = pp_config_resolved_value(cfg, k);
  return resolved;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial rough paths: lifts, rough integrals, RDEs, rate functions and Monte Carlo checks"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(pp_version()) + " (" + pp_git_describe() + ")");

  std::string config_path;
  std::string out_dir = "out";
  std::optional<uint64_t> seed;
  std::optional<unsigned> threads;

  const std::vector<std::pair<std::string, std::function<void(Run&)>>> commands = {
      {"lift", cmd_lift},   {"verify", cmd_verify}, {"integrate", cmd_integrate}, {"rde", cmd_rde},
      {"rate", cmd_rate},   {"smile", cmd_smile},   {"mc", cmd_mc}};
  const std::vector<std::string> descriptions = {
      "Build lifts and write PRP1 dumps plus path CSVs",
      "Chen defects, Hölder norms and integral bound checks as JSON",
      "Rough integral of f against a lift; RP1 dumps and refinement traces",
      "Solve dS = σ(S) f dX along simulated paths",
      "Minimize the short-time rate functional over a z grid",
      "Rate function and asymptotic implied volatility over a z grid",
      "Monte Carlo checks selected by mc.check"};
  for (std::size_t c = 0; c < commands.size(); ++c) {
    auto* sub = app.add_subcommand(commands[c].first, descriptions[c]);
    sub->add_option("--config", config_path, "key = value run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (created if missing)");
    sub->add_option("--seed", seed, "overrides rng.seed");
    sub->add_option("--threads", threads, "worker threads (default PARPATH_THREADS, else hardware)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string command;
  for (const auto& [name, fn] : commands)
    if (app.got_subcommand(name)) command = name;

  try {
    const auto start = std::chrono::steady_clock::now();
    if (threads) check(pp_set_threads(*threads));
    Config cfg;
    check(pp_config_load(config_path.c_str(), cfg.out()));
    if (seed) check(pp_config_set(cfg.get(), "rng.seed", std::to_string(*seed).c_str()));

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Failure{PP_ERR_IO, "cannot create output directory " + out_dir + ": " + ec.message()};

    Run run{command, cfg.get(), out_dir, {}, ordered_json::object()};
    const uint64_t used_seed = run.read_u64("rng.seed", 0);
    for (const auto& [name, fn] : commands)
      if (name == command) fn(run);

    ordered_json manifest = ordered_json::object();
    manifest["command"] = command;
    manifest["version"] = pp_version();
    manifest["git_describe"] = pp_git_describe();
    manifest["config_hash"] = hex64(pp_config_hash(cfg.get()));
    manifest["seed"] = used_seed;
    manifest["config"] = pp_config_text(cfg.get());
    manifest["resolved_config"] = config_json(cfg.get());
    manifest["outputs"] = run.outputs;
    manifest["summary"] = run.summary;
    write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ordered_json timing = ordered_json::object();
    timing["command"] = command;
    timing["runtime_seconds"] = seconds;
    timing["threads"] = pp_get_threads();
    write_file(fs::path(out_dir) / "timing.json", timing.dump(2) + "\n");
    return 0;
  } catch (const Failure& f) {
    std::cerr << "parpath " << command << ": " << f.message << "\n";
    return exit_code(f.status);
  }
}
