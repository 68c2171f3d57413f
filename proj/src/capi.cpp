#include "parpath/parpath.h"

#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "parpath/commands.hpp"
#include "parpath/config.hpp"
#include "parpath/error.hpp"
#include "parpath/integrate.hpp"
#include "parpath/lift.hpp"
#include "parpath/parallel.hpp"
#include "parpath/prp_io.hpp"

struct pp_config {
  parpath::Config cfg;
  std::string text;
  std::string value;
  std::vector<std::pair<std::string, std::string>> resolved;
};

struct pp_prp {
  parpath::PartialRoughPath prp;
};

struct pp_integral {
  parpath::RoughPath path;
  std::optional<parpath::ConvergenceTrace> trace;
};

struct pp_table {
  parpath::Table table;
  std::vector<std::vector<std::string>> text;  // rendered once at creation
  std::vector<std::string> meta_text;
};

namespace {

thread_local std::string last_error;

pp_status fail(pp_status status, const char* what) {
  last_error = what;
  return status;
}

template <class F>
pp_status guarded(F&& body) {
  try {
    body();
    return PP_OK;
  } catch (const parpath::Error& e) {
    return fail(static_cast<pp_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PP_ERR_INTERNAL, "unknown failure");
  }
}

void require(const void* p, const char* name) {
  if (!p) throw parpath::DomainError(std::string("null argument ") + name);
}

pp_table* wrap(parpath::Table t) {
  auto out = std::make_unique<pp_table>();
  for (const auto& row : t.rows) {
    std::vector<std::string> r;
    r.reserve(row.size());
    for (const auto& c : row) r.push_back(c.render());
    out->text.push_back(std::move(r));
  }
  for (const auto& [k, v] : t.meta) out->meta_text.push_back(v.render());
  out->table = std::move(t);
  return out.release();
}

parpath::MultiIndex index_from(const int* entries, std::size_t e) {
  return parpath::MultiIndex(std::vector<int>(entries, entries + e));
}

void write_text(const char* path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parpath::IoError(std::string("cannot open ") + path + " for writing");
  out << text;
  if (!out) throw parpath::IoError(std::string("write failed for ") + path);
}

void snapshot_resolved(pp_config* cfg) {
  cfg->resolved.assign(cfg->cfg.resolved().begin(), cfg->cfg.resolved().end());
}

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

}  // namespace

extern "C" {

const char* pp_last_error(void) { return last_error.c_str(); }
const char* pp_version(void) { return PARPATH_VERSION; }
const char* pp_git_describe(void) { return PARPATH_GIT_DESCRIBE; }

pp_status pp_set_threads(unsigned threads) {
  return guarded([&] { parpath::set_thread_count(threads); });
}
unsigned pp_get_threads(void) { return static_cast<unsigned>(parpath::thread_count()); }

pp_status pp_config_new(pp_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new pp_config{};
  });
}

pp_status pp_config_parse(const char* text, pp_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new pp_config{parpath::Config::parse(text), {}, {}, {}};
  });
}

pp_status pp_config_load(const char* path, pp_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new pp_config{parpath::Config::load(path), {}, {}, {}};
  });
}

pp_status pp_config_set(pp_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    cfg->cfg.set(key, value);
  });
}

const char* pp_config_get(pp_config* cfg, const char* key) {
  if (!cfg || !key) return nullptr;
  auto v = cfg->cfg.get(key);
  if (!v) return nullptr;
  cfg->value = *v;
  return cfg->value.c_str();
}

pp_status pp_config_read_u64(pp_config* cfg, const char* key, uint64_t fallback, uint64_t* out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(out, "out");
    *out = cfg->cfg.get_u64(key, fallback);
  });
}

pp_status pp_config_read_string(pp_config* cfg, const char* key, const char* fallback, const char** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(out, "out");
    cfg->value = cfg->cfg.get_string(key, fallback ? fallback : "");
    *out = cfg->value.c_str();
  });
}

const char* pp_config_text(pp_config* cfg) {
  if (!cfg) return "";
  cfg->text = cfg->cfg.to_string();
  return cfg->text.c_str();
}

size_t pp_config_resolved_count(const pp_config* cfg) { return cfg ? cfg->cfg.resolved().size() : 0; }

const char* pp_config_resolved_key(pp_config* cfg, size_t index) {
  if (!cfg) return nullptr;
  snapshot_resolved(cfg);
  return index < cfg->resolved.size() ? cfg->resolved[index].first.c_str() : nullptr;
}

const char* pp_config_resolved_value(pp_config* cfg, size_t index) {
  if (!cfg) return nullptr;
  snapshot_resolved(cfg);
  return index < cfg->resolved.size() ? cfg->resolved[index].second.c_str() : nullptr;
}

uint64_t pp_config_hash(const pp_config* cfg) { return cfg ? cfg->cfg.hash() : 0; }
void pp_config_free(pp_config* cfg) { delete cfg; }

pp_status pp_lift_new(pp_config* cfg, uint64_t path_index, pp_prp** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    const auto spec = parpath::model_from_config(cfg->cfg);
    const auto bundle = parpath::simulate_brownian(spec.grid(), spec.rho, spec.seed, path_index);
    *out = new pp_prp{parpath::build_lift(bundle, spec.kernel, spec.index_config())};
  });
}

pp_status pp_prp_load(const char* path, pp_prp** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new pp_prp{parpath::load_prp(path)};
  });
}

pp_status pp_prp_save(const pp_prp* prp, const char* path) {
  return guarded([&] {
    require(prp, "prp");
    require(path, "path");
    parpath::save_prp(path, prp->prp);
  });
}

pp_status pp_prp_write_csv(const pp_prp* prp, const char* path) {
  return guarded([&] {
    require(prp, "prp");
    require(path, "path");
    parpath::write_prp_csv(path, prp->prp);
  });
}

pp_status pp_prp_get_info(const pp_prp* prp, pp_prp_info* info) {
  return guarded([&] {
    require(prp, "prp");
    require(info, "info");
    const auto& c = prp->prp.config();
    *info = {prp->prp.grid().N(), c.e(), c.d(), c.level1().size(), c.level2().size(), c.alpha(), c.beta(), c.T()};
  });
}

pp_status pp_prp_xhat(const pp_prp* prp, size_t q, double* out) {
  return guarded([&] {
    require(prp, "prp");
    require(out, "out");
    if (q >= prp->prp.grid().size()) throw parpath::DomainError("node index out of range");
    const auto x = prp->prp.xhat(q);
    std::copy(x.begin(), x.end(), out);
  });
}

pp_status pp_prp_level1(const pp_prp* prp, const int* i, size_t s, size_t t, double* out) {
  return guarded([&] {
    require(prp, "prp");
    require(i, "i");
    require(out, "out");
    const auto v = prp->prp.reconstruct_level1(index_from(i, prp->prp.config().e()), s, t);
    std::copy(v.begin(), v.end(), out);
  });
}

pp_status pp_prp_level2(const pp_prp* prp, const int* j, const int* k, size_t s, size_t t, double* out) {
  return guarded([&] {
    require(prp, "prp");
    require(j, "j");
    require(k, "k");
    require(out, "out");
    const auto e = prp->prp.config().e();
    const auto v = prp->prp.reconstruct_level2(index_from(j, e), index_from(k, e), s, t);
    std::copy(v.begin(), v.end(), out);
  });
}

void pp_prp_free(pp_prp* prp) { delete prp; }

pp_status pp_integrate(const pp_prp* prp, pp_config* cfg, pp_integral** out) {
  return guarded([&] {
    require(prp, "prp");
    require(cfg, "cfg");
    require(out, "out");
    const auto f = parpath::vol_function_from_config(cfg->cfg, "model.f", prp->prp.config().e());
    const double tol = cfg->cfg.get_double("integrate.tol", 1e-9);
    auto result = parpath::integrate(prp->prp, f, tol);
    *out = new pp_integral{std::move(result.path), std::move(result.trace)};
  });
}

pp_status pp_integral_save(const pp_integral* integral, const char* path) {
  return guarded([&] {
    require(integral, "integral");
    require(path, "path");
    parpath::save_rough_path(path, integral->path);
  });
}

pp_status pp_integral_load(const char* path, pp_integral** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new pp_integral{parpath::load_rough_path(path), std::nullopt};
  });
}

pp_status pp_integral_write_csv(const pp_integral* integral, const char* path) {
  return guarded([&] {
    require(integral, "integral");
    require(path, "path");
    const auto& rp = integral->path;
    const std::size_t d = rp.d();
    std::string text = "node,t";
    for (std::size_t a = 0; a < d; ++a) text += ",Y1_" + std::to_string(a + 1);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) text += ",Y2_" + std::to_string(a + 1) + std::to_string(b + 1);
    text += '\n';
    for (std::size_t q = 0; q < rp.grid().size(); ++q) {
      text += std::to_string(q) + "," + parpath::format_double(rp.grid().node(q));
      for (double v : rp.anchored_level1(q)) text += "," + parpath::format_double(v);
      for (double v : rp.anchored_level2(q)) text += "," + parpath::format_double(v);
      text += '\n';
    }
    write_text(path, text);
  });
}

size_t pp_integral_dim(const pp_integral* integral) { return integral ? integral->path.d() : 0; }
size_t pp_integral_cells(const pp_integral* integral) { return integral ? integral->path.grid().N() : 0; }

pp_status pp_integral_level1(const pp_integral* integral, size_t s, size_t t, double* out) {
  return guarded([&] {
    require(integral, "integral");
    require(out, "out");
    const auto v = integral->path.level1(s, t);
    std::copy(v.begin(), v.end(), out);
  });
}

pp_status pp_integral_level2(const pp_integral* integral, size_t s, size_t t, double* out) {
  return guarded([&] {
    require(integral, "integral");
    require(out, "out");
    const auto v = integral->path.level2(s, t);
    std::copy(v.begin(), v.end(), out);
  });
}

pp_status pp_integral_trace(const pp_integral* integral, pp_table** out) {
  return guarded([&] {
    require(integral, "integral");
    require(out, "out");
    *out = wrap(integral->trace ? parpath::trace_table(*integral->trace) : parpath::Table{});
  });
}

void pp_integral_free(pp_integral* integral) { delete integral; }

pp_status pp_holder_table(const pp_prp* prp, const char* scheme, pp_table** out) {
  return guarded([&] {
    require(prp, "prp");
    require(out, "out");
    const auto s = parpath::scheme_from_string(scheme ? scheme : "auto");
    *out = wrap(parpath::holder_table(prp->prp, s));
  });
}

pp_status pp_verify_table(const pp_prp* prp, pp_config* cfg, pp_table** out) {
  return guarded([&] {
    require(prp, "prp");
    require(cfg, "cfg");
    require(out, "out");
    *out = wrap(parpath::verify_table(prp->prp, cfg->cfg));
  });
}

pp_status pp_rde_table(pp_config* cfg, pp_table** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = wrap(parpath::rde_table(cfg->cfg));
  });
}

pp_status pp_rate_table(pp_config* cfg, pp_table** out, pp_table** minimizers) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    std::vector<std::vector<double>> g;
    auto table = parpath::rate_table(cfg->cfg, &g);
    if (minimizers) {
      parpath::Table m;
      m.columns = {"z", "u", "g"};
      for (std::size_t r = 0; r < g.size(); ++r) {
        const double K = static_cast<double>(g[r].size());
        for (std::size_t k = 0; k < g[r].size(); ++k)
          m.rows.push_back({table.rows[r][0], parpath::Cell::num((static_cast<double>(k) + 0.5) / K),
                            parpath::Cell::num(g[r][k])});
      }
      *minimizers = wrap(std::move(m));
    }
    *out = wrap(std::move(table));
  });
}

pp_status pp_smile_table(pp_config* cfg, pp_table** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = wrap(parpath::smile_table(cfg->cfg));
  });
}

pp_status pp_mc_table(pp_config* cfg, pp_table** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = wrap(parpath::mc_table(cfg->cfg));
  });
}

size_t pp_table_rows(const pp_table* table) { return table ? table->table.rows.size() : 0; }
size_t pp_table_columns(const pp_table* table) { return table ? table->table.columns.size() : 0; }

const char* pp_table_column_name(const pp_table* table, size_t column) {
  if (!table || column >= table->table.columns.size()) return nullptr;
  return table->table.columns[column].c_str();
}

const char* pp_table_cell_text(const pp_table* table, size_t row, size_t column) {
  if (!table || row >= table->text.size() || column >= table->text[row].size()) return nullptr;
  return table->text[row][column].c_str();
}

int pp_table_cell_is_number(const pp_table* table, size_t row, size_t column) {
  if (!table || row >= table->table.rows.size() || column >= table->table.rows[row].size()) return 0;
  return table->table.rows[row][column].numeric ? 1 : 0;
}

double pp_table_cell_number(const pp_table* table, size_t row, size_t column) {
  if (!pp_table_cell_is_number(table, row, column)) return nan_value;
  return table->table.rows[row][column].number;
}

size_t pp_table_meta_count(const pp_table* table) { return table ? table->table.meta.size() : 0; }

const char* pp_table_meta_key(const pp_table* table, size_t index) {
  if (!table || index >= table->table.meta.size()) return nullptr;
  return table->table.meta[index].first.c_str();
}

const char* pp_table_meta_text(const pp_table* table, size_t index) {
  if (!table || index >= table->meta_text.size()) return nullptr;
  return table->meta_text[index].c_str();
}

int pp_table_meta_is_number(const pp_table* table, size_t index) {
  if (!table || index >= table->table.meta.size()) return 0;
  return table->table.meta[index].second.numeric ? 1 : 0;
}

double pp_table_meta_number(const pp_table* table, size_t index) {
  if (!pp_table_meta_is_number(table, index)) return nan_value;
  return table->table.meta[index].second.number;
}

pp_status pp_table_write_csv(const pp_table* table, const char* path) {
  return guarded([&] {
    require(table, "table");
    require(path, "path");
    write_text(path, table->table.to_csv());
  });
}

void pp_table_free(pp_table* table) { delete table; }

}  // extern "C"
