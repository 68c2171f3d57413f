#pragma once

// Command-level pipelines returning plain tables; shared by the C API and tests.

#include <string>
#include <utility>
#include <vector>

#include "parpath/analysis.hpp"
#include "parpath/config.hpp"
#include "parpath/integrate.hpp"

namespace parpath {

struct Cell {
  bool numeric = false;
  double number = 0.0;
  std::string text;
  static Cell num(double v) { return {true, v, {}}; }
  static Cell str(std::string s) { return {false, 0.0, std::move(s)}; }
  static Cell flag(bool b) { return str(b ? "true" : "false"); }
  /// Numbers in shortest round-trip form; NaN renders empty.
  std::string render() const;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> meta;

  void add_meta(std::string key, Cell value) { meta.emplace_back(std::move(key), std::move(value)); }
  std::string to_csv() const;
};

/// Name of a component: "xhat", "X(i)" or "XX(j)(k)".
std::vector<std::string> component_names(const IndexConfig& config);

/// (quantity, exponent, value, scheme, argmax_s, argmax_t)
Table holder_table(const PartialRoughPath& prp, PairScheme scheme);

/// Chen defects, lift consistency, homogeneous norm and Claim-1/2 bound ratios of ∫f.
/// Rows (check, value, threshold, pass); verify.triples and verify.scheme from cfg.
Table verify_table(const PartialRoughPath& prp, const Config& cfg);

Table trace_table(const ConvergenceTrace& trace);

/// (path_id, t, S, S_em) for rde.paths paths of the model pipeline.
Table rde_table(const Config& cfg);

/// (z, rate, iterations, restarts, grad_norm, optimality_residual) over the z grid.
Table rate_table(const Config& cfg, std::vector<std::vector<double>>* minimizers = nullptr);
/// (z, rate, sigma_asym, iterations, restarts, grad_norm)
Table smile_table(const Config& cfg);

/// Dispatches on mc.check ∈ {moment, ito, price, ldp, scaling}.
Table mc_table(const Config& cfg);

PairScheme scheme_from_string(const std::string& s);

}  // namespace parpath
