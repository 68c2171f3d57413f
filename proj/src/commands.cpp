#include "parpath/commands.hpp"

#include <cmath>

#include "parpath/error.hpp"
#include "parpath/mc.hpp"
#include "parpath/parallel.hpp"
#include "parpath/prp_io.hpp"

namespace parpath {

std::string Cell::render() const {
  if (!numeric) return text;
  if (std::isnan(number)) return "";
  return format_double(number);
}

namespace {
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}
}  // namespace

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + csv_escape(columns[c]);
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csv_escape(row[c].render());
    out += '\n';
  }
  return out;
}

PairScheme scheme_from_string(const std::string& s) {
  if (s == "auto") return PairScheme::Auto;
  if (s == "exhaustive") return PairScheme::Exhaustive;
  if (s == "dyadic") return PairScheme::Dyadic;
  throw ConfigError("verify.scheme must be auto, exhaustive or dyadic, got " + s);
}

std::vector<std::string> component_names(const IndexConfig& config) {
  std::vector<std::string> names{"xhat"};
  for (const auto& i : config.level1()) names.push_back("X" + i.to_string());
  for (const auto& jk : config.level2()) names.push_back("XX" + jk.to_string());
  return names;
}

Table holder_table(const PartialRoughPath& prp, PairScheme scheme) {
  const auto norms = component_norms(prp, scheme);
  const auto names = component_names(prp.config());
  Table t;
  t.columns = {"quantity", "exponent", "value", "scheme", "argmax_s", "argmax_t"};
  auto add = [&](const std::string& name, const HolderReport& r) {
    t.rows.push_back({Cell::str(name), Cell::num(r.exponent), Cell::num(r.sup_ratio), Cell::str(to_string(r.scheme)),
                      Cell::num(prp.grid().node(r.argmax_s)), Cell::num(prp.grid().node(r.argmax_t))});
  };
  add(names[0], norms.xhat);
  for (std::size_t k = 0; k < norms.level1.size(); ++k) add(names[1 + k], norms.level1[k]);
  for (std::size_t k = 0; k < norms.level2.size(); ++k) add(names[1 + norms.level1.size() + k], norms.level2[k]);
  t.add_meta("homogeneous_norm", Cell::num(homogeneous_norm(prp.config(), norms)));
  return t;
}

Table verify_table(const PartialRoughPath& prp, const Config& cfg) {
  const auto triples_count = cfg.get_u64("verify.triples", 1000);
  if (triples_count == 0) throw ConfigError("verify.triples must be positive (empty triple sample)");
  const auto scheme = scheme_from_string(cfg.get_string("verify.scheme", "auto"));
  const auto seed = cfg.get_u64("rng.seed", 0);
  const auto f = vol_function_from_config(cfg, "model.f", prp.config().e());
  const double tol = cfg.get_double("integrate.tol", 1e-9);

  const auto triples = random_triples(prp.grid(), triples_count, seed);
  const auto chen = chen_defect_report(prp, triples);
  const double consistency = lift_consistency_defect(prp);
  const auto norms = component_norms(prp, scheme);
  const double hnorm = homogeneous_norm(prp.config(), norms);
  const auto integral = integrate(prp, f, tol);
  const auto bounds = check_integral_bounds(prp, f, integral.path, scheme);
  const auto rp_chen = rough_path_chen_report(integral.path, triples);

  Table t;
  t.columns = {"check", "value", "threshold", "pass"};
  auto row = [&](const std::string& name, double value, double threshold) {
    t.rows.push_back({Cell::str(name), Cell::num(value), Cell::num(threshold), Cell::flag(value <= threshold)});
  };
  row("chen1_defect", chen.chen1, 1e-10);
  row("chen2_defect", chen.chen2, 1e-10);
  row("lift_consistency", consistency, 1e-10);
  row("integral_chen_level1", rp_chen.level1, 1e-10);
  row("integral_chen_level2", rp_chen.level2, 1e-10);
  row("claim1_bound_ratio", bounds.level1_ratio, 1.0);
  row("claim2_bound_ratio", bounds.level2_ratio, 1.0);
  t.add_meta("triples", Cell::num(static_cast<double>(chen.triples)));
  t.add_meta("scheme", Cell::str(to_string(resolve_scheme(scheme, prp.grid()))));
  t.add_meta("homogeneous_norm", Cell::num(hnorm));
  t.add_meta("K", Cell::num(bounds.K));
  t.add_meta("M", Cell::num(bounds.M));
  t.add_meta("C1", Cell::num(bounds.constants.C1));
  t.add_meta("C2", Cell::num(bounds.constants.C2));
  t.add_meta("C2_tilde", Cell::num(bounds.constants.C2_tilde));
  t.add_meta("C3", Cell::num(bounds.constants.C3));
  t.add_meta("C4", Cell::num(bounds.constants.C4));
  t.add_meta("C4_tilde", Cell::num(bounds.constants.C4_tilde));
  t.add_meta("integral_warning", Cell::flag(integral.trace.warning));
  bool all = true;
  for (const auto& r : t.rows) all = all && r[3].text == "true";
  t.add_meta("pass", Cell::flag(all));
  return t;
}

Table trace_table(const ConvergenceTrace& trace) {
  Table t;
  t.columns = {"k", "cells", "level1", "level2", "diff1", "diff2"};
  for (const auto& l : trace.levels)
    t.rows.push_back({Cell::num(l.k), Cell::num(static_cast<double>(l.cells)), Cell::num(l.level1), Cell::num(l.level2),
                      Cell::num(l.diff1), Cell::num(l.diff2)});
  t.add_meta("accepted_level1", Cell::num(trace.accepted_level1));
  t.add_meta("accepted_level2", Cell::num(trace.accepted_level2));
  t.add_meta("stop_reason1", Cell::str(trace.stop_reason1));
  t.add_meta("stop_reason2", Cell::str(trace.stop_reason2));
  t.add_meta("warning", Cell::flag(trace.warning));
  return t;
}

Table rde_table(const Config& cfg) {
  const auto spec = model_from_config(cfg);
  const auto paths = cfg.get_u64("rde.paths", 1);
  if (paths == 0) throw ConfigError("rde.paths must be positive");
  std::vector<ModelPath> results(paths);
  parallel_for(paths, [&](std::size_t p) { results[p] = solve_model(spec, p); });
  Table t;
  t.columns = {"path_id", "t", "S", "S_em"};
  const Grid grid = spec.grid();
  double sq = 0.0;
  for (std::size_t p = 0; p < paths; ++p) {
    for (std::size_t q = 0; q < grid.size(); ++q)
      t.rows.push_back({Cell::num(static_cast<double>(p)), Cell::num(grid.node(q)), Cell::num(results[p].S[q]),
                        Cell::num(results[p].S_em[q])});
    const double d = results[p].S.back() - results[p].S_em.back();
    sq += d * d;
  }
  t.add_meta("paths", Cell::num(static_cast<double>(paths)));
  t.add_meta("rms_terminal_gap_to_euler_maruyama", Cell::num(std::sqrt(sq / static_cast<double>(paths))));
  t.add_meta("sigma_bounded", Cell::flag(spec.sigma.bounded()));
  return t;
}

Table rate_table(const Config& cfg, std::vector<std::vector<double>>* minimizers) {
  const auto pb = rate_problem_from_config(cfg);
  const auto opts = rate_options_from_config(cfg);
  const auto z = z_grid_from_config(cfg);
  std::vector<RateSolution> sols(z.size());
  parallel_for(z.size(), [&](std::size_t k) {
    RateOptions local = opts;
    local.seed = opts.seed + k;
    sols[k] = minimize_rate(z[k], pb, local);
  });
  Table t;
  t.columns = {"z", "rate", "iterations", "restarts", "grad_norm", "optimality_residual"};
  for (const auto& s : sols) {
    t.rows.push_back({Cell::num(s.z), Cell::num(s.value), Cell::num(s.iterations),
                      Cell::num(static_cast<double>(s.restarts)), Cell::num(s.grad_norm),
                      Cell::num(s.optimality_residual)});
    if (minimizers) minimizers->push_back(s.g);
  }
  t.add_meta("K", Cell::num(static_cast<double>(pb.K)));
  t.add_meta("f", Cell::str(pb.f.describe()));
  return t;
}

Table smile_table(const Config& cfg) {
  const auto pb = rate_problem_from_config(cfg);
  const auto opts = rate_options_from_config(cfg);
  const auto z = z_grid_from_config(cfg);
  const auto rows = smile_curve(pb, z, opts);
  Table t;
  t.columns = {"z", "rate", "sigma_asym", "iterations", "restarts", "grad_norm"};
  for (const auto& r : rows)
    t.rows.push_back({Cell::num(r.z), Cell::num(r.rate), Cell::num(r.sigma_asym), Cell::num(r.iterations),
                      Cell::num(static_cast<double>(r.restarts)), Cell::num(r.grad_norm)});
  t.add_meta("K", Cell::num(static_cast<double>(pb.K)));
  return t;
}

namespace {

std::vector<std::size_t> to_sizes(const std::vector<double>& v, const std::string& key) {
  std::vector<std::size_t> out;
  for (double x : v) {
    if (!(x >= 1.0) || x != std::floor(x)) throw ConfigError(key + " entries must be positive integers");
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

}  // namespace

Table mc_table(const Config& cfg) {
  const std::string check = cfg.require_string("mc.check");
  const auto spec = model_from_config(cfg);
  const auto paths = static_cast<std::size_t>(cfg.get_u64("mc.paths", 1000));
  Table t;
  t.add_meta("check", Cell::str(check));
  t.add_meta("paths", Cell::num(static_cast<double>(paths)));
  t.add_meta("seed", Cell::num(static_cast<double>(spec.seed)));
  if (check == "moment") {
    const auto idx = cfg.get_int_list("mc.index", {1, 0});
    if (idx.size() != 2) throw ConfigError("mc.index needs two entries");
    const int levels = static_cast<int>(cfg.get_u64("mc.moment_levels", 6));
    const auto r = moment_scaling_check(MultiIndex(idx), spec, paths, levels);
    t.columns = {"t", "mean_sq", "stderr"};
    for (const auto& p : r.points) t.rows.push_back({Cell::num(p.t), Cell::num(p.mean), Cell::num(p.stderr)});
    t.add_meta("slope", Cell::num(r.slope));
    t.add_meta("expected", Cell::num(r.expected));
    t.add_meta("tolerance", Cell::num(0.05));
    t.add_meta("pass", Cell::flag(r.pass()));
    t.add_meta("warning", Cell::flag(r.warning));
  } else if (check == "ito") {
    const auto levels = to_sizes(cfg.get_list("mc.levels", {1024, 4096, 16384}), "mc.levels");
    const auto ref = static_cast<std::size_t>(cfg.get_u64("mc.ref_N", 32768));
    const auto r = ito_consistency_check(spec, paths, levels, ref);
    t.columns = {"N", "rms", "higher_order_rms"};
    for (const auto& l : r.levels)
      t.rows.push_back({Cell::num(static_cast<double>(l.N)), Cell::num(l.rms), Cell::num(l.higher_order)});
    t.add_meta("reference_N", Cell::num(static_cast<double>(ref)));
    t.add_meta("statistic", Cell::num(r.levels.back().rms / r.levels.front().rms));
    t.add_meta("tolerance", Cell::num(0.5));
    t.add_meta("pass", Cell::flag(r.pass()));
  } else if (check == "price") {
    const auto strikes = cfg.get_list("mc.strikes", {0.9, 1.0, 1.1});
    const auto maturities = cfg.get_list("mc.maturities", {1.0});
    const auto rows = price_and_implied_vol(spec, strikes, maturities, paths);
    t.columns = {"strike", "maturity", "price", "stderr", "implied_vol", "implied_stderr", "status"};
    for (const auto& r : rows)
      t.rows.push_back({Cell::num(r.strike), Cell::num(r.maturity), Cell::num(r.price), Cell::num(r.stderr),
                        Cell::num(r.implied_vol), Cell::num(r.implied_stderr), Cell::str(r.status)});
    // Flat-smile reference exists for f ≡ v0 with σ(s) = b s.
    if (spec.f.family() == VolFunction::Family::Constant && spec.sigma.family() == SigmaFunction::Family::Linear &&
        spec.sigma(0.0) == 0.0) {
      const std::vector<double> origin(2, 0.0);
      const double ref = spec.f.value(origin) * spec.sigma.derivative(0.0);
      bool flat = true;
      for (const auto& r : rows)
        if (r.status == "ok") flat = flat && std::abs(r.implied_vol - ref) <= 2.0 * r.implied_stderr;
      t.add_meta("reference_vol", Cell::num(ref));
      t.add_meta("tolerance", Cell::str("2 stderr"));
      t.add_meta("pass", Cell::flag(flat));
    }
  } else if (check == "ldp") {
    const double z = cfg.get_double("mc.z", 0.5);
    const auto tg = cfg.get_list("mc.t_grid", {0.02, 0.025, 0.03, 0.035, 0.04, 0.05});
    const auto rate_K = static_cast<std::size_t>(cfg.get_u64("mc.rate_K", 64));
    const double tolerance = cfg.get_double("mc.tolerance", 0.3);
    const auto r = ldp_tail_check(spec, z, tg, paths, rate_K, tolerance);
    t.columns = {"t", "probability", "exceedances", "used"};
    for (const auto& p : r.points)
      t.rows.push_back({Cell::num(p.t), Cell::num(p.probability), Cell::num(static_cast<double>(p.exceedances)),
                        Cell::flag(p.used)});
    t.add_meta("z", Cell::num(z));
    t.add_meta("skipped", Cell::flag(r.skipped));
    t.add_meta("slope", Cell::num(r.slope));
    t.add_meta("intercept", Cell::num(r.intercept));
    t.add_meta("rate", Cell::num(r.rate));
    t.add_meta("statistic", Cell::num(r.ratio));
    t.add_meta("tolerance", Cell::num(tolerance));
    t.add_meta("pass", Cell::flag(r.agree()));
  } else if (check == "scaling") {
    const auto eps = cfg.get_list("mc.eps", {0.25, 0.0625});
    const auto rows = scaling_check(spec, eps, paths);
    t.columns = {"eps", "order", "lhs", "rhs", "stderr", "pass"};
    bool all = true;
    for (const auto& r : rows) {
      t.rows.push_back({Cell::num(r.eps), Cell::num(r.order), Cell::num(r.lhs), Cell::num(r.rhs), Cell::num(r.stderr),
                        Cell::flag(r.pass)});
      all = all && r.pass;
    }
    t.add_meta("tolerance", Cell::str("3 stderr"));
    t.add_meta("pass", Cell::flag(all));
  } else {
    throw ConfigError("mc.check must be moment, ito, price, ldp or scaling, got " + check);
  }
  return t;
}

}  // namespace parpath
