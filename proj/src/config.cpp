#include "parpath/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "parpath/error.hpp"
#include "parpath/prp_io.hpp"

namespace parpath {

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "kernel.variant", "kernel.H", "kernel.delta", "kernel.lambda",
      "grid.N", "grid.T", "corr.rho", "rng.seed",
      "path.alpha", "path.beta",
      "model.f.family", "model.f.value", "model.f.xi", "model.f.eta", "model.f.c", "model.f.coeffs",
      "model.sigma.family", "model.sigma.params", "model.S0",
      "integrate.tol", "integrate.paths", "integrate.input",
      "rde.paths",
      "rate.K", "rate.z_min", "rate.z_max", "rate.z_steps", "rate.rho", "rate.H", "rate.sigma0",
      "rate.f.family", "rate.f.value", "rate.f.xi", "rate.f.eta", "rate.f.c", "rate.f.coeffs", "rate.starts",
      "mc.check", "mc.paths", "mc.index", "mc.strikes", "mc.maturities", "mc.z", "mc.t_grid", "mc.ref_N",
      "mc.levels", "mc.eps", "mc.rate_K", "mc.tolerance", "mc.moment_levels",
      "verify.triples", "verify.scheme", "verify.input",
      "lift.paths"};
  return keys;
}

bool is_known_config_key(const std::string& key) {
  const auto& k = known_config_keys();
  return std::find(k.begin(), k.end(), key) != k.end();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("key " + key + ": expected a number, got '" + text + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("key " + key + ": expected a nonnegative integer, got '" + text + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_double(v[k]);
  return s;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (cfg.has(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + key);
    cfg.set(key, value);
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  return parse(std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()));
}

void Config::set(const std::string& key, const std::string& value) {
  if (!is_known_config_key(key)) throw ConfigError("unknown config key " + key);
  entries_[key] = trim(value);
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

std::optional<std::string> Config::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void Config::record(const std::string& key, const std::string& value) const { resolved_[key] = value; }

std::string Config::require_string(const std::string& key) const {
  auto v = get(key);
  if (!v) throw ConfigError("missing required config key " + key);
  record(key, *v);
  return *v;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const std::string v = get(key).value_or(fallback);
  record(key, v);
  return v;
}

double Config::require_double(const std::string& key) const {
  const double v = parse_double(key, require_string(key));
  record(key, format_double(v));
  return v;
}

double Config::get_double(const std::string& key, double fallback) const {
  const double v = has(key) ? parse_double(key, *get(key)) : fallback;
  record(key, format_double(v));
  return v;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  const std::uint64_t v = has(key) ? parse_u64(key, *get(key)) : fallback;
  record(key, std::to_string(v));
  return v;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  std::vector<double> out;
  if (has(key)) {
    for (const auto& item : split_list(*get(key))) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("key " + key + ": empty list");
  } else {
    out = fallback;
  }
  record(key, join(out));
  return out;
}

std::vector<int> Config::get_int_list(const std::string& key, const std::vector<int>& fallback) const {
  std::vector<int> out;
  if (has(key)) {
    for (const auto& item : split_list(*get(key))) out.push_back(static_cast<int>(parse_u64(key, item)));
  } else {
    out = fallback;
  }
  std::string s;
  for (std::size_t k = 0; k < out.size(); ++k) s += (k ? "," : "") + std::to_string(out[k]);
  record(key, s);
  return out;
}

std::string Config::to_string() const {
  std::string s;
  for (const auto& [k, v] : entries_) s += k + " = " + v + "\n";
  return s;
}

std::string Config::resolved_string() const {
  std::string s;
  for (const auto& [k, v] : resolved_) s += k + " = " + v + "\n";
  return s;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t Config::hash() const { return fnv1a64(to_string()); }

KernelSpec kernel_from_config(const Config& cfg) {
  const double H = cfg.require_double("kernel.H");
  const double delta = cfg.get_double("kernel.delta", 0.01);
  const std::string variant = cfg.get_string("kernel.variant", "riemann_liouville");
  if (variant == "riemann_liouville") return KernelSpec::riemann_liouville(H, delta);
  if (variant == "exp_damped") return KernelSpec::exp_damped(H, cfg.get_double("kernel.lambda", 1.0), delta);
  throw ConfigError("kernel.variant must be riemann_liouville or exp_damped, got " + variant);
}

VolFunction vol_function_from_config(const Config& cfg, const std::string& prefix, std::size_t e) {
  const std::string family = cfg.get_string(prefix + ".family", "constant");
  if (family == "constant") {
    const double v = cfg.get_double(prefix + ".value", 1.0);
    if (!(v > 0.0)) throw ConfigError(prefix + ".value must be positive");
    return VolFunction::constant(e, v);
  }
  if (family == "exponential") {
    const double xi = cfg.get_double(prefix + ".xi", 1.0);
    if (!(xi > 0.0)) throw ConfigError(prefix + ".xi must be positive");
    std::vector<double> rates(e, 0.0);
    rates[0] = cfg.get_double(prefix + ".eta", 1.0);
    if (e >= 2) rates[1] = cfg.get_double(prefix + ".c", 0.0);
    return VolFunction::exponential(xi, rates);
  }
  if (family == "polynomial") {
    const auto coeffs = cfg.get_list(prefix + ".coeffs", {1.0});
    std::vector<std::pair<MultiIndex, double>> terms;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      std::vector<int> idx(e, 0);
      idx[0] = static_cast<int>(k);
      terms.emplace_back(MultiIndex(idx), coeffs[k]);
    }
    return VolFunction::polynomial(e, terms);
  }
  throw ConfigError(prefix + ".family must be constant, exponential or polynomial, got " + family);
}

SigmaFunction sigma_from_config(const Config& cfg) {
  const std::string family = cfg.get_string("model.sigma.family", "constant");
  if (family == "constant") {
    const auto p = cfg.get_list("model.sigma.params", {1.0});
    if (p.size() != 1) throw ConfigError("model.sigma.params for constant takes one value");
    return SigmaFunction::constant(p[0]);
  }
  if (family == "linear") {
    const auto p = cfg.get_list("model.sigma.params", {0.0, 1.0});
    if (p.size() != 2) throw ConfigError("model.sigma.params for linear takes a,b");
    return SigmaFunction::linear(p[0], p[1]);
  }
  if (family == "tanh") {
    const auto p = cfg.get_list("model.sigma.params", {1.0, 0.5, 1.0});
    if (p.size() != 3) throw ConfigError("model.sigma.params for tanh takes a,b,c");
    return SigmaFunction::tanh(p[0], p[1], p[2]);
  }
  throw ConfigError("model.sigma.family must be constant, linear or tanh, got " + family);
}

ModelSpec model_from_config(const Config& cfg) {
  ModelSpec spec;
  spec.kernel = kernel_from_config(cfg);
  spec.T = cfg.get_double("grid.T", 1.0);
  const auto N = cfg.get_u64("grid.N", 1024);
  if (N < 2) throw ConfigError("grid.N must be >= 2");
  spec.N = static_cast<std::size_t>(N);
  spec.rho = cfg.get_double("corr.rho", 0.0);
  if (!(spec.rho >= -1.0 && spec.rho <= 1.0)) throw ConfigError("corr.rho must lie in [-1, 1]");
  spec.seed = cfg.get_u64("rng.seed", 0);
  spec.alpha = cfg.get_double("path.alpha", 0.4);
  spec.beta = cfg.get_double("path.beta", spec.kernel.zeta() - spec.kernel.delta());
  spec.f = vol_function_from_config(cfg, "model.f", 2);
  spec.sigma = sigma_from_config(cfg);
  spec.S0 = cfg.get_double("model.S0", 0.0);
  spec.tol = cfg.get_double("integrate.tol", 1e-9);
  (void)spec.index_config();  // validates α, β, T
  if (!(spec.beta < spec.kernel.zeta())) throw ConfigError("path.beta must be smaller than kernel.H - kernel.delta");
  return spec;
}

RateProblem rate_problem_from_config(const Config& cfg) {
  RateProblem pb;
  pb.H = cfg.has("rate.H") || !cfg.has("kernel.H") ? cfg.require_double("rate.H") : cfg.require_double("kernel.H");
  pb.rho = cfg.get_double("rate.rho", cfg.has("corr.rho") ? cfg.get_double("corr.rho", 0.0) : 0.0);
  pb.sigma0 = cfg.get_double("rate.sigma0", 1.0);
  pb.f = vol_function_from_config(cfg, "rate.f", 1);
  pb.K = static_cast<std::size_t>(cfg.get_u64("rate.K", 64));
  pb.validate();
  return pb;
}

RateOptions rate_options_from_config(const Config& cfg) {
  RateOptions o;
  o.starts = static_cast<std::size_t>(cfg.get_u64("rate.starts", 8));
  o.seed = cfg.get_u64("rng.seed", 0);
  return o;
}

std::vector<double> z_grid_from_config(const Config& cfg) {
  const double lo = cfg.get_double("rate.z_min", -0.5);
  const double hi = cfg.get_double("rate.z_max", 0.5);
  const auto steps = cfg.get_u64("rate.z_steps", 11);
  if (steps < 1) throw ConfigError("rate.z_steps must be >= 1");
  if (steps == 1) return {lo};
  if (!(hi > lo)) throw ConfigError("rate.z_max must exceed rate.z_min");
  std::vector<double> z(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double n = static_cast<double>(steps - 1), kk = static_cast<double>(k);
    z[k] = (lo * (n - kk) + hi * kk) / n;
    if (std::abs(z[k]) < 1e-14 * (std::abs(lo) + std::abs(hi))) z[k] = 0.0;
  }
  return z;
}

}  // namespace parpath
