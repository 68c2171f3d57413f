#pragma once

// Flat key=value run configuration. Unknown keys are rejected; every value read
// through a typed getter (default or explicit) is recorded as resolved.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parpath/lift.hpp"
#include "parpath/rate.hpp"
#include "parpath/rde.hpp"
#include "parpath/vol_function.hpp"

namespace parpath {

const std::vector<std::string>& known_config_keys();
bool is_known_config_key(const std::string& key);

class Config {
 public:
  Config() = default;
  /// '#' starts a comment; blank lines are ignored; duplicate keys are errors.
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  /// Missing key → ConfigError naming it.
  std::string require_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double require_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
  const std::map<std::string, std::string>& resolved() const noexcept { return resolved_; }
  /// Sorted "key = value" lines of the explicit entries.
  std::string to_string() const;
  std::string resolved_string() const;
  /// FNV-1a 64 of to_string().
  std::uint64_t hash() const;

 private:
  void record(const std::string& key, const std::string& value) const;

  std::map<std::string, std::string> entries_;
  mutable std::map<std::string, std::string> resolved_;
};

std::uint64_t fnv1a64(const std::string& bytes);

KernelSpec kernel_from_config(const Config& cfg);
/// prefix ∈ {"model.f", "rate.f"}: family = constant | exponential | polynomial.
VolFunction vol_function_from_config(const Config& cfg, const std::string& prefix, std::size_t e);
SigmaFunction sigma_from_config(const Config& cfg);
ModelSpec model_from_config(const Config& cfg);
RateProblem rate_problem_from_config(const Config& cfg);
RateOptions rate_options_from_config(const Config& cfg);
/// z_steps points evenly spaced over [z_min, z_max], endpoints included.
std::vector<double> z_grid_from_config(const Config& cfg);

}  // namespace parpath
