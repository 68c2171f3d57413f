#pragma once

// Monte Carlo checks: moment scaling, Itô consistency, pricing with implied-vol
// inversion, the short-time tail slope and the self-similarity of X̂^(1).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "parpath/core.hpp"
#include "parpath/rate.hpp"
#include "parpath/rde.hpp"

namespace parpath {

struct MomentPoint {
  double t;
  double mean;    // E|X^(i)_{0t}|²
  double stderr;
};
struct MomentScalingReport {
  MultiIndex index;
  double slope = 0.0;
  double expected = 0.0;  // 2|i|ζ + 1
  std::vector<MomentPoint> points;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  bool warning = false;  // fewer than 10³ paths
  bool pass(double tol = 0.05) const;
};
/// Dyadic times t = T 2^{−j}, j = 0..levels−1, on lifts of the spec's grid.
MomentScalingReport moment_scaling_check(const MultiIndex& i, const ModelSpec& spec, std::size_t n_paths,
                                         int levels = 6);

struct ItoLevel {
  std::size_t N;
  double rms;           // RMS of Y1_{0T} on mesh T/N minus the reference Itô sum
  double higher_order;  // RMS of Σ_p Σ_{i≠0} ∂^i f X^(i) on mesh T/N
};
struct ItoConsistencyReport {
  std::size_t reference_N = 0;
  std::vector<ItoLevel> levels;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  /// RMS at the finest level ≤ ratio × RMS at the coarsest.
  bool pass(double ratio = 0.5) const;
};
/// Lifts on reference_N steps; level N uses the compensated sum on the sub-partition of mesh T/N.
ItoConsistencyReport ito_consistency_check(const ModelSpec& spec, std::size_t n_paths,
                                           const std::vector<std::size_t>& levels, std::size_t reference_N);

/// Call price with zero rates.
double black_scholes_call(double S, double K, double T, double vol);
double black_scholes_vega(double S, double K, double T, double vol);
/// Bisection on [1e−4, 5] to 1e−8; NumericalError outside the no-arbitrage band.
double implied_vol(double price, double S, double K, double T);

struct PriceRow {
  double strike;
  double maturity;
  double price;
  double stderr;
  double implied_vol;      // NaN on inversion failure
  double implied_stderr;   // stderr / vega
  std::string status;      // "ok" | "inversion_error: ..."
};
/// For each maturity a fresh pipeline on [0, T] with spec.N steps; S must stay positive.
std::vector<PriceRow> price_and_implied_vol(const ModelSpec& spec, std::span<const double> strikes,
                                            std::span<const double> maturities, std::size_t n_paths);

struct TailPoint {
  double t;
  double probability;
  std::size_t exceedances;
  bool used;
};
struct LdpReport {
  double z = 0.0;
  bool skipped = false;  // z = 0
  double slope = 0.0;
  double intercept = 0.0;
  double rate = 0.0;     // minimize_rate value
  double ratio = 0.0;    // slope / rate
  double tolerance = 0.3;
  std::vector<TailPoint> points;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  bool agree() const { return !skipped && std::abs(ratio - 1.0) <= tolerance; }
};
/// Regresses −log P(t^{H−1/2} S̄_t ≥ z) on t^{−2H} (≤ for z < 0) over t_grid, simulated on
/// [0, max t] with spec.N steps (times snap to nodes). The rate comes from minimize_rate
/// with f(·, 0), σ0 = σ(S0). InsufficientDataError below 50 exceedances at the largest t.
LdpReport ldp_tail_check(const ModelSpec& spec, double z, std::span<const double> t_grid, std::size_t n_paths,
                         std::size_t rate_K = 64, double tolerance = 0.3);

struct ScalingMoment {
  double eps;
  int order;
  double lhs;         // E[(X̂1_{εT})^k]
  double rhs;         // ε^{kH} E[(X̂1_T)^k]
  double stderr;      // combined
  bool pass;          // |lhs − rhs| ≤ 3 stderr
};
/// Moments k = 1..4 of X̂^(1)_{εT} against those of ε^H X̂^(1)_T.
std::vector<ScalingMoment> scaling_check(const ModelSpec& spec, std::span<const double> eps, std::size_t n_paths);

}  // namespace parpath
