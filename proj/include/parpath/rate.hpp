#pragma once

// Short-maturity rate function: minimization of
//   F(g) = ½∫g² + (z − ρσ0 ∫ f(K_H g) g)² / (2(1−ρ²)σ0² ∫ f(K_H g)²)
// over g piecewise constant on K cells of [0,1].

#include <cstdint>
#include <span>
#include <vector>

#include "parpath/vol_function.hpp"

namespace parpath {

struct RateProblem {
  double H = 0.3;
  double rho = 0.0;
  double sigma0 = 1.0;
  VolFunction f = VolFunction::constant(1, 1.0);  // evaluated at (u, 0, ..., 0)
  std::size_t K = 64;

  /// Throws ConfigError for |ρ| >= 1, K < 2, σ0 <= 0 or H outside (0, 1/2].
  void validate() const;
};

/// Row-major K×K lower-triangular matrix A with (K_H g)(t_k) = Σ_j A_kj g_j at
/// midpoints t_k = (k+½)/K; each entry is the exact integral of κ_H over the cell.
std::vector<double> kh_matrix(double H, std::size_t K);
std::vector<double> kh_convolve(std::span<const double> g, double H);

/// F(g); fills grad (size K) with ∂F/∂g_m when non-empty. Throws NumericalError when
/// ∫f² falls below 1e−12.
double rate_objective(std::span<const double> g, double z, const RateProblem& problem, std::span<double> grad = {});

struct RateOptions {
  std::size_t starts = 8;
  std::uint64_t seed = 0;
  int max_iterations = 2000;
};

struct RateSolution {
  double z = 0.0;
  double value = 0.0;
  std::vector<double> g;
  int iterations = 0;            // of the accepted start
  double grad_norm = 0.0;        // ‖∇F‖ in the L² scaling x = g√Δ
  std::size_t restarts = 0;      // starts run
  std::size_t converged = 0;     // starts meeting the first-order tolerance
  double optimality_residual = 0.0;
  double multiplier = 0.0;       // c in g2 = c f(K_H g)
};

/// Multi-start BFGS (first start g = 0, others seeded random). Throws NumericalError
/// when no start yields a finite value.
RateSolution minimize_rate(double z, const RateProblem& problem, const RateOptions& options = {});

/// z²/(2σ0²v0²), the value for f ≡ v0.
double constant_f_rate(double z, double sigma0, double v0);

/// Stationarity of the two-component problem: with g2 = c f(K_H g) and multiplier λ,
/// max_m |g_m − λ ∂C/∂g_m / Δ| where C(g, g2) = σ0 ∫ f(K_H g)(ρ g + √(1−ρ²) g2).
struct OptimalityCheck {
  double c;
  double lambda;
  double residual;
};
OptimalityCheck optimality_check(std::span<const double> g, double z, const RateProblem& problem);

struct SmileRow {
  double z;
  double rate;
  double sigma_asym;  // NaN where rate = 0
  int iterations;
  std::size_t restarts;
  double grad_norm;
};
/// Rows in z order; points are solved in parallel with sub-seeds tied to the z index.
std::vector<SmileRow> smile_curve(const RateProblem& problem, std::span<const double> z_grid,
                                  const RateOptions& options = {});

}  // namespace parpath
