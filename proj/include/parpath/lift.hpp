#pragma once

// Volterra kernels, Brownian drivers, the 𝒦 operator and the Itô lift.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "parpath/core.hpp"

namespace parpath {

/// κ(t) = g(t) t^{ζ−γ} with ζ = H−δ, γ = 1/2−δ, so the power is always H−1/2.
///   RiemannLiouville: g ≡ 1/Γ(H+1/2)
///   ExpDamped:        g(t) = exp(−λt)/Γ(H+1/2)
class KernelSpec {
 public:
  enum class Variant { RiemannLiouville, ExpDamped };

  static KernelSpec riemann_liouville(double H, double delta = 0.01);
  static KernelSpec exp_damped(double H, double lambda, double delta = 0.01);

  Variant variant() const noexcept { return variant_; }
  double H() const noexcept { return H_; }
  double delta() const noexcept { return delta_; }
  double lambda() const noexcept { return lambda_; }
  double zeta() const noexcept { return H_ - delta_; }
  double gamma() const noexcept { return 0.5 - delta_; }
  bool has_closed_form() const noexcept { return variant_ == Variant::RiemannLiouville; }

  /// Throws DomainError for t <= 0.
  double operator()(double t) const;
  /// κ'(t), t > 0.
  double derivative(double t) const;
  /// ∫_0^h κ(u) du
  double integral(double h) const;

  /// Weights w_k, k = 1..N, with X̂_q = Σ_{j<q} w_{q−j} ΔW_j. Exact cell averages
  /// (1/Δ)∫_{(k−1)Δ}^{kΔ} κ for closed-form kernels, left-point values κ(kΔ) otherwise.
  std::vector<double> convolution_weights(double dt, std::size_t N) const;

 private:
  Variant variant_ = Variant::RiemannLiouville;
  double H_ = 0.5;
  double delta_ = 0.01;
  double lambda_ = 0.0;
  double norm_ = 1.0;  // 1/Γ(H+1/2)
};

/// Deterministic normal stream keyed by (seed, path, stream).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t path, std::uint64_t stream);

struct BrownianBundle {
  Grid grid;
  double rho;
  std::uint64_t seed;
  std::uint64_t path;
  std::vector<double> dW;      // N increments
  std::vector<double> dWperp;  // N increments
  std::vector<double> dX;      // ρ dW + √(1−ρ²) dW⊥

  std::vector<double> W() const;
  std::vector<double> Wperp() const;
  std::vector<double> X() const;
};

/// Throws ConfigError for |ρ| > 1.
BrownianBundle simulate_brownian(const Grid& grid, double rho, std::uint64_t seed, std::uint64_t path = 0);

/// Node values of X̂^(1)_t ≈ ∫_0^t κ(t−r) dW_r (X̂^(1)_0 = 0).
std::vector<double> volterra_convolve(std::span<const double> dW, const KernelSpec& kernel, const Grid& grid);
std::vector<double> volterra_convolve(const BrownianBundle& bundle, const KernelSpec& kernel);

/// 𝒦f(t_q) = κ(t)(f(t)−f(0)) + ∫_0^t (f(s)−f(t)) κ'(t−s) ds for f sampled on the grid
/// and interpolated linearly.
std::vector<double> k_operator(std::span<const double> f, const KernelSpec& kernel, const Grid& grid);

struct KernelL2Point {
  double h;
  double norm_sq;
};
struct KernelL2Report {
  double slope;
  double expected;  // 2(ζ−γ)+1
  std::vector<KernelL2Point> points;
  bool violated;  // slope deficit > 0.1
};

/// ‖κ_st‖² = ∫_s^t κ(t−r)² dr + ∫_0^s (κ(t−r) − κ(s−r))² dr for t = s + h over
/// dyadic h = T/2^j, j = min_level..max_level, and least-squares slope in log-log.
KernelL2Report kernel_l2_check(const KernelSpec& kernel, double T, double s, int min_level = 6,
                               int max_level = 14);

/// ‖κ_st‖² by adaptive quadrature.
double kernel_l2_norm_sq(const KernelSpec& kernel, double s, double t);

/// Builds the e = 2, d = 1 lift: x̂ = (X̂^(1), t^ζ); X = the bundle's correlated path.
/// Throws ConfigError when β ≥ ζ, e ≠ 2, d ≠ 1, or the kernel L² check flags a violation.
PartialRoughPath build_lift(const BrownianBundle& bundle, const KernelSpec& kernel, const IndexConfig& config);

}  // namespace parpath
