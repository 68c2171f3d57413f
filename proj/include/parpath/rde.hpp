#pragma once

// Step-2 scheme for S̄ = ∫ σ̄(S̄) dY and the simulate → lift → integrate → solve pipeline.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "parpath/lift.hpp"
#include "parpath/rough_path.hpp"
#include "parpath/vol_function.hpp"

namespace parpath {

class SigmaFunction {
 public:
  enum class Family { Constant, Linear, SmoothBounded };
  using Fn = std::function<double(double)>;

  static SigmaFunction constant(double c);
  /// σ(s) = a + b s; unbounded, accepted with the |S| guard.
  static SigmaFunction linear(double a, double b);
  /// σ and its first three derivatives supplied by the caller.
  static SigmaFunction smooth_bounded(Fn f, Fn df, Fn d2f, Fn d3f, std::string name = "custom");
  /// σ(s) = a + b tanh(c s)
  static SigmaFunction tanh(double a, double b, double c);

  Family family() const noexcept { return family_; }
  bool bounded() const noexcept { return family_ != Family::Linear || b_ == 0.0; }
  double operator()(double s) const;
  double derivative(double s, int order = 1) const;
  std::string describe() const;

 private:
  Family family_ = Family::Constant;
  double a_ = 0.0, b_ = 0.0;
  Fn f_[4];
  std::string name_;
};

/// Abort threshold for |S0 + S̄|.
inline constexpr double kStateGuard = 1e6;

/// S̄_{q+1} = S̄_q + σ̄(S̄_q) Y1_{q,q+1} + σ̄'(S̄_q) σ̄(S̄_q) Y2_{q,q+1}, σ̄(x) = σ(S0 + x), S̄_0 = 0.
/// Requires a one-dimensional driver. Throws SolverError with the last good node.
std::vector<double> solve_rde(const RoughPath& driver, const SigmaFunction& sigma, double S0);

struct ModelSpec {
  KernelSpec kernel = KernelSpec::riemann_liouville(0.5);
  double T = 1.0;
  std::size_t N = 1024;
  double rho = 0.0;
  std::uint64_t seed = 0;
  double alpha = 0.4;
  double beta = 0.48;  // must stay below ζ
  VolFunction f = VolFunction::constant(2, 1.0);
  SigmaFunction sigma = SigmaFunction::constant(1.0);
  double S0 = 0.0;
  double tol = 1e-9;

  IndexConfig index_config() const;
  Grid grid() const { return Grid(T, N); }
};

struct ModelPath {
  std::vector<double> S;     // S0 + S̄ on nodes
  std::vector<double> Sbar;  // S̄
  std::vector<double> S_em;  // Euler–Maruyama of dS = σ(S) f(x̂_t) dX on the same increments
  std::vector<double> X;     // driving path X^(0)_{0t}
  std::vector<double> xhat1; // X̂^(1)
};

ModelPath solve_model(const ModelSpec& spec, std::uint64_t path_index);

}  // namespace parpath
