#pragma once

// The (α,β) rough path integral by compensated Riemann sums on dyadic refinements,
// the bound constants C1..C4 and the local Lipschitz harness.

#include <string>
#include <vector>

#include "parpath/analysis.hpp"
#include "parpath/core.hpp"
#include "parpath/rough_path.hpp"
#include "parpath/vol_function.hpp"

namespace parpath {

/// Σ_p Σ_{i∈I} ∂^i f(x̂_{t_{p−1}}) X^(i)_{t_{p−1} t_p}. The partition lists node indices
/// from s to t, strictly increasing.
std::vector<double> compensated_sum_level1(const PartialRoughPath& prp, const VolFunction& f,
                                           const std::vector<std::size_t>& partition, std::size_t s, std::size_t t);

/// Σ_p (Y1_{s t_{p−1}} ⊗ Y1_{t_{p−1} t_p} + Σ_{(j,k)∈J} ∂^j f ∂^k f(x̂_{t_{p−1}}) 𝐗^(jk)_{t_{p−1} t_p}),
/// with the Y1 factors read from y1_fine.
std::vector<double> compensated_sum_level2(const PartialRoughPath& prp, const VolFunction& f,
                                           const std::vector<std::size_t>& partition, std::size_t s, std::size_t t,
                                           const RoughPath& y1_fine);

/// Nodes q with q ≡ 0 mod stride, plus N; stride = max(1, N >> level).
std::vector<std::size_t> dyadic_partition(const Grid& grid, int level);
/// Number of refinement levels needed to reach stride 1.
int finest_level(const Grid& grid);

struct ConvergenceTrace {
  struct Level {
    int k;
    std::size_t cells;
    double level1;     // first component of Y1_{0T} on P_k
    double level2;     // first component of Y2_{0T} on P_k
    double diff1;      // |ΔY1| to the previous level (NaN at k = 0)
    double diff2;
  };
  std::vector<Level> levels;
  int accepted_level1 = 0;
  int accepted_level2 = 0;
  std::string stop_reason1;  // "cauchy_tol" | "finest_grid"
  std::string stop_reason2;
  bool warning = false;  // finest grid reached with differences not decreasing over the last 3 levels
};

struct IntegrationResult {
  RoughPath path;
  ConvergenceTrace trace;
};

/// Refines P_k until |J(P_k) − J(P_{k−1})| < tol (1 + |J(P_{k−1})|), separately for each level;
/// the output is anchored at every node using the accepted partition plus a partial last cell.
IntegrationResult integrate(const PartialRoughPath& prp, const VolFunction& f, double tol = 1e-9);

/// Riemann ζ(s), s > 1, by partial sum plus Euler–Maclaurin tail.
double riemann_zeta(double s);

struct BoundConstants {
  double C1, C2, C2_tilde, C3, C4, C4_tilde;
};
/// Closed-form constants for n, m, e, α, β, T of the configuration and norm bound M.
BoundConstants theoretical_bounds(const IndexConfig& config, double M);

/// 1.1 × max |∂^i f| over |i| ≤ n+2 on the nodes of x̂ and the corners of its bounding box.
double estimate_k(const PartialRoughPath& prp, const VolFunction& f);
double estimate_k(const std::vector<const PartialRoughPath*>& prps, const VolFunction& f);

struct BoundCheck {
  double K = 0.0;
  double M = 0.0;
  BoundConstants constants{};
  double level1_ratio = 0.0;  // max |Y1_st| / (K C1 |t−s|^α)
  double level2_ratio = 0.0;  // max |Y2_st| / (K² C2 |t−s|^{2α})
  bool pass() const { return level1_ratio <= 1.0 && level2_ratio <= 1.0; }
};
BoundCheck check_integral_bounds(const PartialRoughPath& prp, const VolFunction& f, const RoughPath& integral,
                                 PairScheme scheme = PairScheme::Auto);

struct LipschitzReport {
  double d_alpha = 0.0;
  double d_ab = 0.0;
  double ratio = 0.0;
  double bound = 0.0;  // K (C3 + K C4)
  double K = 0.0;
  double M = 0.0;
};
/// d_α(∫f dA, ∫f dB) / d_(α,β)(A, B), 0 when A and B coincide on every sample.
LipschitzReport lipschitz_ratio(const PartialRoughPath& a, const PartialRoughPath& b, const VolFunction& f,
                                double tol = 1e-9, PairScheme scheme = PairScheme::Auto);

}  // namespace parpath
