#pragma once

// Hölder norms on grid pairs, the homogeneous norm, the metrics d_(α,β) and d_α,
// and Chen-defect diagnostics.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "parpath/core.hpp"
#include "parpath/rough_path.hpp"

namespace parpath {

enum class PairScheme { Exhaustive, Dyadic, Auto };

/// Auto resolves to Exhaustive for N <= 1024.
PairScheme resolve_scheme(PairScheme scheme, const Grid& grid);
std::string to_string(PairScheme scheme);

struct HolderReport {
  double exponent = 0.0;
  double sup_ratio = 0.0;
  std::size_t argmax_s = 0;
  std::size_t argmax_t = 0;
  PairScheme scheme = PairScheme::Exhaustive;
};

/// Grid pairs s < t visited by a scheme: all pairs, or t − s ∈ {2^j} steps.
void for_each_pair(const Grid& grid, PairScheme scheme, const std::function<void(std::size_t, std::size_t)>& fn);

/// sup |X_st| / (t_t − t_s)^γ with |X_st| supplied by the evaluator.
HolderReport holder_norm(const std::function<double(std::size_t, std::size_t)>& abs_value, double gamma,
                         const Grid& grid, PairScheme scheme);

/// Hölder reports of every component in one sweep: x̂ (exponent β), each X^(i), each 𝐗^(jk).
struct ComponentNorms {
  HolderReport xhat;
  std::vector<HolderReport> level1;
  std::vector<HolderReport> level2;
};
ComponentNorms component_norms(const PartialRoughPath& prp, PairScheme scheme = PairScheme::Auto);
/// Same sweep on the componentwise difference a − b.
ComponentNorms difference_norms(const PartialRoughPath& a, const PartialRoughPath& b,
                                PairScheme scheme = PairScheme::Auto);

/// ‖X̂‖_β + Σ_i ‖X^(i)‖^{1/(|i|+1)} + Σ_jk ‖𝐗^(jk)‖^{1/(|j+k|+2)}
double homogeneous_norm(const PartialRoughPath& prp, PairScheme scheme = PairScheme::Auto);
double homogeneous_norm(const IndexConfig& config, const ComponentNorms& norms);

/// Sum of the Hölder norms of componentwise differences. Throws DomainError on mismatch.
double distance_ab(const PartialRoughPath& a, const PartialRoughPath& b, PairScheme scheme = PairScheme::Auto);

/// ‖Y1 − Z1‖_α + ‖Y2 − Z2‖_2α on grid pairs.
double distance_alpha(const RoughPath& a, const RoughPath& b, double alpha, PairScheme scheme = PairScheme::Auto);
struct RoughPathNorms {
  HolderReport level1;
  HolderReport level2;
};
RoughPathNorms rough_path_norms(const RoughPath& rp, double alpha, PairScheme scheme = PairScheme::Auto);

using Triple = std::array<std::size_t, 3>;

/// Uniformly drawn node triples s <= u <= t.
std::vector<Triple> random_triples(const Grid& grid, std::size_t count, std::uint64_t seed);

struct ChenDefectReport {
  double chen1 = 0.0;  // max |lhs − rhs| / (1 + |lhs|) over triples and i ∈ I
  double chen2 = 0.0;  // same over (j,k) ∈ J
  std::size_t triples = 0;
};

/// Throws DomainError for an empty triple list.
ChenDefectReport chen_defect_report(const PartialRoughPath& prp, const std::vector<Triple>& triples);

/// Max relative gap between stored anchored levels and the discrete lift rebuilt from
/// x̂, X^(0) and the cell values of 𝐗^(00). Zero to rounding for discrete lifts; a
/// corrupted entry shows up at its own magnitude.
double lift_consistency_defect(const PartialRoughPath& prp);

/// Standard level-2 Chen defects of a rough path on the triples.
struct RoughPathChenReport {
  double level1 = 0.0;
  double level2 = 0.0;
};
RoughPathChenReport rough_path_chen_report(const RoughPath& rp, const std::vector<Triple>& triples);

}  // namespace parpath
