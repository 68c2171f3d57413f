#pragma once

// Multi-index combinatorics, the index sets I and J, uniform time grids and the
// anchored partial-rough-path container.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace parpath {

/// Element of Z^e_+.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);
  static MultiIndex zero(std::size_t order);
  static MultiIndex unit(std::size_t order, std::size_t axis);

  std::size_t order() const noexcept { return entries_.size(); }
  int operator[](std::size_t l) const { return entries_[l]; }
  const std::vector<int>& entries() const noexcept { return entries_; }

  /// |i|
  int degree() const noexcept;
  /// i!
  double factorial() const noexcept;
  bool is_zero() const noexcept { return degree() == 0; }
  /// Componentwise partial order.
  bool leq(const MultiIndex& other) const;
  /// x^i = prod_l x_l^{i_l}
  double monomial(std::span<const double> x) const;

  MultiIndex operator+(const MultiIndex& other) const;
  /// Requires other.leq(*this).
  MultiIndex operator-(const MultiIndex& other) const;

  std::string to_string() const;

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

 private:
  std::vector<int> entries_;
};

/// All p with p <= i, in graded order (degree, then lexicographic).
std::vector<MultiIndex> enumerate_leq(const MultiIndex& i);

/// All multi-indices of the given order with degree <= max_degree, graded order.
std::vector<MultiIndex> enumerate_degree_leq(std::size_t order, int max_degree);

struct IndexPair {
  MultiIndex j;
  MultiIndex k;
  int degree() const { return j.degree() + k.degree(); }
  std::string to_string() const;
  auto operator<=>(const IndexPair&) const = default;
  bool operator==(const IndexPair&) const = default;
};

/// Hölder exponents (alpha, beta), dimensions and the index sets
///   I = { i : |i| beta + alpha <= 1 },  J = { (j,k) : |j+k| beta + 2 alpha <= 1 }.
/// Both sets are downward closed and stored in graded order, so every strict
/// predecessor of an element sits at a smaller position.
class IndexConfig {
 public:
  struct Level1Term {
    std::size_t p;       // position of p in I
    MultiIndex power;    // i - p
    double coefficient;  // 1/(i-p)!
  };
  struct CrossTerm {
    std::size_t q;       // position of q in I (q <= k)
    MultiIndex power;    // k - q
    double coefficient;  // 1/(k-q)!
  };
  struct Level2Term {
    std::size_t pq;      // position of (p,q) in J
    MultiIndex power;    // (j-p) + (k-q)
    double coefficient;  // 1/((j-p)!(k-q)!)
  };

  static IndexConfig build(double alpha, double beta, std::size_t e, std::size_t d = 1, double T = 1.0);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  std::size_t e() const noexcept { return e_; }
  std::size_t d() const noexcept { return d_; }
  double T() const noexcept { return T_; }
  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }

  const std::vector<MultiIndex>& level1() const noexcept { return level1_; }
  const std::vector<IndexPair>& level2() const noexcept { return level2_; }

  std::optional<std::size_t> position(const MultiIndex& i) const;
  std::optional<std::size_t> position(const IndexPair& jk) const;
  /// Throws DomainError when i is not in I.
  std::size_t require(const MultiIndex& i) const;
  std::size_t require(const IndexPair& jk) const;

  /// |i| beta + alpha
  double level1_exponent(std::size_t pos) const;
  /// |j+k| beta + 2 alpha
  double level2_exponent(std::size_t pos) const;

  /// Strict-predecessor terms of (chen1): p < i.
  const std::vector<Level1Term>& level1_terms(std::size_t pos) const { return level1_terms_[pos]; }
  /// Cross terms of (chen2): q <= k, paired with X^(j).
  const std::vector<CrossTerm>& cross_terms(std::size_t pos) const { return cross_terms_[pos]; }
  /// Strict-predecessor terms of (chen2): (p,q) < (j,k).
  const std::vector<Level2Term>& level2_terms(std::size_t pos) const { return level2_terms_[pos]; }
  /// Position of j in I for the pair at pos.
  std::size_t pair_first(std::size_t pos) const { return pair_first_[pos]; }

  bool same_structure(const IndexConfig& other) const;

 private:
  double alpha_ = 0.0;
  double beta_ = 0.0;
  std::size_t e_ = 0;
  std::size_t d_ = 0;
  double T_ = 1.0;
  int n_ = 0;
  int m_ = 0;
  std::vector<MultiIndex> level1_;
  std::vector<IndexPair> level2_;
  std::vector<std::vector<Level1Term>> level1_terms_;
  std::vector<std::vector<CrossTerm>> cross_terms_;
  std::vector<std::vector<Level2Term>> level2_terms_;
  std::vector<std::size_t> pair_first_;
};

/// Uniform grid t_q = q T / N, q = 0..N.
class Grid {
 public:
  Grid(double T, std::size_t N);
  double T() const noexcept { return T_; }
  std::size_t N() const noexcept { return N_; }
  std::size_t size() const noexcept { return N_ + 1; }
  double dt() const noexcept { return T_ / static_cast<double>(N_); }
  double node(std::size_t q) const { return T_ * static_cast<double>(q) / static_cast<double>(N_); }
  bool operator==(const Grid&) const = default;

 private:
  double T_;
  std::size_t N_;
};

/// All two-parameter values of a partial rough path for one pair (s,t).
struct Increments {
  std::vector<double> xhat;    // e
  std::vector<double> level1;  // |I| x d
  std::vector<double> level2;  // |J| x d x d
};

/// Anchored samples x̂_t = X̂_{0t}, a_i(t) = X^(i)_{0t}, b_jk(t) = 𝐗^(jk)_{0t} on grid
/// nodes. Values at arbitrary node pairs (s,t) are recovered from the modified
/// Chen relations taken at (0,s,t). Immutable after construction.
class PartialRoughPath {
 public:
  /// Layouts: xhat[q*e + l], level1[(pos*(N+1) + q)*d + a], level2[(pos*(N+1) + q)*d*d + a*d + b].
  PartialRoughPath(IndexConfig config, Grid grid, std::vector<double> xhat, std::vector<double> level1,
                   std::vector<double> level2);

  const IndexConfig& config() const noexcept { return config_; }
  const Grid& grid() const noexcept { return grid_; }

  std::span<const double> xhat(std::size_t q) const;
  std::span<const double> anchored_level1(std::size_t pos, std::size_t q) const;
  std::span<const double> anchored_level2(std::size_t pos, std::size_t q) const;

  const std::vector<double>& raw_xhat() const noexcept { return xhat_; }
  const std::vector<double>& raw_level1() const noexcept { return level1_; }
  const std::vector<double>& raw_level2() const noexcept { return level2_; }

  /// Every level at (s,t), s <= t node indices. One pass in graded order.
  Increments increments(std::size_t s, std::size_t t) const;
  /// Level-1 values only (cheaper when 𝐗 is not needed).
  void level1_increments(std::size_t s, std::size_t t, std::span<double> out) const;
  /// Both levels into caller buffers of sizes |I| d and |J| d d; no allocation.
  void level12_increments(std::size_t s, std::size_t t, std::span<double> level1, std::span<double> level2) const;

  /// X^(i)_{st}
  std::vector<double> reconstruct_level1(const MultiIndex& i, std::size_t s, std::size_t t) const;
  /// 𝐗^(jk)_{st}, row-major d x d.
  std::vector<double> reconstruct_level2(const MultiIndex& j, const MultiIndex& k, std::size_t s,
                                         std::size_t t) const;

 private:
  void check_pair(std::size_t s, std::size_t t) const;
  void monomials(std::size_t s, std::vector<double>& table) const;
  double monomial(const std::vector<double>& table, const MultiIndex& power) const;

  IndexConfig config_;
  Grid grid_;
  std::vector<double> xhat_;
  std::vector<double> level1_;
  std::vector<double> level2_;
};

/// Iterated integrals of x̂ frozen at left endpoints against increments dX:
///   a_i(t_{q+1}) = a_i(t_q) + x̂_q^i / i! dX_q
///   b_jk(t_{q+1}) = b_jk(t_q) + x̂_q^k / k! [a_j(t_q) ⊗ dX_q + x̂_q^j / j! C_q]
/// where C_q is the within-cell second level of X (row-major d x d per cell, or
/// empty for zero). Requires x̂_0 = 0. The modified Chen relations hold exactly.
PartialRoughPath build_discrete_lift(const IndexConfig& config, const Grid& grid,
                                     std::span<const double> xhat_nodes, std::span<const double> dX,
                                     std::span<const double> cell_level2 = {});

/// (α,β) dilation: x̂ → λx̂, X^(i) → λ^{|i|+1}X^(i), 𝐗^(jk) → λ^{|j+k|+2}𝐗^(jk).
PartialRoughPath dilate(const PartialRoughPath& prp, double lambda);

}  // namespace parpath
