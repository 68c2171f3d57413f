#include "parpath/integrate.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "parpath/error.hpp"

namespace parpath {

namespace {

double euclid(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Cell contributions of the compensated sums. ∂^i f(x̂_q) is computed once per
// node and shared by every partition level.
class CellEvaluator {
 public:
  CellEvaluator(const PartialRoughPath& prp, const VolFunction& f) : prp_(prp), f_(f) {
    const auto& cfg = prp.config();
    if (f.dim() != cfg.e()) throw DomainError("integrand dimension differs from e");
    width_ = cfg.level1().size();
    kpos_.reserve(cfg.level2().size());
    for (const auto& jk : cfg.level2()) kpos_.push_back(cfg.require(jk.k));
    buf1_.resize(width_ * cfg.d());
    buf2_.resize(cfg.level2().size() * cfg.d() * cfg.d());
    table_.resize(prp.grid().size() * width_);
    ready_.assign(prp.grid().size(), 0);
  }

  // Y1 cell contribution on [a, b], added into out (d).
  void level1(std::size_t a, std::size_t b, double* out) {
    const std::size_t d = prp_.config().d();
    const double* df = partials(a);
    prp_.level1_increments(a, b, buf1_);
    for (std::size_t pos = 0; pos < width_; ++pos)
      for (std::size_t c = 0; c < d; ++c) out[c] += df[pos] * buf1_[pos * d + c];
  }

  // Σ ∂^j f ∂^k f 𝐗^(jk) on [a, b], added into out (d×d).
  void level2(std::size_t a, std::size_t b, double* out) {
    const auto& cfg = prp_.config();
    const std::size_t dd = cfg.d() * cfg.d();
    const double* df = partials(a);
    prp_.level12_increments(a, b, buf1_, buf2_);
    for (std::size_t pos = 0; pos < cfg.level2().size(); ++pos) {
      const double c = df[cfg.pair_first(pos)] * df[kpos_[pos]];
      for (std::size_t ab = 0; ab < dd; ++ab) out[ab] += c * buf2_[pos * dd + ab];
    }
  }

 private:
  const double* partials(std::size_t q) {
    double* row = table_.data() + q * width_;
    if (!ready_[q]) {
      f_.partials(prp_.config().level1(), prp_.xhat(q), {row, width_});
      ready_[q] = 1;
    }
    return row;
  }

  const PartialRoughPath& prp_;
  const VolFunction& f_;
  std::size_t width_ = 0;
  std::vector<std::size_t> kpos_;
  std::vector<double> buf1_;
  std::vector<double> buf2_;
  std::vector<double> table_;
  std::vector<unsigned char> ready_;
};

void check_partition(const Grid& grid, const std::vector<std::size_t>& partition, std::size_t s, std::size_t t) {
  if (t >= grid.size() || s > t) throw DomainError("integration interval is not an ordered pair of grid nodes");
  if (partition.empty() || partition.front() != s || partition.back() != t)
    throw DomainError("partition must start at s and end at t");
  for (std::size_t k = 1; k < partition.size(); ++k)
    if (partition[k] <= partition[k - 1]) throw DomainError("partition must be strictly increasing");
}

std::vector<double> sum_level1(CellEvaluator& cells, std::size_t d, const std::vector<std::size_t>& partition) {
  std::vector<double> out(d, 0.0);
  for (std::size_t p = 1; p < partition.size(); ++p) cells.level1(partition[p - 1], partition[p], out.data());
  return out;
}

std::vector<double> sum_level2(CellEvaluator& cells, const RoughPath& y1_fine, const std::vector<std::size_t>& partition) {
  const std::size_t d = y1_fine.d();
  const std::size_t s = partition.front();
  std::vector<double> out(d * d, 0.0);
  for (std::size_t p = 1; p < partition.size(); ++p) {
    const std::size_t a = partition[p - 1], b = partition[p];
    const auto ys = y1_fine.anchored_level1(s);
    const auto ya = y1_fine.anchored_level1(a);
    const auto yb = y1_fine.anchored_level1(b);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] += (ya[i] - ys[i]) * (yb[j] - ya[j]);
    cells.level2(a, b, out.data());
  }
  return out;
}

}  // namespace

std::vector<double> compensated_sum_level1(const PartialRoughPath& prp, const VolFunction& f,
                                           const std::vector<std::size_t>& partition, std::size_t s,
                                           std::size_t t) {
  check_partition(prp.grid(), partition, s, t);
  CellEvaluator cells(prp, f);
  return sum_level1(cells, prp.config().d(), partition);
}

std::vector<double> compensated_sum_level2(const PartialRoughPath& prp, const VolFunction& f,
                                           const std::vector<std::size_t>& partition, std::size_t s, std::size_t t,
                                           const RoughPath& y1_fine) {
  check_partition(prp.grid(), partition, s, t);
  if (!(y1_fine.grid() == prp.grid()) || y1_fine.d() != prp.config().d())
    throw DomainError("level-1 integral lives on a different grid");
  CellEvaluator cells(prp, f);
  return sum_level2(cells, y1_fine, partition);
}

int finest_level(const Grid& grid) {
  int k = 0;
  while ((grid.N() >> k) > 1) ++k;
  return k;
}

std::vector<std::size_t> dyadic_partition(const Grid& grid, int level) {
  if (level < 0) throw DomainError("negative refinement level");
  const std::size_t N = grid.N();
  const std::size_t stride = level >= 63 ? 1 : std::max<std::size_t>(1, N >> level);
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < N; q += stride) out.push_back(q);
  out.push_back(N);
  return out;
}

namespace {

struct Acceptance {
  int level;
  std::string reason;
  bool warning;
};

// Runs value(k) for k = 0..L until the relative Cauchy criterion holds.
Acceptance refine(int L, double tol, const std::function<std::vector<double>(int)>& value,
                  std::vector<double>& firsts, std::vector<double>& diffs) {
  std::vector<double> prev;
  for (int k = 0; k <= L; ++k) {
    auto cur = value(k);
    firsts.push_back(cur.empty() ? 0.0 : cur[0]);
    if (k == 0) {
      diffs.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      std::vector<double> delta(cur.size());
      for (std::size_t c = 0; c < cur.size(); ++c) delta[c] = cur[c] - prev[c];
      const double diff = euclid(delta);
      diffs.push_back(diff);
      if (diff < tol * (1.0 + euclid(prev))) return {k, "cauchy_tol", false};
    }
    prev = std::move(cur);
  }
  bool warn = false;
  const std::size_t n = diffs.size();
  if (n >= 4) warn = !(diffs[n - 1] < diffs[n - 2] && diffs[n - 2] < diffs[n - 3]);
  return {L, "finest_grid", warn};
}

}  // namespace

IntegrationResult integrate(const PartialRoughPath& prp, const VolFunction& f, double tol) {
  if (!(tol >= 0.0)) throw ConfigError("integrate.tol must be nonnegative");
  const auto& grid = prp.grid();
  const std::size_t N = grid.N(), d = prp.config().d(), dd = d * d;
  const int L = finest_level(grid);
  CellEvaluator cells(prp, f);

  std::vector<double> first1, diff1, first2, diff2;
  const auto acc1 = refine(
      L, tol,
      [&](int k) { return sum_level1(cells, d, dyadic_partition(grid, k)); }, first1, diff1);

  // Anchored level 1 on the accepted partition with a partial last cell per node.
  std::vector<double> y1((N + 1) * d, 0.0);
  {
    const auto part = dyadic_partition(grid, acc1.level);
    std::size_t p = 0;
    for (std::size_t q = 1; q <= N; ++q) {
      const std::size_t a = part[p];
      for (std::size_t c = 0; c < d; ++c) y1[q * d + c] = y1[a * d + c];
      cells.level1(a, q, &y1[q * d]);
      if (p + 1 < part.size() && q == part[p + 1]) ++p;
    }
  }
  RoughPath y1_fine(grid, d, y1, std::vector<double>((N + 1) * dd, 0.0));

  const auto acc2 = refine(
      L, tol,
      [&](int k) { return sum_level2(cells, y1_fine, dyadic_partition(grid, k)); }, first2,
      diff2);

  std::vector<double> y2((N + 1) * dd, 0.0);
  {
    const auto part = dyadic_partition(grid, acc2.level);
    std::size_t p = 0;
    for (std::size_t q = 1; q <= N; ++q) {
      const std::size_t a = part[p];
      double* out = &y2[q * dd];
      for (std::size_t ab = 0; ab < dd; ++ab) out[ab] = y2[a * dd + ab];
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out[i * d + j] += y1[a * d + i] * (y1[q * d + j] - y1[a * d + j]);
      cells.level2(a, q, out);
      if (p + 1 < part.size() && q == part[p + 1]) ++p;
    }
  }

  ConvergenceTrace trace;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::size_t rows = std::max(first1.size(), first2.size());
  for (std::size_t k = 0; k < rows; ++k) {
    const auto cells_k = dyadic_partition(grid, static_cast<int>(k)).size() - 1;
    trace.levels.push_back({static_cast<int>(k), cells_k, k < first1.size() ? first1[k] : nan,
                            k < first2.size() ? first2[k] : nan, k < diff1.size() ? diff1[k] : nan,
                            k < diff2.size() ? diff2[k] : nan});
  }
  trace.accepted_level1 = acc1.level;
  trace.accepted_level2 = acc2.level;
  trace.stop_reason1 = acc1.reason;
  trace.stop_reason2 = acc2.reason;
  trace.warning = acc1.warning || acc2.warning;
  return {RoughPath(grid, d, std::move(y1), std::move(y2)), std::move(trace)};
}

double riemann_zeta(double s) {
  if (!(s > 1.0)) throw DomainError("zeta requires s > 1");
  constexpr int Nterms = 64;
  double sum = 0.0;
  for (int k = Nterms - 1; k >= 1; --k) sum += std::pow(k, -s);
  const double N = Nterms;
  double tail = std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s);
  // B_{2j}/(2j)! s(s+1)...(s+2j−2) N^{−s−2j+1}
  static constexpr double bern[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
  double rising = s;  // s(s+1)...(s+2j−2)
  double fact = 2.0;  // (2j)!
  for (int j = 1; j <= 7; ++j) {
    tail += bern[j - 1] / fact * rising * std::pow(N, -s - 2 * j + 1);
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    fact *= (2 * j + 1) * (2 * j + 2);
  }
  return sum + tail;
}

BoundConstants theoretical_bounds(const IndexConfig& config, double M) {
  if (!(M >= 0.0)) throw DomainError("norm bound M must be nonnegative");
  const double n = config.n(), m = config.m();
  const double e = static_cast<double>(config.e());
  const double a = config.alpha(), b = config.beta(), T = config.T();
  const double s1 = (n + 1) * b + a;
  const double s2 = (m + 1) * b + 2 * a;
  assert(s1 > 1.0 && s2 > 1.0);
  if (!(s1 > 1.0 && s2 > 1.0)) throw NumericalError("index sets are not maximal");
  const double z1 = std::pow(2.0, s1) * riemann_zeta(s1);
  const double z2 = std::pow(2.0, s2) * riemann_zeta(s2);
  BoundConstants c{};
  c.C1 = std::pow(n + 1, 2 * e) * std::pow(1 + M, n + 2) * std::pow(1 + T, (n + 1) * b) * (1 + z1);
  c.C2_tilde = 2 * std::pow(1 + n + m, 4 * e) * std::pow(1 + M, m + 3) * std::pow(1 + T, (2 * n - m - 1) * b);
  c.C2 = std::pow(1 + m, 2 * e) * M * std::pow(1 + T, m * b) +
         (c.C2_tilde + 2 * c.C1 * c.C1 * std::pow(T, (n - m) * b)) * z2;
  c.C3 = std::pow(1 + n, 2 * e + 1) * std::pow(1 + T, (n + 1) * b) *
         (1 + (3 * e + 2) * std::pow(1 + M, n + 2) * z1);
  c.C4_tilde = (15 * e + 7) * std::pow(1 + n + m, 3 * e) * std::pow(1 + M, m + 3) * std::pow(1 + T, (2 * n - m) * b);
  c.C4 = std::pow(1 + m, 2 * e) * (1 + 2 * e * M) * std::pow(1 + T, (m + 1) * b) +
         (1 + std::pow(T, (n - m) * b)) * (c.C4_tilde + 4 * c.C1 * c.C3) * z2;
  return c;
}

double estimate_k(const std::vector<const PartialRoughPath*>& prps, const VolFunction& f) {
  if (prps.empty()) throw DomainError("estimate_k needs at least one path");
  const auto& cfg = prps.front()->config();
  const std::size_t e = cfg.e();
  const auto indices = enumerate_degree_leq(e, cfg.n() + 2);
  std::vector<double> lo(e, std::numeric_limits<double>::infinity()), hi(e, -std::numeric_limits<double>::infinity());
  double K = 0.0;
  for (const auto* prp : prps) {
    for (std::size_t q = 0; q < prp->grid().size(); ++q) {
      const auto x = prp->xhat(q);
      for (std::size_t l = 0; l < e; ++l) {
        lo[l] = std::min(lo[l], x[l]);
        hi[l] = std::max(hi[l], x[l]);
      }
      for (const auto& i : indices) K = std::max(K, std::abs(f.partial(i, x)));
    }
  }
  std::vector<double> corner(e);
  for (std::size_t mask = 0; mask < (std::size_t{1} << e); ++mask) {
    for (std::size_t l = 0; l < e; ++l) corner[l] = (mask >> l) & 1 ? hi[l] : lo[l];
    for (const auto& i : indices) K = std::max(K, std::abs(f.partial(i, corner)));
  }
  return 1.1 * K;
}

double estimate_k(const PartialRoughPath& prp, const VolFunction& f) { return estimate_k({&prp}, f); }

namespace {
double norm_bound(const PartialRoughPath& prp, PairScheme scheme) {
  const auto norms = component_norms(prp, scheme);
  double M = homogeneous_norm(prp.config(), norms);
  M = std::max(M, norms.xhat.sup_ratio);
  for (const auto& r : norms.level1) M = std::max(M, r.sup_ratio);
  for (const auto& r : norms.level2) M = std::max(M, r.sup_ratio);
  return M;
}
}  // namespace

BoundCheck check_integral_bounds(const PartialRoughPath& prp, const VolFunction& f, const RoughPath& integral,
                                 PairScheme scheme) {
  BoundCheck r;
  r.K = estimate_k(prp, f);
  r.M = norm_bound(prp, scheme);
  r.constants = theoretical_bounds(prp.config(), r.M);
  const auto norms = rough_path_norms(integral, prp.config().alpha(), scheme);
  r.level1_ratio = norms.level1.sup_ratio / (r.K * r.constants.C1);
  r.level2_ratio = norms.level2.sup_ratio / (r.K * r.K * r.constants.C2);
  return r;
}

LipschitzReport lipschitz_ratio(const PartialRoughPath& a, const PartialRoughPath& b, const VolFunction& f,
                                double tol, PairScheme scheme) {
  LipschitzReport r;
  r.d_ab = distance_ab(a, b, scheme);
  const auto ia = integrate(a, f, tol);
  const auto ib = integrate(b, f, tol);
  const double alpha = a.config().alpha();
  r.d_alpha = distance_alpha(ia.path, ib.path, alpha, scheme);
  if (r.d_ab == 0.0) {
    if (r.d_alpha != 0.0) throw NumericalError("identical partial rough paths produced different integrals");
    r.ratio = 0.0;
  } else {
    r.ratio = r.d_alpha / r.d_ab;
  }
  r.K = estimate_k({&a, &b}, f);
  r.M = std::max(norm_bound(a, scheme), norm_bound(b, scheme));
  const auto c = theoretical_bounds(a.config(), r.M);
  r.bound = r.K * (c.C3 + r.K * c.C4);
  return r;
}

}  // namespace parpath
