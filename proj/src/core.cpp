#include "parpath/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "parpath/error.hpp"

namespace parpath {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int v : entries_)
    if (v < 0) throw DomainError("multi-index entries must be nonnegative");
}

MultiIndex MultiIndex::zero(std::size_t order) { return MultiIndex(std::vector<int>(order, 0)); }

MultiIndex MultiIndex::unit(std::size_t order, std::size_t axis) {
  std::vector<int> v(order, 0);
  v.at(axis) = 1;
  return MultiIndex(std::move(v));
}

int MultiIndex::degree() const noexcept {
  int s = 0;
  for (int v : entries_) s += v;
  return s;
}

double MultiIndex::factorial() const noexcept {
  double f = 1.0;
  for (int v : entries_)
    for (int k = 2; k <= v; ++k) f *= k;
  return f;
}

bool MultiIndex::leq(const MultiIndex& other) const {
  if (other.order() != order()) throw DomainError("multi-index order mismatch");
  for (std::size_t l = 0; l < order(); ++l)
    if (entries_[l] > other.entries_[l]) return false;
  return true;
}

double MultiIndex::monomial(std::span<const double> x) const {
  if (x.size() != order()) throw DomainError("monomial: dimension mismatch");
  double r = 1.0;
  for (std::size_t l = 0; l < order(); ++l)
    for (int k = 0; k < entries_[l]; ++k) r *= x[l];
  return r;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.order() != order()) throw DomainError("multi-index order mismatch");
  std::vector<int> v(entries_);
  for (std::size_t l = 0; l < v.size(); ++l) v[l] += other.entries_[l];
  return MultiIndex(std::move(v));
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (!other.leq(*this)) throw DomainError("multi-index difference requires other <= this");
  std::vector<int> v(entries_);
  for (std::size_t l = 0; l < v.size(); ++l) v[l] -= other.entries_[l];
  return MultiIndex(std::move(v));
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t l = 0; l < entries_.size(); ++l) os << (l ? "," : "") << entries_[l];
  os << ')';
  return os.str();
}

std::string IndexPair::to_string() const { return j.to_string() + k.to_string(); }

namespace {

bool graded_less(const MultiIndex& a, const MultiIndex& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  return a.entries() > b.entries();  // (1,0) before (0,1)
}

void enumerate_box(const std::vector<int>& bounds, std::size_t l, std::vector<int>& cur,
                   std::vector<MultiIndex>& out) {
  if (l == bounds.size()) {
    out.emplace_back(cur);
    return;
  }
  for (int v = 0; v <= bounds[l]; ++v) {
    cur[l] = v;
    enumerate_box(bounds, l + 1, cur, out);
  }
  cur[l] = 0;
}

}  // namespace

std::vector<MultiIndex> enumerate_leq(const MultiIndex& i) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(i.order(), 0);
  enumerate_box(i.entries(), 0, cur, out);
  std::sort(out.begin(), out.end(), graded_less);
  return out;
}

std::vector<MultiIndex> enumerate_degree_leq(std::size_t order, int max_degree) {
  std::vector<MultiIndex> out;
  if (max_degree < 0) return out;
  std::vector<int> cur(order, 0);
  enumerate_box(std::vector<int>(order, max_degree), 0, cur, out);
  std::erase_if(out, [&](const MultiIndex& i) { return i.degree() > max_degree; });
  std::sort(out.begin(), out.end(), graded_less);
  return out;
}

IndexConfig IndexConfig::build(double alpha, double beta, std::size_t e, std::size_t d, double T) {
  if (!(alpha > 1.0 / 3.0 && alpha <= 0.5))
    throw ConfigError("alpha must lie in (1/3, 1/2], got " + std::to_string(alpha));
  if (!(beta > 0.0 && beta < 0.5)) throw ConfigError("beta must lie in (0, 1/2), got " + std::to_string(beta));
  if (e < 1) throw ConfigError("dimension e must be >= 1");
  if (d < 1) throw ConfigError("dimension d must be >= 1");
  if (!(T > 0.0)) throw ConfigError("horizon T must be positive");

  IndexConfig c;
  c.alpha_ = alpha;
  c.beta_ = beta;
  c.e_ = e;
  c.d_ = d;
  c.T_ = T;
  // The tiny slack keeps boundary cases such as |i| beta + alpha == 1 inside I.
  constexpr double slack = 1e-12;
  c.n_ = static_cast<int>(std::floor((1.0 - alpha) / beta + slack));
  c.m_ = static_cast<int>(std::floor((1.0 - 2.0 * alpha) / beta + slack));
  c.level1_ = enumerate_degree_leq(e, c.n_);

  const auto pairs_base = enumerate_degree_leq(e, c.m_);
  for (const auto& j : pairs_base)
    for (const auto& k : pairs_base)
      if (j.degree() + k.degree() <= c.m_) c.level2_.push_back({j, k});
  std::stable_sort(c.level2_.begin(), c.level2_.end(), [](const IndexPair& a, const IndexPair& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    if (a.j != b.j) return graded_less(a.j, b.j);
    return graded_less(a.k, b.k);
  });

  c.level1_terms_.resize(c.level1_.size());
  for (std::size_t pos = 0; pos < c.level1_.size(); ++pos) {
    const auto& i = c.level1_[pos];
    for (const auto& p : enumerate_leq(i)) {
      if (p == i) continue;
      const auto pw = i - p;
      c.level1_terms_[pos].push_back({c.require(p), pw, 1.0 / pw.factorial()});
    }
  }

  c.cross_terms_.resize(c.level2_.size());
  c.level2_terms_.resize(c.level2_.size());
  c.pair_first_.resize(c.level2_.size());
  for (std::size_t pos = 0; pos < c.level2_.size(); ++pos) {
    const auto& [j, k] = c.level2_[pos];
    c.pair_first_[pos] = c.require(j);
    for (const auto& q : enumerate_leq(k)) {
      const auto pw = k - q;
      c.cross_terms_[pos].push_back({c.require(q), pw, 1.0 / pw.factorial()});
    }
    for (const auto& p : enumerate_leq(j))
      for (const auto& q : enumerate_leq(k)) {
        if (p == j && q == k) continue;
        const auto jp = j - p;
        const auto kq = k - q;
        c.level2_terms_[pos].push_back(
            {c.require(IndexPair{p, q}), jp + kq, 1.0 / (jp.factorial() * kq.factorial())});
      }
  }
  return c;
}

std::optional<std::size_t> IndexConfig::position(const MultiIndex& i) const {
  auto it = std::find(level1_.begin(), level1_.end(), i);
  if (it == level1_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - level1_.begin());
}

std::optional<std::size_t> IndexConfig::position(const IndexPair& jk) const {
  auto it = std::find(level2_.begin(), level2_.end(), jk);
  if (it == level2_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - level2_.begin());
}

std::size_t IndexConfig::require(const MultiIndex& i) const {
  if (i.order() != e_) throw DomainError("multi-index " + i.to_string() + " has wrong order");
  auto p = position(i);
  if (!p) throw DomainError("multi-index " + i.to_string() + " is not in I");
  return *p;
}

std::size_t IndexConfig::require(const IndexPair& jk) const {
  if (jk.j.order() != e_ || jk.k.order() != e_)
    throw DomainError("index pair " + jk.to_string() + " has wrong order");
  auto p = position(jk);
  if (!p) throw DomainError("index pair " + jk.to_string() + " is not in J");
  return *p;
}

double IndexConfig::level1_exponent(std::size_t pos) const {
  return level1_.at(pos).degree() * beta_ + alpha_;
}

double IndexConfig::level2_exponent(std::size_t pos) const {
  return level2_.at(pos).degree() * beta_ + 2.0 * alpha_;
}

bool IndexConfig::same_structure(const IndexConfig& other) const {
  return alpha_ == other.alpha_ && beta_ == other.beta_ && e_ == other.e_ && d_ == other.d_ &&
         T_ == other.T_;
}

Grid::Grid(double T, std::size_t N) : T_(T), N_(N) {
  if (!(T > 0.0)) throw ConfigError("grid horizon T must be positive");
  if (N < 2) throw ConfigError("grid needs N >= 2 steps");
}

PartialRoughPath::PartialRoughPath(IndexConfig config, Grid grid, std::vector<double> xhat,
                                   std::vector<double> level1, std::vector<double> level2)
    : config_(std::move(config)),
      grid_(grid),
      xhat_(std::move(xhat)),
      level1_(std::move(level1)),
      level2_(std::move(level2)) {
  const std::size_t nodes = grid_.size();
  const std::size_t d = config_.d();
  if (xhat_.size() != nodes * config_.e()) throw DomainError("xhat array has wrong size");
  if (level1_.size() != config_.level1().size() * nodes * d) throw DomainError("level-1 array has wrong size");
  if (level2_.size() != config_.level2().size() * nodes * d * d)
    throw DomainError("level-2 array has wrong size");
}

std::span<const double> PartialRoughPath::xhat(std::size_t q) const {
  const std::size_t e = config_.e();
  return {xhat_.data() + q * e, e};
}

std::span<const double> PartialRoughPath::anchored_level1(std::size_t pos, std::size_t q) const {
  const std::size_t d = config_.d();
  return {level1_.data() + (pos * grid_.size() + q) * d, d};
}

std::span<const double> PartialRoughPath::anchored_level2(std::size_t pos, std::size_t q) const {
  const std::size_t dd = config_.d() * config_.d();
  return {level2_.data() + (pos * grid_.size() + q) * dd, dd};
}

void PartialRoughPath::check_pair(std::size_t s, std::size_t t) const {
  if (t >= grid_.size()) throw DomainError("time index beyond grid");
  if (s > t) throw DomainError("reconstruction requires s <= t");
}

// table[l*(n+1) + a] = x̂_s[l]^a
void PartialRoughPath::monomials(std::size_t s, std::vector<double>& table) const {
  const std::size_t e = config_.e();
  const std::size_t width = static_cast<std::size_t>(config_.n()) + 1;
  table.assign(e * width, 1.0);
  auto x = xhat(s);
  for (std::size_t l = 0; l < e; ++l)
    for (std::size_t a = 1; a < width; ++a) table[l * width + a] = table[l * width + a - 1] * x[l];
}

double PartialRoughPath::monomial(const std::vector<double>& table, const MultiIndex& power) const {
  const std::size_t width = static_cast<std::size_t>(config_.n()) + 1;
  double r = 1.0;
  for (std::size_t l = 0; l < power.order(); ++l) r *= table[l * width + static_cast<std::size_t>(power[l])];
  return r;
}

void PartialRoughPath::level1_increments(std::size_t s, std::size_t t, std::span<double> out) const {
  check_pair(s, t);
  const std::size_t d = config_.d();
  const std::size_t count = config_.level1().size();
  if (out.size() != count * d) throw DomainError("level1_increments: output has wrong size");
  if (s == t) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  thread_local std::vector<double> table;
  monomials(s, table);
  for (std::size_t pos = 0; pos < count; ++pos) {
    auto at = anchored_level1(pos, t);
    auto as = anchored_level1(pos, s);
    double* v = out.data() + pos * d;
    for (std::size_t a = 0; a < d; ++a) v[a] = at[a] - as[a];
    for (const auto& term : config_.level1_terms(pos)) {
      const double c = term.coefficient * monomial(table, term.power);
      const double* xp = out.data() + term.p * d;
      for (std::size_t a = 0; a < d; ++a) v[a] -= c * xp[a];
    }
  }
}

Increments PartialRoughPath::increments(std::size_t s, std::size_t t) const {
  check_pair(s, t);
  const std::size_t e = config_.e();
  const std::size_t d = config_.d();
  Increments inc;
  inc.xhat.resize(e);
  auto xs = xhat(s);
  auto xt = xhat(t);
  for (std::size_t l = 0; l < e; ++l) inc.xhat[l] = xt[l] - xs[l];
  inc.level1.resize(config_.level1().size() * d);
  inc.level2.resize(config_.level2().size() * d * d);
  level12_increments(s, t, inc.level1, inc.level2);
  return inc;
}

void PartialRoughPath::level12_increments(std::size_t s, std::size_t t, std::span<double> level1,
                                          std::span<double> level2) const {
  check_pair(s, t);
  const std::size_t d = config_.d();
  const std::size_t dd = d * d;
  if (level2.size() != config_.level2().size() * dd) throw DomainError("level12_increments: output has wrong size");
  level1_increments(s, t, level1);
  if (s == t) {
    std::fill(level2.begin(), level2.end(), 0.0);
    return;
  }
  thread_local std::vector<double> table;
  monomials(s, table);
  for (std::size_t pos = 0; pos < config_.level2().size(); ++pos) {
    auto bt = anchored_level2(pos, t);
    auto bs = anchored_level2(pos, s);
    double* v = level2.data() + pos * dd;
    for (std::size_t ab = 0; ab < dd; ++ab) v[ab] = bt[ab] - bs[ab];
    auto aj = anchored_level1(config_.pair_first(pos), s);
    for (const auto& term : config_.cross_terms(pos)) {
      const double c = term.coefficient * monomial(table, term.power);
      const double* xq = level1.data() + term.q * d;
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) v[a * d + b] -= c * aj[a] * xq[b];
    }
    for (const auto& term : config_.level2_terms(pos)) {
      const double c = term.coefficient * monomial(table, term.power);
      const double* bpq = level2.data() + term.pq * dd;
      for (std::size_t ab = 0; ab < dd; ++ab) v[ab] -= c * bpq[ab];
    }
  }
}

std::vector<double> PartialRoughPath::reconstruct_level1(const MultiIndex& i, std::size_t s,
                                                         std::size_t t) const {
  const std::size_t pos = config_.require(i);
  check_pair(s, t);
  const std::size_t d = config_.d();
  std::vector<double> all(config_.level1().size() * d);
  level1_increments(s, t, all);
  return {all.begin() + static_cast<std::ptrdiff_t>(pos * d),
          all.begin() + static_cast<std::ptrdiff_t>((pos + 1) * d)};
}

std::vector<double> PartialRoughPath::reconstruct_level2(const MultiIndex& j, const MultiIndex& k,
                                                         std::size_t s, std::size_t t) const {
  const std::size_t pos = config_.require(IndexPair{j, k});
  const auto inc = increments(s, t);
  const std::size_t dd = config_.d() * config_.d();
  return {inc.level2.begin() + static_cast<std::ptrdiff_t>(pos * dd),
          inc.level2.begin() + static_cast<std::ptrdiff_t>((pos + 1) * dd)};
}

PartialRoughPath build_discrete_lift(const IndexConfig& config, const Grid& grid,
                                     std::span<const double> xhat_nodes, std::span<const double> dX,
                                     std::span<const double> cell_level2) {
  const std::size_t N = grid.N();
  const std::size_t nodes = grid.size();
  const std::size_t e = config.e();
  const std::size_t d = config.d();
  const std::size_t dd = d * d;
  if (xhat_nodes.size() != nodes * e) throw DomainError("build_discrete_lift: xhat has wrong size");
  if (dX.size() != N * d) throw DomainError("build_discrete_lift: increments have wrong size");
  if (!cell_level2.empty() && cell_level2.size() != N * dd)
    throw DomainError("build_discrete_lift: cell level-2 array has wrong size");
  for (std::size_t l = 0; l < e; ++l)
    if (xhat_nodes[l] != 0.0) throw DomainError("build_discrete_lift: x̂ must start at 0");

  const auto& I = config.level1();
  const auto& J = config.level2();
  std::vector<double> level1(I.size() * nodes * d, 0.0);
  std::vector<double> level2(J.size() * nodes * dd, 0.0);

  std::vector<double> coef1(I.size());  // x̂_q^i / i!
  std::vector<double> inv_fact(I.size());
  for (std::size_t pos = 0; pos < I.size(); ++pos) inv_fact[pos] = 1.0 / I[pos].factorial();

  for (std::size_t q = 0; q < N; ++q) {
    auto x = xhat_nodes.subspan(q * e, e);
    for (std::size_t pos = 0; pos < I.size(); ++pos) coef1[pos] = I[pos].monomial(x) * inv_fact[pos];
    const double* inc = dX.data() + q * d;
    for (std::size_t pos = 0; pos < I.size(); ++pos) {
      const double* prev = level1.data() + (pos * nodes + q) * d;
      double* next = level1.data() + (pos * nodes + q + 1) * d;
      for (std::size_t a = 0; a < d; ++a) next[a] = prev[a] + coef1[pos] * inc[a];
    }
    for (std::size_t pos = 0; pos < J.size(); ++pos) {
      const std::size_t jpos = config.pair_first(pos);
      const std::size_t kpos = config.require(J[pos].k);
      const double ck = coef1[kpos];
      const double* aj = level1.data() + (jpos * nodes + q) * d;
      const double* prev = level2.data() + (pos * nodes + q) * dd;
      double* next = level2.data() + (pos * nodes + q + 1) * dd;
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
          double v = aj[a] * inc[b];
          if (!cell_level2.empty()) v += coef1[jpos] * cell_level2[q * dd + a * d + b];
          next[a * d + b] = prev[a * d + b] + ck * v;
        }
    }
  }
  return PartialRoughPath(config, grid, std::vector<double>(xhat_nodes.begin(), xhat_nodes.end()),
                          std::move(level1), std::move(level2));
}

PartialRoughPath dilate(const PartialRoughPath& prp, double lambda) {
  const auto& cfg = prp.config();
  const std::size_t nodes = prp.grid().size();
  const std::size_t d = cfg.d();
  auto xhat = prp.raw_xhat();
  for (double& v : xhat) v *= lambda;
  auto level1 = prp.raw_level1();
  for (std::size_t pos = 0; pos < cfg.level1().size(); ++pos) {
    const double f = std::pow(lambda, cfg.level1()[pos].degree() + 1);
    for (std::size_t k = 0; k < nodes * d; ++k) level1[pos * nodes * d + k] *= f;
  }
  auto level2 = prp.raw_level2();
  for (std::size_t pos = 0; pos < cfg.level2().size(); ++pos) {
    const double f = std::pow(lambda, cfg.level2()[pos].degree() + 2);
    for (std::size_t k = 0; k < nodes * d * d; ++k) level2[pos * nodes * d * d + k] *= f;
  }
  return PartialRoughPath(cfg, prp.grid(), std::move(xhat), std::move(level1), std::move(level2));
}

}  // namespace parpath
