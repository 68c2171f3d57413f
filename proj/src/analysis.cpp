#include "parpath/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "parpath/error.hpp"
#include "parpath/lift.hpp"
#include "parpath/parallel.hpp"

namespace parpath {

namespace {

double euclid(const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += v[k] * v[k];
  return std::sqrt(s);
}

double euclid_diff(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

struct Best {
  double ratio = 0.0;
  std::size_t s = 0, t = 0;
  void offer(double r, std::size_t s_, std::size_t t_) {
    if (r > ratio) {
      ratio = r;
      s = s_;
      t = t_;
    }
  }
};

// Runs eval(s, t, bests) over the scheme's pairs, parallel in s, reducing in s order.
std::vector<Best> sweep(const Grid& grid, PairScheme scheme, std::size_t components,
                        const std::function<void(std::size_t, std::size_t, std::vector<Best>&)>& eval) {
  scheme = resolve_scheme(scheme, grid);
  const std::size_t N = grid.N();
  std::vector<std::vector<Best>> per_s(N, std::vector<Best>(components));
  parallel_for(N, [&](std::size_t s) {
    auto& local = per_s[s];
    if (scheme == PairScheme::Exhaustive) {
      for (std::size_t t = s + 1; t <= N; ++t) eval(s, t, local);
    } else {
      for (std::size_t step = 1; s + step <= N; step *= 2) eval(s, s + step, local);
    }
  });
  std::vector<Best> total(components);
  for (const auto& local : per_s)
    for (std::size_t c = 0; c < components; ++c) total[c].offer(local[c].ratio, local[c].s, local[c].t);
  return total;
}

HolderReport to_report(const Best& b, double exponent, PairScheme scheme) {
  return {exponent, b.ratio, b.s, b.t, scheme};
}

ComponentNorms assemble(const IndexConfig& cfg, const std::vector<Best>& bests, PairScheme scheme) {
  ComponentNorms out;
  out.xhat = to_report(bests[0], cfg.beta(), scheme);
  for (std::size_t pos = 0; pos < cfg.level1().size(); ++pos)
    out.level1.push_back(to_report(bests[1 + pos], cfg.level1_exponent(pos), scheme));
  for (std::size_t pos = 0; pos < cfg.level2().size(); ++pos)
    out.level2.push_back(to_report(bests[1 + cfg.level1().size() + pos], cfg.level2_exponent(pos), scheme));
  return out;
}

ComponentNorms norms_impl(const PartialRoughPath& a, const PartialRoughPath* b, PairScheme scheme) {
  const auto& cfg = a.config();
  const auto& grid = a.grid();
  const std::size_t e = cfg.e(), d = cfg.d(), dd = d * d;
  const std::size_t nI = cfg.level1().size(), nJ = cfg.level2().size();
  std::vector<double> exps(1 + nI + nJ);
  exps[0] = cfg.beta();
  for (std::size_t pos = 0; pos < nI; ++pos) exps[1 + pos] = cfg.level1_exponent(pos);
  for (std::size_t pos = 0; pos < nJ; ++pos) exps[1 + nI + pos] = cfg.level2_exponent(pos);
  const double dt = grid.dt();
  const auto resolved = resolve_scheme(scheme, grid);
  auto bests = sweep(grid, resolved, exps.size(), [&](std::size_t s, std::size_t t, std::vector<Best>& local) {
    const auto ia = a.increments(s, t);
    const double h = static_cast<double>(t - s) * dt;
    const double lh = std::log(h);
    auto ratio = [&](double v, std::size_t c) { return v == 0.0 ? 0.0 : v / std::exp(exps[c] * lh); };
    if (b) {
      const auto ib = b->increments(s, t);
      local[0].offer(ratio(euclid_diff(ia.xhat.data(), ib.xhat.data(), e), 0), s, t);
      for (std::size_t pos = 0; pos < nI; ++pos)
        local[1 + pos].offer(ratio(euclid_diff(&ia.level1[pos * d], &ib.level1[pos * d], d), 1 + pos), s, t);
      for (std::size_t pos = 0; pos < nJ; ++pos)
        local[1 + nI + pos].offer(
            ratio(euclid_diff(&ia.level2[pos * dd], &ib.level2[pos * dd], dd), 1 + nI + pos), s, t);
    } else {
      local[0].offer(ratio(euclid(ia.xhat.data(), e), 0), s, t);
      for (std::size_t pos = 0; pos < nI; ++pos)
        local[1 + pos].offer(ratio(euclid(&ia.level1[pos * d], d), 1 + pos), s, t);
      for (std::size_t pos = 0; pos < nJ; ++pos)
        local[1 + nI + pos].offer(ratio(euclid(&ia.level2[pos * dd], dd), 1 + nI + pos), s, t);
    }
  });
  return assemble(cfg, bests, resolved);
}

void require_compatible(const PartialRoughPath& a, const PartialRoughPath& b) {
  if (!a.config().same_structure(b.config())) throw DomainError("partial rough paths have different index configurations");
  if (!(a.grid() == b.grid())) throw DomainError("partial rough paths live on different grids");
}

}  // namespace

PairScheme resolve_scheme(PairScheme scheme, const Grid& grid) {
  if (scheme != PairScheme::Auto) return scheme;
  return grid.N() <= 1024 ? PairScheme::Exhaustive : PairScheme::Dyadic;
}

std::string to_string(PairScheme scheme) {
  switch (scheme) {
    case PairScheme::Exhaustive: return "exhaustive";
    case PairScheme::Dyadic: return "dyadic";
    case PairScheme::Auto: return "auto";
  }
  return "auto";
}

void for_each_pair(const Grid& grid, PairScheme scheme, const std::function<void(std::size_t, std::size_t)>& fn) {
  scheme = resolve_scheme(scheme, grid);
  const std::size_t N = grid.N();
  for (std::size_t s = 0; s < N; ++s) {
    if (scheme == PairScheme::Exhaustive) {
      for (std::size_t t = s + 1; t <= N; ++t) fn(s, t);
    } else {
      for (std::size_t step = 1; s + step <= N; step *= 2) fn(s, s + step);
    }
  }
}

HolderReport holder_norm(const std::function<double(std::size_t, std::size_t)>& abs_value, double gamma,
                         const Grid& grid, PairScheme scheme) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("Hölder exponent must lie in (0, 1]");
  const auto resolved = resolve_scheme(scheme, grid);
  Best best;
  for_each_pair(grid, resolved, [&](std::size_t s, std::size_t t) {
    const double h = grid.node(t) - grid.node(s);
    best.offer(abs_value(s, t) / std::pow(h, gamma), s, t);
  });
  return to_report(best, gamma, resolved);
}

ComponentNorms component_norms(const PartialRoughPath& prp, PairScheme scheme) {
  return norms_impl(prp, nullptr, scheme);
}

ComponentNorms difference_norms(const PartialRoughPath& a, const PartialRoughPath& b, PairScheme scheme) {
  require_compatible(a, b);
  return norms_impl(a, &b, scheme);
}

double homogeneous_norm(const IndexConfig& config, const ComponentNorms& norms) {
  double total = norms.xhat.sup_ratio;
  for (std::size_t pos = 0; pos < norms.level1.size(); ++pos)
    total += std::pow(norms.level1[pos].sup_ratio, 1.0 / (config.level1()[pos].degree() + 1));
  for (std::size_t pos = 0; pos < norms.level2.size(); ++pos)
    total += std::pow(norms.level2[pos].sup_ratio, 1.0 / (config.level2()[pos].degree() + 2));
  return total;
}

double homogeneous_norm(const PartialRoughPath& prp, PairScheme scheme) {
  return homogeneous_norm(prp.config(), component_norms(prp, scheme));
}

double distance_ab(const PartialRoughPath& a, const PartialRoughPath& b, PairScheme scheme) {
  const auto n = difference_norms(a, b, scheme);
  double total = n.xhat.sup_ratio;
  for (const auto& r : n.level1) total += r.sup_ratio;
  for (const auto& r : n.level2) total += r.sup_ratio;
  return total;
}

namespace {
std::vector<Best> rough_sweep(const RoughPath& a, const RoughPath* b, double alpha, PairScheme scheme) {
  const std::size_t d = a.d();
  const double dt = a.grid().dt();
  return sweep(a.grid(), scheme, 2, [&](std::size_t s, std::size_t t, std::vector<Best>& local) {
    auto y1 = a.level1(s, t);
    auto y2 = a.level2(s, t);
    if (b) {
      const auto z1 = b->level1(s, t);
      const auto z2 = b->level2(s, t);
      for (std::size_t k = 0; k < d; ++k) y1[k] -= z1[k];
      for (std::size_t k = 0; k < d * d; ++k) y2[k] -= z2[k];
    }
    const double h = static_cast<double>(t - s) * dt;
    local[0].offer(euclid(y1.data(), d) / std::pow(h, alpha), s, t);
    local[1].offer(euclid(y2.data(), d * d) / std::pow(h, 2.0 * alpha), s, t);
  });
}
}  // namespace

RoughPathNorms rough_path_norms(const RoughPath& rp, double alpha, PairScheme scheme) {
  const auto resolved = resolve_scheme(scheme, rp.grid());
  const auto b = rough_sweep(rp, nullptr, alpha, resolved);
  return {to_report(b[0], alpha, resolved), to_report(b[1], 2.0 * alpha, resolved)};
}

double distance_alpha(const RoughPath& a, const RoughPath& b, double alpha, PairScheme scheme) {
  if (!(a.grid() == b.grid()) || a.d() != b.d()) throw DomainError("rough paths live on different grids");
  const auto best = rough_sweep(a, &b, alpha, resolve_scheme(scheme, a.grid()));
  return best[0].ratio + best[1].ratio;
}

std::vector<Triple> random_triples(const Grid& grid, std::size_t count, std::uint64_t seed) {
  auto gen = make_stream(seed, 0, 7);
  std::uniform_int_distribution<std::size_t> pick(0, grid.N());
  std::vector<Triple> out(count);
  for (auto& tr : out) {
    tr = {pick(gen), pick(gen), pick(gen)};
    std::sort(tr.begin(), tr.end());
  }
  return out;
}

ChenDefectReport chen_defect_report(const PartialRoughPath& prp, const std::vector<Triple>& triples) {
  if (triples.empty()) throw DomainError("chen_defect_report needs at least one triple");
  const auto& cfg = prp.config();
  const std::size_t d = cfg.d(), dd = d * d;
  const std::size_t nI = cfg.level1().size(), nJ = cfg.level2().size();
  std::vector<ChenDefectReport> per(triples.size());
  parallel_for(triples.size(), [&](std::size_t idx) {
    const auto [s, u, t] = triples[idx];
    if (!(s <= u && u <= t)) throw DomainError("triples must satisfy s <= u <= t");
    const auto st = prp.increments(s, t);
    const auto su = prp.increments(s, u);
    const auto ut = prp.increments(u, t);
    auto& r = per[idx];
    std::vector<double> rhs(dd);
    for (std::size_t pos = 0; pos < nI; ++pos) {
      for (std::size_t a = 0; a < d; ++a) rhs[a] = su.level1[pos * d + a] + ut.level1[pos * d + a];
      for (const auto& term : cfg.level1_terms(pos)) {
        const double c = term.coefficient * term.power.monomial(su.xhat);
        for (std::size_t a = 0; a < d; ++a) rhs[a] += c * ut.level1[term.p * d + a];
      }
      const double* lhs = &st.level1[pos * d];
      r.chen1 = std::max(r.chen1, euclid_diff(lhs, rhs.data(), d) / (1.0 + euclid(lhs, d)));
    }
    for (std::size_t pos = 0; pos < nJ; ++pos) {
      for (std::size_t ab = 0; ab < dd; ++ab) rhs[ab] = su.level2[pos * dd + ab] + ut.level2[pos * dd + ab];
      const double* xj = &su.level1[cfg.pair_first(pos) * d];
      for (const auto& term : cfg.cross_terms(pos)) {
        const double c = term.coefficient * term.power.monomial(su.xhat);
        for (std::size_t a = 0; a < d; ++a)
          for (std::size_t b = 0; b < d; ++b) rhs[a * d + b] += c * xj[a] * ut.level1[term.q * d + b];
      }
      for (const auto& term : cfg.level2_terms(pos)) {
        const double c = term.coefficient * term.power.monomial(su.xhat);
        for (std::size_t ab = 0; ab < dd; ++ab) rhs[ab] += c * ut.level2[term.pq * dd + ab];
      }
      const double* lhs = &st.level2[pos * dd];
      r.chen2 = std::max(r.chen2, euclid_diff(lhs, rhs.data(), dd) / (1.0 + euclid(lhs, dd)));
    }
  });
  ChenDefectReport total;
  total.triples = triples.size();
  for (const auto& r : per) {
    total.chen1 = std::max(total.chen1, r.chen1);
    total.chen2 = std::max(total.chen2, r.chen2);
  }
  return total;
}

double lift_consistency_defect(const PartialRoughPath& prp) {
  const auto& cfg = prp.config();
  const std::size_t N = prp.grid().N(), d = cfg.d(), dd = d * d;
  const std::size_t b00 = cfg.require(IndexPair{MultiIndex::zero(cfg.e()), MultiIndex::zero(cfg.e())});
  std::vector<double> dX(N * d), cell(N * dd);
  for (std::size_t q = 0; q < N; ++q) {
    auto a0 = prp.anchored_level1(0, q), a1 = prp.anchored_level1(0, q + 1);
    auto b0 = prp.anchored_level2(b00, q), b1 = prp.anchored_level2(b00, q + 1);
    for (std::size_t a = 0; a < d; ++a) dX[q * d + a] = a1[a] - a0[a];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        cell[q * dd + a * d + b] = b1[a * d + b] - b0[a * d + b] - a0[a] * dX[q * d + b];
  }
  const auto rebuilt = build_discrete_lift(cfg, prp.grid(), prp.raw_xhat(), dX, cell);
  double worst = 0.0;
  auto compare = [&](const std::vector<double>& stored, const std::vector<double>& ref) {
    for (std::size_t k = 0; k < stored.size(); ++k)
      worst = std::max(worst, std::abs(stored[k] - ref[k]) / (1.0 + std::abs(ref[k])));
  };
  compare(prp.raw_level1(), rebuilt.raw_level1());
  compare(prp.raw_level2(), rebuilt.raw_level2());
  return worst;
}

RoughPathChenReport rough_path_chen_report(const RoughPath& rp, const std::vector<Triple>& triples) {
  if (triples.empty()) throw DomainError("rough_path_chen_report needs at least one triple");
  const std::size_t d = rp.d(), dd = d * d;
  RoughPathChenReport r;
  for (const auto& [s, u, t] : triples) {
    const auto st1 = rp.level1(s, t), su1 = rp.level1(s, u), ut1 = rp.level1(u, t);
    const auto st2 = rp.level2(s, t), su2 = rp.level2(s, u), ut2 = rp.level2(u, t);
    std::vector<double> rhs(dd);
    for (std::size_t a = 0; a < d; ++a) rhs[a] = su1[a] + ut1[a];
    r.level1 = std::max(r.level1, euclid_diff(st1.data(), rhs.data(), d) / (1.0 + euclid(st1.data(), d)));
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) rhs[a * d + b] = su2[a * d + b] + ut2[a * d + b] + su1[a] * ut1[b];
    r.level2 = std::max(r.level2, euclid_diff(st2.data(), rhs.data(), dd) / (1.0 + euclid(st2.data(), dd)));
  }
  return r;
}

}  // namespace parpath
