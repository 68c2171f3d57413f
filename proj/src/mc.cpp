#include "parpath/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parpath/error.hpp"
#include "parpath/integrate.hpp"
#include "parpath/lift.hpp"
#include "parpath/parallel.hpp"

namespace parpath {

namespace {

struct MeanSe {
  double mean;
  double stderr;
};

MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += x;
  const double mean = s / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

struct Fit {
  double slope, intercept;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

}  // namespace

bool MomentScalingReport::pass(double tol) const { return std::abs(slope - expected) <= tol; }

MomentScalingReport moment_scaling_check(const MultiIndex& i, const ModelSpec& spec, std::size_t n_paths,
                                         int levels) {
  if (n_paths < 2) throw InsufficientDataError("moment scaling needs at least two paths");
  const Grid grid = spec.grid();
  const auto config = spec.index_config();
  const std::size_t pos = config.require(i);
  if (levels < 2 || (grid.N() >> (levels - 1)) < 1) throw ConfigError("too many dyadic levels for grid.N");
  std::vector<std::size_t> nodes;
  for (int j = 0; j < levels; ++j) nodes.push_back(grid.N() >> j);

  std::vector<std::vector<double>> sq(nodes.size(), std::vector<double>(n_paths));
  parallel_for(n_paths, [&](std::size_t p) {
    const auto bundle = simulate_brownian(grid, spec.rho, spec.seed, p);
    const auto prp = build_lift(bundle, spec.kernel, config);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double v = prp.anchored_level1(pos, nodes[k])[0];
      sq[k][p] = v * v;
    }
  });

  MomentScalingReport r;
  r.index = i;
  r.expected = 2.0 * i.degree() * spec.kernel.zeta() + 1.0;
  r.paths = n_paths;
  r.seed = spec.seed;
  r.warning = n_paths < 1000;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto ms = mean_se(sq[k]);
    const double t = grid.node(nodes[k]);
    r.points.push_back({t, ms.mean, ms.stderr});
    if (ms.mean <= 0.0) throw NumericalError("moment estimate vanished; cannot take logarithms");
    lx.push_back(std::log(t));
    ly.push_back(std::log(ms.mean));
  }
  r.slope = least_squares(lx, ly).slope;
  return r;
}

bool ItoConsistencyReport::pass(double ratio) const {
  if (levels.size() < 2) return false;
  return levels.back().rms <= ratio * levels.front().rms;
}

ItoConsistencyReport ito_consistency_check(const ModelSpec& spec, std::size_t n_paths,
                                           const std::vector<std::size_t>& levels, std::size_t reference_N) {
  if (n_paths < 1) throw InsufficientDataError("Itô consistency needs at least one path");
  if (levels.empty()) throw ConfigError("mc.levels must not be empty");
  for (auto N : levels)
    if (N < 2 || N > reference_N || reference_N % N != 0)
      throw ConfigError("each level must divide the reference grid size");
  ModelSpec ref = spec;
  ref.N = reference_N;
  const Grid grid = ref.grid();
  const auto config = ref.index_config();
  const auto f = spec.f.dim() == 2 ? spec.f : spec.f.embedded(2);

  std::vector<std::vector<double>> diff(levels.size(), std::vector<double>(n_paths));
  std::vector<std::vector<double>> higher(levels.size(), std::vector<double>(n_paths));
  parallel_for(n_paths, [&](std::size_t p) {
    const auto bundle = simulate_brownian(grid, ref.rho, ref.seed, p);
    const auto prp = build_lift(bundle, ref.kernel, config);
    double ito = 0.0;
    for (std::size_t q = 0; q < grid.N(); ++q) ito += f.value(prp.xhat(q)) * bundle.dX[q];
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const std::size_t stride = reference_N / levels[l];
      std::vector<std::size_t> part;
      for (std::size_t q = 0; q <= grid.N(); q += stride) part.push_back(q);
      const double y1 = compensated_sum_level1(prp, f, part, 0, grid.N())[0];
      double zeroth = 0.0;
      for (std::size_t k = 1; k < part.size(); ++k)
        zeroth += f.value(prp.xhat(part[k - 1])) *
                  (prp.anchored_level1(0, part[k])[0] - prp.anchored_level1(0, part[k - 1])[0]);
      diff[l][p] = y1 - ito;
      higher[l][p] = y1 - zeroth;
    }
  });

  ItoConsistencyReport r;
  r.reference_N = reference_N;
  r.paths = n_paths;
  r.seed = spec.seed;
  auto rms = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
  };
  for (std::size_t l = 0; l < levels.size(); ++l) r.levels.push_back({levels[l], rms(diff[l]), rms(higher[l])});
  return r;
}

double black_scholes_call(double S, double K, double T, double vol) {
  if (!(S > 0.0 && K > 0.0 && T > 0.0 && vol > 0.0)) throw DomainError("Black-Scholes inputs must be positive");
  const double sd = vol * std::sqrt(T);
  const double d1 = (std::log(S / K) + 0.5 * sd * sd) / sd;
  const double d2 = d1 - sd;
  auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  return S * Phi(d1) - K * Phi(d2);
}

double black_scholes_vega(double S, double K, double T, double vol) {
  const double sd = vol * std::sqrt(T);
  const double d1 = (std::log(S / K) + 0.5 * sd * sd) / sd;
  return S * std::sqrt(T) * std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * M_PI);
}

double implied_vol(double price, double S, double K, double T) {
  const double lo_bound = std::max(S - K, 0.0);
  if (!(price > lo_bound && price < S))
    throw NumericalError("price outside the no-arbitrage band (" + std::to_string(lo_bound) + ", " +
                         std::to_string(S) + ")");
  double lo = 1e-4, hi = 5.0;
  if (price <= black_scholes_call(S, K, T, lo) || price >= black_scholes_call(S, K, T, hi))
    throw NumericalError("implied volatility outside the bracket [1e-4, 5]");
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (black_scholes_call(S, K, T, mid) < price) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<PriceRow> price_and_implied_vol(const ModelSpec& spec, std::span<const double> strikes,
                                            std::span<const double> maturities, std::size_t n_paths) {
  if (n_paths < 2) throw InsufficientDataError("pricing needs at least two paths");
  if (!(spec.S0 > 0.0)) throw ConfigError("pricing needs a positive model.S0");
  std::vector<PriceRow> rows;
  for (double T : maturities) {
    ModelSpec local = spec;
    local.T = T;
    std::vector<double> terminal(n_paths);
    parallel_for(n_paths, [&](std::size_t p) { terminal[p] = solve_model(local, p).S.back(); });
    for (double K : strikes) {
      std::vector<double> payoff(n_paths);
      for (std::size_t p = 0; p < n_paths; ++p) payoff[p] = std::max(terminal[p] - K, 0.0);
      const auto ms = mean_se(payoff);
      PriceRow row{K, T, ms.mean, ms.stderr, std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN(), "ok"};
      try {
        row.implied_vol = implied_vol(ms.mean, spec.S0, K, T);
        row.implied_stderr = ms.stderr / black_scholes_vega(spec.S0, K, T, row.implied_vol);
      } catch (const Error& e) {
        row.status = std::string("inversion_error: ") + e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

LdpReport ldp_tail_check(const ModelSpec& spec, double z, std::span<const double> t_grid, std::size_t n_paths,
                         std::size_t rate_K, double tolerance) {
  LdpReport r;
  r.z = z;
  r.paths = n_paths;
  r.seed = spec.seed;
  r.tolerance = tolerance;
  if (z == 0.0) {
    r.skipped = true;
    return r;
  }
  if (t_grid.size() < 2) throw ConfigError("mc.t_grid needs at least two times");
  const double tmax = *std::max_element(t_grid.begin(), t_grid.end());
  if (!(*std::min_element(t_grid.begin(), t_grid.end()) > 0.0)) throw ConfigError("mc.t_grid entries must be positive");
  ModelSpec local = spec;
  local.T = tmax;
  const Grid grid = local.grid();
  const double H = spec.kernel.H();
  std::vector<std::size_t> nodes;
  for (double t : t_grid)
    nodes.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t / tmax * grid.N()))));

  std::vector<unsigned char> hit(n_paths * nodes.size(), 0);
  parallel_for(n_paths, [&](std::size_t p) {
    const auto path = solve_model(local, p);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double t = grid.node(nodes[k]);
      const double v = std::pow(t, H - 0.5) * path.Sbar[nodes[k]];
      hit[p * nodes.size() + k] = z > 0.0 ? v >= z : v <= z;
    }
  });

  std::size_t largest = 0;
  for (std::size_t k = 1; k < nodes.size(); ++k)
    if (nodes[k] > nodes[largest]) largest = k;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    std::size_t count = 0;
    for (std::size_t p = 0; p < n_paths; ++p) count += hit[p * nodes.size() + k];
    const double t = grid.node(nodes[k]);
    const double prob = static_cast<double>(count) / static_cast<double>(n_paths);
    const bool used = count >= 10;
    r.points.push_back({t, prob, count, used});
    if (k == largest && count < 50)
      throw InsufficientDataError("only " + std::to_string(count) + " exceedances at the largest t (need 50)");
    if (used) {
      x.push_back(std::pow(t, -2.0 * H));
      y.push_back(-std::log(prob));
    }
  }
  if (x.size() < 3) throw InsufficientDataError("fewer than three tail points with at least 10 exceedances");
  const auto fit = least_squares(x, y);
  r.slope = fit.slope;
  r.intercept = fit.intercept;

  RateProblem problem;
  problem.H = H;
  problem.rho = spec.rho;
  problem.sigma0 = spec.sigma(spec.S0);
  problem.f = spec.f;
  problem.K = rate_K;
  RateOptions opts;
  opts.seed = spec.seed;
  r.rate = minimize_rate(z, problem, opts).value;
  r.ratio = r.slope / r.rate;
  return r;
}

std::vector<ScalingMoment> scaling_check(const ModelSpec& spec, std::span<const double> eps, std::size_t n_paths) {
  if (n_paths < 2) throw InsufficientDataError("scaling check needs at least two paths");
  const Grid grid = spec.grid();
  std::vector<std::size_t> nodes;
  for (double e : eps) {
    const double pos = e * static_cast<double>(grid.N());
    if (!(e > 0.0 && e <= 1.0) || std::abs(pos - std::round(pos)) > 1e-9)
      throw ConfigError("each epsilon must place εT on a grid node");
    nodes.push_back(static_cast<std::size_t>(std::llround(pos)));
  }
  std::vector<double> endpoint(n_paths);
  std::vector<std::vector<double>> inner(eps.size(), std::vector<double>(n_paths));
  parallel_for(n_paths, [&](std::size_t p) {
    const auto bundle = simulate_brownian(grid, spec.rho, spec.seed, p);
    const auto x = volterra_convolve(bundle, spec.kernel);
    endpoint[p] = x[grid.N()];
    for (std::size_t k = 0; k < nodes.size(); ++k) inner[k][p] = x[nodes[k]];
  });
  std::vector<ScalingMoment> out;
  const double H = spec.kernel.H();
  for (std::size_t k = 0; k < eps.size(); ++k) {
    for (int order = 1; order <= 4; ++order) {
      const double factor = std::pow(eps[k], order * H);
      std::vector<double> a(n_paths), b(n_paths), d(n_paths);
      for (std::size_t p = 0; p < n_paths; ++p) {
        a[p] = std::pow(inner[k][p], order);
        b[p] = factor * std::pow(endpoint[p], order);
        d[p] = a[p] - b[p];
      }
      const auto ma = mean_se(a), mb = mean_se(b), md = mean_se(d);
      out.push_back({eps[k], order, ma.mean, mb.mean, md.stderr, std::abs(md.mean) <= 3.0 * md.stderr});
    }
  }
  return out;
}

}  // namespace parpath
