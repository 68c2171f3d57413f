#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "parpath/error.hpp"
#include "parpath/lift.hpp"
#include "parpath/rate.hpp"

using namespace parpath;

namespace {

RateProblem exp_problem(double rho, std::size_t K = 16) {
  RateProblem p;
  p.H = 0.3;
  p.rho = rho;
  p.sigma0 = 1.0;
  p.f = VolFunction::exponential(1.0, {1.0});
  p.K = K;
  return p;
}

RateProblem constant_problem(double rho, double v0, std::size_t K = 64) {
  RateProblem p;
  p.H = 0.3;
  p.rho = rho;
  p.f = VolFunction::constant(1, v0);
  p.K = K;
  return p;
}

// Random search: uniform draws in a box, then Gaussian steps around the incumbent with a
// radius that shrinks whenever a batch brings no improvement.
double random_search(double z, const RateProblem& p, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-3.0, 3.0);
  std::normal_distribution<double> n01;
  std::vector<double> best(p.K, 0.0), g(p.K);
  double fbest = rate_objective(best, z, p);
  const std::size_t global = samples / 10;
  for (std::size_t s = 0; s < global; ++s) {
    for (auto& v : g) v = box(rng);
    const double v = rate_objective(g, z, p);
    if (v < fbest) fbest = v, best = g;
  }
  double radius = 0.5;
  const std::size_t batch = 2000;
  for (std::size_t s = global; s < samples; s += batch) {
    bool improved = false;
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t k = 0; k < p.K; ++k) g[k] = best[k] + radius * n01(rng);
      const double v = rate_objective(g, z, p);
      if (v < fbest) fbest = v, best = g, improved = true;
    }
    if (!improved) radius *= 0.5;
  }
  return fbest;
}

}  // namespace

TEST_CASE("K_H convolution") {
  const std::size_t K = 32;
  const double dt = 1.0 / K;
  SUBCASE("zero input") {
    for (double v : kh_convolve(std::vector<double>(K, 0.0), 0.3)) CHECK(v == 0.0);
  }
  SUBCASE("H = 0.5 is the running integral at midpoints") {
    std::vector<double> g(K);
    for (std::size_t k = 0; k < K; ++k) g[k] = std::cos(0.3 * k);
    const auto u = kh_convolve(g, 0.5);
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      CHECK(u[k] == doctest::Approx(acc + 0.5 * dt * g[k]).epsilon(1e-13));
      acc += g[k] * dt;
    }
  }
  SUBCASE("g = 1 gives the power law") {
    const auto u = kh_convolve(std::vector<double>(K, 1.0), 0.3);
    for (std::size_t k = 0; k < K; ++k) {
      const double t = (k + 0.5) * dt;
      CHECK(u[k] == doctest::Approx(std::pow(t, 0.8) / (0.8 * std::tgamma(0.8))).epsilon(1e-13));
    }
  }
  SUBCASE("piecewise-constant g against quadrature") {
    std::vector<double> g(K);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    for (auto& v : g) v = n01(rng);
    const auto kappa = KernelSpec::riemann_liouville(0.2);
    const auto u = kh_convolve(g, 0.2);
    for (std::size_t k : {0u, 5u, 31u}) {
      const double t = (k + 0.5) * dt;
      double ref = 0.0;
      for (std::size_t j = 0; j <= k; ++j) {
        const double hi = std::min(t, (j + 1) * dt);
        ref += g[j] * oracle::endpoint_integral([&](double r) { return kappa(t - r); }, j * dt, hi);
      }
      CHECK(u[k] == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("rate objective values") {
  CHECK(rate_objective(std::vector<double>(16, 0.0), 0.0, exp_problem(0.3)) == 0.0);
  auto p = constant_problem(0.5, 0.2, 8);
  CHECK(rate_objective(std::vector<double>(8, 0.0), 0.1, p) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(rate_objective(std::vector<double>(8, 0.0), 0.1, p) == doctest::Approx(0.1667).epsilon(1e-3));
  SUBCASE("constant f reduces to a function of the mean") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> g(8);
      double sq = 0.0, G = 0.0;
      for (auto& v : g) {
        v = n01(rng);
        sq += v * v / 8;
        G += v / 8;
      }
      const double z = 0.2 * n01(rng);
      const double ref = 0.5 * sq + std::pow(z - 0.5 * 0.2 * G, 2) / (2 * 0.75 * 0.04);
      CHECK(rate_objective(g, z, p) == doctest::Approx(ref).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(rate_objective(std::vector<double>(8, 0.0), 0.1, constant_problem(0.0, 0.0, 8)), NumericalError);
  CHECK_THROWS_AS(rate_objective(std::vector<double>(7, 0.0), 0.1, p), DomainError);
}

TEST_CASE("analytic gradient against central differences") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = exp_problem(trial % 2 ? -0.7 : 0.4);
    std::vector<double> g(p.K), grad(p.K);
    for (auto& v : g) v = 0.5 * n01(rng);
    const double z = 0.5 * n01(rng);
    rate_objective(g, z, p, grad);
    double gmax = 0.0, err = 0.0;
    for (std::size_t m = 0; m < p.K; ++m) {
      auto gp = g, gm = g;
      gp[m] += 1e-6;
      gm[m] -= 1e-6;
      const double fd = (rate_objective(gp, z, p) - rate_objective(gm, z, p)) / 2e-6;
      gmax = std::max(gmax, std::abs(grad[m]));
      err = std::max(err, std::abs(grad[m] - fd));
    }
    CHECK(err <= 1e-5 * gmax);
  }
}

TEST_CASE("minimization") {
  SUBCASE("z = 0") {
    const auto s = minimize_rate(0.0, exp_problem(-0.7));
    CHECK(s.value == doctest::Approx(0.0).epsilon(1e-14));
    for (double v : s.g) CHECK(std::abs(v) <= 1e-8);
  }
  SUBCASE("constant f closed form") {
    CHECK(constant_f_rate(0.1, 1.0, 0.2) == doctest::Approx(0.125));
    for (double rho : {-0.7, 0.0, 0.7})
      for (double z : {-0.3, 0.1, 0.5}) {
        const auto s = minimize_rate(z, constant_problem(rho, 0.2));
        CHECK(std::abs(s.value - z * z / (2 * 0.04)) <= 1e-6);
      }
  }
  SUBCASE("sign symmetry without correlation") {
    const auto p = exp_problem(0.0);
    CHECK(minimize_rate(0.3, p).value == doctest::Approx(minimize_rate(-0.3, p).value).epsilon(1e-8));
  }
  SUBCASE("optimality structure at the optimum") {
    const auto p = exp_problem(-0.7, 32);
    for (double z : {-0.3, 0.2, 0.4}) {
      const auto s = minimize_rate(z, p);
      CHECK(s.optimality_residual <= 1e-6);
      CHECK(optimality_check(s.g, z, p).residual == doctest::Approx(s.optimality_residual));
      CHECK(s.value > 0.0);
      CHECK(s.restarts == 8);
    }
  }
  SUBCASE("against random search with K = 8") {
    const auto p = exp_problem(-0.7, 8);
    for (double z : {-0.4, -0.2, 0.1, 0.3, 0.5}) {
      const double opt = minimize_rate(z, p).value;
      const double rs = random_search(z, p, 1000000, 17);
      CHECK(opt <= rs * (1 + 1e-9));
      CHECK(rs <= opt * 1.02);
    }
  }
  SUBCASE("discretization gap shrinks with K") {
    double prev = minimize_rate(0.3, exp_problem(-0.7, 8)).value, gap_prev = INFINITY;
    for (std::size_t K : {16u, 32u, 64u}) {
      const double v = minimize_rate(0.3, exp_problem(-0.7, K)).value;
      const double gap = std::abs(v - prev);
      CHECK(gap < gap_prev);
      gap_prev = gap;
      prev = v;
    }
  }
  SUBCASE("deterministic given the seed") {
    RateOptions o;
    o.seed = 9;
    const auto a = minimize_rate(0.3, exp_problem(-0.7), o), b = minimize_rate(0.3, exp_problem(-0.7), o);
    CHECK(a.value == b.value);
    CHECK(a.g == b.g);
  }
}

TEST_CASE("smile curve") {
  const std::vector<double> z{-0.4, -0.2, 0.0, 0.2, 0.4};
  const auto rows = smile_curve(constant_problem(-0.3, 0.25, 32), z);
  REQUIRE(rows.size() == 5);
  for (const auto& r : rows) {
    if (r.z == 0.0) {
      CHECK(r.rate == 0.0);
      CHECK(std::isnan(r.sigma_asym));
    } else {
      CHECK(r.sigma_asym == doctest::Approx(0.25).epsilon(1e-6));
    }
  }
  for (std::size_t k = 0; k < 5; ++k) CHECK(rows[k].z == z[k]);
}

TEST_CASE("problem validation") {
  auto p = exp_problem(1.0);
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = exp_problem(0.0, 1);
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = exp_problem(0.0);
  p.sigma0 = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = exp_problem(0.0);
  p.H = 0.6;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK_THROWS_AS(minimize_rate(0.1, exp_problem(1.0)), ConfigError);
}
