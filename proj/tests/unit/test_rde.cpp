#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "parpath/analysis.hpp"
#include "parpath/error.hpp"
#include "parpath/integrate.hpp"
#include "parpath/rde.hpp"

using namespace parpath;

namespace {

RoughPath driver(std::uint64_t seed, std::size_t N = 256) {
  const Grid g(1.0, N);
  const auto prp = build_lift(simulate_brownian(g, 0.3, seed), KernelSpec::riemann_liouville(0.3),
                              IndexConfig::build(0.4, 0.2, 2));
  return integrate(prp, VolFunction::exponential(0.5, {1.0, 0.0})).path;
}

ModelSpec gbm_spec(std::size_t N) {
  ModelSpec s;
  s.kernel = KernelSpec::riemann_liouville(0.5);
  s.N = N;
  s.seed = 3;
  s.f = VolFunction::constant(2, 1.0);
  s.sigma = SigmaFunction::linear(0.0, 1.0);
  s.S0 = 1.0;
  return s;
}

double gbm_rms(std::size_t N, std::size_t paths) {
  const auto spec = gbm_spec(N);
  double acc = 0.0;
  for (std::size_t p = 0; p < paths; ++p) {
    const auto m = solve_model(spec, p);
    const double exact = std::exp(m.X.back() - 0.5);
    acc += std::pow((m.S.back() - exact) / exact, 2);
  }
  return std::sqrt(acc / paths);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("sigma families") {
  const auto t = SigmaFunction::tanh(0.5, 0.3, 2.0);
  for (double s : {-1.0, 0.1, 0.8})
    for (int k = 1; k <= 3; ++k) {
      const double h = 1e-4;
      const double fd = (t.derivative(s + h, k - 1) - t.derivative(s - h, k - 1)) / (2 * h);
      CHECK(t.derivative(s, k) == doctest::Approx(fd).epsilon(1e-6));
    }
  CHECK(t(0.0) == doctest::Approx(0.5));
  CHECK(SigmaFunction::linear(1.0, 2.0)(3.0) == 7.0);
  CHECK(SigmaFunction::linear(1.0, 2.0).derivative(3.0, 2) == 0.0);
  CHECK_FALSE(SigmaFunction::linear(1.0, 2.0).bounded());
  CHECK(SigmaFunction::linear(1.0, 0.0).bounded());
  CHECK(SigmaFunction::constant(2.0).derivative(1.0) == 0.0);
  CHECK_THROWS_AS(t.derivative(0.0, 4), DomainError);
}

TEST_CASE("trivial sigma") {
  const auto Y = driver(1);
  const auto zero = solve_rde(Y, SigmaFunction::constant(0.0), 2.0);
  for (double v : zero) CHECK(v == 0.0);
  const auto one = solve_rde(Y, SigmaFunction::constant(1.0), 2.0);
  for (std::size_t q = 0; q <= 256; ++q) CHECK(one[q] == doctest::Approx(Y.anchored_level1(q)[0]).epsilon(1e-12));
}

TEST_CASE("dilated driver scales the solution linearly for sigma 1") {
  const auto Y = driver(2);
  const double lambda = 1.8;
  const auto S = solve_rde(dilate(Y, lambda), SigmaFunction::constant(1.0), 0.0);
  for (std::size_t q = 0; q <= 256; ++q) CHECK(S[q] == doctest::Approx(lambda * Y.anchored_level1(q)[0]).epsilon(1e-12));
}

TEST_CASE("step-2 increment") {
  // one hand-computed step with σ(s) = 1 + s, S0 = 0
  const Grid g(1.0, 2);
  const RoughPath Y(g, 1, {0.0, 0.3, 0.1}, {0.0, 0.02, 0.05});
  const auto S = solve_rde(Y, SigmaFunction::linear(1.0, 1.0), 0.0);
  const double s1 = 0.3 + 0.02;
  // second increment: Y1 = −0.2, Y2 = y2(2) − y2(1) − y1(1) Y1 = 0.05 − 0.02 + 0.06
  const double s2 = s1 + (1 + s1) * (-0.2) + (1 + s1) * 0.09;
  CHECK(S[1] == doctest::Approx(s1).epsilon(1e-15));
  CHECK(S[2] == doctest::Approx(s2).epsilon(1e-15));
}

TEST_CASE("solver guard and driver checks") {
  const Grid g(1.0, 4);
  const RoughPath big(g, 1, {0.0, 1.0, 3e6, 3e6, 3e6}, std::vector<double>(5, 0.0));
  try {
    solve_rde(big, SigmaFunction::constant(1.0), 0.0);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.last_good_index == 1);
  }
  const RoughPath two(g, 2, std::vector<double>(10, 0.0), std::vector<double>(20, 0.0));
  CHECK_THROWS_AS(solve_rde(two, SigmaFunction::constant(1.0), 0.0), DomainError);
}

TEST_CASE("full pipeline with f = 1 and sigma = 1 is S0 + X") {
  auto spec = gbm_spec(128);
  spec.sigma = SigmaFunction::constant(1.0);
  spec.S0 = 4.0;
  const auto m = solve_model(spec, 7);
  for (std::size_t q = 0; q <= 128; ++q) CHECK(m.S[q] == doctest::Approx(4.0 + m.X[q]).epsilon(1e-13));
}

TEST_CASE("geometric Brownian motion converges at first order") {
  const double coarse = gbm_rms(1024, 200);
  const double fine = gbm_rms(2048, 200);
  MESSAGE("rms " << coarse << " -> " << fine);
  CHECK(coarse <= 0.02);
  CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("Euler-Maruyama agreement shrinks under refinement") {
  ModelSpec spec;
  spec.kernel = KernelSpec::riemann_liouville(0.3);
  spec.beta = 0.2;
  spec.rho = -0.5;
  spec.f = VolFunction::exponential(0.3, {1.0, 0.0});
  spec.sigma = SigmaFunction::linear(0.0, 1.0);
  spec.S0 = 1.0;
  std::vector<double> rms;
  for (std::size_t N : {128u, 256u, 512u, 1024u}) {
    spec.N = N;
    double acc = 0.0;
    for (std::size_t p = 0; p < 100; ++p) {
      const auto m = solve_model(spec, p);
      acc += std::pow(m.S.back() - m.S_em.back(), 2);
    }
    rms.push_back(std::sqrt(acc / 100));
  }
  MESSAGE("rms gaps " << rms[0] << " " << rms[1] << " " << rms[2] << " " << rms[3]);
  for (std::size_t k = 1; k < rms.size(); ++k) CHECK(rms[k] < rms[k - 1]);
}

TEST_CASE("terminal law is lognormal for constant f") {
  ModelSpec spec = gbm_spec(256);
  const double v0 = 0.2;
  spec.f = VolFunction::constant(2, v0);
  spec.seed = 12;
  const std::size_t paths = 10000;
  std::vector<double> terminal(paths);
  for (std::size_t p = 0; p < paths; ++p) terminal[p] = solve_model(spec, p).S.back();
  std::sort(terminal.begin(), terminal.end());
  double ks = 0.0;
  for (std::size_t p = 0; p < paths; ++p) {
    const double F = normal_cdf((std::log(terminal[p]) + 0.5 * v0 * v0) / v0);
    ks = std::max({ks, std::abs(F - double(p) / paths), std::abs(F - double(p + 1) / paths)});
  }
  MESSAGE("KS distance " << ks);
  CHECK(ks <= 0.02);
}

TEST_CASE("solution map is locally Lipschitz in the driver") {
  const auto sigma = SigmaFunction::tanh(0.4, 0.3, 1.0);
  std::vector<double> ratios;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto Y = driver(100 + k, 128);
    const auto Z = dilate(Y, 1.0 + 1e-3 * (1 + k % 5));
    const auto a = solve_rde(Y, sigma, 0.0), b = solve_rde(Z, sigma, 0.0);
    double sup = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q) sup = std::max(sup, std::abs(a[q] - b[q]));
    ratios.push_back(sup / distance_alpha(Y, Z, 0.4));
  }
  std::sort(ratios.begin(), ratios.end());
  MESSAGE("ratios " << ratios.front() << " .. " << ratios.back());
  CHECK(ratios.front() > 0.0);
  CHECK(ratios.back() <= 5.0 * ratios[10]);
}
