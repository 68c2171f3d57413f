#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "parpath/error.hpp"
#include "parpath/lift.hpp"

using namespace parpath;

TEST_CASE("Riemann-Liouville kernel values") {
  CHECK(KernelSpec::riemann_liouville(0.5)(0.37) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(KernelSpec::riemann_liouville(0.5)(2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(KernelSpec::riemann_liouville(0.1)(1.0) == doctest::Approx(1.0 / std::tgamma(0.6)).epsilon(1e-14));
  CHECK(KernelSpec::riemann_liouville(0.1)(1.0) == doctest::Approx(0.6715).epsilon(1e-4));
  CHECK(KernelSpec::riemann_liouville(0.3)(0.25) == doctest::Approx(std::pow(0.25, -0.2) / std::tgamma(0.8)).epsilon(1e-14));
  CHECK_THROWS_AS(KernelSpec::riemann_liouville(0.3)(0.0), DomainError);
  CHECK_THROWS_AS(KernelSpec::riemann_liouville(0.3)(-1.0), DomainError);
  CHECK_THROWS_AS(KernelSpec::riemann_liouville(0.7), ConfigError);
  CHECK_THROWS_AS(KernelSpec::riemann_liouville(0.005), ConfigError);
}

TEST_CASE("kernel derivative and integral") {
  for (const auto& k : {KernelSpec::riemann_liouville(0.3), KernelSpec::exp_damped(0.2, 1.5)}) {
    for (double t : {0.05, 0.3, 0.9}) {
      const double h = 1e-6 * t;
      CHECK(k.derivative(t) == doctest::Approx((k(t + h) - k(t - h)) / (2 * h)).epsilon(1e-6));
      CHECK(k.integral(t) == doctest::Approx(oracle::endpoint_integral([&](double u) { return k(u); }, 0.0, t)).epsilon(1e-10));
    }
  }
  // λ = 0 damping is the plain kernel
  CHECK(KernelSpec::exp_damped(0.3, 0.0)(0.4) == doctest::Approx(KernelSpec::riemann_liouville(0.3)(0.4)).epsilon(1e-15));
}

TEST_CASE("brownian drivers") {
  SUBCASE("rho = 0 gives uncorrelated increments") {
    const auto b = simulate_brownian(Grid(1.0, 100000), 0.0, 3);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t q = 0; q < b.dW.size(); ++q) {
      sxy += b.dW[q] * b.dX[q];
      sxx += b.dW[q] * b.dW[q];
      syy += b.dX[q] * b.dX[q];
    }
    CHECK(std::abs(sxy / std::sqrt(sxx * syy)) <= 0.01);
  }
  SUBCASE("rho = 1 gives X = W") {
    const auto b = simulate_brownian(Grid(1.0, 512), 1.0, 3);
    CHECK(b.dX == b.dW);
  }
  SUBCASE("quadratic variation near T") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto b = simulate_brownian(Grid(1.0, 1 << 14), 0.3, seed);
      double qv = 0.0;
      for (double v : b.dW) qv += v * v;
      CHECK(qv >= 0.95);
      CHECK(qv <= 1.05);
    }
  }
  SUBCASE("correlation rho") {
    const auto b = simulate_brownian(Grid(1.0, 100000), -0.7, 8);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t q = 0; q < b.dW.size(); ++q) {
      sxy += b.dW[q] * b.dX[q];
      sxx += b.dW[q] * b.dW[q];
      syy += b.dX[q] * b.dX[q];
    }
    CHECK(sxy / std::sqrt(sxx * syy) == doctest::Approx(-0.7).epsilon(0.02));
  }
  SUBCASE("paths start at zero and are reproducible") {
    const auto a = simulate_brownian(Grid(1.0, 64), 0.2, 17, 4);
    const auto b = simulate_brownian(Grid(1.0, 64), 0.2, 17, 4);
    const auto c = simulate_brownian(Grid(1.0, 64), 0.2, 17, 5);
    CHECK(a.dW == b.dW);
    CHECK(a.dWperp == b.dWperp);
    CHECK(a.dW != c.dW);
    CHECK(a.W()[0] == 0.0);
    CHECK(a.X()[0] == 0.0);
    CHECK(a.Wperp()[0] == 0.0);
  }
  CHECK_THROWS_AS(simulate_brownian(Grid(1.0, 8), 1.01, 0), ConfigError);
}

TEST_CASE("volterra convolution") {
  SUBCASE("H = 0.5 reproduces W") {
    const auto b = simulate_brownian(Grid(1.0, 256), 0.0, 2);
    const auto x = volterra_convolve(b, KernelSpec::riemann_liouville(0.5));
    const auto W = b.W();
    for (std::size_t q = 0; q < W.size(); ++q) CHECK(x[q] == doctest::Approx(W[q]).epsilon(1e-13));
  }
  SUBCASE("deterministic dW = dt matches the kernel primitive") {
    const Grid g(1.0, 512);
    const std::vector<double> dW(512, g.dt());
    for (double H : {0.1, 0.3}) {
      const auto k = KernelSpec::riemann_liouville(H);
      const auto x = volterra_convolve(dW, k, g);
      CHECK(x[0] == 0.0);
      for (std::size_t q : {1u, 7u, 128u, 512u}) {
        const double ref = oracle::endpoint_integral([&](double r) { return k(g.node(q) - r); }, 0.0, g.node(q));
        CHECK(std::abs(x[q] - ref) <= 1e-8);
      }
    }
  }
  SUBCASE("H = 0.1 Monte Carlo variance") {
    // The scheme's own law has Var X̂_t = Σ w_k² Δ; the continuous value t^{2H}/(2HΓ(H+1/2)²)
    // is approached as N grows (the first singular cell carries a bias of order Δ^{2H}).
    const auto k = KernelSpec::riemann_liouville(0.1);
    const Grid g(1.0, 256);
    const std::size_t paths = 10000;
    std::vector<double> s2(3, 0.0);
    const std::size_t nodes[3] = {64, 128, 256};
    for (std::size_t p = 0; p < paths; ++p) {
      const auto b = simulate_brownian(g, 0.0, 21, p);
      const auto x = volterra_convolve(b, k);
      for (int m = 0; m < 3; ++m) s2[m] += x[nodes[m]] * x[nodes[m]];
    }
    const auto w = k.convolution_weights(g.dt(), g.N());
    for (int m = 0; m < 3; ++m) {
      double discrete = 0.0;
      for (std::size_t j = 1; j <= nodes[m]; ++j) discrete += w[j] * w[j] * g.dt();  // w[0] unused
      const double t = g.node(nodes[m]);
      const double continuous = std::pow(t, 0.2) / (0.2 * std::pow(std::tgamma(0.6), 2));
      CHECK(s2[m] / paths == doctest::Approx(discrete).epsilon(0.03));
      CHECK(discrete < continuous);
    }
    // the discrete variance approaches the continuous one under refinement
    auto discrete_var = [&](std::size_t N) {
      const auto ww = k.convolution_weights(1.0 / N, N);
      double v = 0.0;
      for (double x : ww) v += x * x / N;
      return v;
    };
    const double cont = 1.0 / (0.2 * std::pow(std::tgamma(0.6), 2));
    const double gaps[3] = {cont - discrete_var(256), cont - discrete_var(1024), cont - discrete_var(4096)};
    CHECK(gaps[1] < gaps[0]);
    CHECK(gaps[2] < gaps[1]);
    CHECK(gaps[0] / gaps[1] == doctest::Approx(std::pow(4.0, 0.2)).epsilon(0.05));
  }
}

TEST_CASE("K operator") {
  const Grid g(1.0, 256);
  std::vector<double> lin(257), cst(257, 2.5), any(257);
  for (std::size_t q = 0; q <= 256; ++q) {
    lin[q] = g.node(q);
    any[q] = std::sin(3 * g.node(q));
  }
  SUBCASE("kernel 1 gives f - f(0)") {
    const auto v = k_operator(any, KernelSpec::riemann_liouville(0.5), g);
    for (std::size_t q = 0; q <= 256; ++q) CHECK(v[q] == doctest::Approx(any[q] - any[0]).epsilon(1e-13));
  }
  SUBCASE("constant f vanishes") {
    const auto v = k_operator(cst, KernelSpec::riemann_liouville(0.3), g);
    for (double x : v) CHECK(std::abs(x) <= 1e-14);
  }
  SUBCASE("f(t) = t against quadrature of the defining formula") {
    for (double H : {0.1, 0.3}) {
      const auto k = KernelSpec::riemann_liouville(H);
      const auto v = k_operator(lin, k, g);
      for (std::size_t q : {1u, 10u, 100u, 256u}) {
        const double t = g.node(q);
        const double ref = k(t) * t + oracle::endpoint_integral([&](double s) { return (s - t) * k.derivative(t - s); }, 0.0, t);
        CHECK(std::abs(v[q] - ref) <= 1e-6);
      }
    }
  }
  CHECK_THROWS_AS(k_operator(std::vector<double>(10), KernelSpec::riemann_liouville(0.3), g), DomainError);
}

TEST_CASE("kernel L2 increment check") {
  SUBCASE("H = 0.5 is exactly |t - s|") {
    const auto k = KernelSpec::riemann_liouville(0.5);
    CHECK(kernel_l2_norm_sq(k, 0.3, 0.55) == doctest::Approx(0.25).epsilon(1e-10));
    const auto r = kernel_l2_check(k, 1.0, 0.25);
    CHECK(r.slope == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(r.violated);
  }
  SUBCASE("H = 0.1 from zero has the closed form") {
    const auto k = KernelSpec::riemann_liouville(0.1);
    for (double t : {0.01, 0.3, 1.0})
      CHECK(kernel_l2_norm_sq(k, 0.0, t) ==
            doctest::Approx(std::pow(t, 0.2) / (0.2 * std::pow(std::tgamma(0.6), 2))).epsilon(1e-8));
    CHECK(kernel_l2_check(k, 1.0, 0.0).slope == doctest::Approx(0.2).epsilon(1e-6));
  }
  SUBCASE("H = 0.3 slope") {
    const auto r = kernel_l2_check(KernelSpec::riemann_liouville(0.3), 1.0, 0.3);
    CHECK(std::abs(r.slope - 0.6) <= 0.02);
    CHECK(r.expected == doctest::Approx(0.6));
    CHECK_FALSE(r.violated);
  }
}

TEST_CASE("the lift") {
  const auto kernel = KernelSpec::riemann_liouville(0.3);
  const Grid g(1.0, 256);
  const auto config = IndexConfig::build(0.4, 0.2, 2);
  const auto b = simulate_brownian(g, -0.5, 7);
  const auto prp = build_lift(b, kernel, config);
  const auto X = b.X();
  const auto zero = MultiIndex::zero(2);
  const auto i10 = MultiIndex({1, 0});

  SUBCASE("x̂ components") {
    const auto x1 = volterra_convolve(b, kernel);
    for (std::size_t q = 0; q <= 256; ++q) {
      CHECK(prp.xhat(q)[0] == x1[q]);
      CHECK(prp.xhat(q)[1] == doctest::Approx(std::pow(g.node(q), kernel.zeta())).epsilon(1e-15));
    }
  }
  SUBCASE("level 0 is the increment of X") {
    for (std::size_t s = 0; s <= 256; s += 17)
      for (std::size_t t = s; t <= 256; t += 23)
        CHECK(prp.reconstruct_level1(zero, s, t)[0] == doctest::Approx(X[t] - X[s]).epsilon(1e-12));
  }
  SUBCASE("(1,0) equals the anchored left-point sum") {
    for (std::size_t s = 0; s <= 256; s += 13)
      for (std::size_t t = s; t <= 256; t += 29) {
        double ref = 0.0;
        for (std::size_t r = s; r < t; ++r) ref += (prp.xhat(r)[0] - prp.xhat(s)[0]) * b.dX[r];
        CHECK(std::abs(prp.reconstruct_level1(i10, s, t)[0] - ref) <= 1e-12 * (1.0 + std::abs(ref)));
      }
  }
  SUBCASE("every index against brute-force sums with the Itô cell term") {
    std::vector<double> cell(g.N());
    for (std::size_t q = 0; q < g.N(); ++q) cell[q] = 0.5 * (b.dX[q] * b.dX[q] - g.dt());
    double worst = 0.0;
    for (std::size_t s = 0; s <= 256; s += 31)
      for (std::size_t t = s; t <= 256; t += 37) {
        for (const auto& i : config.level1())
          worst = std::max(worst, oracle::rel_gap(prp.reconstruct_level1(i, s, t)[0],
                                                  oracle::level1_sum(prp.raw_xhat(), 2, b.dX, i, s, t)));
        for (const auto& jk : config.level2())
          worst = std::max(worst, oracle::rel_gap(prp.reconstruct_level2(jk.j, jk.k, s, t)[0],
                                                  oracle::level2_sum(prp.raw_xhat(), 2, b.dX, cell, jk.j, jk.k, s, t)));
      }
    CHECK(worst <= 1e-12);
  }
  SUBCASE("reproducible") {
    const auto again = build_lift(simulate_brownian(g, -0.5, 7), kernel, config);
    CHECK(again.raw_xhat() == prp.raw_xhat());
    CHECK(again.raw_level1() == prp.raw_level1());
    CHECK(again.raw_level2() == prp.raw_level2());
  }
  SUBCASE("configuration errors") {
    CHECK_THROWS_AS(build_lift(b, kernel, IndexConfig::build(0.4, 0.3, 2)), ConfigError);
    CHECK_THROWS_AS(build_lift(b, kernel, IndexConfig::build(0.4, 0.2, 1)), ConfigError);
    CHECK_THROWS_AS(build_lift(b, kernel, IndexConfig::build(0.4, 0.2, 2, 2)), ConfigError);
    CHECK_THROWS_AS(build_lift(b, kernel, IndexConfig::build(0.4, 0.2, 2, 1, 2.0)), ConfigError);
  }
}

TEST_CASE("H = 0.5 collapses to the Brownian Itô lift") {
  const Grid g(1.0, 512);
  const auto b = simulate_brownian(g, 0.0, 5);
  const auto config = IndexConfig::build(0.4, 0.45, 2);
  const auto prp = build_lift(b, KernelSpec::riemann_liouville(0.5), config);
  const auto X = b.X(), W = b.W();
  const std::size_t p00 = config.require(IndexPair{MultiIndex::zero(2), MultiIndex::zero(2)});
  for (std::size_t q = 0; q <= 512; q += 8) {
    CHECK(prp.xhat(q)[0] == doctest::Approx(W[q]).epsilon(1e-12));
    CHECK(prp.anchored_level1(0, q)[0] == doctest::Approx(X[q]).epsilon(1e-12));
    // Σ_{r<r'} ΔX_r ΔX_r' + Σ (ΔX_r² − Δ)/2 telescopes to (X_t² − t)/2
    CHECK(std::abs(prp.anchored_level2(p00, q)[0] - 0.5 * (X[q] * X[q] - g.node(q))) <= 1e-12);
  }
}
