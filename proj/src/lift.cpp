#include "parpath/lift.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "parpath/error.hpp"

namespace parpath {

KernelSpec KernelSpec::riemann_liouville(double H, double delta) {
  if (!(H > 0.0 && H <= 0.5)) throw ConfigError("kernel.H must lie in (0, 1/2], got " + std::to_string(H));
  if (!(delta > 0.0 && delta < 0.5)) throw ConfigError("kernel.delta must lie in (0, 1/2)");
  if (!(delta < H)) throw ConfigError("kernel.delta must be smaller than kernel.H so that zeta > 0");
  KernelSpec k;
  k.variant_ = Variant::RiemannLiouville;
  k.H_ = H;
  k.delta_ = delta;
  k.norm_ = 1.0 / std::tgamma(H + 0.5);
  return k;
}

KernelSpec KernelSpec::exp_damped(double H, double lambda, double delta) {
  KernelSpec k = riemann_liouville(H, delta);
  if (!(lambda >= 0.0)) throw ConfigError("kernel.lambda must be nonnegative");
  k.variant_ = Variant::ExpDamped;
  k.lambda_ = lambda;
  return k;
}

double KernelSpec::operator()(double t) const {
  if (!(t > 0.0)) throw DomainError("kernel evaluated at t <= 0");
  double v = norm_ * std::pow(t, H_ - 0.5);
  if (variant_ == Variant::ExpDamped) v *= std::exp(-lambda_ * t);
  return v;
}

double KernelSpec::derivative(double t) const {
  if (!(t > 0.0)) throw DomainError("kernel derivative evaluated at t <= 0");
  const double p = H_ - 0.5;
  const double base = norm_ * std::pow(t, p);
  if (variant_ == Variant::RiemannLiouville) return base * p / t;
  return base * std::exp(-lambda_ * t) * (p / t - lambda_);
}

double KernelSpec::integral(double h) const {
  if (h < 0.0) throw DomainError("kernel integral over negative length");
  if (h == 0.0) return 0.0;
  const double a = H_ + 0.5;
  if (variant_ == Variant::RiemannLiouville || lambda_ == 0.0) return norm_ * std::pow(h, a) / a;
  // ∫_0^h e^{−λu} u^{a−1} du = λ^{−a} γ(a, λh)
  return norm_ * std::pow(lambda_, -a) * boost::math::tgamma_lower(a, lambda_ * h);
}

std::vector<double> KernelSpec::convolution_weights(double dt, std::size_t N) const {
  std::vector<double> w(N + 1, 0.0);
  if (has_closed_form()) {
    const double a = H_ + 0.5;
    const double scale = std::pow(dt, H_ - 0.5) * norm_ / a;
    double prev = 0.0;
    for (std::size_t k = 1; k <= N; ++k) {
      const double cur = std::pow(static_cast<double>(k), a);
      w[k] = scale * (cur - prev);
      prev = cur;
    }
  } else {
    for (std::size_t k = 1; k <= N; ++k) w[k] = (*this)(static_cast<double>(k) * dt);
  }
  return w;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t path, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32),
                    static_cast<std::uint32_t>(stream), 0x70617270u};
  return std::mt19937_64(seq);
}

namespace {
std::vector<double> cumulative(const std::vector<double>& inc) {
  std::vector<double> out(inc.size() + 1, 0.0);
  for (std::size_t q = 0; q < inc.size(); ++q) out[q + 1] = out[q] + inc[q];
  return out;
}
}  // namespace

std::vector<double> BrownianBundle::W() const { return cumulative(dW); }
std::vector<double> BrownianBundle::Wperp() const { return cumulative(dWperp); }
std::vector<double> BrownianBundle::X() const { return cumulative(dX); }

BrownianBundle simulate_brownian(const Grid& grid, double rho, std::uint64_t seed, std::uint64_t path) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw ConfigError("corr.rho must lie in [-1, 1]");
  const std::size_t N = grid.N();
  const double sd = std::sqrt(grid.dt());
  BrownianBundle b{grid, rho, seed, path, std::vector<double>(N), std::vector<double>(N), std::vector<double>(N)};
  auto s0 = make_stream(seed, path, 0);
  auto s1 = make_stream(seed, path, 1);
  std::normal_distribution<double> normal;
  for (std::size_t q = 0; q < N; ++q) b.dW[q] = sd * normal(s0);
  normal.reset();
  for (std::size_t q = 0; q < N; ++q) b.dWperp[q] = sd * normal(s1);
  const double perp = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  for (std::size_t q = 0; q < N; ++q) b.dX[q] = rho == 1.0 ? b.dW[q] : rho * b.dW[q] + perp * b.dWperp[q];
  return b;
}

std::vector<double> volterra_convolve(std::span<const double> dW, const KernelSpec& kernel, const Grid& grid) {
  const std::size_t N = grid.N();
  if (dW.size() != N) throw DomainError("volterra_convolve: increments have wrong size");
  const auto w = kernel.convolution_weights(grid.dt(), N);
  // rev[i] = dW[N-1-i]; X̂_q = Σ_{m=1..q} w[m] rev[N-1-q+m], both operands contiguous.
  std::vector<double> rev(dW.rbegin(), dW.rend());
  std::vector<double> out(N + 1, 0.0);
  for (std::size_t q = 1; q <= N; ++q) {
    const double* a = w.data() + 1;
    const double* b = rev.data() + (N - q);
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t m = 0;
    for (; m + 4 <= q; m += 4) {
      acc[0] += a[m] * b[m];
      acc[1] += a[m + 1] * b[m + 1];
      acc[2] += a[m + 2] * b[m + 2];
      acc[3] += a[m + 3] * b[m + 3];
    }
    for (; m < q; ++m) acc[0] += a[m] * b[m];
    out[q] = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  }
  return out;
}

std::vector<double> volterra_convolve(const BrownianBundle& bundle, const KernelSpec& kernel) {
  return volterra_convolve(bundle.dW, kernel, bundle.grid);
}

std::vector<double> k_operator(std::span<const double> f, const KernelSpec& kernel, const Grid& grid) {
  const std::size_t N = grid.N();
  if (f.size() != N + 1) throw DomainError("k_operator: samples must cover every grid node");
  const double dt = grid.dt();
  std::vector<double> out(N + 1, 0.0);
  // Last cell, u ∈ [0, Δ]: f(s) − f(t) = c1 u with c1 = −(f_q − f_{q−1})/Δ and ∫_0^Δ u κ'(u) du = Δκ(Δ) − ∫_0^Δ κ.
  const double last_moment = dt * kernel(dt) - kernel.integral(dt);
  for (std::size_t q = 1; q <= N; ++q) {
    const double fq = f[q];
    double acc = kernel(grid.node(q)) * (fq - f[0]);
    acc += -(fq - f[q - 1]) / dt * last_moment;
    for (std::size_t j = 0; j + 1 < q; ++j) {
      const double u0 = static_cast<double>(q - j - 1) * dt;
      const double u1 = u0 + dt;
      const double D = f[j + 1] - f[j];
      if (kernel.has_closed_form()) {
        // f(s) − f_q = c0 + c1 u on this cell, u = t_q − s.
        const double c1 = -D / dt;
        const double c0 = f[j] - fq + D * u1 / dt;
        const double k0 = kernel(u0), k1 = kernel(u1);
        const double moment = u1 * k1 - u0 * k0 - (kernel.integral(u1) - kernel.integral(u0));
        acc += c0 * (k1 - k0) + c1 * moment;
      } else {
        const double fm = f[j] + 0.5 * D;
        acc += (fm - fq) * kernel.derivative(0.5 * (u0 + u1)) * dt;
      }
    }
    out[q] = acc;
  }
  return out;
}

double kernel_l2_norm_sq(const KernelSpec& kernel, double s, double t) {
  if (!(t > s) || s < 0.0) throw DomainError("kernel_l2_norm_sq requires 0 <= s < t");
  const double h = t - s;
  boost::math::quadrature::tanh_sinh<double> q;
  auto sq = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double k = kernel(u);
    return k * k;
  };
  double total = q.integrate(sq, 0.0, h);
  if (s > 0.0) {
    auto diff = [&](double u) {
      if (u <= 0.0) return 0.0;
      const double v = kernel(h + u) - kernel(u);
      return v * v;
    };
    const double split = std::min(h, s);
    total += q.integrate(diff, 0.0, split);
    if (s > split) total += q.integrate(diff, split, s);
  }
  return total;
}

KernelL2Report kernel_l2_check(const KernelSpec& kernel, double T, double s, int min_level, int max_level) {
  if (!(T > 0.0) || s < 0.0 || s >= T) throw DomainError("kernel_l2_check: need 0 <= s < T");
  if (min_level < 0 || max_level <= min_level) throw DomainError("kernel_l2_check: bad level range");
  KernelL2Report r;
  r.expected = 2.0 * (kernel.zeta() - kernel.gamma()) + 1.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int j = min_level; j <= max_level; ++j) {
    const double h = T * std::ldexp(1.0, -j);
    const double v = kernel_l2_norm_sq(kernel, s, s + h);
    r.points.push_back({h, v});
    const double x = std::log(h), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  r.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  r.violated = r.slope < r.expected - 0.1;
  return r;
}

PartialRoughPath build_lift(const BrownianBundle& bundle, const KernelSpec& kernel, const IndexConfig& config) {
  if (config.e() != 2) throw ConfigError("the lift needs e = 2 (x̂ = (X̂1, t^zeta))");
  if (config.d() != 1) throw ConfigError("the lift is one-dimensional in X (d = 1)");
  if (!(config.beta() < kernel.zeta()))
    throw ConfigError("path.beta must be smaller than zeta = kernel.H - kernel.delta");
  const Grid& grid = bundle.grid;
  if (std::abs(config.T() - grid.T()) > 1e-12 * grid.T()) throw ConfigError("index configuration horizon differs from grid.T");
  if (!kernel.has_closed_form()) {
    const auto check = kernel_l2_check(kernel, grid.T(), 0.5 * grid.T());
    if (check.violated) throw ConfigError("kernel fails the L2 increment-regularity check");
  }
  const std::size_t N = grid.N();
  const auto x1 = volterra_convolve(bundle, kernel);
  std::vector<double> xhat(2 * (N + 1));
  for (std::size_t q = 0; q <= N; ++q) {
    xhat[2 * q] = x1[q];
    xhat[2 * q + 1] = q == 0 ? 0.0 : std::pow(grid.node(q), kernel.zeta());
  }
  std::vector<double> cell(N);
  const double dt = grid.dt();
  for (std::size_t q = 0; q < N; ++q) cell[q] = 0.5 * (bundle.dX[q] * bundle.dX[q] - dt);
  return build_discrete_lift(config, grid, xhat, bundle.dX, cell);
}

}  // namespace parpath
