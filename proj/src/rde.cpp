#include "parpath/rde.hpp"

#include <cmath>
#include <sstream>

#include "parpath/error.hpp"
#include "parpath/integrate.hpp"

namespace parpath {

SigmaFunction SigmaFunction::constant(double c) {
  SigmaFunction s;
  s.family_ = Family::Constant;
  s.a_ = c;
  return s;
}

SigmaFunction SigmaFunction::linear(double a, double b) {
  SigmaFunction s;
  s.family_ = Family::Linear;
  s.a_ = a;
  s.b_ = b;
  return s;
}

SigmaFunction SigmaFunction::smooth_bounded(Fn f, Fn df, Fn d2f, Fn d3f, std::string name) {
  if (!f || !df || !d2f || !d3f) throw ConfigError("smooth sigma needs the function and three derivatives");
  SigmaFunction s;
  s.family_ = Family::SmoothBounded;
  s.f_[0] = std::move(f);
  s.f_[1] = std::move(df);
  s.f_[2] = std::move(d2f);
  s.f_[3] = std::move(d3f);
  s.name_ = std::move(name);
  return s;
}

SigmaFunction SigmaFunction::tanh(double a, double b, double c) {
  auto f = [=](double x) { return a + b * std::tanh(c * x); };
  auto d1 = [=](double x) {
    const double t = std::tanh(c * x);
    return b * c * (1 - t * t);
  };
  auto d2 = [=](double x) {
    const double t = std::tanh(c * x);
    return -2 * b * c * c * t * (1 - t * t);
  };
  auto d3 = [=](double x) {
    const double t = std::tanh(c * x);
    return -2 * b * c * c * c * (1 - t * t) * (1 - 3 * t * t);
  };
  std::ostringstream name;
  name << "tanh(" << a << ',' << b << ',' << c << ')';
  return smooth_bounded(f, d1, d2, d3, name.str());
}

double SigmaFunction::operator()(double s) const {
  switch (family_) {
    case Family::Constant: return a_;
    case Family::Linear: return a_ + b_ * s;
    case Family::SmoothBounded: return f_[0](s);
  }
  return 0.0;
}

double SigmaFunction::derivative(double s, int order) const {
  if (order < 0 || order > 3) throw DomainError("sigma derivatives are available up to order 3");
  if (order == 0) return (*this)(s);
  switch (family_) {
    case Family::Constant: return 0.0;
    case Family::Linear: return order == 1 ? b_ : 0.0;
    case Family::SmoothBounded: return f_[order](s);
  }
  return 0.0;
}

std::string SigmaFunction::describe() const {
  std::ostringstream os;
  switch (family_) {
    case Family::Constant: os << "constant(" << a_ << ')'; break;
    case Family::Linear: os << "linear(" << a_ << ',' << b_ << ')'; break;
    case Family::SmoothBounded: os << name_; break;
  }
  return os.str();
}

std::vector<double> solve_rde(const RoughPath& driver, const SigmaFunction& sigma, double S0) {
  if (driver.d() != 1) throw DomainError("solve_rde needs a one-dimensional driver");
  const std::size_t N = driver.grid().N();
  std::vector<double> Sbar(N + 1, 0.0);
  for (std::size_t q = 0; q < N; ++q) {
    const double y1 = driver.anchored_level1(q + 1)[0] - driver.anchored_level1(q)[0];
    // Y2_{q,q+1} = y2(q+1) − y2(q) − y1(q) Y1_{q,q+1}
    const double y2 = driver.anchored_level2(q + 1)[0] - driver.anchored_level2(q)[0] -
                      driver.anchored_level1(q)[0] * y1;
    const double x = S0 + Sbar[q];
    const double sv = sigma(x);
    const double next = Sbar[q] + sv * y1 + sigma.derivative(x) * sv * y2;
    if (!std::isfinite(next) || std::abs(S0 + next) > kStateGuard)
      throw SolverError("RDE state left the admissible range after node " + std::to_string(q), q);
    Sbar[q + 1] = next;
  }
  return Sbar;
}

IndexConfig ModelSpec::index_config() const { return IndexConfig::build(alpha, beta, 2, 1, T); }

ModelPath solve_model(const ModelSpec& spec, std::uint64_t path_index) {
  const Grid grid = spec.grid();
  const auto config = spec.index_config();
  const auto bundle = simulate_brownian(grid, spec.rho, spec.seed, path_index);
  const auto prp = build_lift(bundle, spec.kernel, config);
  const auto f = spec.f.dim() == 2 ? spec.f : spec.f.embedded(2);
  const auto integral = integrate(prp, f, spec.tol);

  ModelPath out;
  out.Sbar = solve_rde(integral.path, spec.sigma, spec.S0);
  out.S.resize(out.Sbar.size());
  for (std::size_t q = 0; q < out.S.size(); ++q) out.S[q] = spec.S0 + out.Sbar[q];
  out.X = bundle.X();
  out.xhat1.resize(grid.size());
  for (std::size_t q = 0; q < grid.size(); ++q) out.xhat1[q] = prp.xhat(q)[0];

  out.S_em.assign(grid.size(), spec.S0);
  for (std::size_t q = 0; q < grid.N(); ++q) {
    const double s = out.S_em[q];
    out.S_em[q + 1] = s + spec.sigma(s) * f.value(prp.xhat(q)) * bundle.dX[q];
  }
  return out;
}

}  // namespace parpath
