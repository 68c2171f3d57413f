#include "parpath/rate.hpp"

#include <ceres/ceres.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "parpath/error.hpp"
#include "parpath/lift.hpp"
#include "parpath/parallel.hpp"

namespace parpath {

void RateProblem::validate() const {
  if (!(H > 0.0 && H <= 0.5)) throw ConfigError("rate.H must lie in (0, 1/2]");
  if (!(std::abs(rho) < 1.0)) throw ConfigError("rate.rho must satisfy |rho| < 1");
  if (!(sigma0 > 0.0)) throw ConfigError("rate.sigma0 must be positive");
  if (K < 2) throw ConfigError("rate.K must be >= 2");
}

std::vector<double> kh_matrix(double H, std::size_t K) {
  if (K < 1) throw DomainError("kh_matrix needs K >= 1");
  const double a = H + 0.5;
  const double norm = 1.0 / std::tgamma(H + 1.5);
  const double dt = 1.0 / static_cast<double>(K);
  std::vector<double> A(K * K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * dt;
    for (std::size_t j = 0; j <= k; ++j) {
      const double lo = static_cast<double>(j) * dt;
      const double hi = std::min(static_cast<double>(j + 1) * dt, t);
      A[k * K + j] = norm * (std::pow(t - lo, a) - std::pow(t - hi, a));
    }
  }
  return A;
}

std::vector<double> kh_convolve(std::span<const double> g, double H) {
  const std::size_t K = g.size();
  const auto A = kh_matrix(H, K);
  std::vector<double> u(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j <= k; ++j) u[k] += A[k * K + j] * g[j];
  return u;
}

namespace {

// Cached pieces shared by objective and optimality check.
struct Evaluation {
  std::vector<double> u, f, df;
  double P = 0, Q = 0;
};

Evaluation evaluate_f(std::span<const double> g, const RateProblem& pb, const std::vector<double>& A) {
  const std::size_t K = g.size();
  const double dt = 1.0 / static_cast<double>(K);
  Evaluation ev;
  ev.u.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j <= k; ++j) ev.u[k] += A[k * K + j] * g[j];
  ev.f.resize(K);
  ev.df.resize(K);
  std::vector<double> point(pb.f.dim(), 0.0);
  const auto axis = MultiIndex::unit(pb.f.dim(), 0);
  for (std::size_t k = 0; k < K; ++k) {
    point[0] = ev.u[k];
    ev.f[k] = pb.f.value(point);
    ev.df[k] = pb.f.partial(axis, point);
    ev.P += ev.f[k] * g[k] * dt;
    ev.Q += ev.f[k] * ev.f[k] * dt;
  }
  if (!(ev.Q >= 1e-12)) throw NumericalError("vol function vanishes on the rate grid (degenerate problem)");
  return ev;
}

double objective_impl(std::span<const double> g, double z, const RateProblem& pb, const std::vector<double>& A,
                      std::span<double> grad) {
  const std::size_t K = g.size();
  const double dt = 1.0 / static_cast<double>(K);
  const auto ev = evaluate_f(g, pb, A);
  const double c = 1.0 / (2.0 * (1.0 - pb.rho * pb.rho) * pb.sigma0 * pb.sigma0);
  const double R = z - pb.rho * pb.sigma0 * ev.P;
  double energy = 0.0;
  for (double v : g) energy += v * v;
  const double value = 0.5 * energy * dt + c * R * R / ev.Q;
  if (!grad.empty()) {
    // ∂P/∂g_m = f_m Δ + Σ_k f'_k g_k Δ A_km,  ∂Q/∂g_m = Σ_k 2 f_k f'_k Δ A_km
    std::vector<double> vP(K), vQ(K);
    for (std::size_t k = 0; k < K; ++k) {
      vP[k] = ev.df[k] * g[k] * dt;
      vQ[k] = 2.0 * ev.f[k] * ev.df[k] * dt;
    }
    for (std::size_t m = 0; m < K; ++m) {
      double dP = ev.f[m] * dt, dQ = 0.0;
      for (std::size_t k = m; k < K; ++k) {
        dP += vP[k] * A[k * K + m];
        dQ += vQ[k] * A[k * K + m];
      }
      grad[m] = g[m] * dt + c * (-2.0 * R * pb.rho * pb.sigma0 * dP / ev.Q - R * R / (ev.Q * ev.Q) * dQ);
    }
  }
  return value;
}

// Parameters x = g √Δ so that the quadratic part is ½|x|².
class ScaledObjective : public ceres::FirstOrderFunction {
 public:
  ScaledObjective(double z, const RateProblem& pb, const std::vector<double>& A)
      : z_(z), pb_(pb), A_(A), scale_(std::sqrt(static_cast<double>(pb.K))) {}
  bool Evaluate(const double* x, double* cost, double* gradient) const override {
    const std::size_t K = pb_.K;
    std::vector<double> g(x, x + K);
    for (double& v : g) v *= scale_;
    std::vector<double> grad(gradient ? K : 0);
    try {
      *cost = objective_impl(g, z_, pb_, A_, grad);
    } catch (const NumericalError&) {
      return false;
    }
    if (!std::isfinite(*cost)) return false;
    if (gradient)
      for (std::size_t m = 0; m < K; ++m) gradient[m] = grad[m] * scale_;
    return true;
  }
  int NumParameters() const override { return static_cast<int>(pb_.K); }

 private:
  double z_;
  const RateProblem& pb_;
  const std::vector<double>& A_;
  double scale_;
};

double scaled_grad_norm(std::span<const double> g, double z, const RateProblem& pb, const std::vector<double>& A,
                        double& value) {
  std::vector<double> grad(g.size());
  value = objective_impl(g, z, pb, A, grad);
  const double scale = std::sqrt(static_cast<double>(g.size()));
  double s = 0.0;
  for (double v : grad) s += (v * scale) * (v * scale);
  return std::sqrt(s);
}

}  // namespace

double rate_objective(std::span<const double> g, double z, const RateProblem& problem, std::span<double> grad) {
  problem.validate();
  if (g.size() != problem.K) throw DomainError("rate_objective: g must have K entries");
  if (!grad.empty() && grad.size() != problem.K) throw DomainError("rate_objective: gradient must have K entries");
  return objective_impl(g, z, problem, kh_matrix(problem.H, problem.K), grad);
}

double constant_f_rate(double z, double sigma0, double v0) { return z * z / (2.0 * sigma0 * sigma0 * v0 * v0); }

OptimalityCheck optimality_check(std::span<const double> g, double z, const RateProblem& pb) {
  pb.validate();
  const std::size_t K = pb.K;
  if (g.size() != K) throw DomainError("optimality_check: g must have K entries");
  const auto A = kh_matrix(pb.H, K);
  const double dt = 1.0 / static_cast<double>(K);
  const auto ev = evaluate_f(g, pb, A);
  const double s = std::sqrt(1.0 - pb.rho * pb.rho);
  const double R = z - pb.rho * pb.sigma0 * ev.P;
  OptimalityCheck out{};
  out.c = R / (s * pb.sigma0 * ev.Q);
  out.lambda = out.c / (pb.sigma0 * s);
  // ∂C/∂g_m = σ0 [ρ f_m Δ + Σ_k f'_k (ρ g_k + s g2_k) Δ A_km], g2 = c f
  for (std::size_t m = 0; m < K; ++m) {
    double dC = pb.rho * ev.f[m] * dt;
    for (std::size_t k = m; k < K; ++k)
      dC += ev.df[k] * (pb.rho * g[k] + s * out.c * ev.f[k]) * dt * A[k * K + m];
    dC *= pb.sigma0;
    out.residual = std::max(out.residual, std::abs(g[m] - out.lambda * dC / dt));
  }
  return out;
}

RateSolution minimize_rate(double z, const RateProblem& problem, const RateOptions& options) {
  problem.validate();
  if (options.starts < 1) throw ConfigError("rate.starts must be >= 1");
  const std::size_t K = problem.K;
  const auto A = kh_matrix(problem.H, K);
  const double sqrt_dt = 1.0 / std::sqrt(static_cast<double>(K));

  ceres::GradientProblemSolver::Options opts;
  opts.line_search_direction_type = ceres::BFGS;
  opts.max_num_iterations = options.max_iterations;
  opts.function_tolerance = 1e-16;
  opts.gradient_tolerance = 1e-13;
  opts.parameter_tolerance = 1e-16;
  opts.logging_type = ceres::SILENT;
  opts.minimizer_progress_to_stdout = false;

  std::vector<double> point(problem.f.dim(), 0.0);
  const double f0 = std::abs(problem.f.value(point));
  const double scale = std::max(std::abs(z) / (problem.sigma0 * std::max(f0, 1e-3)), 0.1);

  RateSolution best;
  best.z = z;
  best.value = std::numeric_limits<double>::infinity();
  std::size_t converged = 0;
  for (std::size_t start = 0; start < options.starts; ++start) {
    std::vector<double> x(K, 0.0);
    if (start > 0) {
      auto gen = make_stream(options.seed, start, 11);
      std::normal_distribution<double> normal;
      for (double& v : x) v = scale * normal(gen) * sqrt_dt;
    }
    ceres::GradientProblem gp(new ScaledObjective(z, problem, A));
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(opts, gp, x.data(), &summary);
    std::vector<double> g(K);
    for (std::size_t m = 0; m < K; ++m) g[m] = x[m] / sqrt_dt;
    double value = 0.0;
    double gnorm = 0.0;
    try {
      gnorm = scaled_grad_norm(g, z, problem, A, value);
    } catch (const NumericalError&) {
      continue;
    }
    if (!std::isfinite(value)) continue;
    if (gnorm <= 1e-8 * (1.0 + std::abs(value))) ++converged;
    if (value < best.value) {
      best.value = value;
      best.g = g;
      best.iterations = static_cast<int>(summary.iterations.size());
      best.grad_norm = gnorm;
    }
  }
  if (!std::isfinite(best.value)) throw NumericalError("rate minimization failed from every start");
  best.restarts = options.starts;
  best.converged = converged;
  const auto opt = optimality_check(best.g, z, problem);
  best.optimality_residual = opt.residual;
  best.multiplier = opt.c;
  return best;
}

std::vector<SmileRow> smile_curve(const RateProblem& problem, std::span<const double> z_grid,
                                  const RateOptions& options) {
  problem.validate();
  std::vector<SmileRow> rows(z_grid.size());
  parallel_for(z_grid.size(), [&](std::size_t idx) {
    RateOptions local = options;
    local.seed = options.seed + idx;
    const double z = z_grid[idx];
    const auto sol = minimize_rate(z, problem, local);
    const double sigma = sol.value > 0.0 && z != 0.0 ? std::abs(z) / std::sqrt(2.0 * sol.value)
                                                     : std::numeric_limits<double>::quiet_NaN();
    rows[idx] = {z, sol.value, sigma, sol.iterations, sol.restarts, sol.grad_norm};
  });
  return rows;
}

}  // namespace parpath
