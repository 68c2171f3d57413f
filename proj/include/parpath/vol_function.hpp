#pragma once

// Integrands f : R^e → R with all partial derivatives ∂^i f.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "parpath/core.hpp"

namespace parpath {

class VolFunction {
 public:
  enum class Family { Exponential, Polynomial, Constant, TabulatedFiniteDifference };
  using Callable = std::function<double(std::span<const double>)>;

  /// f(x) = ξ exp(Σ_l η_l x_l)
  static VolFunction exponential(double xi, std::vector<double> rates);
  /// f(x) = Σ c_m x^m
  static VolFunction polynomial(std::size_t e, std::vector<std::pair<MultiIndex, double>> terms);
  static VolFunction constant(std::size_t e, double value);
  /// Partials by tensor-product central differences; total order k uses step h^{2/(k+1)}.
  static VolFunction finite_difference(std::size_t e, Callable f, double h = 1e-5);

  Family family() const noexcept { return family_; }
  std::size_t dim() const noexcept { return e_; }
  double value(std::span<const double> x) const;
  double partial(const MultiIndex& i, std::span<const double> x) const;
  /// out[k] = ∂^{indices[k]} f(x); one evaluation of f for the exponential family.
  void partials(const std::vector<MultiIndex>& indices, std::span<const double> x, std::span<double> out) const;
  /// Positivity is guaranteed by construction for Exponential with ξ > 0 and Constant > 0.
  bool strictly_positive() const noexcept;
  std::string describe() const;

  /// Same function with its domain extended to R^e by ignoring trailing coordinates.
  VolFunction embedded(std::size_t e) const;

 private:
  Family family_ = Family::Constant;
  std::size_t e_ = 1;
  double xi_ = 0.0;
  std::vector<double> rates_;
  std::vector<std::pair<MultiIndex, double>> terms_;
  Callable callable_;
  double h_ = 1e-5;
};

}  // namespace parpath
