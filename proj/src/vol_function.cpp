#include "parpath/vol_function.hpp"

#include <cmath>
#include <sstream>

#include "parpath/error.hpp"

namespace parpath {

VolFunction VolFunction::exponential(double xi, std::vector<double> rates) {
  if (rates.empty()) throw ConfigError("exponential family needs at least one rate");
  VolFunction f;
  f.family_ = Family::Exponential;
  f.e_ = rates.size();
  f.xi_ = xi;
  f.rates_ = std::move(rates);
  return f;
}

VolFunction VolFunction::polynomial(std::size_t e, std::vector<std::pair<MultiIndex, double>> terms) {
  if (e < 1) throw ConfigError("polynomial family needs e >= 1");
  for (const auto& [m, c] : terms)
    if (m.order() != e) throw ConfigError("polynomial monomial has wrong order");
  VolFunction f;
  f.family_ = Family::Polynomial;
  f.e_ = e;
  f.terms_ = std::move(terms);
  return f;
}

VolFunction VolFunction::constant(std::size_t e, double value) {
  if (e < 1) throw ConfigError("constant family needs e >= 1");
  VolFunction f;
  f.family_ = Family::Constant;
  f.e_ = e;
  f.xi_ = value;
  return f;
}

VolFunction VolFunction::finite_difference(std::size_t e, Callable fn, double h) {
  if (e < 1 || !fn) throw ConfigError("finite-difference family needs e >= 1 and a callable");
  if (!(h > 0.0 && h < 1.0)) throw ConfigError("finite-difference step must lie in (0, 1)");
  VolFunction f;
  f.family_ = Family::TabulatedFiniteDifference;
  f.e_ = e;
  f.callable_ = std::move(fn);
  f.h_ = h;
  return f;
}

double VolFunction::value(std::span<const double> x) const {
  if (x.size() < e_) throw DomainError("VolFunction: argument has too few coordinates");
  switch (family_) {
    case Family::Exponential: {
      double s = 0.0;
      for (std::size_t l = 0; l < e_; ++l) s += rates_[l] * x[l];
      return xi_ * std::exp(s);
    }
    case Family::Polynomial: {
      double s = 0.0;
      for (const auto& [m, c] : terms_) s += c * m.monomial(x.first(e_));
      return s;
    }
    case Family::Constant: return xi_;
    case Family::TabulatedFiniteDifference: return callable_(x.first(e_));
  }
  return 0.0;
}

void VolFunction::partials(const std::vector<MultiIndex>& indices, std::span<const double> x,
                           std::span<double> out) const {
  if (out.size() != indices.size()) throw DomainError("VolFunction: partials output has wrong size");
  if (family_ != Family::Exponential) {
    for (std::size_t k = 0; k < indices.size(); ++k) out[k] = partial(indices[k], x);
    return;
  }
  if (x.size() < e_) throw DomainError("VolFunction: argument has too few coordinates");
  const double v = value(x);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto& i = indices[k];
    if (i.order() != e_) throw DomainError("VolFunction: derivative multi-index has wrong order");
    double c = v;
    for (std::size_t l = 0; l < e_; ++l)
      for (int r = 0; r < i[l]; ++r) c *= rates_[l];
    out[k] = c;
  }
}

double VolFunction::partial(const MultiIndex& i, std::span<const double> x) const {
  if (i.order() != e_) throw DomainError("VolFunction: derivative multi-index has wrong order");
  if (x.size() < e_) throw DomainError("VolFunction: argument has too few coordinates");
  if (i.is_zero()) return value(x);
  switch (family_) {
    case Family::Exponential: {
      double c = 1.0;
      for (std::size_t l = 0; l < e_; ++l) c *= std::pow(rates_[l], i[l]);
      return c * value(x);
    }
    case Family::Polynomial: {
      double s = 0.0;
      for (const auto& [m, c] : terms_) {
        if (!i.leq(m)) continue;
        double coef = c;
        for (std::size_t l = 0; l < e_; ++l)
          for (int k = 0; k < i[l]; ++k) coef *= m[l] - k;
        s += coef * (m - i).monomial(x.first(e_));
      }
      return s;
    }
    case Family::Constant: return 0.0;
    case Family::TabulatedFiniteDifference: {
      const int k = i.degree();
      const double h = std::pow(h_, 2.0 / (k + 1));
      // Σ over the stencil product; each axis l with order r uses nodes (r/2 − m)h, weight (−1)^m C(r,m).
      std::vector<double> point(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(e_));
      std::vector<int> m(e_, 0);
      double total = 0.0;
      while (true) {
        double weight = 1.0;
        for (std::size_t l = 0; l < e_; ++l) {
          const int r = i[l];
          double binom = 1.0;
          for (int a = 1; a <= m[l]; ++a) binom = binom * (r - a + 1) / a;
          weight *= (m[l] % 2 ? -binom : binom);
          point[l] = x[l] + (0.5 * r - m[l]) * h;
        }
        total += weight * callable_(point);
        std::size_t l = 0;
        while (l < e_ && ++m[l] > i[l]) m[l++] = 0;
        if (l == e_) break;
      }
      return total / std::pow(h, k);
    }
  }
  return 0.0;
}

bool VolFunction::strictly_positive() const noexcept {
  return (family_ == Family::Exponential || family_ == Family::Constant) && xi_ > 0.0;
}

std::string VolFunction::describe() const {
  std::ostringstream os;
  switch (family_) {
    case Family::Exponential:
      os << "exponential(xi=" << xi_;
      for (double r : rates_) os << ',' << r;
      os << ')';
      break;
    case Family::Polynomial: os << "polynomial(" << terms_.size() << " terms)"; break;
    case Family::Constant: os << "constant(" << xi_ << ')'; break;
    case Family::TabulatedFiniteDifference: os << "finite_difference(h=" << h_ << ')'; break;
  }
  return os.str();
}

VolFunction VolFunction::embedded(std::size_t e) const {
  if (e < e_) throw DomainError("VolFunction::embedded cannot shrink the domain");
  VolFunction f = *this;
  f.e_ = e;
  switch (family_) {
    case Family::Exponential: f.rates_.resize(e, 0.0); break;
    case Family::Polynomial:
      for (auto& [m, c] : f.terms_) {
        auto v = m.entries();
        v.resize(e, 0);
        m = MultiIndex(v);
      }
      break;
    case Family::Constant: break;
    case Family::TabulatedFiniteDifference: {
      const std::size_t inner = e_;
      f.callable_ = [g = callable_, inner](std::span<const double> x) { return g(x.first(inner)); };
      break;
    }
  }
  return f;
}

}  // namespace parpath
