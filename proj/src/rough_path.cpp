#include "parpath/rough_path.hpp"

#include "parpath/error.hpp"

namespace parpath {

RoughPath::RoughPath(Grid grid, std::size_t d, std::vector<double> y1, std::vector<double> y2)
    : grid_(grid), d_(d), y1_(std::move(y1)), y2_(std::move(y2)) {
  if (d_ == 0) throw DomainError("rough path dimension must be >= 1");
  if (y1_.size() != grid_.size() * d_) throw DomainError("rough path level-1 array has wrong size");
  if (y2_.size() != grid_.size() * d_ * d_) throw DomainError("rough path level-2 array has wrong size");
}

void RoughPath::check_pair(std::size_t s, std::size_t t) const {
  if (t >= grid_.size()) throw DomainError("time index beyond grid");
  if (s > t) throw DomainError("rough path increments require s <= t");
}

std::vector<double> RoughPath::level1(std::size_t s, std::size_t t) const {
  check_pair(s, t);
  std::vector<double> out(d_);
  for (std::size_t a = 0; a < d_; ++a) out[a] = y1_[t * d_ + a] - y1_[s * d_ + a];
  return out;
}

std::vector<double> RoughPath::level2(std::size_t s, std::size_t t) const {
  check_pair(s, t);
  const auto inc = level1(s, t);
  const std::size_t dd = d_ * d_;
  std::vector<double> out(dd);
  for (std::size_t a = 0; a < d_; ++a)
    for (std::size_t b = 0; b < d_; ++b)
      out[a * d_ + b] = y2_[t * dd + a * d_ + b] - y2_[s * dd + a * d_ + b] - y1_[s * d_ + a] * inc[b];
  return out;
}

RoughPath dilate(const RoughPath& rp, double lambda) {
  auto y1 = rp.raw_level1();
  auto y2 = rp.raw_level2();
  for (double& v : y1) v *= lambda;
  for (double& v : y2) v *= lambda * lambda;
  return RoughPath(rp.grid(), rp.d(), std::move(y1), std::move(y2));
}

}  // namespace parpath
