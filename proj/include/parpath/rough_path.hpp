#pragma once

// Level-2 α-Hölder rough path stored anchored at 0 on grid nodes.

#include <cstddef>
#include <span>
#include <vector>

#include "parpath/core.hpp"

namespace parpath {

class RoughPath {
 public:
  /// y1[q*d + a], y2[q*d*d + a*d + b]; y1 and y2 vanish at node 0.
  RoughPath(Grid grid, std::size_t d, std::vector<double> y1, std::vector<double> y2);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t d() const noexcept { return d_; }
  std::span<const double> anchored_level1(std::size_t q) const { return {y1_.data() + q * d_, d_}; }
  std::span<const double> anchored_level2(std::size_t q) const {
    return {y2_.data() + q * d_ * d_, d_ * d_};
  }
  const std::vector<double>& raw_level1() const noexcept { return y1_; }
  const std::vector<double>& raw_level2() const noexcept { return y2_; }

  /// Y1_st = y1(t) - y1(s)
  std::vector<double> level1(std::size_t s, std::size_t t) const;
  /// Y2_st = y2(t) - y2(s) - y1(s) ⊗ Y1_st
  std::vector<double> level2(std::size_t s, std::size_t t) const;

 private:
  void check_pair(std::size_t s, std::size_t t) const;

  Grid grid_;
  std::size_t d_;
  std::vector<double> y1_;
  std::vector<double> y2_;
};

/// (Y1, Y2) → (λY1, λ²Y2)
RoughPath dilate(const RoughPath& rp, double lambda);

}  // namespace parpath
