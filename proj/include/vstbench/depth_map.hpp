#pragma once

#include <cmath>
#include <cstdint>

#include "vstbench/image.hpp"

namespace vstbench {

// Per-pixel z-depth in meters plus a validity mask. Invalid pixels are
// excluded from every statistic.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height, double fill = 0.0, bool valid = false)
      : depth_(width, height, fill), valid_(width, height, valid ? 1 : 0) {}

  int width() const { return depth_.width(); }
  int height() const { return depth_.height(); }

  double operator()(int x, int y) const { return depth_(x, y); }
  bool valid(int x, int y) const { return valid_(x, y) != 0; }

  void set(int x, int y, double d) {
    depth_(x, y) = d;
    valid_(x, y) = (d > 0.0 && std::isfinite(d)) ? 1 : 0;
  }
  void invalidate(int x, int y) {
    depth_(x, y) = 0.0;
    valid_(x, y) = 0;
  }

  const Image<double>& values() const { return depth_; }
  const Mask& mask() const { return valid_; }

  bool same_size(const DepthMap& o) const { return width() == o.width() && height() == o.height(); }
  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto v : valid_.data()) n += v ? 1 : 0;
    return n;
  }

  static DepthMap constant(int width, int height, double d) { return DepthMap(width, height, d, true); }

  bool operator==(const DepthMap&) const = default;

 private:
  Image<double> depth_;
  Mask valid_;
};

}  // namespace vstbench
