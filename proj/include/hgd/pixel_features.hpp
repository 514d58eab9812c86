#pragma once

#include <array>
#include <span>
#include <vector>

#include "hgd/image.hpp"

namespace hgd {

// H x W grid of d-dimensional pixel features:
// [y, M_0, M_90, M_180, M_270, color...], every component in [0,1].
class PixelFeatureMap {
 public:
  PixelFeatureMap() = default;
  PixelFeatureMap(int width, int height, int dim);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int dim() const noexcept { return dim_; }

  std::span<double> at(int x, int y) { return {values_.data() + offset(x, y), static_cast<std::size_t>(dim_)}; }
  std::span<const double> at(int x, int y) const {
    return {values_.data() + offset(x, y), static_cast<std::size_t>(dim_)};
  }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t offset(int x, int y) const { return (static_cast<std::size_t>(y) * width_ + x) * dim_; }
  int width_ = 0;
  int height_ = 0;
  int dim_ = 0;
  std::vector<double> values_;
};

inline int feature_dims(ColorSpace space) { return 5 + color_dims(space); }

// Four gradient-magnitude planes for bins {0, 90, 180, 270} degrees, each
// width*height values in row-major order, not yet stretched.
using GradientPlanes = std::array<std::vector<double>, 4>;

// Intensity (R+G+B)/3, [-1 0 1] derivatives with replicated borders,
// orientation atan2(Iy, Ix) over [0, 360) with x to the right and y down,
// magnitude soft-voted into the two nearest bins.
GradientPlanes oriented_gradients(const Image& img);

// Splits magnitude m at orientation (degrees) into the four bins.
std::array<double, 4> soft_vote(double magnitude, double orientation_deg);

PixelFeatureMap build_feature_map(const Image& img, ColorSpace space);

}  // namespace hgd
