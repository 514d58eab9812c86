#include "hgd/pixel_features.hpp"

#include <algorithm>
#include <cmath>

#include "hgd/error.hpp"

namespace hgd {

PixelFeatureMap::PixelFeatureMap(int width, int height, int dim)
    : width_(width), height_(height), dim_(dim),
      values_(static_cast<std::size_t>(width) * height * dim, 0.0) {
  if (width <= 0 || height <= 0 || dim <= 0) fail(ErrorCode::ZeroDimension, "empty feature map");
}

std::array<double, 4> soft_vote(double magnitude, double orientation_deg) {
  double angle = std::fmod(orientation_deg, 360.0);
  if (angle < 0) angle += 360.0;
  const double bin = angle / 90.0;
  const double lower = std::floor(bin);
  const double frac = bin - lower;
  const int lo = static_cast<int>(lower) % 4;
  const int hi = (lo + 1) % 4;
  std::array<double, 4> out{};
  out[lo] += magnitude * (1.0 - frac);
  out[hi] += magnitude * frac;
  return out;
}

GradientPlanes oriented_gradients(const Image& img) {
  const int w = img.width(), h = img.height();
  std::vector<double> intensity(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      intensity[static_cast<std::size_t>(y) * w + x] = (img.at(x, y, 0) + img.at(x, y, 1) + img.at(x, y, 2)) / 3.0;

  auto I = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return intensity[static_cast<std::size_t>(y) * w + x];
  };

  GradientPlanes planes;
  for (auto& p : planes) p.assign(intensity.size(), 0.0);
  constexpr double kDeg = 180.0 / M_PI;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double ix = I(x + 1, y) - I(x - 1, y);
      const double iy = I(x, y + 1) - I(x, y - 1);
      const double mag = std::sqrt(ix * ix + iy * iy);
      if (mag == 0.0) continue;
      const auto votes = soft_vote(mag, std::atan2(iy, ix) * kDeg);
      const auto idx = static_cast<std::size_t>(y) * w + x;
      for (int b = 0; b < 4; ++b) planes[b][idx] = votes[b];
    }
  }
  return planes;
}

PixelFeatureMap build_feature_map(const Image& img, ColorSpace space) {
  if (img.empty()) fail(ErrorCode::ZeroDimension, "feature map of an empty image");
  const int w = img.width(), h = img.height();
  const int cdims = color_dims(space);
  PixelFeatureMap fm(w, h, feature_dims(space));

  const auto planes = oriented_gradients(img);
  std::array<double, 4> peak{};
  for (int b = 0; b < 4; ++b) peak[b] = *std::max_element(planes[b].begin(), planes[b].end());
  const auto color = convert_color(img, space);

  for (int y = 0; y < h; ++y) {
    const double yn = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
    for (int x = 0; x < w; ++x) {
      const auto idx = static_cast<std::size_t>(y) * w + x;
      auto f = fm.at(x, y);
      f[0] = yn;
      for (int b = 0; b < 4; ++b) f[1 + b] = peak[b] > 0 ? planes[b][idx] / peak[b] : 0.0;
      for (int c = 0; c < cdims; ++c) f[5 + c] = color[idx * cdims + c];
    }
  }
  return fm;
}

}  // namespace hgd
