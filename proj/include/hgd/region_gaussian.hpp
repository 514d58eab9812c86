#pragma once

#include <span>
#include <vector>

#include "hgd/patch_gaussian.hpp"

namespace hgd {

// Horizontal strips of fixed height spanning the image, evenly spaced so
// the first starts at row 0 and the last ends at the bottom row.
std::vector<Rect> horizontal_strips(int image_width, int image_height, int count, int strip_height);

// exp(-(x - W/2)^2 / (2 (W/4)^2)).
double patch_weight(double center_x, double image_width);

struct RegionGaussian {
  Embedding kind = Embedding::Gauss;
  Vector mu;        // weighted mean; zero-length for ZmG
  Matrix moment;    // weighted covariance (Gauss) or autocorrelation (ZmG), regularized
  double weight_sum = 0.0;
};

// Weighted moments with divisor sum(w), then moment += eps0 * tr(moment) I.
RegionGaussian summarize_region(std::span<const Vector> gs, std::span<const double> ws, Embedding kind,
                                double eps0);

struct RegionMatrix {
  SpdMatrix matrix;  // Q (side m+1) or R (side m), determinant one
  Embedding kind = Embedding::Gauss;
  int region = 0;
  ColorSpace space = ColorSpace::RGB;
};

RegionMatrix embed_region(const RegionGaussian& rg, int region = 0, ColorSpace space = ColorSpace::RGB);

// half_vectorize(log matrix). The matrix is already scale-normalized, so
// the result has zero trace up to rounding.
Vector flatten_region(const RegionMatrix& rm);

// Throws InconsistentLengths unless every block has the same length.
Vector concat_regions(std::span<const Vector> zs);

}  // namespace hgd
