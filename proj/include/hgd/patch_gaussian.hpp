#pragma once

#include <vector>

#include "hgd/pixel_features.hpp"
#include "hgd/spd_manifold.hpp"

namespace hgd {

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  int area() const noexcept { return width * height; }
  bool operator==(const Rect&) const = default;
};

struct RectSums {
  Vector sum;       // sum of f
  Matrix outer;     // sum of f f^T
  int count = 0;
};

// Exclusive-prefix cumulative sums of f and f f^T; any rectangle query
// costs four lookups. Immutable after construction.
class IntegralImages {
 public:
  explicit IntegralImages(const PixelFeatureMap& fm);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int dim() const noexcept { return dim_; }

  RectSums query(const Rect& r) const;

 private:
  std::size_t node(int x, int y) const { return static_cast<std::size_t>(y) * (width_ + 1) + x; }
  int width_ = 0;
  int height_ = 0;
  int dim_ = 0;
  int packed_ = 0;              // d(d+1)/2 upper-triangle entries
  std::vector<double> sum1_;    // (H+1)(W+1) x d
  std::vector<double> sum2_;    // (H+1)(W+1) x packed
};

IntegralImages build_integrals(const PixelFeatureMap& fm);

struct PatchGaussian {
  Vector mu;
  Matrix sigma;  // unbiased, divisor n-1
  int n = 0;
  Rect region;
};

// Throws TooFewPixels when the rectangle holds fewer than two pixels.
PatchGaussian patch_stats(const IntegralImages& ints, const Rect& rect);

// eps0 * max(trace, 1e-2), the patch-level regularizer.
double patch_regularizer(const Matrix& m, double eps0);

// sigma + eps_s I with eps_s = eps0 * max(tr(sigma), 1e-2).
PatchGaussian regularize_patch(const PatchGaussian& pg, double eps0);

// Raw second moment (1/(n-1)) sum f f^T = sigma + n/(n-1) mu mu^T.
Matrix autocorrelation(const PatchGaussian& pg);

enum class Embedding { Gauss, ZmG };

// An embedded patch keeps the unnormalized generator (G_s or Xi_s); the
// scale-normalized SPD matrix is eta(generator), determinant one.
struct EmbeddedPatch {
  Matrix generator;
  Embedding kind = Embedding::Gauss;

  // Materializes eta(generator) through the log domain.
  SpdMatrix matrix() const;
  Eigen::Index side() const noexcept { return generator.rows(); }
};

// [[sigma + mu mu^T, mu], [mu^T, 1]], side d+1. Expects a regularized patch.
EmbeddedPatch gauss_embed(const PatchGaussian& pg);

// Xi = autocorrelation(pg) + eps0 * max(tr(Xi), 1e-2) I, side d. Takes the
// unregularized patch; eps0 == 0 disables regularization.
EmbeddedPatch zmg_embed(const PatchGaussian& pg, double eps0);

// half_vectorize(log eta(generator)), computed without the determinant.
TangentVector flatten_patch(const EmbeddedPatch& ep);

struct PatchSite {
  Rect rect;
  double center_x = 0.0;
};

// k x k windows stepping by p from the region's top-left, fully inside it.
std::vector<PatchSite> dense_patches(const Rect& region, int k, int p);

}  // namespace hgd
