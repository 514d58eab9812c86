#include "hgd/patch_gaussian.hpp"

#include <algorithm>
#include <string>

#include "hgd/error.hpp"

namespace hgd {

IntegralImages::IntegralImages(const PixelFeatureMap& fm)
    : width_(fm.width()), height_(fm.height()), dim_(fm.dim()), packed_(fm.dim() * (fm.dim() + 1) / 2) {
  if (width_ <= 0 || height_ <= 0) fail(ErrorCode::ZeroDimension, "integral images of an empty map");
  const std::size_t nodes = static_cast<std::size_t>(width_ + 1) * (height_ + 1);
  sum1_.assign(nodes * dim_, 0.0);
  sum2_.assign(nodes * packed_, 0.0);

  std::vector<double> row1(dim_), row2(packed_);
  for (int y = 0; y < height_; ++y) {
    std::fill(row1.begin(), row1.end(), 0.0);
    std::fill(row2.begin(), row2.end(), 0.0);
    for (int x = 0; x < width_; ++x) {
      const auto f = fm.at(x, y);
      for (int i = 0, k = 0; i < dim_; ++i) {
        row1[i] += f[i];
        for (int j = i; j < dim_; ++j, ++k) row2[k] += f[i] * f[j];
      }
      const std::size_t here = node(x + 1, y + 1), above = node(x + 1, y);
      for (int i = 0; i < dim_; ++i) sum1_[here * dim_ + i] = sum1_[above * dim_ + i] + row1[i];
      for (int k = 0; k < packed_; ++k) sum2_[here * packed_ + k] = sum2_[above * packed_ + k] + row2[k];
    }
  }
}

RectSums IntegralImages::query(const Rect& r) const {
  if (r.x < 0 || r.y < 0 || r.width < 0 || r.height < 0 || r.x + r.width > width_ || r.y + r.height > height_) {
    fail(ErrorCode::InvalidArgument, "rectangle outside the feature map");
  }
  const std::size_t a = node(r.x, r.y), b = node(r.x + r.width, r.y);
  const std::size_t c = node(r.x, r.y + r.height), d = node(r.x + r.width, r.y + r.height);
  RectSums out;
  out.count = r.area();
  out.sum.resize(dim_);
  for (int i = 0; i < dim_; ++i) {
    out.sum(i) = sum1_[d * dim_ + i] - sum1_[b * dim_ + i] - sum1_[c * dim_ + i] + sum1_[a * dim_ + i];
  }
  out.outer.resize(dim_, dim_);
  for (int i = 0, k = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j, ++k) {
      const double v =
          sum2_[d * packed_ + k] - sum2_[b * packed_ + k] - sum2_[c * packed_ + k] + sum2_[a * packed_ + k];
      out.outer(i, j) = out.outer(j, i) = v;
    }
  }
  return out;
}

IntegralImages build_integrals(const PixelFeatureMap& fm) { return IntegralImages(fm); }

PatchGaussian patch_stats(const IntegralImages& ints, const Rect& rect) {
  if (rect.area() < 2) fail(ErrorCode::TooFewPixels, "patch has " + std::to_string(rect.area()) + " pixels");
  const RectSums s = ints.query(rect);
  const double n = s.count;
  PatchGaussian pg;
  pg.n = s.count;
  pg.region = rect;
  pg.mu = s.sum / n;
  Matrix sigma = (s.outer - n * pg.mu * pg.mu.transpose()) / (n - 1.0);
  pg.sigma = 0.5 * (sigma + sigma.transpose());
  return pg;
}

double patch_regularizer(const Matrix& m, double eps0) { return eps0 * std::max(m.trace(), 1e-2); }

PatchGaussian regularize_patch(const PatchGaussian& pg, double eps0) {
  PatchGaussian out = pg;
  out.sigma.diagonal().array() += patch_regularizer(pg.sigma, eps0);
  return out;
}

Matrix autocorrelation(const PatchGaussian& pg) {
  const double n = pg.n;
  Matrix xi = pg.sigma + (n / (n - 1.0)) * pg.mu * pg.mu.transpose();
  return 0.5 * (xi + xi.transpose());
}

SpdMatrix EmbeddedPatch::matrix() const {
  return expm(SymMatrix::symmetrized(detail::log_scale_normalize_raw(generator)));
}

EmbeddedPatch gauss_embed(const PatchGaussian& pg) {
  const Eigen::Index d = pg.mu.size();
  EmbeddedPatch ep;
  ep.kind = Embedding::Gauss;
  ep.generator.resize(d + 1, d + 1);
  ep.generator.topLeftCorner(d, d) = pg.sigma + pg.mu * pg.mu.transpose();
  ep.generator.topRightCorner(d, 1) = pg.mu;
  ep.generator.bottomLeftCorner(1, d) = pg.mu.transpose();
  ep.generator(d, d) = 1.0;
  return ep;
}

EmbeddedPatch zmg_embed(const PatchGaussian& pg, double eps0) {
  EmbeddedPatch ep;
  ep.kind = Embedding::ZmG;
  ep.generator = autocorrelation(pg);
  if (eps0 > 0.0) ep.generator.diagonal().array() += patch_regularizer(ep.generator, eps0);
  return ep;
}

TangentVector flatten_patch(const EmbeddedPatch& ep) {
  return TangentVector(detail::half_vectorize_raw(detail::log_scale_normalize_raw(ep.generator)), ep.side());
}

std::vector<PatchSite> dense_patches(const Rect& region, int k, int p) {
  if (k <= 0 || p <= 0) fail(ErrorCode::InvalidArgument, "patch size and step must be positive");
  if (region.width < k || region.height < k) {
    fail(ErrorCode::RegionTooSmall, "region " + std::to_string(region.width) + "x" +
                                        std::to_string(region.height) + " cannot hold a " + std::to_string(k) +
                                        "-pixel patch");
  }
  std::vector<PatchSite> out;
  const int rows = (region.height - k) / p + 1;
  const int cols = (region.width - k) / p + 1;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Rect rect{region.x + c * p, region.y + r * p, k, k};
      out.push_back({rect, rect.x + (k - 1) / 2.0});
    }
  }
  return out;
}

}  // namespace hgd
