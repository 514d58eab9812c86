#include "hgd/region_gaussian.hpp"

#include <cmath>
#include <string>

#include "hgd/error.hpp"

namespace hgd {

std::vector<Rect> horizontal_strips(int image_width, int image_height, int count, int strip_height) {
  if (count <= 0 || strip_height <= 0 || strip_height > image_height) {
    fail(ErrorCode::InvalidArgument, "strip layout does not fit the image");
  }
  std::vector<Rect> strips;
  strips.reserve(count);
  const int span = image_height - strip_height;
  for (int g = 0; g < count; ++g) {
    const int top = count == 1 ? 0 : static_cast<int>(std::lround(static_cast<double>(g) * span / (count - 1)));
    strips.push_back({0, top, image_width, strip_height});
  }
  return strips;
}

double patch_weight(double center_x, double image_width) {
  const double center = image_width / 2.0;
  const double sigma = image_width / 4.0;
  const double dx = center_x - center;
  return std::exp(-(dx * dx) / (2.0 * sigma * sigma));
}

RegionGaussian summarize_region(std::span<const Vector> gs, std::span<const double> ws, Embedding kind,
                                double eps0) {
  if (gs.empty()) fail(ErrorCode::EmptyRegion, "no patches to summarize");
  if (gs.size() != ws.size()) fail(ErrorCode::InconsistentLengths, "vector and weight counts differ");
  const Eigen::Index m = gs.front().size();

  RegionGaussian rg;
  rg.kind = kind;
  for (std::size_t s = 0; s < gs.size(); ++s) {
    if (gs[s].size() != m) fail(ErrorCode::InconsistentLengths, "patch vectors differ in length");
    rg.weight_sum += ws[s];
  }
  if (!(rg.weight_sum > 0.0)) fail(ErrorCode::EmptyRegion, "patch weights sum to zero");

  Vector mean = Vector::Zero(m);
  if (kind == Embedding::Gauss) {
    for (std::size_t s = 0; s < gs.size(); ++s) mean += ws[s] * gs[s];
    mean /= rg.weight_sum;
  }
  rg.moment = Matrix::Zero(m, m);
  Vector centered(m);
  for (std::size_t s = 0; s < gs.size(); ++s) {
    centered = gs[s] - mean;
    rg.moment.selfadjointView<Eigen::Lower>().rankUpdate(centered, ws[s]);
  }
  rg.moment.triangularView<Eigen::StrictlyUpper>() = rg.moment.transpose();
  rg.moment /= rg.weight_sum;
  rg.moment.diagonal().array() += eps0 * rg.moment.trace();
  if (kind == Embedding::Gauss) rg.mu = std::move(mean);
  return rg;
}

RegionMatrix embed_region(const RegionGaussian& rg, int region, ColorSpace space) {
  Matrix generator;
  if (rg.kind == Embedding::Gauss) {
    const Eigen::Index m = rg.mu.size();
    generator.resize(m + 1, m + 1);
    generator.topLeftCorner(m, m) = rg.moment + rg.mu * rg.mu.transpose();
    generator.topRightCorner(m, 1) = rg.mu;
    generator.bottomLeftCorner(1, m) = rg.mu.transpose();
    generator(m, m) = 1.0;
  } else {
    generator = rg.moment;
  }
  RegionMatrix rm;
  rm.matrix = expm(SymMatrix::symmetrized(detail::log_scale_normalize_raw(generator)));
  rm.kind = rg.kind;
  rm.region = region;
  rm.space = space;
  return rm;
}

Vector flatten_region(const RegionMatrix& rm) {
  return detail::half_vectorize_raw(detail::logm_raw(rm.matrix.data()));
}

Vector concat_regions(std::span<const Vector> zs) {
  if (zs.empty()) return {};
  const Eigen::Index r = zs.front().size();
  Vector out(r * static_cast<Eigen::Index>(zs.size()));
  for (std::size_t g = 0; g < zs.size(); ++g) {
    if (zs[g].size() != r) {
      fail(ErrorCode::InconsistentLengths, "region " + std::to_string(g) + " has length " +
                                               std::to_string(zs[g].size()) + ", expected " + std::to_string(r));
    }
    out.segment(static_cast<Eigen::Index>(g) * r, r) = zs[g];
  }
  return out;
}

}  // namespace hgd
