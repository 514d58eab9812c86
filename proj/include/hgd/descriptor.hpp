#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "hgd/image.hpp"
#include "hgd/patch_gaussian.hpp"
#include "hgd/region_gaussian.hpp"

namespace hgd {

enum class Variant : std::uint32_t { GOG = 0, ZOZ = 1, HGD = 2 };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct DescriptorConfig {
  int image_width = 48;
  int image_height = 128;
  int regions = 7;
  int strip_height = 32;
  int patch_size = 5;
  int patch_step = 2;
  double eps0 = 1e-3;
};

// One normalization unit: a single embedding on a single color space,
// covering all regions.
struct BlockLayout {
  Embedding kind = Embedding::Gauss;
  ColorSpace space = ColorSpace::RGB;
  Eigen::Index offset = 0;
  Eigen::Index length = 0;
  Eigen::Index region_dim = 0;   // r
  Eigen::Index matrix_side = 0;  // side of Q or R
  int regions = 0;
};

struct Layout {
  std::vector<BlockLayout> blocks;
  Eigen::Index total = 0;
};

// GOG blocks then ZOZ blocks, each over [RGB, Lab, HSV, nRnG].
Layout dims(Variant variant, const DescriptorConfig& config = {});

// Patch vector length m for one embedding on d-dimensional pixel features.
Eigen::Index patch_dim(Embedding kind, int feature_dim);
// Region matrix side for one embedding on patch vectors of length m.
Eigen::Index region_side(Embedding kind, Eigen::Index m);

struct PersonDescriptor {
  Variant variant = Variant::GOG;
  Vector data;
  Layout layout;
};

struct MatrixBlock {
  Embedding kind = Embedding::Gauss;
  ColorSpace space = ColorSpace::RGB;
  std::vector<SpdMatrix> regions;  // top to bottom
};

struct MatrixFormDescriptor {
  Variant variant = Variant::GOG;
  std::vector<MatrixBlock> blocks;  // same order as dims(variant).blocks
};

// Region matrices for one color space and embedding on an already-resized
// image.
std::vector<RegionMatrix> region_matrices(const Image& resized, ColorSpace space, Embedding kind,
                                          const DescriptorConfig& config);

MatrixFormDescriptor extract_matrix_form(const Image& img, Variant variant, const DescriptorConfig& config = {});

// Flattens every region matrix with flatten_region and concatenates.
PersonDescriptor flatten(const MatrixFormDescriptor& mdesc, const DescriptorConfig& config = {});

PersonDescriptor extract(const Image& img, Variant variant, const DescriptorConfig& config = {});

}  // namespace hgd
