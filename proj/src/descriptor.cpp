#include "hgd/descriptor.hpp"

#include <string>

#include "hgd/error.hpp"
#include "hgd/pixel_features.hpp"

namespace hgd {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::GOG: return "gog";
    case Variant::ZOZ: return "zoz";
    case Variant::HGD: return "hgd";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "gog" || name == "GOG") return Variant::GOG;
  if (name == "zoz" || name == "ZOZ") return Variant::ZOZ;
  if (name == "hgd" || name == "HGD" || name == "hgds") return Variant::HGD;
  fail(ErrorCode::InvalidArgument, "unknown descriptor variant '" + std::string(name) + "'");
}

Eigen::Index patch_dim(Embedding kind, int feature_dim) {
  const Eigen::Index side = kind == Embedding::Gauss ? feature_dim + 1 : feature_dim;
  return side * (side + 1) / 2;
}

Eigen::Index region_side(Embedding kind, Eigen::Index m) { return kind == Embedding::Gauss ? m + 1 : m; }

namespace {

std::vector<Embedding> embeddings_of(Variant variant) {
  switch (variant) {
    case Variant::GOG: return {Embedding::Gauss};
    case Variant::ZOZ: return {Embedding::ZmG};
    case Variant::HGD: return {Embedding::Gauss, Embedding::ZmG};
  }
  return {};
}

}  // namespace

Layout dims(Variant variant, const DescriptorConfig& config) {
  Layout layout;
  for (const Embedding kind : embeddings_of(variant)) {
    for (const ColorSpace space : kColorSpaces) {
      BlockLayout b;
      b.kind = kind;
      b.space = space;
      b.regions = config.regions;
      b.matrix_side = region_side(kind, patch_dim(kind, feature_dims(space)));
      b.region_dim = b.matrix_side * (b.matrix_side + 1) / 2;
      b.length = b.region_dim * config.regions;
      b.offset = layout.total;
      layout.total += b.length;
      layout.blocks.push_back(b);
    }
  }
  return layout;
}

std::vector<RegionMatrix> region_matrices(const Image& resized, ColorSpace space, Embedding kind,
                                          const DescriptorConfig& config) {
  const PixelFeatureMap fm = build_feature_map(resized, space);
  const IntegralImages ints(fm);
  const auto strips = horizontal_strips(fm.width(), fm.height(), config.regions, config.strip_height);

  std::vector<RegionMatrix> out;
  out.reserve(strips.size());
  std::vector<Vector> gs;
  std::vector<double> ws;
  for (std::size_t g = 0; g < strips.size(); ++g) {
    const auto sites = dense_patches(strips[g], config.patch_size, config.patch_step);
    gs.clear();
    ws.clear();
    for (const auto& site : sites) {
      const PatchGaussian pg = patch_stats(ints, site.rect);
      const EmbeddedPatch ep =
          kind == Embedding::Gauss ? gauss_embed(regularize_patch(pg, config.eps0)) : zmg_embed(pg, config.eps0);
      gs.push_back(flatten_patch(ep).data());
      ws.push_back(patch_weight(site.center_x, fm.width()));
    }
    const RegionGaussian rg = summarize_region(gs, ws, kind, config.eps0);
    out.push_back(embed_region(rg, static_cast<int>(g), space));
  }
  return out;
}

MatrixFormDescriptor extract_matrix_form(const Image& img, Variant variant, const DescriptorConfig& config) {
  const Image resized = resize(img, config.image_width, config.image_height);
  MatrixFormDescriptor out;
  out.variant = variant;
  for (const auto& block : dims(variant, config).blocks) {
    MatrixBlock mb;
    mb.kind = block.kind;
    mb.space = block.space;
    for (auto& rm : region_matrices(resized, block.space, block.kind, config)) {
      mb.regions.push_back(std::move(rm.matrix));
    }
    out.blocks.push_back(std::move(mb));
  }
  return out;
}

PersonDescriptor flatten(const MatrixFormDescriptor& mdesc, const DescriptorConfig& config) {
  PersonDescriptor out;
  out.variant = mdesc.variant;
  out.layout = dims(mdesc.variant, config);
  if (out.layout.blocks.size() != mdesc.blocks.size()) {
    fail(ErrorCode::InconsistentLengths, "matrix form does not match the variant layout");
  }
  out.data.resize(out.layout.total);
  for (std::size_t b = 0; b < mdesc.blocks.size(); ++b) {
    const auto& lb = out.layout.blocks[b];
    const auto& mb = mdesc.blocks[b];
    if (static_cast<int>(mb.regions.size()) != lb.regions) {
      fail(ErrorCode::InconsistentLengths, "region count does not match the layout");
    }
    std::vector<Vector> zs;
    zs.reserve(mb.regions.size());
    for (std::size_t g = 0; g < mb.regions.size(); ++g) {
      zs.push_back(flatten_region(RegionMatrix{mb.regions[g], mb.kind, static_cast<int>(g), mb.space}));
    }
    const Vector z = concat_regions(zs);
    if (z.size() != lb.length) {
      fail(ErrorCode::InconsistentLengths, "block length " + std::to_string(z.size()) + " != " +
                                               std::to_string(lb.length));
    }
    out.data.segment(lb.offset, lb.length) = z;
  }
  return out;
}

PersonDescriptor extract(const Image& img, Variant variant, const DescriptorConfig& config) {
  return flatten(extract_matrix_form(img, variant, config), config);
}

}  // namespace hgd
