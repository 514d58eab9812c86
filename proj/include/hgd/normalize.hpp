#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hgd/descriptor.hpp"

namespace hgd {

// Plain L2 normalization of every layout block.
PersonDescriptor l2_normalize(const PersonDescriptor& desc);

// Per-block training means on the log-Euclidean tangent space.
struct ExtrinsicNormModel {
  Variant variant = Variant::GOG;
  Layout layout;
  std::vector<Vector> block_means;
};

ExtrinsicNormModel fit_extrinsic(std::span<const PersonDescriptor> train);

// Per block: subtract the block mean, scale to unit L2 norm. A block that
// equals its mean throws ZeroVector. Not idempotent.
PersonDescriptor apply_extrinsic(const ExtrinsicNormModel& model, const PersonDescriptor& desc);

struct PoleSlot {
  Embedding kind = Embedding::Gauss;
  ColorSpace space = ColorSpace::RGB;
  int region = 0;
  SpdMatrix pole;
  Matrix pole_inv_sqrt;
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

// One Riemannian mean per (block, region) slot, ordered block-major.
struct IntrinsicNormModel {
  Variant variant = Variant::GOG;
  std::vector<PoleSlot> slots;
};

IntrinsicNormModel fit_intrinsic(std::span<const MatrixFormDescriptor> train, const KarcherOptions& opts = {});

// Identity poles in every slot; application reduces to LE flattening + L2.
IntrinsicNormModel identity_intrinsic(Variant variant, const DescriptorConfig& config = {});

// Per slot tangent_at(pole, A), concatenated per block, each block scaled
// to unit norm. Throws ZeroVector when a whole block sits at its poles.
PersonDescriptor apply_intrinsic(const IntrinsicNormModel& model, const MatrixFormDescriptor& mdesc,
                                 const DescriptorConfig& config = {});

// Binary model files: "HGDN", u32 version, u32 kind, u32 variant, slot
// table, little-endian f64 payload, trailing CRC-32.
enum class ModelKind : std::uint32_t { Extrinsic = 1, Intrinsic = 2 };

std::vector<std::uint8_t> serialize(const ExtrinsicNormModel& model);
std::vector<std::uint8_t> serialize(const IntrinsicNormModel& model);
ModelKind peek_model_kind(std::span<const std::uint8_t> bytes);
ExtrinsicNormModel deserialize_extrinsic(std::span<const std::uint8_t> bytes);
IntrinsicNormModel deserialize_intrinsic(std::span<const std::uint8_t> bytes);

}  // namespace hgd
