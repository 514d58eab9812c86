#include "hgd/normalize.hpp"

#include <string>

#include "hgd/binary.hpp"
#include "hgd/error.hpp"

namespace hgd {

namespace {

constexpr std::string_view kModelMagic = "HGDN";
constexpr std::uint32_t kModelVersion = 1;

constexpr double kTangentFloor = 1e-10;

void require_variant(Variant expected, Variant got) {
  if (expected != got) {
    fail(ErrorCode::VariantMismatch, "model is " + std::string(to_string(expected)) + ", input is " +
                                         std::string(to_string(got)));
  }
}

// floor > 0 absorbs the rounding left by whitening a matrix with itself.
void normalize_block(Eigen::Ref<Vector> block, const BlockLayout& layout, double floor = 0.0) {
  const double norm = block.norm();
  if (!(norm > floor)) {
    fail(ErrorCode::ZeroVector, std::string(to_string(layout.space)) + " block has zero norm");
  }
  block /= norm;
}

Variant read_variant(ByteReader& in) {
  const std::uint32_t tag = in.u32();
  if (tag > static_cast<std::uint32_t>(Variant::HGD)) {
    fail(ErrorCode::VersionMismatch, "unknown variant tag " + std::to_string(tag));
  }
  return static_cast<Variant>(tag);
}

void open_model(ByteReader& in, ModelKind kind) {
  in.open(kModelMagic);
  const std::uint32_t version = in.u32();
  if (version != kModelVersion) fail(ErrorCode::VersionMismatch, "model version " + std::to_string(version));
  const std::uint32_t got = in.u32();
  if (got != static_cast<std::uint32_t>(kind)) {
    fail(ErrorCode::VersionMismatch, "model kind " + std::to_string(got) + " is not the one requested");
  }
}

}  // namespace

PersonDescriptor l2_normalize(const PersonDescriptor& desc) {
  PersonDescriptor out = desc;
  for (const auto& b : out.layout.blocks) normalize_block(out.data.segment(b.offset, b.length), b);
  return out;
}

ExtrinsicNormModel fit_extrinsic(std::span<const PersonDescriptor> train) {
  if (train.empty()) fail(ErrorCode::EmptyTrainingSet, "no training descriptors");
  ExtrinsicNormModel model;
  model.variant = train.front().variant;
  model.layout = train.front().layout;
  Vector sum = Vector::Zero(model.layout.total);
  for (const auto& d : train) {
    require_variant(model.variant, d.variant);
    if (d.data.size() != model.layout.total) fail(ErrorCode::InconsistentLengths, "descriptor length differs");
    sum += d.data;
  }
  sum /= static_cast<double>(train.size());
  for (const auto& b : model.layout.blocks) model.block_means.push_back(sum.segment(b.offset, b.length));
  return model;
}

PersonDescriptor apply_extrinsic(const ExtrinsicNormModel& model, const PersonDescriptor& desc) {
  require_variant(model.variant, desc.variant);
  if (desc.data.size() != model.layout.total) fail(ErrorCode::InconsistentLengths, "descriptor length differs");
  PersonDescriptor out = desc;
  out.layout = model.layout;
  for (std::size_t i = 0; i < model.layout.blocks.size(); ++i) {
    const auto& b = model.layout.blocks[i];
    auto block = out.data.segment(b.offset, b.length);
    block -= model.block_means[i];
    normalize_block(block, b);
  }
  return out;
}

IntrinsicNormModel fit_intrinsic(std::span<const MatrixFormDescriptor> train, const KarcherOptions& opts) {
  if (train.empty()) fail(ErrorCode::EmptyTrainingSet, "no training matrices");
  IntrinsicNormModel model;
  model.variant = train.front().variant;
  const auto& shape = train.front().blocks;
  for (const auto& t : train) {
    require_variant(model.variant, t.variant);
    if (t.blocks.size() != shape.size()) fail(ErrorCode::InconsistentLengths, "block count differs");
    for (std::size_t b = 0; b < shape.size(); ++b) {
      if (t.blocks[b].regions.size() != shape[b].regions.size()) {
        fail(ErrorCode::InconsistentLengths, "region count differs");
      }
    }
  }

  std::vector<SpdMatrix> samples;
  samples.reserve(train.size());
  for (std::size_t b = 0; b < shape.size(); ++b) {
    for (std::size_t g = 0; g < shape[b].regions.size(); ++g) {
      samples.clear();
      for (const auto& t : train) samples.push_back(t.blocks[b].regions[g]);
      const KarcherResult k = karcher_mean(samples, opts);
      PoleSlot slot;
      slot.kind = shape[b].kind;
      slot.space = shape[b].space;
      slot.region = static_cast<int>(g);
      slot.pole = k.mean;
      slot.pole_inv_sqrt = inverse_sqrtm(k.mean).data();
      slot.iterations = k.iterations;
      slot.residual = k.residual;
      slot.converged = k.converged;
      model.slots.push_back(std::move(slot));
    }
  }
  return model;
}

IntrinsicNormModel identity_intrinsic(Variant variant, const DescriptorConfig& config) {
  IntrinsicNormModel model;
  model.variant = variant;
  for (const auto& b : dims(variant, config).blocks) {
    for (int g = 0; g < b.regions; ++g) {
      PoleSlot slot;
      slot.kind = b.kind;
      slot.space = b.space;
      slot.region = g;
      slot.pole = SpdMatrix::trusted(Matrix::Identity(b.matrix_side, b.matrix_side));
      slot.pole_inv_sqrt = Matrix::Identity(b.matrix_side, b.matrix_side);
      model.slots.push_back(std::move(slot));
    }
  }
  return model;
}

PersonDescriptor apply_intrinsic(const IntrinsicNormModel& model, const MatrixFormDescriptor& mdesc,
                                 const DescriptorConfig& config) {
  require_variant(model.variant, mdesc.variant);
  PersonDescriptor out;
  out.variant = mdesc.variant;
  out.layout = dims(mdesc.variant, config);
  out.data.resize(out.layout.total);
  if (mdesc.blocks.size() != out.layout.blocks.size()) {
    fail(ErrorCode::InconsistentLengths, "matrix form does not match the layout");
  }
  std::size_t slot = 0;
  for (std::size_t b = 0; b < mdesc.blocks.size(); ++b) {
    const auto& lb = out.layout.blocks[b];
    const auto& regions = mdesc.blocks[b].regions;
    if (static_cast<int>(regions.size()) != lb.regions) fail(ErrorCode::InconsistentLengths, "region count");
    for (std::size_t g = 0; g < regions.size(); ++g, ++slot) {
      if (slot >= model.slots.size()) fail(ErrorCode::InconsistentLengths, "model has too few slots");
      const TangentVector z = tangent_at_whitened(model.slots[slot].pole_inv_sqrt, regions[g]);
      out.data.segment(lb.offset + static_cast<Eigen::Index>(g) * lb.region_dim, lb.region_dim) = z.data();
    }
    normalize_block(out.data.segment(lb.offset, lb.length), lb, kTangentFloor);
  }
  if (slot != model.slots.size()) fail(ErrorCode::InconsistentLengths, "model has too many slots");
  return out;
}

std::vector<std::uint8_t> serialize(const ExtrinsicNormModel& model) {
  ByteWriter w;
  w.raw(kModelMagic);
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(ModelKind::Extrinsic));
  w.u32(static_cast<std::uint32_t>(model.variant));
  w.u64(static_cast<std::uint64_t>(model.layout.total));
  w.u32(static_cast<std::uint32_t>(model.layout.blocks.size()));
  for (const auto& b : model.layout.blocks) {
    w.u32(static_cast<std::uint32_t>(b.kind));
    w.u32(static_cast<std::uint32_t>(b.space));
    w.u64(static_cast<std::uint64_t>(b.offset));
    w.u64(static_cast<std::uint64_t>(b.length));
    w.u64(static_cast<std::uint64_t>(b.region_dim));
    w.u64(static_cast<std::uint64_t>(b.matrix_side));
    w.u32(static_cast<std::uint32_t>(b.regions));
  }
  for (const auto& m : model.block_means)
    for (Eigen::Index i = 0; i < m.size(); ++i) w.f64(m(i));
  w.seal();
  return std::move(w.bytes());
}

std::vector<std::uint8_t> serialize(const IntrinsicNormModel& model) {
  ByteWriter w;
  w.raw(kModelMagic);
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(ModelKind::Intrinsic));
  w.u32(static_cast<std::uint32_t>(model.variant));
  w.u32(static_cast<std::uint32_t>(model.slots.size()));
  for (const auto& s : model.slots) {
    w.u32(static_cast<std::uint32_t>(s.kind));
    w.u32(static_cast<std::uint32_t>(s.space));
    w.u32(static_cast<std::uint32_t>(s.region));
    w.u32(static_cast<std::uint32_t>(s.pole.dim()));
    w.u32(static_cast<std::uint32_t>(s.iterations));
    w.u32(s.converged ? 1u : 0u);
    w.f64(s.residual);
  }
  for (const auto& s : model.slots) {
    for (const Matrix* m : {&s.pole.data(), &s.pole_inv_sqrt}) {
      for (Eigen::Index j = 0; j < m->cols(); ++j)
        for (Eigen::Index i = 0; i < m->rows(); ++i) w.f64((*m)(i, j));
    }
  }
  w.seal();
  return std::move(w.bytes());
}

ModelKind peek_model_kind(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  in.open(kModelMagic);
  const std::uint32_t version = in.u32();
  if (version != kModelVersion) fail(ErrorCode::VersionMismatch, "model version " + std::to_string(version));
  const std::uint32_t kind = in.u32();
  if (kind != 1 && kind != 2) fail(ErrorCode::VersionMismatch, "unknown model kind");
  return static_cast<ModelKind>(kind);
}

ExtrinsicNormModel deserialize_extrinsic(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  open_model(in, ModelKind::Extrinsic);
  ExtrinsicNormModel model;
  model.variant = read_variant(in);
  model.layout.total = static_cast<Eigen::Index>(in.u64());
  const std::uint32_t nblocks = in.u32();
  for (std::uint32_t i = 0; i < nblocks; ++i) {
    BlockLayout b;
    b.kind = static_cast<Embedding>(in.u32());
    b.space = static_cast<ColorSpace>(in.u32());
    b.offset = static_cast<Eigen::Index>(in.u64());
    b.length = static_cast<Eigen::Index>(in.u64());
    b.region_dim = static_cast<Eigen::Index>(in.u64());
    b.matrix_side = static_cast<Eigen::Index>(in.u64());
    b.regions = static_cast<int>(in.u32());
    model.layout.blocks.push_back(b);
  }
  for (const auto& b : model.layout.blocks) {
    if (in.remaining() < static_cast<std::size_t>(b.length) * 8) fail(ErrorCode::Parse, "truncated block mean");
    Vector m(b.length);
    for (Eigen::Index i = 0; i < b.length; ++i) m(i) = in.f64();
    model.block_means.push_back(std::move(m));
  }
  if (!in.done()) fail(ErrorCode::Parse, "trailing bytes in model");
  return model;
}

IntrinsicNormModel deserialize_intrinsic(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  open_model(in, ModelKind::Intrinsic);
  IntrinsicNormModel model;
  model.variant = read_variant(in);
  const std::uint32_t nslots = in.u32();
  std::vector<std::uint32_t> sides;
  for (std::uint32_t i = 0; i < nslots; ++i) {
    PoleSlot s;
    s.kind = static_cast<Embedding>(in.u32());
    s.space = static_cast<ColorSpace>(in.u32());
    s.region = static_cast<int>(in.u32());
    sides.push_back(in.u32());
    s.iterations = static_cast<int>(in.u32());
    s.converged = in.u32() != 0;
    s.residual = in.f64();
    model.slots.push_back(std::move(s));
  }
  for (std::uint32_t i = 0; i < nslots; ++i) {
    const Eigen::Index n = sides[i];
    if (in.remaining() < static_cast<std::size_t>(2 * n * n) * 8) fail(ErrorCode::Parse, "truncated pole");
    Matrix pole(n, n), inv(n, n);
    for (Matrix* m : {&pole, &inv}) {
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index r = 0; r < n; ++r) (*m)(r, j) = in.f64();
    }
    model.slots[i].pole = SpdMatrix::trusted(std::move(pole));
    model.slots[i].pole_inv_sqrt = std::move(inv);
  }
  if (!in.done()) fail(ErrorCode::Parse, "trailing bytes in model");
  return model;
}

}  // namespace hgd
