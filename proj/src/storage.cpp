#include "hgd/storage.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <zlib.h>

#include "hgd/binary.hpp"
#include "hgd/error.hpp"

namespace hgd {

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const std::size_t n = std::min(kChunk, bytes.size() - off);
    crc = ::crc32(crc, bytes.data() + off, static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + file.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& file, std::span<const std::uint8_t> bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + file.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "short write to " + file.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::Io, "cannot open manifest " + file.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Parse, "manifest is empty");
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"path", "person_id", "camera_id", "split"}) {
    fail(ErrorCode::Parse, "manifest header must be path,person_id,camera_id,split");
  }
  const auto base = file.parent_path();
  std::vector<ManifestEntry> entries;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) fail(ErrorCode::Parse, "manifest line " + std::to_string(lineno) + ": expected 4 fields");
    if (f[1].empty()) fail(ErrorCode::Parse, "manifest line " + std::to_string(lineno) + ": empty person id");
    ManifestEntry e;
    e.path = std::filesystem::path(f[0]).is_absolute() ? std::filesystem::path(f[0]) : base / f[0];
    e.person_id = f[1];
    try {
      std::size_t used = 0;
      e.camera_id = std::stoi(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, "manifest line " + std::to_string(lineno) + ": bad camera id '" + f[2] + "'");
    }
    e.split = f[3];
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::filesystem::path& file, std::span<const ManifestEntry> entries) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + file.string());
  out << "path,person_id,camera_id,split\n";
  const auto base = file.parent_path();
  for (const auto& e : entries) {
    const auto rel = base.empty() ? e.path : e.path.lexically_relative(base);
    out << csv_field((rel.empty() ? e.path : rel).generic_string()) << ',' << csv_field(e.person_id) << ','
        << e.camera_id << ',' << csv_field(e.split) << '\n';
  }
}

namespace {

constexpr std::string_view kDescriptorMagic = "HGDF";
constexpr std::string_view kMatrixMagic = "HGDM";
constexpr std::uint32_t kFileVersion = 1;

void write_metas(ByteWriter& w, const std::vector<SampleMeta>& metas) {
  for (const auto& m : metas) {
    w.str(m.person_id);
    w.i32(m.camera_id);
  }
}

std::vector<SampleMeta> read_metas(ByteReader& in, std::uint64_t n) {
  std::vector<SampleMeta> out;
  for (std::uint64_t i = 0; i < n; ++i) {
    SampleMeta m;
    m.person_id = in.str();
    m.camera_id = in.i32();
    out.push_back(std::move(m));
  }
  return out;
}

void check_version(ByteReader& in) {
  const std::uint32_t v = in.u32();
  if (v != kFileVersion) fail(ErrorCode::VersionMismatch, "file version " + std::to_string(v));
}

}  // namespace

Variant DescriptorFile::variant() const {
  if (!is_descriptor()) fail(ErrorCode::VariantMismatch, "file does not hold descriptors");
  return static_cast<Variant>(content);
}

std::vector<std::uint8_t> encode(const DescriptorFile& file) {
  if (static_cast<std::size_t>(file.values.rows()) != file.records.size()) {
    fail(ErrorCode::InconsistentLengths, "record metadata does not match the row count");
  }
  ByteWriter w;
  w.raw(kDescriptorMagic);
  w.u32(kFileVersion);
  w.u32(static_cast<std::uint32_t>(file.content));
  w.u32(static_cast<std::uint32_t>(file.payload));
  w.u64(static_cast<std::uint64_t>(file.values.rows()));
  w.u64(static_cast<std::uint64_t>(file.values.cols()));
  write_metas(w, file.records);
  w.u64(file.columns.size());
  write_metas(w, file.columns);
  for (Eigen::Index i = 0; i < file.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < file.values.cols(); ++j) {
      if (file.payload == PayloadType::F32) {
        w.f32(static_cast<float>(file.values(i, j)));
      } else {
        w.f64(file.values(i, j));
      }
    }
  }
  w.seal();
  return std::move(w.bytes());
}

DescriptorFile decode_descriptor_file(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  in.open(kDescriptorMagic);
  check_version(in);
  DescriptorFile file;
  const std::uint32_t content = in.u32();
  if (content > 2 && content != 16 && content != 17) {
    fail(ErrorCode::VersionMismatch, "unknown content tag " + std::to_string(content));
  }
  file.content = static_cast<ContentTag>(content);
  const std::uint32_t payload = in.u32();
  if (payload > 1) fail(ErrorCode::VersionMismatch, "unknown payload type");
  file.payload = static_cast<PayloadType>(payload);
  const std::uint64_t count = in.u64();
  const std::uint64_t dim = in.u64();
  file.records = read_metas(in, count);
  file.columns = read_metas(in, in.u64());
  const std::size_t width = file.payload == PayloadType::F32 ? 4 : 8;
  if (in.remaining() != count * dim * width) fail(ErrorCode::Parse, "payload length does not match count x dim");
  file.values.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < file.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < file.values.cols(); ++j) {
      file.values(i, j) = file.payload == PayloadType::F32 ? static_cast<double>(in.f32()) : in.f64();
    }
  }
  return file;
}

DescriptorFile from_distances(const DistanceMatrix& dm) {
  DescriptorFile file;
  file.content = ContentTag::Distances;
  file.payload = PayloadType::F64;
  file.records = dm.probes;
  file.columns = dm.gallery;
  file.values = dm.values;
  return file;
}

DistanceMatrix to_distances(const DescriptorFile& file) {
  if (file.content != ContentTag::Distances) fail(ErrorCode::VariantMismatch, "file does not hold distances");
  if (static_cast<std::size_t>(file.values.cols()) != file.columns.size()) {
    fail(ErrorCode::InconsistentLengths, "gallery metadata does not match the column count");
  }
  return DistanceMatrix{file.values, file.records, file.columns};
}

std::vector<std::uint8_t> encode(const MatrixFormFile& file) {
  if (file.items.size() != file.records.size()) fail(ErrorCode::InconsistentLengths, "records and items differ");
  ByteWriter w;
  w.raw(kMatrixMagic);
  w.u32(kFileVersion);
  w.u32(static_cast<std::uint32_t>(file.variant));
  w.u64(file.items.size());
  for (std::size_t r = 0; r < file.items.size(); ++r) {
    w.str(file.records[r].person_id);
    w.i32(file.records[r].camera_id);
    const auto& item = file.items[r];
    if (item.variant != file.variant) fail(ErrorCode::VariantMismatch, "mixed variants in matrix cache");
    w.u32(static_cast<std::uint32_t>(item.blocks.size()));
    for (const auto& block : item.blocks) {
      w.u32(static_cast<std::uint32_t>(block.kind));
      w.u32(static_cast<std::uint32_t>(block.space));
      w.u32(static_cast<std::uint32_t>(block.regions.size()));
      for (const auto& m : block.regions) {
        const auto& a = m.data();
        w.u32(static_cast<std::uint32_t>(a.rows()));
        for (Eigen::Index i = 0; i < a.rows(); ++i)
          for (Eigen::Index j = i; j < a.cols(); ++j) w.f64(a(i, j));
      }
    }
  }
  w.seal();
  return std::move(w.bytes());
}

MatrixFormFile decode_matrix_form_file(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  in.open(kMatrixMagic);
  check_version(in);
  MatrixFormFile file;
  const std::uint32_t variant = in.u32();
  if (variant > 2) fail(ErrorCode::VersionMismatch, "unknown variant tag " + std::to_string(variant));
  file.variant = static_cast<Variant>(variant);
  const std::uint64_t count = in.u64();
  for (std::uint64_t r = 0; r < count; ++r) {
    SampleMeta meta;
    meta.person_id = in.str();
    meta.camera_id = in.i32();
    MatrixFormDescriptor item;
    item.variant = file.variant;
    const std::uint32_t nblocks = in.u32();
    for (std::uint32_t b = 0; b < nblocks; ++b) {
      MatrixBlock block;
      block.kind = static_cast<Embedding>(in.u32());
      block.space = static_cast<ColorSpace>(in.u32());
      const std::uint32_t nregions = in.u32();
      for (std::uint32_t g = 0; g < nregions; ++g) {
        const Eigen::Index n = in.u32();
        if (in.remaining() < static_cast<std::size_t>(n * (n + 1) / 2) * 8) fail(ErrorCode::Parse, "truncated matrix");
        Matrix a(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
          for (Eigen::Index j = i; j < n; ++j) a(i, j) = a(j, i) = in.f64();
        block.regions.push_back(SpdMatrix::trusted(std::move(a)));
      }
      item.blocks.push_back(std::move(block));
    }
    file.records.push_back(std::move(meta));
    file.items.push_back(std::move(item));
  }
  if (!in.done()) fail(ErrorCode::Parse, "trailing bytes in matrix cache");
  return file;
}

ExternalMetric read_external_metric(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::Io, "cannot open " + file.string());
  Eigen::Index d = 0, k = 0;
  if (!(in >> d >> k) || d <= 0 || k <= 0) fail(ErrorCode::Parse, "external metric header must be 'D k'");
  ExternalMetric metric;
  metric.projection.resize(d, k);
  metric.metric.resize(k, k);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      if (!(in >> metric.projection(i, j))) fail(ErrorCode::Parse, "truncated projection matrix");
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      if (!(in >> metric.metric(i, j))) fail(ErrorCode::Parse, "truncated metric matrix");
  if ((metric.metric - metric.metric.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, metric.metric.cwiseAbs().maxCoeff())) {
    fail(ErrorCode::NotSymmetric, "external metric matrix is not symmetric");
  }
  const auto e = eigen_sym(metric.metric);
  if (e.eigenvalues(k - 1) < -1e-9 * std::max(1.0, e.eigenvalues(0))) {
    fail(ErrorCode::NonPositiveEigenvalue, "external metric matrix is not positive semidefinite");
  }
  return metric;
}

}  // namespace hgd
