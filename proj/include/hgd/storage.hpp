#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hgd/descriptor.hpp"
#include "hgd/eval.hpp"

namespace hgd {

struct ManifestEntry {
  std::filesystem::path path;  // resolved against the manifest directory
  std::string person_id;
  int camera_id = 0;
  std::string split;
};

// CSV with header `path,person_id,camera_id,split`.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file);
void write_manifest(const std::filesystem::path& file, std::span<const ManifestEntry> entries);

// "HGDF" container:
//   magic, u32 version, u32 content tag, u32 payload type (0 f32, 1 f64),
//   u64 count, u64 dim, count x (str person_id, i32 camera_id),
//   u64 column count, column x (str person_id, i32 camera_id),
//   count*dim little-endian values, u32 CRC-32 of all preceding bytes.
// Descriptor files carry no column metadata; distance matrices carry the
// gallery there.
enum class ContentTag : std::uint32_t { GOG = 0, ZOZ = 1, HGD = 2, Distances = 16, Raw = 17 };
enum class PayloadType : std::uint32_t { F32 = 0, F64 = 1 };

struct DescriptorFile {
  ContentTag content = ContentTag::GOG;
  PayloadType payload = PayloadType::F32;
  std::vector<SampleMeta> records;
  std::vector<SampleMeta> columns;
  Matrix values;  // count x dim

  bool is_descriptor() const noexcept { return static_cast<std::uint32_t>(content) <= 2; }
  Variant variant() const;
};

std::vector<std::uint8_t> encode(const DescriptorFile& file);
DescriptorFile decode_descriptor_file(std::span<const std::uint8_t> bytes);

DescriptorFile from_distances(const DistanceMatrix& dm);
DistanceMatrix to_distances(const DescriptorFile& file);

// "HGDM" matrix-form cache: magic, u32 version, u32 variant, u64 count,
// records (str person_id, i32 camera_id, then every region matrix of every
// block as u32 side plus the upper triangle in row-major f64), CRC-32.
struct MatrixFormFile {
  Variant variant = Variant::GOG;
  std::vector<SampleMeta> records;
  std::vector<MatrixFormDescriptor> items;
};

std::vector<std::uint8_t> encode(const MatrixFormFile& file);
MatrixFormFile decode_matrix_form_file(std::span<const std::uint8_t> bytes);

// Whitespace-separated text: "D k", then D rows of k projection values,
// then k rows of k metric values.
ExternalMetric read_external_metric(const std::filesystem::path& file);

std::vector<std::uint8_t> read_file(const std::filesystem::path& file);
void write_file(const std::filesystem::path& file, std::span<const std::uint8_t> bytes);

}  // namespace hgd
