#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hgd/error.hpp"
#include "hgd/storage.hpp"
#include "test_util.hpp"

using namespace hgd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an hgd::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("manifest") {
  TempDir dir("hgd_manifest_test");
  write_text(dir.path / "m.csv",
             "path,person_id,camera_id,split\n"
             "img/a.png,001,0,train\n"
             "\"img/b, c.png\",\"0,2\",1,test\n"
             "/abs/d.png,003,1,\n");
  const auto entries = read_manifest(dir.path / "m.csv");
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].path == dir.path / "img/a.png");
  CHECK(entries[0].person_id == "001");
  CHECK(entries[0].split == "train");
  CHECK(entries[1].path == dir.path / "img/b, c.png");
  CHECK(entries[1].person_id == "0,2");
  CHECK(entries[1].camera_id == 1);
  CHECK(entries[2].path == fs::path("/abs/d.png"));
  CHECK(entries[2].split.empty());

  write_manifest(dir.path / "out.csv", entries);
  const auto back = read_manifest(dir.path / "out.csv");
  REQUIRE(back.size() == 3);
  CHECK(back[1].person_id == "0,2");
  CHECK(back[1].path == entries[1].path);

  write_text(dir.path / "bad.csv", "file,person,cam\nx,1,0\n");
  CHECK(code_of([&] { read_manifest(dir.path / "bad.csv"); }) == ErrorCode::Parse);
  write_text(dir.path / "bad2.csv", "path,person_id,camera_id,split\nx,1,zero,train\n");
  CHECK(code_of([&] { read_manifest(dir.path / "bad2.csv"); }) == ErrorCode::Parse);
  CHECK(code_of([&] { read_manifest(dir.path / "missing.csv"); }) == ErrorCode::Io);
}

TEST_CASE("descriptor file round trip") {
  synthetic::Rng rng(71);
  DescriptorFile f;
  f.content = ContentTag::ZOZ;
  f.payload = PayloadType::F32;
  f.records = {{"a", 0}, {"b", 1}, {"c", 1}};
  f.values = hgd::testing::random_matrix(rng, 3, 16828);
  const auto bytes = encode(f);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "HGDF");
  CHECK(bytes.size() > 3 * 16828 * 4);
  CHECK(bytes.size() < 3 * 16828 * 4 + 200);
  const DescriptorFile back = decode_descriptor_file(bytes);
  CHECK(back.content == ContentTag::ZOZ);
  CHECK(back.variant() == Variant::ZOZ);
  CHECK(back.is_descriptor());
  CHECK(back.records == f.records);
  REQUIRE(back.values.rows() == 3);
  REQUIRE(back.values.cols() == 16828);
  CHECK(back.values == f.values.cast<float>().cast<double>());

  auto flipped = bytes;
  flipped[100] ^= 1;
  CHECK(code_of([&] { decode_descriptor_file(flipped); }) == ErrorCode::ChecksumMismatch);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 9);
  CHECK(code_of([&] { decode_descriptor_file(truncated); }) == ErrorCode::ChecksumMismatch);
  auto magic = bytes;
  magic[1] = 'Z';
  CHECK(code_of([&] { decode_descriptor_file(magic); }) == ErrorCode::BadMagic);
}

TEST_CASE("distance file round trip") {
  synthetic::Rng rng(72);
  DistanceMatrix dm;
  dm.values = hgd::testing::random_matrix(rng, 4, 3, 0, 2);
  dm.probes = {{"a", 0}, {"b", 0}, {"c", 0}, {"d", 0}};
  dm.gallery = {{"a", 1}, {"b", 1}, {"c", 1}};
  const DescriptorFile f = from_distances(dm);
  CHECK(f.payload == PayloadType::F64);
  CHECK_FALSE(f.is_descriptor());
  const DistanceMatrix back = to_distances(decode_descriptor_file(encode(f)));
  CHECK(back.values == dm.values);
  CHECK(back.probes == dm.probes);
  CHECK(back.gallery == dm.gallery);

  DescriptorFile desc;
  desc.records = {{"a", 0}};
  desc.values = Matrix::Zero(1, 3);
  CHECK_THROWS_AS(to_distances(desc), Error);
}

TEST_CASE("matrix-form file round trip") {
  synthetic::Rng rng(73);
  MatrixFormFile f;
  f.variant = Variant::ZOZ;
  for (int i = 0; i < 2; ++i) {
    f.records.push_back({"p" + std::to_string(i), i});
    MatrixFormDescriptor mf{Variant::ZOZ, {}};
    for (const auto& b : dims(Variant::ZOZ).blocks) {
      MatrixBlock block{b.kind, b.space, {}};
      for (int g = 0; g < b.regions; ++g)
        block.regions.push_back(SpdMatrix::trusted(hgd::testing::random_spd(rng, b.matrix_side)));
      mf.blocks.push_back(std::move(block));
    }
    f.items.push_back(std::move(mf));
  }
  const auto bytes = encode(f);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "HGDM");
  const MatrixFormFile back = decode_matrix_form_file(bytes);
  CHECK(back.variant == Variant::ZOZ);
  CHECK(back.records == f.records);
  REQUIRE(back.items.size() == 2);
  REQUIRE(back.items[1].blocks.size() == 4);
  CHECK(back.items[1].blocks[3].kind == Embedding::ZmG);
  CHECK(back.items[1].blocks[3].space == ColorSpace::nRnG);
  CHECK(back.items[1].blocks[3].regions[6].data() == f.items[1].blocks[3].regions[6].data());
  CHECK(back.items[0].blocks[0].regions[0].data() == f.items[0].blocks[0].regions[0].data());

  auto truncated = bytes;
  truncated.resize(bytes.size() / 3);
  CHECK(code_of([&] { decode_matrix_form_file(truncated); }) == ErrorCode::ChecksumMismatch);
}

TEST_CASE("external metric file") {
  TempDir dir("hgd_metric_test");
  write_text(dir.path / "m.txt", "3 2\n1 0\n0 1\n0.5 0.5\n2 0.1\n0.1 1\n");
  const ExternalMetric m = read_external_metric(dir.path / "m.txt");
  CHECK(m.projection.rows() == 3);
  CHECK(m.projection.cols() == 2);
  CHECK(m.projection(2, 1) == 0.5);
  CHECK(m.metric(0, 1) == 0.1);

  write_text(dir.path / "asym.txt", "2 2\n1 0\n0 1\n1 0.5\n0 1\n");
  CHECK(code_of([&] { read_external_metric(dir.path / "asym.txt"); }) == ErrorCode::NotSymmetric);
  write_text(dir.path / "neg.txt", "2 2\n1 0\n0 1\n1 0\n0 -1\n");
  CHECK(code_of([&] { read_external_metric(dir.path / "neg.txt"); }) == ErrorCode::NonPositiveEigenvalue);
  write_text(dir.path / "short.txt", "2 2\n1 0\n0 1\n1 0\n");
  CHECK(code_of([&] { read_external_metric(dir.path / "short.txt"); }) == ErrorCode::Parse);
}
