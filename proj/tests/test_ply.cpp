#include <doctest.h>

#include <cstring>
#include <fstream>
#include <string>

#include "support.hpp"

using namespace mmr;
using mmr::test::TempDir;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

template <typename T>
void put(std::string& buf, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  buf.append(bytes, sizeof(T));
}

}  // namespace

TEST_CASE("ascii file with three vertices") {
  TempDir dir("ply_ascii");
  write_text(dir / "a.ply",
             "ply\nformat ascii 1.0\ncomment three points\nelement vertex 3\nproperty float x\nproperty float y\n"
             "property float z\nend_header\n0 0 0\n1 0 0\n0 1 0.5\n");
  const PointCloud c = read_ply(dir / "a.ply");
  REQUIRE(c.size() == 3);
  CHECK(c[1] == Point3(1, 0, 0));
  CHECK(c[2] == Point3(0, 1, 0.5));
}

TEST_CASE("extra vertex properties and face elements are skipped") {
  const PlyReadResult r = read_ply_detailed(std::filesystem::path(MMR_FIXTURE_DIR) / "tetra_normals_faces.ply");
  REQUIRE(r.cloud.size() == 4);
  CHECK(r.cloud[3] == Point3(0, 0, 1));
  CHECK(r.header.elements.size() == 2);
  CHECK(r.header.elements[1].properties[0].is_list);
  CHECK(r.warnings.empty());
}

TEST_CASE("binary body with a leading list element and mixed vertex types") {
  TempDir dir("ply_mixed");
  std::string buf =
      "ply\nformat binary_little_endian 1.0\nelement camera 1\nproperty list uchar int ids\n"
      "element vertex 2\nproperty uchar red\nproperty double x\nproperty double y\nproperty double z\n"
      "property short flag\nend_header\n";
  put<std::uint8_t>(buf, 2);
  put<std::int32_t>(buf, 7);
  put<std::int32_t>(buf, 8);
  for (int i = 0; i < 2; ++i) {
    put<std::uint8_t>(buf, 255);
    put<double>(buf, 0.1 * (i + 1));
    put<double>(buf, -0.2);
    put<double>(buf, 1.0 / 3.0);
    put<std::int16_t>(buf, -1);
  }
  write_text(dir / "m.ply", buf);
  const PlyReadResult r = read_ply_detailed(dir / "m.ply");
  REQUIRE(r.cloud.size() == 2);
  CHECK(r.cloud[1] == Point3(0.2, -0.2, 1.0 / 3.0));
  CHECK(r.header.x_type == PlyScalar::float64);
}

TEST_CASE("binary round trip is exact for float32 coordinates") {
  TempDir dir("ply_rt");
  CounterRng rng(1);
  std::vector<Point3> pts;
  for (int i = 0; i < 10000; ++i) {
    pts.emplace_back(static_cast<float>(rng.uniform(-5, 5)), static_cast<float>(rng.uniform(-5, 5)),
                     static_cast<float>(rng.uniform(-5, 5)));
  }
  const PointCloud cloud(pts);
  for (auto format : {PlyFormat::binary_little_endian, PlyFormat::ascii}) {
    write_ply(cloud, dir / "rt.ply", format);
    const PointCloud back = read_ply(dir / "rt.ply");
    REQUIRE(back.size() == cloud.size());
    CHECK(mmr::test::max_abs_diff(back, cloud) == 0.0);
  }
}

TEST_CASE("float64 input is narrowed to float32 on write") {
  TempDir dir("ply_narrow");
  write_ply(PointCloud({Point3(0.1, 0.2, 0.3)}), dir / "n.ply");
  const PointCloud back = read_ply(dir / "n.ply");
  CHECK(back[0] == Point3(static_cast<float>(0.1), static_cast<float>(0.2), static_cast<float>(0.3)));
}

TEST_CASE("empty cloud writes a zero-vertex file") {
  TempDir dir("ply_empty");
  write_ply(PointCloud(), dir / "e.ply");
  std::ifstream in(dir / "e.ply");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("element vertex 0\n") != std::string::npos);
  CHECK(read_ply(dir / "e.ply").empty());
}

TEST_CASE("unsupported layouts") {
  TempDir dir("ply_unsupported");
  write_text(dir / "be.ply", "ply\nformat binary_big_endian 1.0\nelement vertex 1\nproperty float x\n"
                             "property float y\nproperty float z\nend_header\n");
  CHECK_THROWS_AS(read_ply(dir / "be.ply"), UnsupportedFormat);

  write_text(dir / "nox.ply", "ply\nformat ascii 1.0\nelement vertex 1\nproperty float y\nproperty float z\n"
                              "end_header\n1 2\n");
  CHECK_THROWS_AS(read_ply(dir / "nox.ply"), UnsupportedFormat);

  write_text(dir / "intx.ply", "ply\nformat ascii 1.0\nelement vertex 1\nproperty int x\nproperty float y\n"
                               "property float z\nend_header\n1 2 3\n");
  CHECK_THROWS_AS(read_ply(dir / "intx.ply"), UnsupportedFormat);
}

TEST_CASE("corrupt content reports a byte offset") {
  TempDir dir("ply_corrupt");
  CounterRng rng(2);
  write_ply(mmr::test::random_cloud(rng, 10), dir / "full.ply");
  std::string bytes;
  {
    std::ifstream in(dir / "full.ply", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  REQUIRE(bytes.size() == std::filesystem::file_size(dir / "full.ply"));
  write_text(dir / "cut.ply", bytes.substr(0, bytes.size() - 5));
  try {
    read_ply(dir / "cut.ply");
    FAIL("expected CorruptFile");
  } catch (const CorruptFile& e) {
    CHECK(e.byte_offset() <= bytes.size() - 5);
    CHECK(e.byte_offset() >= bytes.size() - 12);
  }

  write_text(dir / "magic.ply", "plx\nformat ascii 1.0\nend_header\n");
  CHECK_THROWS_AS(read_ply(dir / "magic.ply"), CorruptFile);
  write_text(dir / "nohdr.ply", "ply\nformat ascii 1.0\nelement vertex 1\n");
  CHECK_THROWS_AS(read_ply(dir / "nohdr.ply"), CorruptFile);
  write_text(dir / "nan.ply", "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n"
                              "property float z\nend_header\n1 abc 3\n");
  CHECK_THROWS_AS(read_ply(dir / "nan.ply"), CorruptFile);
  CHECK_THROWS_AS(read_ply(dir / "does_not_exist.ply"), IoError);
}

TEST_CASE("data after the last vertex is reported as a warning") {
  TempDir dir("ply_trailing");
  write_ply(PointCloud({Point3(1, 2, 3)}), dir / "t.ply");
  {
    std::ofstream out(dir / "t.ply", std::ios::binary | std::ios::app);
    out << "junk";
  }
  const PlyReadResult r = read_ply_detailed(dir / "t.ply");
  CHECK(r.cloud.size() == 1);
  CHECK(r.warnings.size() == 1);
}
