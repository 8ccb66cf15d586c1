#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <mmr/core.hpp>

namespace mmr {

enum class PlyFormat { ascii, binary_little_endian };

enum class PlyScalar { int8, uint8, int16, uint16, int32, uint32, float32, float64 };

struct PlyProperty {
  std::string name;
  PlyScalar type = PlyScalar::float32;
  bool is_list = false;
  PlyScalar count_type = PlyScalar::uint8;  ///< only for list properties
};

struct PlyElement {
  std::string name;
  std::uint64_t count = 0;
  std::vector<PlyProperty> properties;
};

struct PlyHeaderInfo {
  PlyFormat format = PlyFormat::ascii;
  std::uint64_t vertex_count = 0;
  PlyScalar x_type = PlyScalar::float32;
  PlyScalar y_type = PlyScalar::float32;
  PlyScalar z_type = PlyScalar::float32;
  std::vector<PlyElement> elements;
  std::size_t header_bytes = 0;  ///< offset of the first body byte
};

struct PlyReadResult {
  PointCloud cloud;
  PlyHeaderInfo header;
  std::vector<std::string> warnings;
};

/// Reads vertex x, y, z (float32 or float64) in file order. Other vertex properties and
/// non-vertex elements are skipped; nothing after the last vertex is parsed.
///
/// Throws IoError when the file cannot be opened, UnsupportedFormat for big-endian files or
/// a vertex element without float x/y/z, and CorruptFile (with byte offset) for malformed
/// or truncated content.
PlyReadResult read_ply_detailed(const std::filesystem::path& path);

/// read_ply_detailed, with warnings forwarded to std::cerr.
PointCloud read_ply(const std::filesystem::path& path);

/// Writes a vertex-only PLY with float32 x, y, z. An empty cloud gives a header with
/// "element vertex 0".
void write_ply(const PointCloud& cloud, const std::filesystem::path& path, PlyFormat format = PlyFormat::binary_little_endian);

}  // namespace mmr
