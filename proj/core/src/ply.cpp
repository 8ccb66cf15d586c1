#include <mmr/ply.hpp>

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string_view>
#include <type_traits>

namespace mmr {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::size_t scalar_size(PlyScalar t) {
  switch (t) {
    case PlyScalar::int8:
    case PlyScalar::uint8: return 1;
    case PlyScalar::int16:
    case PlyScalar::uint16: return 2;
    case PlyScalar::int32:
    case PlyScalar::uint32:
    case PlyScalar::float32: return 4;
    case PlyScalar::float64: return 8;
  }
  return 0;
}

bool parse_scalar_name(std::string_view name, PlyScalar& out) {
  struct Entry {
    std::string_view name;
    PlyScalar type;
  };
  static constexpr Entry kNames[] = {
      {"char", PlyScalar::int8},     {"int8", PlyScalar::int8},       {"uchar", PlyScalar::uint8},
      {"uint8", PlyScalar::uint8},   {"short", PlyScalar::int16},     {"int16", PlyScalar::int16},
      {"ushort", PlyScalar::uint16}, {"uint16", PlyScalar::uint16},   {"int", PlyScalar::int32},
      {"int32", PlyScalar::int32},   {"uint", PlyScalar::uint32},     {"uint32", PlyScalar::uint32},
      {"float", PlyScalar::float32}, {"float32", PlyScalar::float32}, {"double", PlyScalar::float64},
      {"float64", PlyScalar::float64},
  };
  for (const auto& e : kNames) {
    if (e.name == name) {
      out = e.type;
      return true;
    }
  }
  return false;
}

bool is_float(PlyScalar t) { return t == PlyScalar::float32 || t == PlyScalar::float64; }

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) words.push_back(line.substr(start, i - start));
  }
  return words;
}

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open PLY file", path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading PLY file", path.string());
  return bytes;
}

PlyHeaderInfo parse_header(std::string_view data) {
  PlyHeaderInfo info;
  std::size_t pos = 0;
  bool saw_format = false;
  bool first = true;

  while (true) {
    const std::size_t eol = data.find('\n', pos);
    if (eol == std::string_view::npos) throw CorruptFile("PLY header is not terminated by end_header", pos);
    std::string_view line = data.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t line_offset = pos;
    pos = eol + 1;

    if (first) {
      if (line != "ply") throw CorruptFile("missing 'ply' magic line", 0);
      first = false;
      continue;
    }
    const auto words = split_words(line);
    if (words.empty() || words[0] == "comment" || words[0] == "obj_info") continue;

    if (words[0] == "end_header") break;
    if (words[0] == "format") {
      if (words.size() < 2) throw CorruptFile("malformed format line", line_offset);
      if (words[1] == "ascii") {
        info.format = PlyFormat::ascii;
      } else if (words[1] == "binary_little_endian") {
        info.format = PlyFormat::binary_little_endian;
      } else {
        throw UnsupportedFormat("unsupported PLY format '" + std::string(words[1]) +
                                "' (only ascii and binary_little_endian are read)");
      }
      saw_format = true;
    } else if (words[0] == "element") {
      if (words.size() != 3) throw CorruptFile("malformed element line", line_offset);
      PlyElement element;
      element.name = std::string(words[1]);
      const auto res = std::from_chars(words[2].data(), words[2].data() + words[2].size(), element.count);
      if (res.ec != std::errc{} || res.ptr != words[2].data() + words[2].size()) {
        throw CorruptFile("invalid element count", line_offset);
      }
      info.elements.push_back(std::move(element));
    } else if (words[0] == "property") {
      if (info.elements.empty()) throw CorruptFile("property declared before any element", line_offset);
      PlyProperty prop;
      if (words.size() == 5 && words[1] == "list") {
        prop.is_list = true;
        if (!parse_scalar_name(words[2], prop.count_type) || !parse_scalar_name(words[3], prop.type)) {
          throw UnsupportedFormat("unknown PLY list property type on line: " + std::string(line));
        }
        prop.name = std::string(words[4]);
      } else if (words.size() == 3) {
        if (!parse_scalar_name(words[1], prop.type)) {
          throw UnsupportedFormat("unknown PLY property type '" + std::string(words[1]) + "'");
        }
        prop.name = std::string(words[2]);
      } else {
        throw CorruptFile("malformed property line", line_offset);
      }
      info.elements.back().properties.push_back(std::move(prop));
    } else {
      throw CorruptFile("unexpected header keyword '" + std::string(words[0]) + "'", line_offset);
    }
  }
  if (!saw_format) throw CorruptFile("PLY header has no format line", 0);
  info.header_bytes = pos;

  const PlyElement* vertex = nullptr;
  for (const auto& e : info.elements) {
    if (e.name == "vertex") vertex = &e;
  }
  if (!vertex) throw UnsupportedFormat("PLY file has no vertex element");
  info.vertex_count = vertex->count;

  auto find_axis = [&](std::string_view axis, PlyScalar& type) {
    for (const auto& p : vertex->properties) {
      if (p.name == axis) {
        if (p.is_list || !is_float(p.type)) {
          throw UnsupportedFormat("vertex property '" + std::string(axis) + "' must be float32 or float64");
        }
        type = p.type;
        return;
      }
    }
    throw UnsupportedFormat("vertex element lacks property '" + std::string(axis) + "'");
  };
  find_axis("x", info.x_type);
  find_axis("y", info.y_type);
  find_axis("z", info.z_type);
  return info;
}

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(T));
  }
  return v;
}

class BinaryBody {
public:
  BinaryBody(std::string_view data, std::size_t pos) : data_(data), pos_(pos) {}

  const char* take(std::size_t n) {
    if (data_.size() - pos_ < n) throw CorruptFile("truncated binary PLY body", pos_);
    const char* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }

  double read(PlyScalar t) {
    const char* p = take(scalar_size(t));
    switch (t) {
      case PlyScalar::int8: return static_cast<double>(static_cast<std::int8_t>(*p));
      case PlyScalar::uint8: return static_cast<double>(static_cast<std::uint8_t>(*p));
      case PlyScalar::int16: return load_le<std::int16_t>(p);
      case PlyScalar::uint16: return load_le<std::uint16_t>(p);
      case PlyScalar::int32: return load_le<std::int32_t>(p);
      case PlyScalar::uint32: return load_le<std::uint32_t>(p);
      case PlyScalar::float32: return load_le<float>(p);
      case PlyScalar::float64: return load_le<double>(p);
    }
    return 0.0;
  }

  void skip_property(const PlyProperty& prop) {
    if (!prop.is_list) {
      take(scalar_size(prop.type));
      return;
    }
    const std::size_t at = pos_;
    const double count = read(prop.count_type);
    if (count < 0) throw CorruptFile("negative list length", at);
    take(static_cast<std::size_t>(count) * scalar_size(prop.type));
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

private:
  std::string_view data_;
  std::size_t pos_;
};

class AsciiBody {
public:
  AsciiBody(std::string_view data, std::size_t pos) : data_(data), pos_(pos) {}

  std::string_view token() {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    if (pos_ >= data_.size()) throw CorruptFile("truncated ascii PLY body", pos_);
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    return data_.substr(start, pos_ - start);
  }

  /// float32 properties are parsed at float precision so that values written from floats reproduce exactly.
  double number(PlyScalar type = PlyScalar::float64) {
    const std::size_t at = pos_;
    const std::string_view t = token();
    std::from_chars_result res{};
    double v = 0.0;
    if (type == PlyScalar::float32) {
      float f = 0.0f;
      res = std::from_chars(t.data(), t.data() + t.size(), f);
      v = f;
    } else {
      res = std::from_chars(t.data(), t.data() + t.size(), v);
    }
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
      throw CorruptFile("invalid number '" + std::string(t) + "' in ascii PLY body", at);
    }
    return v;
  }

  void skip_property(const PlyProperty& prop) {
    if (!prop.is_list) {
      token();
      return;
    }
    const std::size_t at = pos_;
    const double count = number();
    if (count < 0 || count != std::floor(count)) throw CorruptFile("invalid list length", at);
    for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) token();
  }

  std::size_t position() const { return pos_; }
  bool only_whitespace_left() const {
    for (std::size_t i = pos_; i < data_.size(); ++i) {
      if (!std::isspace(static_cast<unsigned char>(data_[i]))) return false;
    }
    return true;
  }

private:
  std::string_view data_;
  std::size_t pos_;
};

template <typename Body>
PlyReadResult read_body(Body body, PlyHeaderInfo header, const std::function<double(Body&, const PlyProperty&)>& read_value) {
  PlyReadResult result;
  std::vector<Point3> points;

  std::size_t element_index = 0;
  for (; element_index < header.elements.size(); ++element_index) {
    const PlyElement& element = header.elements[element_index];
    if (element.name == "vertex") break;
    for (std::uint64_t i = 0; i < element.count; ++i) {
      for (const auto& prop : element.properties) body.skip_property(prop);
    }
  }

  const PlyElement& vertex = header.elements[element_index];
  points.reserve(static_cast<std::size_t>(vertex.count));
  for (std::uint64_t i = 0; i < vertex.count; ++i) {
    const std::size_t at = body.position();
    Point3 p = Point3::Zero();
    for (const auto& prop : vertex.properties) {
      if (prop.name == "x") {
        p.x() = read_value(body, prop);
      } else if (prop.name == "y") {
        p.y() = read_value(body, prop);
      } else if (prop.name == "z") {
        p.z() = read_value(body, prop);
      } else {
        body.skip_property(prop);
      }
    }
    if (!p.allFinite()) throw CorruptFile("vertex " + std::to_string(i) + " has a non-finite coordinate", at);
    points.push_back(p);
  }

  if (element_index + 1 == header.elements.size()) {
    bool trailing = false;
    if constexpr (std::is_same_v<Body, BinaryBody>) {
      trailing = body.remaining() > 0;
    } else {
      trailing = !body.only_whitespace_left();
    }
    if (trailing) {
      result.warnings.push_back("ignoring data after the last declared vertex (byte offset " +
                                std::to_string(body.position()) + ")");
    }
  }

  result.cloud = PointCloud(std::move(points));
  result.header = std::move(header);
  return result;
}

}  // namespace

PlyReadResult read_ply_detailed(const std::filesystem::path& path) {
  const std::vector<char> bytes = slurp(path);
  const std::string_view data(bytes.data(), bytes.size());
  PlyHeaderInfo header = parse_header(data);
  const std::size_t start = header.header_bytes;

  if (header.format == PlyFormat::ascii) {
    return read_body<AsciiBody>(AsciiBody(data, start), std::move(header),
                                [](AsciiBody& b, const PlyProperty& p) { return b.number(p.type); });
  }
  return read_body<BinaryBody>(BinaryBody(data, start), std::move(header),
                               [](BinaryBody& b, const PlyProperty& p) { return b.read(p.type); });
}

PointCloud read_ply(const std::filesystem::path& path) {
  PlyReadResult r = read_ply_detailed(path);
  for (const auto& w : r.warnings) std::cerr << "warning: " << path.string() << ": " << w << '\n';
  return std::move(r.cloud);
}

void write_ply(const PointCloud& cloud, const std::filesystem::path& path, PlyFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open PLY file for writing", path.string());

  out << "ply\n"
      << (format == PlyFormat::ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
      << "comment written by mmr\n"
      << "element vertex " << cloud.size() << '\n'
      << "property float x\nproperty float y\nproperty float z\n"
      << "end_header\n";

  if (format == PlyFormat::ascii) {
    char buf[64];
    for (const auto& p : cloud) {
      for (int axis = 0; axis < 3; ++axis) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), static_cast<float>(p[axis]));
        out.write(buf, res.ptr - buf);
        out.put(axis == 2 ? '\n' : ' ');
      }
    }
  } else {
    for (const auto& p : cloud) {
      for (int axis = 0; axis < 3; ++axis) {
        float v = static_cast<float>(p[axis]);
        unsigned char bytes[4];
        std::memcpy(bytes, &v, 4);
        if constexpr (std::endian::native == std::endian::big) {
          std::swap(bytes[0], bytes[3]);
          std::swap(bytes[1], bytes[2]);
        }
        out.write(reinterpret_cast<const char*>(bytes), 4);
      }
    }
  }
  out.flush();
  if (!out) throw IoError("failed writing PLY file", path.string());
}

}  // namespace mmr
