#include <mmr/csv.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <type_traits>

#include <mmr/error.hpp>

namespace mmr {

namespace {

void write_field(std::ostream& out, const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c > 0) out << ',';
    write_field(out, table.header[c]);
  }
  out << '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size()) {
      throw InvalidInput("write_csv: row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                         " fields, header has " + std::to_string(table.header.size()));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      std::visit(
          [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
              write_field(out, v);
            } else if constexpr (std::is_same_v<T, double>) {
              out << format_double(v);
            } else {
              out << v;
            }
          },
          row[c]);
    }
    out << '\n';
  }
}

void write_results_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open CSV file for writing", path.string());
  write_csv(out, table);
  out.flush();
  if (!out) throw IoError("failed writing CSV file", path.string());
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw InvalidInput("parse_csv: unterminated quoted field");
  if (any) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CSV file", path.string());
  return parse_csv(in);
}

}  // namespace mmr
