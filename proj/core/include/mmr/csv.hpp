#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace mmr {

using CsvValue = std::variant<std::string, double, std::int64_t, std::uint64_t>;

/// Rows of typed cells under one header. Every row has one cell per header column.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvValue>> rows;
};

/// 17 significant digits ("%.17g"); round-trips every finite double.
std::string format_double(double v);

/// Comma-delimited, LF line endings, header row first. Fields containing a comma, quote,
/// CR or LF are quoted with embedded quotes doubled. Throws InvalidInput on a row whose
/// width differs from the header.
void write_csv(std::ostream& out, const CsvTable& table);
void write_results_csv(const CsvTable& table, const std::filesystem::path& path);

/// Parses RFC-4180 style text into raw string fields (first record is the header).
std::vector<std::vector<std::string>> parse_csv(std::istream& in);
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace mmr
