#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace cbo::harness {

/// Plain comma-separated table with a header row. Fields never contain commas or quotes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

/// Shortest text that parses back to the same double (17 significant digits).
std::string format_double(double v);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace cbo::harness
