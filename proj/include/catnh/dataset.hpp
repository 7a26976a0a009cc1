#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace catnh {

using Cell = std::variant<double, std::string>;

/// Tabular sweep output. On disk: one '#'-prefixed JSON provenance line, a CSV
/// header, then one CSV line per row.
struct SweepResult {
  static constexpr int kSchemaVersion = 1;

  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json provenance = nlohmann::json::object();

  void add_row(std::vector<Cell> row);
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;
  std::vector<double> numbers(const std::string& column) const;
};

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double x);

void write_sweep_result(const SweepResult& result, const std::filesystem::path& path);
SweepResult read_sweep_result(const std::filesystem::path& path);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

}  // namespace catnh
