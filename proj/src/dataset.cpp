#include "catnh/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "catnh/errors.hpp"

namespace catnh {

void SweepResult::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw InvalidArgument("row has " + std::to_string(row.size()) + " cells, expected " +
                          std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::size_t SweepResult::column(const std::string& col) const {
  const auto it = std::find(columns.begin(), columns.end(), col);
  if (it == columns.end()) throw InvalidArgument("no column '" + col + "' in " + name);
  return std::size_t(it - columns.begin());
}

double SweepResult::number(std::size_t row, const std::string& col) const {
  const Cell& c = rows.at(row).at(column(col));
  if (const double* d = std::get_if<double>(&c)) return *d;
  throw InvalidArgument("column '" + col + "' is not numeric");
}

std::vector<double> SweepResult::numbers(const std::string& col) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.push_back(number(i, col));
  return out;
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_number(*d);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\n\"") != std::string::npos) {
    throw InvalidArgument("label cells may not contain commas, quotes or newlines");
  }
  return s;
}

Cell parse_cell(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec == std::errc() && res.ptr == last && !text.empty()) return value;
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  return text;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_sweep_result(const SweepResult& result, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  nlohmann::json header = result.provenance;
  header["schema_version"] = SweepResult::kSchemaVersion;
  header["name"] = result.name;
  header["rows"] = result.rows.size();
  os << "# " << header.dump() << '\n';
  for (std::size_t i = 0; i < result.columns.size(); ++i) os << (i ? "," : "") << result.columns[i];
  os << '\n';
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << '\n';
  }
  if (!os) throw Error("failed writing " + path.string());
}

SweepResult read_sweep_result(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw Error(path.string() + ": missing provenance header");
  }
  SweepResult out;
  out.provenance = nlohmann::json::parse(line.substr(2));
  if (out.provenance.value("schema_version", 0) != SweepResult::kSchemaVersion) {
    throw Error(path.string() + ": unsupported schema version");
  }
  out.name = out.provenance.value("name", std::string());
  out.provenance.erase("name");
  out.provenance.erase("rows");
  out.provenance.erase("schema_version");
  if (!std::getline(is, line)) throw Error(path.string() + ": missing column header");
  out.columns = split_csv(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<Cell> row;
    for (const auto& t : split_csv(line)) row.push_back(parse_cell(t));
    out.add_row(std::move(row));
  }
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace catnh
