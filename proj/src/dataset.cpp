#include "foliate/dataset.hpp"

#include <cstdio>

namespace foliate {

std::string format_double17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_cell(const Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return "";
  if (const double* d = std::get_if<double>(&cell)) return format_double17(*d);
  if (const long long* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

std::string json_cell(const Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return "null";
  if (const double* d = std::get_if<double>(&cell)) return format_double17(*d);
  if (const long long* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return "\"" + json_escape(std::get<std::string>(cell)) + "\"";
}

}  // namespace

void write_csv(const Dataset& data, std::ostream& out) {
  for (std::size_t c = 0; c < data.columns.size(); ++c) {
    out << (c ? "," : "") << data.columns[c];
  }
  out << "\n";
  for (const auto& row : data.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << csv_cell(row[c]);
    }
    out << "\n";
  }
}

void write_json(const Dataset& data, const std::vector<std::pair<std::string, Cell>>& meta,
                std::ostream& out) {
  out << "{\n  \"meta\": {";
  bool first = true;
  for (const auto& [key, value] : meta) {
    out << (first ? "" : ", ") << "\"" << json_escape(key) << "\": " << json_cell(value);
    first = false;
  }
  out << (first ? "" : ", ") << "\"columns\": [";
  for (std::size_t c = 0; c < data.columns.size(); ++c) {
    out << (c ? ", " : "") << "\"" << json_escape(data.columns[c]) << "\"";
  }
  out << "]},\n  \"data\": [\n";
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    out << "    [";
    for (std::size_t c = 0; c < data.rows[r].size(); ++c) {
      out << (c ? ", " : "") << json_cell(data.rows[r][c]);
    }
    out << "]" << (r + 1 < data.rows.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
}

}  // namespace foliate
