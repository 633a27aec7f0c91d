#include "csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace arq::app {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_line(const std::string& text, std::size_t& pos) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"' && pos + 1 < text.size() && text[pos + 1] == '"') {
        cells.back() += '"';
        ++pos;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else if (c == '\n') {
      ++pos;
      break;
    } else if (c != '\r') {
      cells.back() += c;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quoted CSV cell");
  return cells;
}

CsvCell parse_cell(const std::string& s) {
  if (s.empty()) return std::monostate{};
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end == s.c_str() + s.size()) return x;
  return s;
}

}  // namespace

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string write_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t k = 0; k < table.header.size(); ++k) out += (k ? "," : "") + quote(table.header[k]);
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      if (const auto* d = std::get_if<double>(&row[k]))
        out += format_number(*d);
      else if (const auto* s = std::get_if<std::string>(&row[k]))
        out += quote(*s);
    }
    out += '\n';
  }
  return out;
}

CsvTable read_csv(const std::string& text) {
  CsvTable t;
  std::size_t pos = 0;
  if (text.empty()) return t;
  t.header = split_line(text, pos);
  while (pos < text.size()) {
    const auto cells = split_line(text, pos);
    std::vector<CsvCell> row;
    for (const auto& c : cells) row.push_back(parse_cell(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace arq::app
