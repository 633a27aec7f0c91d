#pragma once

#include <string>
#include <variant>
#include <vector>

namespace arq::app {

/// Empty, numeric or text cell. Numbers print with 17 significant digits.
using CsvCell = std::variant<std::monostate, double, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

std::string format_number(double x);
std::string write_csv(const CsvTable& table);
/// Cells that parse completely as a number become numeric.
CsvTable read_csv(const std::string& text);

}  // namespace arq::app
