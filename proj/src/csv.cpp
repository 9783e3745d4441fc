#include "bsr/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bsr/errors.hpp"

namespace bsr {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) {
    // Trim surrounding whitespace; quoting is not supported.
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? std::string()
                                               : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  if (cell.empty()) throw NonNumericCell("empty cell", row, col);
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end != begin + cell.size())
    throw NonNumericCell("cannot parse '" + cell + "' as a number", row, col);
  return value;
}

}  // namespace

CsvTable load_csv_table(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open file: " + path);

  CsvTable table;
  std::string line;
  bool have_header = false;
  std::size_t data_row = 0;
  while (std::getline(file, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      table.columns = split_line(line);
      have_header = true;
      continue;
    }
    ++data_row;
    const auto cells = split_line(line);
    if (cells.size() != table.columns.size())
      throw LengthMismatch("row " + std::to_string(data_row) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(table.columns.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      row[c] = parse_cell(cells[c], data_row, c + 1);
    table.rows.push_back(std::move(row));
  }
  if (!have_header || table.columns.empty()) throw EmptyFile("no header in " + path);
  if (table.rows.empty()) throw EmptyFile("no data rows in " + path);
  return table;
}

std::size_t column_index(const CsvTable& table, std::string_view name) {
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    if (table.columns[c] == name) return c;
  throw MissingColumn("column '" + std::string(name) + "' not found");
}

std::vector<double> column_values(const CsvTable& table, std::string_view name) {
  const std::size_t index = column_index(table, name);
  std::vector<double> values;
  values.reserve(table.rows.size());
  for (const auto& row : table.rows) values.push_back(row[index]);
  return values;
}

DataMatrix load_csv(const std::string& path, std::string_view target_column) {
  const CsvTable table = load_csv_table(path);
  const std::size_t target = column_index(table, target_column);
  if (table.columns.size() < 2)
    throw ConfigError("no predictor columns besides target '" + std::string(target_column) + "'");

  std::vector<std::vector<double>> predictors;
  std::vector<double> y;
  predictors.reserve(table.rows.size());
  y.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    std::vector<double> values;
    values.reserve(row.size() - 1);
    for (std::size_t c = 0; c < row.size(); ++c)
      if (c != target) values.push_back(row[c]);
    predictors.push_back(std::move(values));
    y.push_back(row[target]);
  }
  DataMatrix data = make_data(predictors, y);
  data.validate();
  return data;
}

}  // namespace bsr
