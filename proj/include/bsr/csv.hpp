#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bsr/data_matrix.hpp"

namespace bsr {

/// A parsed headered CSV: column names plus row-major numeric cells.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Parses a headered, comma-separated, all-numeric table. Throws EmptyFile
/// for a missing header or zero data rows, NonNumericCell (with 1-based
/// data-row index and 1-based column) for unparseable cells, LengthMismatch
/// for ragged rows, and ConfigError when the file cannot be opened.
CsvTable load_csv_table(const std::string& path);

/// load_csv_table + split into predictors (every non-target column, header
/// order preserved) and the target column. Throws MissingColumn.
DataMatrix load_csv(const std::string& path, std::string_view target_column);

/// Positions of the named column. Throws MissingColumn.
std::size_t column_index(const CsvTable&, std::string_view name);

/// One column as a vector.
std::vector<double> column_values(const CsvTable&, std::string_view name);

}  // namespace bsr
