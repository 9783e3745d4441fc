#include "bsr/data_matrix.hpp"

#include <cmath>

#include "bsr/errors.hpp"

namespace bsr {

void DataMatrix::validate() const {
  if (X.rows() < 1 || X.cols() < 1)
    throw LengthMismatch("data matrix must have at least one row and column");
  if (!X.allFinite())
    throw NonFiniteColumn("data matrix contains non-finite entries");
  if (has_y) {
    if (y.size() != X.rows())
      throw LengthMismatch("response length does not match the row count");
    if (!y.allFinite())
      throw NonFiniteColumn("response contains non-finite entries");
  }
}

DataMatrix make_data(const std::vector<std::vector<double>>& rows,
                     const std::vector<double>& y) {
  DataMatrix data;
  if (rows.empty()) throw LengthMismatch("make_data: no rows");
  const std::size_t d = rows.front().size();
  data.X.resize(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d)
      throw LengthMismatch("make_data: ragged rows");
    for (std::size_t j = 0; j < d; ++j)
      data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  }
  if (!y.empty()) {
    if (y.size() != rows.size())
      throw LengthMismatch("make_data: response length mismatch");
    data.y.resize(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i)
      data.y(static_cast<Eigen::Index>(i)) = y[i];
    data.has_y = true;
  }
  return data;
}

}  // namespace bsr
