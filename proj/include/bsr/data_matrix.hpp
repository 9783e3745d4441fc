#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bsr {

/// Predictor matrix (n rows, d feature columns) with an optional response.
struct DataMatrix {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  bool has_y = false;

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()); }

  /// Requires n >= 1, d >= 1 and finite entries everywhere.
  void validate() const;
};

DataMatrix make_data(const std::vector<std::vector<double>>& rows,
                     const std::vector<double>& y = {});

}  // namespace bsr
