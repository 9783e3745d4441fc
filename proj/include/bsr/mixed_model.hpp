#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "bsr/data_matrix.hpp"
#include "bsr/expr_tree.hpp"
#include "bsr/prior.hpp"

namespace bsr {

/// A linear mixture of expression trees:
///   y_hat = beta[0] + sum_k beta[k+1] * eval(trees[k]).
struct MixtureModel {
  std::vector<ExprTree> trees;
  std::vector<double> beta;  // intercept first; size trees.size() + 1
  ScaleState scales;
};

/// [1 | eval(tree_0) | ... | eval(tree_{K-1})]. Throws NonFiniteColumn when
/// any tree produces a non-finite value on the data.
Eigen::MatrixXd design_matrix(const std::vector<ExprTree>&, const DataMatrix&);

struct OlsFit {
  Eigen::VectorXd beta;
  double rss = 0.0;
};

/// Least-squares fit via SVD; rank-deficient designs get the minimum-norm
/// solution (singular values below 1e-10 of the largest are treated as 0).
OlsFit ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

/// design_matrix + ols_fit, but a non-finite design yields nullopt instead
/// of throwing: trees that divide by zero or overflow are an ordinary event
/// during sampling and are handled by rejection.
std::optional<OlsFit> try_fit_mixture(const std::vector<ExprTree>&,
                                      const DataMatrix&);

/// Gaussian log likelihood of residual sum of squares `rss` over n points
/// at noise variance sigma2: -(n/2) log(2 pi sigma2) - rss / (2 sigma2).
/// -inf when rss is not finite. Throws NonPositiveVariance.
double log_likelihood(double rss, int n, double sigma2);

/// Mixture prediction; non-finite tree values propagate into the output.
std::vector<double> predict(const MixtureModel&, const DataMatrix&);

/// Root mean squared error. Throws LengthMismatch.
double rmse(std::span<const double> predicted, std::span<const double> actual);

/// Fraction of positions where the signs agree, zero counting as positive.
/// Throws LengthMismatch.
double sign_accuracy(std::span<const double> predicted,
                     std::span<const double> actual);

/// One-line rendering "b0 + b1*tree1 + ...", coefficients at the given
/// number of significant digits.
std::string format_mixture(const MixtureModel&, int precision);

}  // namespace bsr
