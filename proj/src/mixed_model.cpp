#include "bsr/mixed_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bsr/errors.hpp"

namespace bsr {

Eigen::MatrixXd design_matrix(const std::vector<ExprTree>& trees,
                              const DataMatrix& data) {
  const int n = data.n();
  Eigen::MatrixXd design(n, static_cast<int>(trees.size()) + 1);
  design.col(0).setOnes();
  for (std::size_t k = 0; k < trees.size(); ++k) {
    const std::vector<double> values = eval_tree(trees[k], data);
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(values[static_cast<std::size_t>(i)]))
        throw NonFiniteColumn("tree " + std::to_string(k) +
                              " evaluates to a non-finite value");
      design(i, static_cast<int>(k) + 1) = values[static_cast<std::size_t>(i)];
    }
  }
  return design;
}

OlsFit ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  if (design.rows() != y.size())
    throw LengthMismatch("design rows must match the response length");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  OlsFit fit;
  fit.beta = svd.solve(y);
  fit.rss = (y - design * fit.beta).squaredNorm();
  return fit;
}

std::optional<OlsFit> try_fit_mixture(const std::vector<ExprTree>& trees,
                                      const DataMatrix& data) {
  const int n = data.n();
  Eigen::MatrixXd design(n, static_cast<int>(trees.size()) + 1);
  design.col(0).setOnes();
  for (std::size_t k = 0; k < trees.size(); ++k) {
    const std::vector<double> values = eval_tree(trees[k], data);
    for (int i = 0; i < n; ++i) {
      const double v = values[static_cast<std::size_t>(i)];
      if (!std::isfinite(v)) return std::nullopt;
      design(i, static_cast<int>(k) + 1) = v;
    }
  }
  return ols_fit(design, data.y);
}

double log_likelihood(double rss, int n, double sigma2) {
  if (!(sigma2 > 0.0))
    throw NonPositiveVariance("noise variance must be positive");
  if (!std::isfinite(rss)) return -std::numeric_limits<double>::infinity();
  return -0.5 * n * std::log(2.0 * std::numbers::pi * sigma2) -
         rss / (2.0 * sigma2);
}

std::vector<double> predict(const MixtureModel& model, const DataMatrix& data) {
  if (model.beta.size() != model.trees.size() + 1)
    throw LengthMismatch("mixture weights must be one per tree plus intercept");
  const int n = data.n();
  std::vector<double> out(static_cast<std::size_t>(n), model.beta[0]);
  for (std::size_t k = 0; k < model.trees.size(); ++k) {
    const std::vector<double> values = eval_tree(model.trees[k], data);
    for (int i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] +=
          model.beta[k + 1] * values[static_cast<std::size_t>(i)];
  }
  return out;
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size())
    throw LengthMismatch("rmse needs equally long vectors");
  if (predicted.empty()) throw LengthMismatch("rmse of nothing");
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double diff = predicted[i] - actual[i];
    total += diff * diff;
  }
  return std::sqrt(total / static_cast<double>(predicted.size()));
}

std::string format_mixture(const MixtureModel& model, int precision) {
  if (model.beta.size() != model.trees.size() + 1)
    throw LengthMismatch("mixture weights must be one per tree plus intercept");
  std::string out = format_coefficient(model.beta[0], precision);
  for (std::size_t k = 0; k < model.trees.size(); ++k) {
    const double coeff = model.beta[k + 1];
    out += std::signbit(coeff) ? " - " : " + ";
    out += format_coefficient(std::abs(coeff), precision);
    out += "*";
    out += to_infix(model.trees[k], precision);
  }
  return out;
}

double sign_accuracy(std::span<const double> predicted,
                     std::span<const double> actual) {
  if (predicted.size() != actual.size())
    throw LengthMismatch("sign_accuracy needs equally long vectors");
  if (predicted.empty()) throw LengthMismatch("sign_accuracy of nothing");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if ((predicted[i] >= 0.0) == (actual[i] >= 0.0)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace bsr
