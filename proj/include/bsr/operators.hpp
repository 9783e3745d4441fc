#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bsr {

/// One symbolic operator: a name, an arity (1 or 2), an evaluation rule and
/// whether nodes using it carry an (a, b) scalar pair. The linear transform
/// lt(x) = a*x + b is the only built-in parameterized operator.
struct OperatorSpec {
  std::string name;
  int arity = 1;
  bool has_params = false;
  double (*unary)(double) = nullptr;
  double (*binary)(double, double) = nullptr;
  double (*param_unary)(double x, double a, double b) = nullptr;
};

bool same_op(const OperatorSpec& x, const OperatorSpec& y);  // compares names

OperatorSpec make_unary_op(std::string name, double (*fn)(double));
OperatorSpec make_binary_op(std::string name, double (*fn)(double, double));

/// Operator registry with the sampling weights w_op attached.
class OperatorSet {
 public:
  OperatorSet() = default;

  /// Validates: at least one operator, unique names, arities in {1, 2},
  /// weights non-negative and summing to 1 within 1e-12.
  OperatorSet(std::vector<OperatorSpec> ops, std::vector<double> weights);

  /// {exp, lt, inv, neg, +, x}, uniform weights.
  static OperatorSet default_pool();

  /// {+, -, x, /, sin, cos, exp, square, cube, lt}, uniform weights.
  static OperatorSet benchmark_pool();

  std::size_t size() const { return ops_.size(); }
  const OperatorSpec& at(std::size_t i) const { return ops_[i]; }
  const std::vector<OperatorSpec>& ops() const { return ops_; }
  const std::vector<double>& weights() const { return weights_; }

  int index_of(std::string_view name) const;      // -1 when absent
  double weight_of(std::string_view name) const;  // throws UnknownOperator

 private:
  std::vector<OperatorSpec> ops_;
  std::vector<double> weights_;
};

/// Looks up one of the built-in operators (add, sub, mul, div, sin, cos,
/// exp, inv, neg, square, cube, lt) by name. Throws UnknownOperator.
const OperatorSpec& builtin_operator(std::string_view name);
const std::vector<OperatorSpec>& builtin_operators();

}  // namespace bsr
