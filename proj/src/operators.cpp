#include "bsr/operators.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "bsr/errors.hpp"

namespace bsr {

namespace {

constexpr double kExpArgLimit = 700.0;

double op_add(double x, double y) { return x + y; }
double op_sub(double x, double y) { return x - y; }
double op_mul(double x, double y) { return x * y; }
double op_div(double x, double y) { return x / y; }
double op_sin(double x) { return std::sin(x); }
double op_cos(double x) { return std::cos(x); }
double op_exp(double x) {
  // arguments past the overflow edge flag the result as non-finite instead
  // of relying on platform overflow behavior
  if (x > kExpArgLimit) return std::numeric_limits<double>::quiet_NaN();
  return std::exp(x);
}
double op_inv(double x) { return 1.0 / x; }
double op_neg(double x) { return -x; }
double op_square(double x) { return x * x; }
double op_cube(double x) { return x * x * x; }
double op_lt(double x, double a, double b) { return a * x + b; }

std::vector<OperatorSpec> make_builtins() {
  std::vector<OperatorSpec> v;
  auto unary = [&](const char* name, double (*fn)(double)) {
    v.push_back(OperatorSpec{name, 1, false, fn, nullptr, nullptr});
  };
  auto binary = [&](const char* name, double (*fn)(double, double)) {
    v.push_back(OperatorSpec{name, 2, false, nullptr, fn, nullptr});
  };
  binary("add", op_add);
  binary("sub", op_sub);
  binary("mul", op_mul);
  binary("div", op_div);
  unary("sin", op_sin);
  unary("cos", op_cos);
  unary("exp", op_exp);
  unary("inv", op_inv);
  unary("neg", op_neg);
  unary("square", op_square);
  unary("cube", op_cube);
  v.push_back(OperatorSpec{"lt", 1, true, nullptr, nullptr, op_lt});
  return v;
}

std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

}  // namespace

bool same_op(const OperatorSpec& x, const OperatorSpec& y) {
  return x.name == y.name;
}

OperatorSpec make_unary_op(std::string name, double (*fn)(double)) {
  return OperatorSpec{std::move(name), 1, false, fn, nullptr, nullptr};
}

OperatorSpec make_binary_op(std::string name, double (*fn)(double, double)) {
  return OperatorSpec{std::move(name), 2, false, nullptr, fn, nullptr};
}

OperatorSet::OperatorSet(std::vector<OperatorSpec> ops,
                         std::vector<double> weights)
    : ops_(std::move(ops)), weights_(std::move(weights)) {
  if (ops_.empty()) throw ConfigError("operator set must not be empty");
  if (ops_.size() != weights_.size())
    throw ConfigError("operator weights must match the operator list");
  std::set<std::string> names;
  double total = 0.0;
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const OperatorSpec& op = ops_[i];
    if (op.arity != 1 && op.arity != 2)
      throw ConfigError("operator '" + op.name + "' has unsupported arity");
    if (op.has_params) {
      if (op.param_unary == nullptr)
        throw ConfigError("parameterized operator '" + op.name +
                          "' lacks an evaluation rule");
    } else if (op.arity == 1 ? op.unary == nullptr : op.binary == nullptr) {
      throw ConfigError("operator '" + op.name + "' lacks an evaluation rule");
    }
    if (!names.insert(op.name).second)
      throw ConfigError("duplicate operator name '" + op.name + "'");
    if (!(weights_[i] >= 0.0))
      throw ConfigError("operator weights must be non-negative");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError("operator weights must sum to 1");
}

OperatorSet OperatorSet::default_pool() {
  std::vector<OperatorSpec> ops = {
      builtin_operator("exp"), builtin_operator("lt"),
      builtin_operator("inv"), builtin_operator("neg"),
      builtin_operator("add"), builtin_operator("mul")};
  return OperatorSet(std::move(ops), uniform_weights(6));
}

OperatorSet OperatorSet::benchmark_pool() {
  std::vector<OperatorSpec> ops = {
      builtin_operator("add"),    builtin_operator("sub"),
      builtin_operator("mul"),    builtin_operator("div"),
      builtin_operator("sin"),    builtin_operator("cos"),
      builtin_operator("exp"),    builtin_operator("square"),
      builtin_operator("cube"),   builtin_operator("lt")};
  return OperatorSet(std::move(ops), uniform_weights(10));
}

int OperatorSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < ops_.size(); ++i)
    if (ops_[i].name == name) return static_cast<int>(i);
  return -1;
}

double OperatorSet::weight_of(std::string_view name) const {
  int i = index_of(name);
  if (i < 0)
    throw UnknownOperator("operator '" + std::string(name) +
                          "' is not in the active set");
  return weights_[static_cast<std::size_t>(i)];
}

const std::vector<OperatorSpec>& builtin_operators() {
  static const std::vector<OperatorSpec> table = make_builtins();
  return table;
}

const OperatorSpec& builtin_operator(std::string_view name) {
  for (const OperatorSpec& op : builtin_operators())
    if (op.name == name) return op;
  throw UnknownOperator("unknown operator '" + std::string(name) + "'");
}

}  // namespace bsr
