#include "bsr/prior.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bsr/errors.hpp"

namespace bsr {

namespace {

constexpr double kWeightTol = 1e-12;

void check_positive(double v, const char* name) {
  if (!(v > 0.0))
    throw ConfigError(std::string(name) + " must be positive");
}

}  // namespace

PriorConfig PriorConfig::defaults(int num_features) {
  if (num_features < 1)
    throw ConfigError("need at least one feature");
  PriorConfig cfg;
  cfg.operators = OperatorSet::default_pool();
  cfg.feature_weights.assign(static_cast<std::size_t>(num_features),
                             1.0 / num_features);
  return cfg;
}

void PriorConfig::validate() const {
  if (!(alpha >= 0.0) || !(alpha < 1.0))
    throw ConfigError("alpha must lie in [0, 1)");
  if (!(beta >= 0.0)) throw ConfigError("beta must be non-negative");
  if (operators.size() == 0) throw ConfigError("operator set is empty");
  if (feature_weights.empty())
    throw ConfigError("feature weights are empty");
  double sum = 0.0;
  for (double w : feature_weights) {
    if (!(w >= 0.0)) throw ConfigError("feature weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightTol)
    throw ConfigError("feature weights must sum to 1");
  check_positive(nu_a, "nu_a");
  check_positive(lambda_a, "lambda_a");
  check_positive(nu_b, "nu_b");
  check_positive(lambda_b, "lambda_b");
  check_positive(nu, "nu");
  check_positive(lambda, "lambda");
  if (num_trees < 1) throw ConfigError("num_trees must be at least 1");
  if (max_depth < 1) throw ConfigError("max_depth must be at least 1");
  check_positive(moves.stay_scale, "moves.stay_scale");
  check_positive(moves.stay_shift, "moves.stay_shift");
  check_positive(moves.grow_cap, "moves.grow_cap");
  check_positive(moves.grow_shift, "moves.grow_shift");
  check_positive(moves.delete_shift, "moves.delete_shift");
}

double split_probability(int depth, const PriorConfig& cfg) {
  if (depth >= cfg.max_depth) return 0.0;
  return cfg.alpha * std::pow(1.0 + depth, -cfg.beta);
}

ExprNode sample_structure(const PriorConfig& cfg, int depth, Rng& rng) {
  const double p1 = split_probability(depth, cfg);
  if (rng.uniform() < p1) {
    std::size_t which = rng.categorical(cfg.operators.weights());
    const OperatorSpec& op = cfg.operators.at(which);
    ExprNode node;
    node.terminal = false;
    node.op = op;
    node.uid = fresh_uid();
    node.children.push_back(sample_structure(cfg, depth + 1, rng));
    if (op.arity == 2)
      node.children.push_back(sample_structure(cfg, depth + 1, rng));
    return node;
  }
  return make_terminal(
      static_cast<int>(rng.categorical(cfg.feature_weights)));
}

ExprTree sample_tree(const PriorConfig& cfg, const ScaleState& scales,
                     Rng& rng) {
  ExprTree tree;
  tree.root = sample_structure(cfg, 0, rng);
  resample_lt_params(tree.root, scales, rng);
  return tree;
}

ExprTree sample_tree(const PriorConfig& cfg, Rng& rng) {
  ExprTree tree;
  tree.root = sample_structure(cfg, 0, rng);
  return tree;
}

void resample_lt_params(ExprNode& node, const ScaleState& scales, Rng& rng) {
  if (!node.terminal && node.op.has_params) {
    node.a = rng.normal(1.0, std::sqrt(scales.sigma_a2));
    node.b = rng.normal(0.0, std::sqrt(scales.sigma_b2));
  }
  for (ExprNode& child : node.children)
    resample_lt_params(child, scales, rng);
}

double log_structure_gen(const ExprNode& node, const PriorConfig& cfg,
                         int depth) {
  const double p1 = split_probability(depth, cfg);
  if (node.terminal) {
    if (node.feature < 0 ||
        node.feature >= static_cast<int>(cfg.feature_weights.size()))
      throw FeatureOutOfRange("terminal feature index " +
                              std::to_string(node.feature) +
                              " outside the feature weights");
    return std::log1p(-p1) +
           std::log(cfg.feature_weights[static_cast<std::size_t>(
               node.feature)]);
  }
  double total = std::log(p1) + std::log(cfg.operators.weight_of(node.op.name));
  for (const ExprNode& child : node.children)
    total += log_structure_gen(child, cfg, depth + 1);
  return total;
}

double log_prior_structure(const ExprTree& tree, const PriorConfig& cfg) {
  return log_structure_gen(tree.root, cfg, 0);
}

double log_prior_params(const ExprNode& node, const ScaleState& scales) {
  double total = 0.0;
  if (!node.terminal && node.op.has_params) {
    total += log_normal_pdf(node.a, 1.0, std::sqrt(scales.sigma_a2));
    total += log_normal_pdf(node.b, 0.0, std::sqrt(scales.sigma_b2));
  }
  for (const ExprNode& child : node.children)
    total += log_prior_params(child, scales);
  return total;
}

double log_prior_params(const ExprTree& tree, const ScaleState& scales) {
  return log_prior_params(tree.root, scales);
}

ScaleState sample_scales(const PriorConfig& cfg, Rng& rng) {
  ScaleState s;
  s.sigma_a2 = rng.inverse_gamma(cfg.nu_a / 2.0, cfg.nu_a * cfg.lambda_a / 2.0);
  s.sigma_b2 = rng.inverse_gamma(cfg.nu_b / 2.0, cfg.nu_b * cfg.lambda_b / 2.0);
  s.sigma2 = rng.inverse_gamma(cfg.nu / 2.0, cfg.nu * cfg.lambda / 2.0);
  return s;
}

double log_hyperprior(const ScaleState& s, const PriorConfig& cfg) {
  return log_inverse_gamma_pdf(s.sigma_a2, cfg.nu_a / 2.0,
                               cfg.nu_a * cfg.lambda_a / 2.0) +
         log_inverse_gamma_pdf(s.sigma_b2, cfg.nu_b / 2.0,
                               cfg.nu_b * cfg.lambda_b / 2.0) +
         log_inverse_gamma_pdf(s.sigma2, cfg.nu / 2.0, cfg.nu * cfg.lambda / 2.0);
}

double log_normal_pdf(double x, double mean, double sd) {
  if (!(sd > 0.0)) throw NonPositiveScale("normal sd must be positive");
  const double z = (x - mean) / sd;
  return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sd) - 0.5 * z * z;
}

double log_inverse_gamma_pdf(double x, double shape, double rate) {
  if (!(x > 0.0))
    throw NonPositiveScale("inverse-gamma support is (0, inf)");
  if (!(shape > 0.0) || !(rate > 0.0))
    throw NonPositiveScale("inverse-gamma shape and rate must be positive");
  return shape * std::log(rate) - std::lgamma(shape) -
         (shape + 1.0) * std::log(x) - rate / x;
}

}  // namespace bsr
