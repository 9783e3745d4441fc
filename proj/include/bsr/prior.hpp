#pragma once

#include <vector>

#include "bsr/expr_tree.hpp"
#include "bsr/operators.hpp"
#include "bsr/rng.hpp"

namespace bsr {

/// The variance parameters shared by every tree of a model: the scales of
/// the linear-transform coefficient priors a ~ N(1, sigma_a2),
/// b ~ N(0, sigma_b2), and the observation noise variance sigma2.
struct ScaleState {
  double sigma_a2 = 1.0;
  double sigma_b2 = 1.0;
  double sigma2 = 1.0;
};

/// Constants of the move-probability formulas. With n_l linear-transform
/// nodes, N_nt non-terminals and N_c delete candidates:
///   p_stay   = n_l / (stay_scale * (n_l + stay_shift))
///   p_grow   = (1 - p_stay)/3 * min{1, grow_cap / (N_nt + grow_shift)}
///   p_prune  = (1 - p_stay)/3 - p_grow
///   p_delete = (1 - p_stay)/3 * N_c / (N_c + delete_shift)
///   p_insert = (1 - p_stay)/3 - p_delete
///   p_reop = p_refeat = (1 - p_stay)/6
struct MoveConstants {
  double stay_scale = 4.0;
  double stay_shift = 3.0;
  double grow_cap = 8.0;
  double grow_shift = 2.0;
  double delete_shift = 3.0;
};

/// Everything that defines the prior over models: the depth-decaying split
/// probability, the operator pool and weights, the feature weights, the
/// inverse-gamma hyperpriors on the three scales, and the mixture size.
struct PriorConfig {
  double alpha = 0.4;  // split probability at depth 0
  double beta = 1.2;   // split probability decay exponent
  OperatorSet operators;
  std::vector<double> feature_weights;

  // inverse-gamma hyperpriors, each IG(nu/2, nu*lambda/2)
  double nu_a = 2.0, lambda_a = 1.0;  // on sigma_a2
  double nu_b = 2.0, lambda_b = 1.0;  // on sigma_b2
  double nu = 2.0, lambda = 1.0;      // on sigma2

  int num_trees = 2;
  int max_depth = 15;  // nodes at this depth never split
  MoveConstants moves;

  /// Uniform feature weights over `num_features` columns and the default
  /// operator pool; other fields keep their defaults.
  static PriorConfig defaults(int num_features);

  /// Throws ConfigError when any field is out of range.
  void validate() const;
};

/// p1(depth) = alpha * (1 + depth)^(-beta), clamped to 0 at max_depth.
double split_probability(int depth, const PriorConfig&);

/// Draws a tree structure rooted at the given absolute depth: each node
/// splits with probability p1(depth), non-terminals draw their operator from
/// the weighted pool, terminals draw their feature. Linear-transform
/// parameters are left at (1, 0); draw them with resample_lt_params.
ExprNode sample_structure(const PriorConfig&, int depth, Rng&);

/// Structure plus coefficients drawn at the given scales.
ExprTree sample_tree(const PriorConfig&, const ScaleState&, Rng&);

/// Structure only; coefficients stay at (1, 0).
ExprTree sample_tree(const PriorConfig&, Rng&);

/// Redraws every linear-transform pair in pre-order: a ~ N(1, sigma_a2),
/// b ~ N(0, sigma_b2).
void resample_lt_params(ExprNode&, const ScaleState&, Rng&);

/// Log density of sample_structure producing this subtree when rooted at
/// the given absolute depth. -inf when the structure is unreachable (a split
/// at or past max_depth, or a zero-weight operator or feature). Throws
/// UnknownOperator for operators outside the pool and FeatureOutOfRange for
/// features outside the weight vector.
double log_structure_gen(const ExprNode&, const PriorConfig&, int depth);

/// log_structure_gen at the root (depth 0).
double log_prior_structure(const ExprTree&, const PriorConfig&);

/// Sum of the coefficient log densities over all linear-transform nodes:
/// log N(a; 1, sigma_a2) + log N(b; 0, sigma_b2) per node.
double log_prior_params(const ExprNode&, const ScaleState&);
double log_prior_params(const ExprTree&, const ScaleState&);

/// Draws (sigma_a2, sigma_b2, sigma2) from their inverse-gamma hyperpriors,
/// in that order.
ScaleState sample_scales(const PriorConfig&, Rng&);

/// Joint log density of the three scales under their hyperpriors. Throws
/// NonPositiveScale when any scale is <= 0.
double log_hyperprior(const ScaleState&, const PriorConfig&);

double log_normal_pdf(double x, double mean, double sd);

/// log of the IG(shape, rate) density x^(-shape-1) e^(-rate/x) r^shape /
/// Gamma(shape); the mean is rate/(shape-1) when shape > 1.
double log_inverse_gamma_pdf(double x, double shape, double rate);

}  // namespace bsr
