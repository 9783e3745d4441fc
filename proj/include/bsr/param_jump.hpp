#pragma once

#include <span>
#include <vector>

#include "bsr/expr_tree.hpp"
#include "bsr/prior.hpp"
#include "bsr/rng.hpp"

namespace bsr {

/// The (a, b) coefficients of one parameterized node.
struct LtPair {
  double a = 1.0;
  double b = 0.0;
};

/// Coefficients of a tree's parameterized nodes in pre-order.
struct ParamVector {
  std::vector<LtPair> pairs;
  std::size_t size() const { return pairs.size(); }
};

ParamVector extract_params(const ExprNode& root);

/// Writes pairs back onto the parameterized nodes in pre-order. Throws
/// DimensionError when the counts disagree.
void apply_params(ExprNode& root, const ParamVector&);

/// How the parameterized nodes of two trees line up after a structure edit,
/// matched by uid. Surviving nodes appear in `kept` as (index in the old
/// pre-order, index in the new pre-order); the rest are listed in their own
/// tree's pre-order. Throws DimensionError when a tree holds duplicate uids
/// among parameterized nodes.
struct LtPairing {
  std::vector<std::pair<int, int>> kept;
  std::vector<int> dropped;  // old indices
  std::vector<int> created;  // new indices
};

LtPairing pair_lt_nodes(const ExprNode& old_root, const ExprNode& new_root);

/// One dimension-changing coefficient proposal. new_params lines up with the
/// new tree's pre-order; new_scales carries the freshly drawn coefficient
/// scales (its sigma2 is copied from the current state for the caller to
/// overwrite). The three log terms enter the acceptance ratio as
/// log_h_reverse - log_h_forward + log_jacobian.
struct JumpResult {
  ParamVector new_params;
  ScaleState new_scales;
  double log_h_forward = 0.0;
  double log_h_reverse = 0.0;
  double log_jacobian = 0.0;
};

/// Dimension-raising proposal. Draws fresh coefficient scales from their
/// hyperpriors and an auxiliary pair u_i ~ (N(1, sa*), N(0, sb*)) for every
/// old pair; an old pair theta_i maps to (theta_i + u_i) / 2 and leaves
/// (theta_i - u_i) / 2 behind as the reverse auxiliary. Surviving nodes
/// receive their own transformed pair; created nodes (new pre-order) first
/// consume the transformed pairs of dropped nodes (old pre-order), then
/// fresh draws from the same law. Requires created > dropped.
JumpResult expand(const ParamVector& theta, const LtPairing&,
                  const PriorConfig&, const ScaleState& current, Rng&);

/// Dimension-lowering proposal, the inverse route of expand. Draws fresh
/// scales and one auxiliary pair U_j ~ (N(0, sa*), N(0, sb*)) per surviving
/// slot; slot j takes theta0_j + U_j where theta0 collects the survivors'
/// pairs (created nodes borrow dropped pairs in pre-order when the edit
/// also creates nodes). The reverse auxiliary is (theta0 - U, leftover
/// dropped pairs). Requires created < dropped.
JumpResult shrink(const ParamVector& theta, const LtPairing&,
                  const PriorConfig&, const ScaleState& current, Rng&);

/// Coefficient refresh for equal-dimension edits: every pair of the new
/// tree is redrawn i.i.d. from the coefficient prior at the current scales.
/// log_density_new is the joint density of the draw, log_density_old the
/// density the reverse refresh would assign to the old coefficients; both
/// equal the corresponding coefficient-prior terms, so the four cancel in
/// the acceptance ratio.
struct NoChangeResult {
  ParamVector new_params;
  double log_density_new = 0.0;
  double log_density_old = 0.0;
};

NoChangeResult no_change_resample(const ParamVector& old_params,
                                  const ScaleState&, Rng&);

/// The deterministic coordinate maps behind expand and shrink, on flat
/// spans (one entry per scalar coefficient), for derivative checks.
/// expand_map: theta_star = (theta + u) / 2, u_star = (theta - u) / 2,
/// log |J| = -n log 2 over n scalars. shrink_map: theta_star = theta0 + u,
/// u_star = theta0 - u, log |J| = +n log 2.
void expand_map(std::span<const double> theta, std::span<const double> u,
                std::span<double> theta_star, std::span<double> u_star);
void shrink_map(std::span<const double> theta0, std::span<const double> u,
                std::span<double> theta_star, std::span<double> u_star);
double expand_log_jacobian(std::size_t scalar_dim);
double shrink_log_jacobian(std::size_t scalar_dim);

}  // namespace bsr
