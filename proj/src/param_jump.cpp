#include "bsr/param_jump.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "bsr/errors.hpp"

namespace bsr {

namespace {

void collect_lt(const ExprNode& node, std::vector<const ExprNode*>& out) {
  if (!node.terminal && node.op.has_params) out.push_back(&node);
  for (const ExprNode& child : node.children) collect_lt(child, out);
}

void collect_lt_mut(ExprNode& node, std::vector<ExprNode*>& out) {
  if (!node.terminal && node.op.has_params) out.push_back(&node);
  for (ExprNode& child : node.children) collect_lt_mut(child, out);
}

// joint log density of one auxiliary pair under the expand law
double log_expand_pair(const LtPair& u, double sd_a, double sd_b) {
  return log_normal_pdf(u.a, 1.0, sd_a) + log_normal_pdf(u.b, 0.0, sd_b);
}

// joint log density of one auxiliary pair under the shrink law (mean zero)
double log_shrink_pair(const LtPair& u, double sd_a, double sd_b) {
  return log_normal_pdf(u.a, 0.0, sd_a) + log_normal_pdf(u.b, 0.0, sd_b);
}

double log_scale_hyper(double value, double nu, double lambda) {
  return log_inverse_gamma_pdf(value, nu / 2.0, nu * lambda / 2.0);
}

}  // namespace

ParamVector extract_params(const ExprNode& root) {
  std::vector<const ExprNode*> nodes;
  collect_lt(root, nodes);
  ParamVector out;
  out.pairs.reserve(nodes.size());
  for (const ExprNode* n : nodes) out.pairs.push_back({n->a, n->b});
  return out;
}

void apply_params(ExprNode& root, const ParamVector& params) {
  std::vector<ExprNode*> nodes;
  collect_lt_mut(root, nodes);
  if (nodes.size() != params.size())
    throw DimensionError("coefficient count does not match the tree");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i]->a = params.pairs[i].a;
    nodes[i]->b = params.pairs[i].b;
  }
}

LtPairing pair_lt_nodes(const ExprNode& old_root, const ExprNode& new_root) {
  std::vector<const ExprNode*> old_nodes, new_nodes;
  collect_lt(old_root, old_nodes);
  collect_lt(new_root, new_nodes);

  std::unordered_map<std::uint64_t, int> by_uid;
  by_uid.reserve(old_nodes.size());
  for (std::size_t i = 0; i < old_nodes.size(); ++i)
    if (!by_uid.emplace(old_nodes[i]->uid, static_cast<int>(i)).second)
      throw DimensionError("duplicate uid among parameterized nodes");

  LtPairing pairing;
  std::vector<bool> matched(old_nodes.size(), false);
  for (std::size_t j = 0; j < new_nodes.size(); ++j) {
    auto hit = by_uid.find(new_nodes[j]->uid);
    if (hit != by_uid.end()) {
      if (matched[static_cast<std::size_t>(hit->second)])
        throw DimensionError("duplicate uid among parameterized nodes");
      matched[static_cast<std::size_t>(hit->second)] = true;
      pairing.kept.emplace_back(hit->second, static_cast<int>(j));
    } else {
      pairing.created.push_back(static_cast<int>(j));
    }
  }
  for (std::size_t i = 0; i < old_nodes.size(); ++i)
    if (!matched[i]) pairing.dropped.push_back(static_cast<int>(i));
  return pairing;
}

JumpResult expand(const ParamVector& theta, const LtPairing& pairing,
                  const PriorConfig& cfg, const ScaleState& current,
                  Rng& rng) {
  const std::size_t m = theta.size();
  const std::size_t n_created = pairing.created.size();
  const std::size_t n_dropped = pairing.dropped.size();
  if (n_created <= n_dropped)
    throw DimensionError("expand needs a net gain of parameterized nodes");
  if (pairing.kept.size() + n_dropped != m)
    throw DimensionError("pairing does not cover the old coefficients");

  JumpResult out;
  out.new_scales.sigma_a2 =
      rng.inverse_gamma(cfg.nu_a / 2.0, cfg.nu_a * cfg.lambda_a / 2.0);
  out.new_scales.sigma_b2 =
      rng.inverse_gamma(cfg.nu_b / 2.0, cfg.nu_b * cfg.lambda_b / 2.0);
  out.new_scales.sigma2 = current.sigma2;
  const double sd_a_new = std::sqrt(out.new_scales.sigma_a2);
  const double sd_b_new = std::sqrt(out.new_scales.sigma_b2);
  const double sd_a_old = std::sqrt(current.sigma_a2);
  const double sd_b_old = std::sqrt(current.sigma_b2);

  out.log_h_forward =
      log_scale_hyper(out.new_scales.sigma_a2, cfg.nu_a, cfg.lambda_a) +
      log_scale_hyper(out.new_scales.sigma_b2, cfg.nu_b, cfg.lambda_b);
  out.log_h_reverse =
      log_scale_hyper(current.sigma_a2, cfg.nu_a, cfg.lambda_a) +
      log_scale_hyper(current.sigma_b2, cfg.nu_b, cfg.lambda_b);

  // every old pair is averaged with an auxiliary draw; the half-difference
  // is what the reverse shrink would have drawn
  std::vector<LtPair> transformed(m);
  for (std::size_t i = 0; i < m; ++i) {
    LtPair u{rng.normal(1.0, sd_a_new), rng.normal(0.0, sd_b_new)};
    out.log_h_forward += log_expand_pair(u, sd_a_new, sd_b_new);
    const LtPair& t = theta.pairs[i];
    transformed[i] = {(t.a + u.a) / 2.0, (t.b + u.b) / 2.0};
    LtPair rev{(t.a - u.a) / 2.0, (t.b - u.b) / 2.0};
    out.log_h_reverse += log_shrink_pair(rev, sd_a_old, sd_b_old);
  }

  const std::size_t new_total = pairing.kept.size() + n_created;
  out.new_params.pairs.assign(new_total, LtPair{});
  for (const auto& [old_i, new_j] : pairing.kept)
    out.new_params.pairs[static_cast<std::size_t>(new_j)] =
        transformed[static_cast<std::size_t>(old_i)];

  // created slots first inherit the transformed pairs of dropped nodes,
  // then take fresh draws
  for (std::size_t k = 0; k < n_created; ++k) {
    const auto slot = static_cast<std::size_t>(pairing.created[k]);
    if (k < n_dropped) {
      out.new_params.pairs[slot] =
          transformed[static_cast<std::size_t>(pairing.dropped[k])];
    } else {
      LtPair u{rng.normal(1.0, sd_a_new), rng.normal(0.0, sd_b_new)};
      out.log_h_forward += log_expand_pair(u, sd_a_new, sd_b_new);
      out.new_params.pairs[slot] = u;
    }
  }

  out.log_jacobian = expand_log_jacobian(2 * m);
  return out;
}

JumpResult shrink(const ParamVector& theta, const LtPairing& pairing,
                  const PriorConfig& cfg, const ScaleState& current,
                  Rng& rng) {
  const std::size_t m = theta.size();
  const std::size_t n_created = pairing.created.size();
  const std::size_t n_dropped = pairing.dropped.size();
  if (n_created >= n_dropped)
    throw DimensionError("shrink needs a net loss of parameterized nodes");
  if (pairing.kept.size() + n_dropped != m)
    throw DimensionError("pairing does not cover the old coefficients");

  JumpResult out;
  out.new_scales.sigma_a2 =
      rng.inverse_gamma(cfg.nu_a / 2.0, cfg.nu_a * cfg.lambda_a / 2.0);
  out.new_scales.sigma_b2 =
      rng.inverse_gamma(cfg.nu_b / 2.0, cfg.nu_b * cfg.lambda_b / 2.0);
  out.new_scales.sigma2 = current.sigma2;
  const double sd_a_new = std::sqrt(out.new_scales.sigma_a2);
  const double sd_b_new = std::sqrt(out.new_scales.sigma_b2);
  const double sd_a_old = std::sqrt(current.sigma_a2);
  const double sd_b_old = std::sqrt(current.sigma_b2);

  out.log_h_forward =
      log_scale_hyper(out.new_scales.sigma_a2, cfg.nu_a, cfg.lambda_a) +
      log_scale_hyper(out.new_scales.sigma_b2, cfg.nu_b, cfg.lambda_b);
  out.log_h_reverse =
      log_scale_hyper(current.sigma_a2, cfg.nu_a, cfg.lambda_a) +
      log_scale_hyper(current.sigma_b2, cfg.nu_b, cfg.lambda_b);

  // theta0: the old pair feeding each new slot. Survivors feed their own
  // slot; created slots borrow dropped pairs in pre-order.
  const std::size_t new_total = pairing.kept.size() + n_created;
  std::vector<LtPair> theta0(new_total);
  for (const auto& [old_i, new_j] : pairing.kept)
    theta0[static_cast<std::size_t>(new_j)] =
        theta.pairs[static_cast<std::size_t>(old_i)];
  for (std::size_t k = 0; k < n_created; ++k)
    theta0[static_cast<std::size_t>(pairing.created[k])] =
        theta.pairs[static_cast<std::size_t>(pairing.dropped[k])];

  // each surviving slot moves by a mean-zero auxiliary; the reverse expand
  // must have drawn theta0 - U as its auxiliary pair
  out.new_params.pairs.assign(new_total, LtPair{});
  for (std::size_t j = 0; j < new_total; ++j) {
    LtPair u{rng.normal(0.0, sd_a_new), rng.normal(0.0, sd_b_new)};
    out.log_h_forward += log_shrink_pair(u, sd_a_new, sd_b_new);
    out.new_params.pairs[j] = {theta0[j].a + u.a, theta0[j].b + u.b};
    LtPair rev{theta0[j].a - u.a, theta0[j].b - u.b};
    out.log_h_reverse += log_expand_pair(rev, sd_a_old, sd_b_old);
  }

  // leftover dropped pairs are what the reverse expand drew for its
  // created nodes
  for (std::size_t k = n_created; k < n_dropped; ++k) {
    const LtPair& d = theta.pairs[static_cast<std::size_t>(pairing.dropped[k])];
    out.log_h_reverse += log_expand_pair(d, sd_a_old, sd_b_old);
  }

  out.log_jacobian = shrink_log_jacobian(2 * new_total);
  return out;
}

NoChangeResult no_change_resample(const ParamVector& old_params,
                                  const ScaleState& scales, Rng& rng) {
  const double sd_a = std::sqrt(scales.sigma_a2);
  const double sd_b = std::sqrt(scales.sigma_b2);
  NoChangeResult out;
  out.new_params.pairs.reserve(old_params.size());
  for (std::size_t i = 0; i < old_params.size(); ++i) {
    LtPair fresh{rng.normal(1.0, sd_a), rng.normal(0.0, sd_b)};
    out.log_density_new += log_expand_pair(fresh, sd_a, sd_b);
    out.log_density_old += log_expand_pair(old_params.pairs[i], sd_a, sd_b);
    out.new_params.pairs.push_back(fresh);
  }
  return out;
}

void expand_map(std::span<const double> theta, std::span<const double> u,
                std::span<double> theta_star, std::span<double> u_star) {
  if (theta.size() != u.size() || theta.size() != theta_star.size() ||
      theta.size() != u_star.size())
    throw DimensionError("expand_map spans must share one length");
  for (std::size_t i = 0; i < theta.size(); ++i) {
    theta_star[i] = (theta[i] + u[i]) / 2.0;
    u_star[i] = (theta[i] - u[i]) / 2.0;
  }
}

void shrink_map(std::span<const double> theta0, std::span<const double> u,
                std::span<double> theta_star, std::span<double> u_star) {
  if (theta0.size() != u.size() || theta0.size() != theta_star.size() ||
      theta0.size() != u_star.size())
    throw DimensionError("shrink_map spans must share one length");
  for (std::size_t i = 0; i < theta0.size(); ++i) {
    theta_star[i] = theta0[i] + u[i];
    u_star[i] = theta0[i] - u[i];
  }
}

double expand_log_jacobian(std::size_t scalar_dim) {
  return -static_cast<double>(scalar_dim) * std::log(2.0);
}

double shrink_log_jacobian(std::size_t scalar_dim) {
  return static_cast<double>(scalar_dim) * std::log(2.0);
}

}  // namespace bsr
