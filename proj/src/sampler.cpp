#include "bsr/sampler.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "bsr/errors.hpp"

namespace bsr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double full_log_prior(const MixtureModel& model, const PriorConfig& cfg) {
  double total = log_hyperprior(model.scales, cfg);
  for (const ExprTree& tree : model.trees) {
    total += log_prior_structure(tree, cfg);
    total += log_prior_params(tree, model.scales);
  }
  return total;
}

int total_nodes(const MixtureModel& model) {
  int total = 0;
  for (const ExprTree& tree : model.trees) total += node_count(tree);
  return total;
}

double train_rmse_of(const ChainState& state, const DataMatrix& data) {
  return std::sqrt(state.rss / static_cast<double>(data.n()));
}

double log_noise_prior(double sigma2, const PriorConfig& cfg) {
  return log_inverse_gamma_pdf(sigma2, cfg.nu / 2.0, cfg.nu * cfg.lambda / 2.0);
}

}  // namespace

void RunConfig::validate() const {
  prior.validate();
  if (budget < 1) throw ConfigError("budget must be positive");
  if (burn_in && *burn_in < 0) throw ConfigError("burn_in must be >= 0");
  if (thinning < 1) throw ConfigError("thinning must be >= 1");
  if (early_stop_window < 1)
    throw ConfigError("early_stop_window must be positive");
}

ChainState init_chain(const RunConfig& cfg, const DataMatrix& data, Rng& rng) {
  const PriorConfig& prior = cfg.prior;
  const int k = prior.num_trees;

  ChainState state;
  state.model.scales = sample_scales(prior, rng);
  state.model.beta.assign(static_cast<std::size_t>(k) + 1, 0.0);

  if (cfg.flat_likelihood) {
    state.model.trees.clear();
    for (int i = 0; i < k; ++i)
      state.model.trees.push_back(sample_tree(prior, state.model.scales, rng));
    state.rss = kNaN;
    state.log_lik = 0.0;
    state.log_prior = full_log_prior(state.model, prior);
    return state;
  }

  std::optional<OlsFit> fit;
  for (int attempt = 0; attempt < 100 && !fit; ++attempt) {
    state.model.trees.clear();
    for (int i = 0; i < k; ++i)
      state.model.trees.push_back(sample_tree(prior, state.model.scales, rng));
    fit = try_fit_mixture(state.model.trees, data);
  }
  if (!fit) {
    // a bare feature column is always finite on validated data
    state.model.trees.clear();
    const int d = data.d();
    for (int i = 0; i < k; ++i) {
      ExprTree tree;
      tree.root = make_terminal(i % d);
      state.model.trees.push_back(std::move(tree));
    }
    fit = try_fit_mixture(state.model.trees, data);
    if (!fit) throw InitFailure("single-terminal fallback is non-finite");
  }

  for (int i = 0; i <= k; ++i)
    state.model.beta[static_cast<std::size_t>(i)] = fit->beta(i);
  state.rss = fit->rss;
  state.log_lik = log_likelihood(state.rss, data.n(), state.model.scales.sigma2);
  state.log_prior = full_log_prior(state.model, prior);
  return state;
}

StepDiagnostics step_tree(ChainState& state, int j, const RunConfig& cfg,
                          const DataMatrix& data, Rng& rng) {
  const PriorConfig& prior = cfg.prior;
  const ExprTree& old_tree = state.model.trees[static_cast<std::size_t>(j)];
  const ScaleState old_scales = state.model.scales;

  ProposalOutcome prop = propose(old_tree, prior, rng);

  StepDiagnostics diag;
  diag.move = prop.move.tag;
  diag.dim_change = prop.dim_change;
  diag.log_q_forward = prop.log_q_forward;
  diag.log_q_reverse = prop.log_q_reverse;

  // coefficient stage, routed by the net change in parameterized nodes
  const ParamVector old_params = extract_params(old_tree.root);
  ScaleState new_scales = old_scales;
  ParamVector new_params;
  if (prop.dim_change > 0) {
    const LtPairing pairing = pair_lt_nodes(old_tree.root, prop.new_tree.root);
    JumpResult jump = expand(old_params, pairing, prior, old_scales, rng);
    new_scales = jump.new_scales;
    new_params = std::move(jump.new_params);
    diag.log_h_forward = jump.log_h_forward;
    diag.log_h_reverse = jump.log_h_reverse;
    diag.log_jacobian = jump.log_jacobian;
  } else if (prop.dim_change < 0) {
    const LtPairing pairing = pair_lt_nodes(old_tree.root, prop.new_tree.root);
    JumpResult jump = shrink(old_params, pairing, prior, old_scales, rng);
    new_scales = jump.new_scales;
    new_params = std::move(jump.new_params);
    diag.log_h_forward = jump.log_h_forward;
    diag.log_h_reverse = jump.log_h_reverse;
    diag.log_jacobian = jump.log_jacobian;
  } else {
    NoChangeResult refresh = no_change_resample(old_params, old_scales, rng);
    new_params = std::move(refresh.new_params);
    diag.log_h_forward = refresh.log_density_new;
    diag.log_h_reverse = refresh.log_density_old;
  }

  // fresh noise variance from its prior, accepted jointly
  new_scales.sigma2 =
      rng.inverse_gamma(prior.nu / 2.0, prior.nu * prior.lambda / 2.0);

  ExprTree candidate = std::move(prop.new_tree);
  apply_params(candidate.root, new_params);

  std::vector<ExprTree> trees = state.model.trees;
  trees[static_cast<std::size_t>(j)] = candidate;

  double new_ll;
  double new_rss;
  std::vector<double> new_beta = state.model.beta;
  if (cfg.flat_likelihood) {
    new_ll = 0.0;
    new_rss = kNaN;
  } else if (std::optional<OlsFit> fit = try_fit_mixture(trees, data)) {
    new_rss = fit->rss;
    new_ll = log_likelihood(new_rss, data.n(), new_scales.sigma2);
    for (std::size_t i = 0; i < new_beta.size(); ++i)
      new_beta[i] = fit->beta(static_cast<int>(i));
  } else {
    new_rss = std::numeric_limits<double>::infinity();
    new_ll = kNegInf;
  }

  diag.d_log_lik = new_ll - state.log_lik;
  diag.d_log_structure = log_prior_structure(candidate, prior) -
                         log_prior_structure(old_tree, prior);

  // coefficient-prior ratio. With unchanged scales the proposal densities
  // are the same prior terms, so the four contributions cancel exactly; a
  // scale change also touches every other tree's coefficient density.
  diag.d_log_params = log_prior_params(candidate, new_scales) -
                      log_prior_params(old_tree, old_scales);
  if (prop.dim_change != 0) {
    for (std::size_t k = 0; k < trees.size(); ++k) {
      if (static_cast<int>(k) == j) continue;
      diag.d_log_params += log_prior_params(state.model.trees[k], new_scales) -
                           log_prior_params(state.model.trees[k], old_scales);
    }
    diag.d_log_hyper_coeff =
        log_inverse_gamma_pdf(new_scales.sigma_a2, prior.nu_a / 2.0,
                              prior.nu_a * prior.lambda_a / 2.0) +
        log_inverse_gamma_pdf(new_scales.sigma_b2, prior.nu_b / 2.0,
                              prior.nu_b * prior.lambda_b / 2.0) -
        log_inverse_gamma_pdf(old_scales.sigma_a2, prior.nu_a / 2.0,
                              prior.nu_a * prior.lambda_a / 2.0) -
        log_inverse_gamma_pdf(old_scales.sigma_b2, prior.nu_b / 2.0,
                              prior.nu_b * prior.lambda_b / 2.0);
  }

  // the noise variance is proposed from its own prior: the prior ratio and
  // the proposal correction are equal and opposite
  const double noise_new = log_noise_prior(new_scales.sigma2, prior);
  const double noise_old = log_noise_prior(old_scales.sigma2, prior);
  diag.d_log_hyper_noise = noise_new - noise_old;
  diag.noise_proposal_correction = noise_old - noise_new;

  diag.log_ratio = diag.d_log_lik + diag.d_log_structure +
                   (diag.log_q_reverse - diag.log_q_forward) +
                   diag.d_log_params + diag.d_log_hyper_coeff +
                   (diag.log_h_reverse - diag.log_h_forward) +
                   diag.log_jacobian + diag.d_log_hyper_noise +
                   diag.noise_proposal_correction;

  const double u = rng.uniform_pos();  // drawn on every step: fixed stream
  const bool accept =
      !std::isnan(diag.log_ratio) && std::log(u) < diag.log_ratio;

  state.iteration += 1;
  if (accept) {
    state.model.trees[static_cast<std::size_t>(j)] = std::move(candidate);
    state.model.scales = new_scales;
    state.model.beta = std::move(new_beta);
    state.rss = new_rss;
    state.log_lik = new_ll;
    state.log_prior = full_log_prior(state.model, prior);
    state.accept_count += 1;
    diag.accepted = true;
  }
  return diag;
}

void gibbs_refresh_sigma2(ChainState& state, const RunConfig& cfg,
                          const DataMatrix& data, Rng& rng) {
  if (cfg.flat_likelihood || !std::isfinite(state.rss)) return;
  const PriorConfig& prior = cfg.prior;
  const double shape = prior.nu / 2.0 + static_cast<double>(data.n()) / 2.0;
  const double rate = (prior.nu * prior.lambda + state.rss) / 2.0;
  state.model.scales.sigma2 = rng.inverse_gamma(shape, rate);
  state.log_lik = log_likelihood(state.rss, data.n(), state.model.scales.sigma2);
  state.log_prior = full_log_prior(state.model, prior);
}

RunResult run_with_rng(const RunConfig& cfg, const DataMatrix& data, Rng& rng) {
  cfg.validate();
  data.validate();
  return resume_with_rng(cfg, data, rng, init_chain(cfg, data, rng));
}

RunResult resume_with_rng(const RunConfig& cfg, const DataMatrix& data,
                          Rng& rng, ChainState initial) {
  cfg.validate();
  data.validate();
  if (static_cast<int>(cfg.prior.feature_weights.size()) != data.d())
    throw ConfigError("feature weights must match the data columns");
  if (static_cast<int>(initial.model.trees.size()) != cfg.prior.num_trees)
    throw ConfigError("saved state has a different number of trees");

  RunResult result;
  ChainState state = std::move(initial);
  result.best = state;

  const long burn = cfg.burn_in ? *cfg.burn_in : cfg.budget / 5;
  const long proposal_cap = cfg.budget_kind == BudgetKind::Proposals
                                ? cfg.budget
                                : cfg.budget * 1000;
  const int k = cfg.prior.num_trees;

  bool has_best_record = false;
  long post_burn_steps = 0;
  double best_rmse = cfg.flat_likelihood ? kNaN : train_rmse_of(state, data);
  long last_improvement = state.iteration;

  while (state.iteration < proposal_cap &&
         (cfg.budget_kind == BudgetKind::Proposals ||
          state.accept_count < cfg.budget)) {
    const int j = static_cast<int>(state.iteration % k);
    const StepDiagnostics diag = step_tree(state, j, cfg, data, rng);

    if (cfg.record_trace) {
      TraceRow row;
      row.iteration = state.iteration;
      row.tree_index = j;
      row.move = diag.move;
      row.accepted = diag.accepted;
      row.log_lik = state.log_lik;
      row.sigma2 = state.model.scales.sigma2;
      row.total_nodes = total_nodes(state.model);
      row.train_rmse = cfg.flat_likelihood ? kNaN : train_rmse_of(state, data);
      result.trace.push_back(row);
    }

    const long done = cfg.budget_kind == BudgetKind::Proposals
                          ? state.iteration
                          : state.accept_count;
    if (done > burn) {
      ++post_burn_steps;
      if ((post_burn_steps - 1) % cfg.thinning == 0) {
        ChainRecord record;
        record.iteration = state.iteration;
        record.log_lik = state.log_lik;
        record.sigma2 = state.model.scales.sigma2;
        record.total_nodes = total_nodes(state.model);
        result.records.push_back(record);
        if (!has_best_record || state.log_lik > result.best.log_lik) {
          result.best = state;
          has_best_record = true;
        }
      }
    }

    if (cfg.sigma2_gibbs && state.iteration % k == 0)
      gibbs_refresh_sigma2(state, cfg, data, rng);

    if (cfg.early_stop && !cfg.flat_likelihood) {
      const double current = train_rmse_of(state, data);
      if (std::isfinite(current) &&
          (!std::isfinite(best_rmse) || current < best_rmse)) {
        best_rmse = current;
        last_improvement = state.iteration;
      } else if (state.iteration - last_improvement >= cfg.early_stop_window) {
        break;
      }
    }
  }

  result.final_state = std::move(state);
  result.proposals = result.final_state.iteration;
  result.accepts = result.final_state.accept_count;
  return result;
}

RunResult run(const RunConfig& cfg, const DataMatrix& data) {
  Rng rng(cfg.seed);
  return run_with_rng(cfg, data, rng);
}

}  // namespace bsr
