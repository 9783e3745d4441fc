#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bsr/data_matrix.hpp"
#include "bsr/mixed_model.hpp"
#include "bsr/moves.hpp"
#include "bsr/param_jump.hpp"
#include "bsr/prior.hpp"
#include "bsr/rng.hpp"

namespace bsr {

/// What the sampling budget counts: every proposal, or only accepted ones.
enum class BudgetKind { Proposals, Acceptances };

struct RunConfig {
  PriorConfig prior;
  BudgetKind budget_kind = BudgetKind::Proposals;
  long budget = 20000;
  /// Recording starts after this many budget units; default budget / 5.
  std::optional<long> burn_in;
  long thinning = 1;
  std::uint64_t seed = 1;
  bool record_trace = true;

  /// Forces the log likelihood to 0 and skips the least-squares fit, so the
  /// chain targets the prior alone. Used to validate proposal bookkeeping.
  bool flat_likelihood = false;

  /// Conjugate noise-variance refresh after every sweep (off by default;
  /// the plain sampler already redraws the noise variance each proposal).
  bool sigma2_gibbs = false;

  /// Stop when the training RMSE has not improved for early_stop_window
  /// proposals (off by default; ignored with flat_likelihood).
  bool early_stop = false;
  long early_stop_window = 2000;

  void validate() const;  // throws ConfigError
};

struct ChainState {
  MixtureModel model;
  double log_lik = 0.0;
  double log_prior = 0.0;  // structures + coefficients + scales
  double rss = 0.0;
  long iteration = 0;  // proposals performed
  long accept_count = 0;
};

/// Everything that entered one acceptance decision, for audits and tests.
/// log_ratio = d_log_lik + d_log_structure + (log_q_reverse - log_q_forward)
///           + d_log_params + d_log_hyper_coeff
///           + (log_h_reverse - log_h_forward) + log_jacobian
///           + d_log_hyper_noise + noise_proposal_correction.
/// The last two cancel exactly: the noise variance is proposed from its own
/// prior, so its prior ratio and proposal correction are equal and opposite.
struct StepDiagnostics {
  MoveTag move = MoveTag::Stay;
  bool accepted = false;
  int dim_change = 0;
  double log_ratio = 0.0;
  double d_log_lik = 0.0;
  double d_log_structure = 0.0;
  double d_log_params = 0.0;       // coefficient-prior ratio, all trees
  double d_log_hyper_coeff = 0.0;  // coefficient-scale hyperprior ratio
  double d_log_hyper_noise = 0.0;  // noise-variance prior ratio
  double noise_proposal_correction = 0.0;
  double log_q_forward = 0.0;
  double log_q_reverse = 0.0;
  double log_h_forward = 0.0;
  double log_h_reverse = 0.0;
  double log_jacobian = 0.0;
};

/// One recorded post-burn-in state.
struct ChainRecord {
  long iteration = 0;
  double log_lik = 0.0;
  double sigma2 = 0.0;
  int total_nodes = 0;
};

/// One row per proposal when record_trace is on.
struct TraceRow {
  long iteration = 0;
  int tree_index = 0;
  MoveTag move = MoveTag::Stay;
  bool accepted = false;
  double log_lik = 0.0;
  double sigma2 = 0.0;
  int total_nodes = 0;
  double train_rmse = 0.0;
};

struct RunResult {
  std::vector<ChainRecord> records;
  std::vector<TraceRow> trace;
  ChainState best;  // highest recorded log_lik, earliest on ties; the
                    // initial state when nothing was recorded
  ChainState final_state;
  long proposals = 0;
  long accepts = 0;
};

/// Draws shared scales from their hyperpriors and K trees from the prior,
/// then fits the mixture. Retries the tree draw up to 100 times when the
/// design is non-finite on the training data, then falls back to K
/// single-terminal trees. Throws InitFailure only if the fallback design is
/// somehow non-finite too.
ChainState init_chain(const RunConfig&, const DataMatrix&, Rng&);

/// One Metropolis-Hastings step on tree j: a structure proposal, the
/// matching coefficient proposal routed by the net change in parameterized
/// nodes (expand / shrink / equal-dimension refresh), and a fresh noise
/// variance from its prior, accepted or rejected jointly. Rejection leaves
/// the state untouched.
StepDiagnostics step_tree(ChainState&, int j, const RunConfig&,
                          const DataMatrix&, Rng&);

/// Conjugate refresh of the noise variance given the current residuals.
void gibbs_refresh_sigma2(ChainState&, const RunConfig&, const DataMatrix&,
                          Rng&);

/// Full run: sweeps trees round-robin until the budget is spent, recording
/// post-burn-in thinned states. In acceptance mode the loop also stops at
/// 1000 * budget proposals as a safety cap.
RunResult run(const RunConfig&, const DataMatrix&);
RunResult run_with_rng(const RunConfig&, const DataMatrix&, Rng&);

/// Continues a run from a saved chain state (iteration and accept counts
/// included), spending whatever budget the state has not yet consumed.
RunResult resume_with_rng(const RunConfig&, const DataMatrix&, Rng&,
                          ChainState initial);

}  // namespace bsr
