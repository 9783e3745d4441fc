#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bsr/data_matrix.hpp"
#include "bsr/sampler.hpp"

namespace bsr {

/// The four evaluation splits: training draws and the three test ranges
/// (matching the training range, twice as wide, and fully outside).
enum class Split { Train = 0, TestInner = 1, TestWide = 2, TestOuter = 3 };
constexpr std::size_t kNumSplits = 4;
const char* split_name(Split);

/// One two-feature benchmark task with its ground truth.
struct TaskSpec {
  std::string id;
  double (*truth)(double x0, double x1) = nullptr;
  double train_lo = -3.0, train_hi = 3.0;
  std::array<std::pair<double, double>, 3> test_ranges{
      {{-3.0, 3.0}, {-6.0, 6.0}, {3.0, 6.0}}};
  int n_train = 100;
  int n_test = 30;
};

/// The six standard tasks f1..f6.
const std::vector<TaskSpec>& benchmark_tasks();
const TaskSpec& task_by_id(std::string_view id);  // throws ConfigError

/// Predictors i.i.d. uniform on the split's range, y = truth(x), no noise.
DataMatrix gen_dataset(const TaskSpec&, Split, Rng&);

struct SummaryStats {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single value
  double median = 0.0;
  static SummaryStats from(std::span<const double> values);
};

struct ReplicateResult {
  std::uint64_t seed = 0;
  std::array<double, kNumSplits> rmse{};  // best model, per split
  int total_nodes = 0;                    // best model
  double log_lik = 0.0;                   // best model, training data
  long proposals = 0;
  long accepts = 0;
  std::string expression;                 // best mixture, display precision
  std::vector<double> beta;
  std::vector<TraceRow> trace;            // present when cfg.record_trace
};

struct TaskReport {
  std::string task_id;
  std::uint64_t seed = 0;  // master seed the replicate seeds derive from
  int n_reps = 0;
  long budget = 0;
  int num_trees = 0;
  std::vector<ReplicateResult> replicates;
  std::array<SummaryStats, kNumSplits> rmse{};
  SummaryStats nodes{};
};

/// Runs n_reps independent sampler replicates of one task and aggregates.
/// The four datasets derive from the master seed (streams 0..3), replicate
/// r runs on stream 100 + r; replicates execute concurrently and are
/// reduced in index order.
TaskReport run_replicates(const TaskSpec&, const RunConfig&, int n_reps,
                          std::uint64_t master_seed);

/// run_replicates once per mixture size.
struct KSensReport {
  std::string task_id;
  std::vector<int> k_values;
  std::vector<TaskReport> reports;  // aligned with k_values
};
KSensReport k_sensitivity(const TaskSpec&, std::span<const int> k_values,
                          const RunConfig&, int n_reps,
                          std::uint64_t master_seed);

/// Per-step returns of a positive price series: return(t) =
/// (price(t+1) - price(t)) / price(t), one per step, with sign labels
/// (zero counts as positive). Throws NonPositivePrice and, for fewer than
/// two prices, LengthMismatch.
struct ReturnSeries {
  std::vector<double> returns;  // length = prices - 1
  std::vector<int> labels;      // +1 / -1
};
ReturnSeries returns_transform(std::span<const double> close_prices);

}  // namespace bsr
