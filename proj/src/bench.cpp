#include "bsr/bench.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "bsr/errors.hpp"
#include "bsr/mixed_model.hpp"

namespace bsr {

namespace {

double f1(double x0, double x1) {
  return 2.5 * x0 * x0 * x0 * x0 - 1.3 * x0 * x0 * x0 + 0.5 * x1 * x1 -
         1.7 * x1;
}
double f2(double x0, double x1) { return 8.0 * x0 * x0 + 8.0 * x1 * x1 * x1 - 15.0; }
double f3(double x0, double x1) {
  return 0.2 * x0 * x0 * x0 + 0.5 * x1 * x1 * x1 - 1.2 * x1 - 0.5 * x0;
}
double f4(double x0, double x1) { return 1.5 * std::exp(x0) + 5.0 * std::cos(x1); }
double f5(double x0, double x1) { return 6.0 * std::sin(x0) * std::cos(x1); }
double f6(double x0, double x1) {
  return 1.35 * x0 * x1 + 5.5 * std::sin((x0 - 1.0) * (x1 - 1.0));
}

TaskSpec make_task(std::string id, double (*truth)(double, double)) {
  TaskSpec task;
  task.id = std::move(id);
  task.truth = truth;
  return task;
}

}  // namespace

const char* split_name(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::TestInner: return "test[-3,3]";
    case Split::TestWide: return "test[-6,6]";
    case Split::TestOuter: return "test[3,6]";
  }
  return "?";
}

const std::vector<TaskSpec>& benchmark_tasks() {
  static const std::vector<TaskSpec> tasks = {
      make_task("f1", f1), make_task("f2", f2), make_task("f3", f3),
      make_task("f4", f4), make_task("f5", f5), make_task("f6", f6)};
  return tasks;
}

const TaskSpec& task_by_id(std::string_view id) {
  for (const TaskSpec& task : benchmark_tasks())
    if (task.id == id) return task;
  throw ConfigError("unknown task '" + std::string(id) +
                    "' (expected f1..f6)");
}

DataMatrix gen_dataset(const TaskSpec& task, Split split, Rng& rng) {
  double lo, hi;
  int n;
  if (split == Split::Train) {
    lo = task.train_lo;
    hi = task.train_hi;
    n = task.n_train;
  } else {
    const auto& range =
        task.test_ranges[static_cast<std::size_t>(split) - 1];
    lo = range.first;
    hi = range.second;
    n = task.n_test;
  }
  DataMatrix data;
  data.X.resize(n, 2);
  data.y.resize(n);
  data.has_y = true;
  for (int i = 0; i < n; ++i) {
    const double x0 = lo + (hi - lo) * rng.uniform();
    const double x1 = lo + (hi - lo) * rng.uniform();
    data.X(i, 0) = x0;
    data.X(i, 1) = x1;
    data.y(i) = task.truth(x0, x1);
  }
  return data;
}

SummaryStats SummaryStats::from(std::span<const double> values) {
  SummaryStats stats;
  if (values.empty()) {
    stats.mean = stats.sd = stats.median =
        std::numeric_limits<double>::quiet_NaN();
    return stats;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    stats.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  std::vector<double> sorted(values.begin(), values.end());
  // NaNs sort to the back so the comparator stays a strict weak order
  std::sort(sorted.begin(), sorted.end(), [](double a, double b) {
    if (std::isnan(a)) return false;
    if (std::isnan(b)) return true;
    return a < b;
  });
  const std::size_t mid = sorted.size() / 2;
  stats.median = sorted.size() % 2 == 1
                     ? sorted[mid]
                     : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return stats;
}

namespace {

ReplicateResult run_one_replicate(const RunConfig& base,
                                  const std::array<DataMatrix, kNumSplits>& data,
                                  std::uint64_t seed) {
  RunConfig cfg = base;
  cfg.seed = seed;
  RunResult result = run(cfg, data[0]);

  ReplicateResult rep;
  rep.seed = seed;
  rep.log_lik = result.best.log_lik;
  rep.proposals = result.proposals;
  rep.accepts = result.accepts;
  rep.total_nodes = 0;
  for (const ExprTree& tree : result.best.model.trees)
    rep.total_nodes += node_count(tree);
  for (std::size_t s = 0; s < kNumSplits; ++s) {
    const std::vector<double> pred = predict(result.best.model, data[s]);
    std::vector<double> truth(data[s].y.data(),
                              data[s].y.data() + data[s].y.size());
    rep.rmse[s] = rmse(pred, truth);
  }
  rep.expression = format_mixture(result.best.model, 4);
  rep.beta = result.best.model.beta;
  rep.trace = std::move(result.trace);
  return rep;
}

}  // namespace

TaskReport run_replicates(const TaskSpec& task, const RunConfig& base,
                          int n_reps, std::uint64_t master_seed) {
  if (n_reps < 1) throw ConfigError("need at least one replicate");

  std::array<DataMatrix, kNumSplits> data;
  for (std::size_t s = 0; s < kNumSplits; ++s) {
    Rng rng(derive_seed(master_seed, s));
    data[s] = gen_dataset(task, static_cast<Split>(s), rng);
  }

  TaskReport report;
  report.task_id = task.id;
  report.seed = master_seed;
  report.n_reps = n_reps;
  report.budget = base.budget;
  report.num_trees = base.prior.num_trees;

  std::vector<std::future<ReplicateResult>> futures;
  futures.reserve(static_cast<std::size_t>(n_reps));
  for (int r = 0; r < n_reps; ++r) {
    const std::uint64_t seed =
        derive_seed(master_seed, 100 + static_cast<std::uint64_t>(r));
    futures.push_back(std::async(std::launch::async, run_one_replicate,
                                 std::cref(base), std::cref(data), seed));
  }
  for (auto& f : futures) report.replicates.push_back(f.get());

  for (std::size_t s = 0; s < kNumSplits; ++s) {
    std::vector<double> values;
    values.reserve(report.replicates.size());
    for (const ReplicateResult& rep : report.replicates)
      values.push_back(rep.rmse[s]);
    report.rmse[s] = SummaryStats::from(values);
  }
  std::vector<double> nodes;
  nodes.reserve(report.replicates.size());
  for (const ReplicateResult& rep : report.replicates)
    nodes.push_back(static_cast<double>(rep.total_nodes));
  report.nodes = SummaryStats::from(nodes);
  return report;
}

KSensReport k_sensitivity(const TaskSpec& task, std::span<const int> k_values,
                          const RunConfig& base, int n_reps,
                          std::uint64_t master_seed) {
  KSensReport report;
  report.task_id = task.id;
  for (int k : k_values) {
    RunConfig cfg = base;
    cfg.prior.num_trees = k;
    report.k_values.push_back(k);
    report.reports.push_back(run_replicates(task, cfg, n_reps, master_seed));
  }
  return report;
}

ReturnSeries returns_transform(std::span<const double> close_prices) {
  if (close_prices.size() < 2)
    throw LengthMismatch("need at least two prices to form a return");
  for (double p : close_prices)
    if (!(p > 0.0)) throw NonPositivePrice("prices must be positive");

  ReturnSeries series;
  series.returns.reserve(close_prices.size() - 1);
  series.labels.reserve(close_prices.size() - 1);
  for (std::size_t t = 0; t + 1 < close_prices.size(); ++t) {
    const double r = (close_prices[t + 1] - close_prices[t]) / close_prices[t];
    series.returns.push_back(r);
    series.labels.push_back(r >= 0.0 ? 1 : -1);
  }
  return series;
}

}  // namespace bsr
