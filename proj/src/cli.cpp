#include "bsr/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsr/bench.hpp"
#include "bsr/csv.hpp"
#include "bsr/errors.hpp"
#include "bsr/io.hpp"
#include "bsr/sampler.hpp"

namespace bsr {
namespace {

/// Flag values that override the config file, which overrides the defaults.
struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<long> budget;
  std::optional<long> burn_in;
  std::optional<long> thinning;
  std::optional<int> trees;
};

std::string resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("BSR_OUT_DIR"); env && *env) return env;
  return "bsr-out";
}

FullConfig resolve_config(const CommonFlags& flags) {
  FullConfig cfg = flags.config_path.empty() ? default_config()
                                             : load_config_file(flags.config_path);
  if (flags.seed) cfg.run.seed = *flags.seed;
  if (flags.budget) cfg.run.budget = *flags.budget;
  if (flags.burn_in) cfg.run.burn_in = *flags.burn_in;
  if (flags.thinning) cfg.run.thinning = *flags.thinning;
  if (flags.trees) cfg.run.prior.num_trees = *flags.trees;
  return cfg;
}

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--out", flags.out_dir,
                  "output directory (default: $BSR_OUT_DIR or ./bsr-out)");
  cmd->add_option("--seed", flags.seed, "random seed");
  cmd->add_option("--budget", flags.budget, "sampling budget");
  cmd->add_option("--burn-in", flags.burn_in, "burn-in (budget units)");
  cmd->add_option("--thin", flags.thinning, "record every n-th post-burn-in state");
  cmd->add_option("--trees", flags.trees, "number of trees in the mixture");
}

ModelArtifact artifact_from_state(const ChainState& state, std::uint64_t seed,
                                  const std::string& target, int num_features,
                                  long n_train) {
  ModelArtifact artifact;
  artifact.model = state.model;
  artifact.seed = seed;
  artifact.target = target;
  artifact.num_features = num_features;
  artifact.n_train = n_train;
  artifact.train_rmse = std::sqrt(state.rss / static_cast<double>(n_train));
  artifact.log_lik = state.log_lik;
  return artifact;
}

std::vector<TraceRow> thin_trace(const std::vector<TraceRow>& trace,
                                 std::size_t max_rows) {
  if (trace.size() <= max_rows) return trace;
  const std::size_t stride = (trace.size() + max_rows - 1) / max_rows;
  std::vector<TraceRow> out;
  out.reserve(trace.size() / stride + 1);
  for (std::size_t i = 0; i < trace.size(); i += stride) out.push_back(trace[i]);
  return out;
}

// --- fit ---------------------------------------------------------------

struct FitArgs {
  CommonFlags common;
  std::string data_path;
  std::string target;
  std::string checkpoint_out;
  std::string resume_path;
};

int cmd_fit(const FitArgs& args) {
  FullConfig cfg = resolve_config(args.common);
  const DataMatrix data = load_csv(args.data_path, args.target);
  finalize_feature_weights(cfg.run.prior, data.d());

  Rng rng(cfg.run.seed);
  RunResult result;
  if (!args.resume_path.empty()) {
    Checkpoint checkpoint = read_checkpoint_file(args.resume_path);
    rng.load_state(checkpoint.rng_state);
    result = resume_with_rng(cfg.run, data, rng, std::move(checkpoint.state));
  } else {
    result = run_with_rng(cfg.run, data, rng);
  }

  const std::string out_dir = resolve_out_dir(args.common.out_dir);
  const ModelArtifact artifact =
      artifact_from_state(result.best, cfg.run.seed, args.target, data.d(),
                          data.n());
  write_text_file(out_dir + "/model.json", model_to_json(artifact, cfg));
  if (cfg.run.record_trace)
    write_text_file(out_dir + "/trace.csv", trace_to_csv(result.trace));
  if (!args.checkpoint_out.empty())
    write_text_file(args.checkpoint_out,
                    checkpoint_to_json(result.final_state, rng, cfg));

  std::printf("model: %s\n", format_mixture(artifact.model, 4).c_str());
  std::printf("train rmse: %.17g\n", artifact.train_rmse);
  std::printf("log likelihood: %.17g\n", artifact.log_lik);
  std::printf("proposals: %ld, accepted: %ld (%.1f%%)\n", result.proposals,
              result.accepts,
              100.0 * static_cast<double>(result.accepts) /
                  static_cast<double>(result.proposals > 0 ? result.proposals : 1));
  std::printf("wrote %s/model.json\n", out_dir.c_str());
  if (cfg.run.record_trace) std::printf("wrote %s/trace.csv\n", out_dir.c_str());
  if (!args.checkpoint_out.empty())
    std::printf("wrote %s\n", args.checkpoint_out.c_str());
  return 0;
}

// --- bench / ksens -------------------------------------------------------

struct BenchArgs {
  CommonFlags common;
  std::vector<std::string> tasks;
  std::optional<int> reps;
  bool traces = false;
};

void write_replicate_traces(const TaskReport& report, const std::string& dir,
                            const std::string& tag) {
  for (std::size_t r = 0; r < report.replicates.size(); ++r) {
    const auto& rep = report.replicates[r];
    if (rep.trace.empty()) continue;
    write_text_file(dir + "/traces/" + tag + "-rep" + std::to_string(r) + ".csv",
                    trace_to_csv(thin_trace(rep.trace, 2000)));
  }
}

void print_task_summary(const TaskReport& report) {
  std::printf("%s (K=%d, %d reps): train rmse median %.4g", report.task_id.c_str(),
              report.num_trees, report.n_reps,
              report.rmse[static_cast<std::size_t>(Split::Train)].median);
  std::printf(", test[-3,3] median %.4g, nodes mean %.4g\n",
              report.rmse[static_cast<std::size_t>(Split::TestInner)].median,
              report.nodes.mean);
}

int cmd_bench(const BenchArgs& args) {
  FullConfig cfg = resolve_config(args.common);
  if (!args.tasks.empty()) cfg.bench.tasks = args.tasks;
  if (args.reps) cfg.bench.n_reps = *args.reps;
  if (args.traces) cfg.bench.write_traces = true;
  finalize_feature_weights(cfg.run.prior, 2);
  cfg.run.record_trace = cfg.bench.write_traces;

  const std::string out_dir = resolve_out_dir(args.common.out_dir);
  std::vector<TaskReport> reports;
  for (const std::string& id : cfg.bench.tasks) {
    const TaskSpec& spec = task_by_id(id);
    reports.push_back(
        run_replicates(spec, cfg.run, cfg.bench.n_reps, cfg.run.seed));
    print_task_summary(reports.back());
    if (cfg.bench.write_traces)
      write_replicate_traces(reports.back(), out_dir, id);
  }

  write_text_file(out_dir + "/report.json", report_to_json(reports, cfg));
  write_text_file(out_dir + "/report.md", report_to_markdown(reports));
  std::printf("wrote %s/report.json and %s/report.md\n", out_dir.c_str(),
              out_dir.c_str());
  return 0;
}

struct KsensArgs {
  CommonFlags common;
  std::string task = "f3";
  std::vector<int> k_values;
  std::optional<int> reps;
};

int cmd_ksens(const KsensArgs& args) {
  FullConfig cfg = resolve_config(args.common);
  if (!args.k_values.empty()) cfg.bench.k_values = args.k_values;
  if (args.reps) cfg.bench.n_reps = *args.reps;
  finalize_feature_weights(cfg.run.prior, 2);
  cfg.run.record_trace = false;

  const TaskSpec& spec = task_by_id(args.task);
  const KSensReport report = k_sensitivity(spec, cfg.bench.k_values, cfg.run,
                                           cfg.bench.n_reps, cfg.run.seed);
  for (const TaskReport& r : report.reports) print_task_summary(r);

  const std::string out_dir = resolve_out_dir(args.common.out_dir);
  write_text_file(out_dir + "/ksens.json", ksens_to_json(report, cfg));
  write_text_file(out_dir + "/ksens.md", ksens_to_markdown(report));
  std::printf("wrote %s/ksens.json and %s/ksens.md\n", out_dir.c_str(),
              out_dir.c_str());
  return 0;
}

// --- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string model_path;
  std::string data_path;
  std::string target;
};

int cmd_eval(const EvalArgs& args) {
  const ModelArtifact artifact = read_model_file(args.model_path);
  const std::string target =
      !args.target.empty() ? args.target : artifact.target;
  if (target.empty())
    throw ConfigError("the model file stores no target column; pass --target");
  const DataMatrix data = load_csv(args.data_path, target);
  if (artifact.num_features > 0 && data.d() != artifact.num_features)
    throw ConfigError("model expects " + std::to_string(artifact.num_features) +
                      " predictors but the data has " + std::to_string(data.d()));

  const std::vector<double> predicted = predict(artifact.model, data);
  const std::span<const double> actual(data.y.data(),
                                       static_cast<std::size_t>(data.y.size()));
  std::printf("model: %s\n", format_mixture(artifact.model, 4).c_str());
  std::printf("rows: %d\n", data.n());
  std::printf("rmse: %.17g\n", rmse(predicted, actual));
  if (artifact.sign_accuracy)
    std::printf("sign accuracy: %.17g\n", sign_accuracy(predicted, actual));
  return 0;
}

// --- demo-finance ----------------------------------------------------------

struct FinanceArgs {
  CommonFlags common;
  std::string data_path;
  std::string price_column = "close";
  std::optional<int> runs;
};

int cmd_demo_finance(const FinanceArgs& args) {
  FullConfig cfg = resolve_config(args.common);
  const CsvTable table = load_csv_table(args.data_path);
  const std::vector<double> closes = column_values(table, args.price_column);
  const ReturnSeries series = returns_transform(closes);

  // predictors: every column of day t; target: the return from t to t+1
  std::vector<std::vector<double>> predictors(table.rows.begin(),
                                              table.rows.end() - 1);
  const DataMatrix data = make_data(predictors, series.returns);
  data.validate();
  finalize_feature_weights(cfg.run.prior, data.d());

  const int runs = args.runs ? *args.runs : 4;
  if (runs < 1) throw ConfigError("--runs must be >= 1");

  // several independent chains; keep those whose best model beats a coin
  // on training sign accuracy, report the most accurate one
  std::optional<ModelArtifact> chosen;
  RunConfig run_cfg = cfg.run;
  run_cfg.record_trace = false;
  for (int r = 0; r < runs; ++r) {
    run_cfg.seed = derive_seed(cfg.run.seed, 100 + static_cast<std::uint64_t>(r));
    const RunResult result = run(run_cfg, data);
    ModelArtifact artifact =
        artifact_from_state(result.best, run_cfg.seed, "return(t->t+1)",
                            data.d(), data.n());
    const std::vector<double> predicted = predict(artifact.model, data);
    const std::span<const double> actual(
        data.y.data(), static_cast<std::size_t>(data.y.size()));
    const double accuracy = sign_accuracy(predicted, actual);
    artifact.sign_accuracy = accuracy;
    std::printf("run %d (seed %llu): train sign accuracy %.4f, rmse %.4g\n", r,
                static_cast<unsigned long long>(run_cfg.seed), accuracy,
                artifact.train_rmse);
    if (accuracy > 0.5 &&
        (!chosen || accuracy > *chosen->sign_accuracy))
      chosen = std::move(artifact);
  }

  if (!chosen) {
    std::printf("no run beat 0.5 training sign accuracy; nothing written\n");
    return 0;
  }
  const std::string out_dir = resolve_out_dir(args.common.out_dir);
  write_text_file(out_dir + "/finance-model.json", model_to_json(*chosen, cfg));
  std::printf("selected model: %s\n", format_mixture(chosen->model, 4).c_str());
  std::printf("train sign accuracy: %.4f\n", *chosen->sign_accuracy);
  std::printf("wrote %s/finance-model.json\n", out_dir.c_str());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Bayesian symbolic regression: samples mixtures of expression "
               "trees from their posterior"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "fit a model to a CSV dataset");
  fit->add_option("--data", fit_args.data_path, "training CSV")->required();
  fit->add_option("--target", fit_args.target, "target column name")->required();
  add_common_flags(fit, fit_args.common);
  fit->add_option("--checkpoint-out", fit_args.checkpoint_out,
                  "write the final chain state to this file");
  fit->add_option("--resume", fit_args.resume_path,
                  "continue from a checkpoint file");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "run the benchmark tasks");
  bench->add_option("--tasks", bench_args.tasks, "tasks to run (f1..f6)")
      ->delimiter(',');
  bench->add_option("--reps", bench_args.reps, "replicates per task");
  bench->add_flag("--traces", bench_args.traces, "write per-replicate traces");
  add_common_flags(bench, bench_args.common);

  KsensArgs ksens_args;
  CLI::App* ksens =
      app.add_subcommand("ksens", "mixture-size sensitivity on one task");
  ksens->add_option("--task", ksens_args.task, "task id (default f3)");
  ksens->add_option("--k", ksens_args.k_values, "mixture sizes, e.g. 2,4,8")
      ->delimiter(',');
  ksens->add_option("--reps", ksens_args.reps, "replicates per mixture size");
  add_common_flags(ksens, ksens_args.common);

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a stored model on a CSV");
  eval->add_option("--model", eval_args.model_path, "model JSON file")->required();
  eval->add_option("--data", eval_args.data_path, "evaluation CSV")->required();
  eval->add_option("--target", eval_args.target,
                   "target column (default: the one stored in the model)");

  FinanceArgs finance_args;
  CLI::App* finance = app.add_subcommand(
      "demo-finance", "fit next-step returns of a numeric OHLC series");
  finance->add_option("--data", finance_args.data_path, "OHLC CSV")->required();
  finance->add_option("--price-col", finance_args.price_column,
                      "price column for returns (default: close)");
  finance->add_option("--runs", finance_args.runs,
                      "independent chains to try (default: 4)");
  add_common_flags(finance, finance_args.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_args);
    if (bench->parsed()) return cmd_bench(bench_args);
    if (ksens->parsed()) return cmd_ksens(ksens_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (finance->parsed()) return cmd_demo_finance(finance_args);
    std::fprintf(stderr, "no subcommand given\n");
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const MissingColumn& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NonNumericCell& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const EmptyFile& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace bsr
