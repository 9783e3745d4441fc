#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bsr/bench.hpp"
#include "bsr/mixed_model.hpp"
#include "bsr/rng.hpp"
#include "bsr/sampler.hpp"

namespace bsr {

/// Options of the benchmark drivers (bench / ksens subcommands).
struct BenchOptions {
  std::vector<std::string> tasks{"f1", "f2", "f3", "f4", "f5", "f6"};
  int n_reps = 10;
  std::vector<int> k_values{2, 4, 8};
  bool write_traces = false;  // per-replicate trace CSVs
};

/// Everything a config file can set: the sampler run (prior included) and
/// the benchmark-driver options. Empty feature weights mean "uniform over
/// the data's columns", resolved by finalize_feature_weights once the data
/// is known.
struct FullConfig {
  RunConfig run;
  BenchOptions bench;
};

/// Defaults: the default operator pool, feature weights left empty.
FullConfig default_config();

/// Strict JSON config parsing on top of the defaults: unknown keys are
/// rejected by name, values are type- and range-checked. Throws ConfigError.
FullConfig parse_config_json(const std::string& text);
FullConfig load_config_file(const std::string& path);

/// Canonical JSON echo of a config; parse_config_json inverts it.
std::string config_to_json(const FullConfig&);

/// Fills empty feature weights with uniform ones over num_features columns;
/// otherwise checks the stored length. Throws ConfigError on mismatch.
void finalize_feature_weights(PriorConfig&, int num_features);

/// A fitted mixture plus everything needed to reproduce its metrics.
struct ModelArtifact {
  MixtureModel model;
  std::uint64_t seed = 0;
  std::string target;  // target column name of the training data
  int num_features = 0;
  long n_train = 0;
  double train_rmse = 0.0;
  double log_lik = 0.0;
  std::optional<double> sign_accuracy;  // finance demo only
};

/// Serializes the artifact: display (4 significant digits) and full
/// (17 significant digits) expressions, coefficients, scales, metrics and
/// the config echo. read_model_* re-parses the full-precision expressions.
std::string model_to_json(const ModelArtifact&, const FullConfig&);
ModelArtifact read_model_text(const std::string& text);  // throws ConfigError
ModelArtifact read_model_file(const std::string& path);

/// One CSV row per proposal:
/// iteration,tree_index,move,accepted,log_lik,sigma2,total_nodes,train_rmse.
std::string trace_to_csv(std::span<const TraceRow>);

/// Chain-state serialization used by checkpoints and by audits that compare
/// states for exact equality. Trees are stored at full precision.
std::string chain_state_to_json(const ChainState&);
ChainState chain_state_from_json(const std::string& text);

/// Checkpoint = chain state + generator state + config echo, enough to
/// resume a run exactly.
std::string checkpoint_to_json(const ChainState&, const Rng&,
                               const FullConfig&);
struct Checkpoint {
  ChainState state;
  std::string rng_state;
  FullConfig config;
};
Checkpoint read_checkpoint_text(const std::string& text);
Checkpoint read_checkpoint_file(const std::string& path);

/// Benchmark reports. The JSON form keeps every replicate's values so the
/// aggregate rows can be recomputed from the artifact alone.
std::string report_to_json(std::span<const TaskReport>, const FullConfig&);
std::string report_to_markdown(std::span<const TaskReport>);
std::string ksens_to_json(const KSensReport&, const FullConfig&);
std::string ksens_to_markdown(const KSensReport&);

/// Small file helpers. Writers create parent directories; readers throw
/// ConfigError when the file cannot be opened.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace bsr
