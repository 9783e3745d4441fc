#include "bsr/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "bsr/errors.hpp"
#include "bsr/parse.hpp"

namespace bsr {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// --- strict config reading -------------------------------------------------

void check_keys(const Json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown config key '" + prefix + item.key() + "'");
  }
}

const Json* find(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double as_number(const Json& j, const std::string& where) {
  if (!j.is_number())
    throw ConfigError("config key '" + where + "' must be a number");
  return j.get<double>();
}

long as_integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer())
    throw ConfigError("config key '" + where + "' must be an integer");
  return j.get<long>();
}

bool as_bool(const Json& j, const std::string& where) {
  if (!j.is_boolean())
    throw ConfigError("config key '" + where + "' must be true or false");
  return j.get<bool>();
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string())
    throw ConfigError("config key '" + where + "' must be a string");
  return j.get<std::string>();
}

void read_number(const Json& obj, const char* key, const std::string& prefix,
                 double& out) {
  if (const Json* j = find(obj, key)) out = as_number(*j, prefix + key);
}

void read_integer(const Json& obj, const char* key, const std::string& prefix,
                  long& out) {
  if (const Json* j = find(obj, key)) out = as_integer(*j, prefix + key);
}

void read_int(const Json& obj, const char* key, const std::string& prefix,
              int& out) {
  if (const Json* j = find(obj, key))
    out = static_cast<int>(as_integer(*j, prefix + key));
}

void read_bool(const Json& obj, const char* key, const std::string& prefix,
               bool& out) {
  if (const Json* j = find(obj, key)) out = as_bool(*j, prefix + key);
}

OperatorSet operators_from_json(const Json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "default") return OperatorSet::default_pool();
    if (name == "benchmark") return OperatorSet::benchmark_pool();
    throw ConfigError("config key 'prior.operators' names an unknown pool '" +
                      name + "' (expected \"default\" or \"benchmark\")");
  }
  if (!j.is_array() || j.empty())
    throw ConfigError(
        "config key 'prior.operators' must be a pool name or a non-empty "
        "array of {name, weight}");
  std::vector<OperatorSpec> ops;
  std::vector<double> weights;
  double total = 0.0;
  for (const Json& entry : j) {
    if (!entry.is_object())
      throw ConfigError("config key 'prior.operators' entries must be objects");
    check_keys(entry, "prior.operators.", {"name", "weight"});
    const Json* name = find(entry, "name");
    if (!name) throw ConfigError("config key 'prior.operators' entry lacks 'name'");
    const std::string op_name = as_string(*name, "prior.operators.name");
    try {
      ops.push_back(builtin_operator(op_name));
    } catch (const UnknownOperator&) {
      throw ConfigError("config key 'prior.operators' names an unknown operator '" +
                        op_name + "'");
    }
    double w = 1.0;
    if (const Json* weight = find(entry, "weight"))
      w = as_number(*weight, "prior.operators.weight");
    if (!(w > 0.0))
      throw ConfigError("config key 'prior.operators' weights must be positive");
    weights.push_back(w);
    total += w;
  }
  // normalize to a distribution; an already-normalized vector is kept
  // bit-for-bit so that echoing a config is idempotent
  if (std::fabs(total - 1.0) > 1e-12)
    for (double& w : weights) w /= total;
  return OperatorSet(std::move(ops), std::move(weights));
}

void read_prior(const Json& obj, PriorConfig& prior) {
  check_keys(obj, "prior.",
             {"alpha", "beta", "operators", "feature_weights", "nu_a",
              "lambda_a", "nu_b", "lambda_b", "nu", "lambda", "num_trees",
              "max_depth", "moves"});
  read_number(obj, "alpha", "prior.", prior.alpha);
  read_number(obj, "beta", "prior.", prior.beta);
  if (const Json* j = find(obj, "operators")) prior.operators = operators_from_json(*j);
  if (const Json* j = find(obj, "feature_weights")) {
    if (!j->is_array())
      throw ConfigError("config key 'prior.feature_weights' must be an array");
    prior.feature_weights.clear();
    for (const Json& w : *j)
      prior.feature_weights.push_back(as_number(w, "prior.feature_weights"));
  }
  read_number(obj, "nu_a", "prior.", prior.nu_a);
  read_number(obj, "lambda_a", "prior.", prior.lambda_a);
  read_number(obj, "nu_b", "prior.", prior.nu_b);
  read_number(obj, "lambda_b", "prior.", prior.lambda_b);
  read_number(obj, "nu", "prior.", prior.nu);
  read_number(obj, "lambda", "prior.", prior.lambda);
  read_int(obj, "num_trees", "prior.", prior.num_trees);
  read_int(obj, "max_depth", "prior.", prior.max_depth);
  if (const Json* j = find(obj, "moves")) {
    check_keys(*j, "prior.moves.",
               {"stay_scale", "stay_shift", "grow_cap", "grow_shift",
                "delete_shift"});
    read_number(*j, "stay_scale", "prior.moves.", prior.moves.stay_scale);
    read_number(*j, "stay_shift", "prior.moves.", prior.moves.stay_shift);
    read_number(*j, "grow_cap", "prior.moves.", prior.moves.grow_cap);
    read_number(*j, "grow_shift", "prior.moves.", prior.moves.grow_shift);
    read_number(*j, "delete_shift", "prior.moves.", prior.moves.delete_shift);
  }
}

void read_run(const Json& obj, RunConfig& run) {
  check_keys(obj, "run.",
             {"budget", "budget_kind", "burn_in", "thinning", "seed",
              "record_trace", "flat_likelihood", "sigma2_gibbs", "early_stop",
              "early_stop_window"});
  read_integer(obj, "budget", "run.", run.budget);
  if (const Json* j = find(obj, "budget_kind")) {
    const std::string kind = as_string(*j, "run.budget_kind");
    if (kind == "proposals")
      run.budget_kind = BudgetKind::Proposals;
    else if (kind == "acceptances")
      run.budget_kind = BudgetKind::Acceptances;
    else
      throw ConfigError(
          "config key 'run.budget_kind' must be \"proposals\" or "
          "\"acceptances\"");
  }
  if (const Json* j = find(obj, "burn_in"))
    run.burn_in = as_integer(*j, "run.burn_in");
  read_integer(obj, "thinning", "run.", run.thinning);
  if (const Json* j = find(obj, "seed")) {
    const bool ok = j->is_number_unsigned() ||
                    (j->is_number_integer() && j->get<long long>() >= 0);
    if (!ok)
      throw ConfigError("config key 'run.seed' must be a non-negative integer");
    run.seed = j->get<std::uint64_t>();
  }
  read_bool(obj, "record_trace", "run.", run.record_trace);
  read_bool(obj, "flat_likelihood", "run.", run.flat_likelihood);
  read_bool(obj, "sigma2_gibbs", "run.", run.sigma2_gibbs);
  read_bool(obj, "early_stop", "run.", run.early_stop);
  read_integer(obj, "early_stop_window", "run.", run.early_stop_window);
}

void read_bench(const Json& obj, BenchOptions& bench) {
  check_keys(obj, "bench.", {"tasks", "n_reps", "k_values", "traces"});
  if (const Json* j = find(obj, "tasks")) {
    if (!j->is_array() || j->empty())
      throw ConfigError("config key 'bench.tasks' must be a non-empty array");
    bench.tasks.clear();
    for (const Json& t : *j) bench.tasks.push_back(as_string(t, "bench.tasks"));
  }
  read_int(obj, "n_reps", "bench.", bench.n_reps);
  if (bench.n_reps < 1) throw ConfigError("config key 'bench.n_reps' must be >= 1");
  if (const Json* j = find(obj, "k_values")) {
    if (!j->is_array() || j->empty())
      throw ConfigError("config key 'bench.k_values' must be a non-empty array");
    bench.k_values.clear();
    for (const Json& k : *j) {
      const long value = as_integer(k, "bench.k_values");
      if (value < 1) throw ConfigError("config key 'bench.k_values' must be >= 1");
      bench.k_values.push_back(static_cast<int>(value));
    }
  }
  read_bool(obj, "traces", "bench.", bench.write_traces);
}

// --- json emission ---------------------------------------------------------

Json operators_to_json(const OperatorSet& ops) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < ops.size(); ++i)
    arr.push_back(Json{{"name", ops.at(i).name}, {"weight", ops.weights()[i]}});
  return arr;
}

Json config_to_json_obj(const FullConfig& cfg) {
  const PriorConfig& p = cfg.run.prior;
  Json prior{{"alpha", p.alpha},
             {"beta", p.beta},
             {"operators", operators_to_json(p.operators)},
             {"feature_weights", p.feature_weights},
             {"nu_a", p.nu_a},
             {"lambda_a", p.lambda_a},
             {"nu_b", p.nu_b},
             {"lambda_b", p.lambda_b},
             {"nu", p.nu},
             {"lambda", p.lambda},
             {"num_trees", p.num_trees},
             {"max_depth", p.max_depth},
             {"moves", Json{{"stay_scale", p.moves.stay_scale},
                            {"stay_shift", p.moves.stay_shift},
                            {"grow_cap", p.moves.grow_cap},
                            {"grow_shift", p.moves.grow_shift},
                            {"delete_shift", p.moves.delete_shift}}}};
  const RunConfig& r = cfg.run;
  Json run{{"budget", r.budget},
           {"budget_kind", r.budget_kind == BudgetKind::Proposals
                               ? "proposals"
                               : "acceptances"},
           {"burn_in", r.burn_in ? Json(*r.burn_in) : Json(nullptr)},
           {"thinning", r.thinning},
           {"seed", r.seed},
           {"record_trace", r.record_trace},
           {"flat_likelihood", r.flat_likelihood},
           {"sigma2_gibbs", r.sigma2_gibbs},
           {"early_stop", r.early_stop},
           {"early_stop_window", r.early_stop_window}};
  Json bench{{"tasks", cfg.bench.tasks},
             {"n_reps", cfg.bench.n_reps},
             {"k_values", cfg.bench.k_values},
             {"traces", cfg.bench.write_traces}};
  return Json{{"prior", std::move(prior)},
              {"run", std::move(run)},
              {"bench", std::move(bench)}};
}

// NaN is not representable in JSON; it round-trips through null.
Json number_or_null(double v) {
  return std::isnan(v) ? Json(nullptr) : Json(v);
}

double number_or_nan(const Json& j, const std::string& where) {
  return j.is_null() ? kNaN : as_number(j, where);
}

Json model_core_to_json(const MixtureModel& model) {
  Json expressions = Json::array();
  Json expressions_full = Json::array();
  for (const ExprTree& tree : model.trees) {
    expressions.push_back(to_infix(tree, 4));
    expressions_full.push_back(to_infix(tree, 17));
  }
  return Json{{"num_trees", static_cast<int>(model.trees.size())},
              {"expressions", std::move(expressions)},
              {"expressions_full", std::move(expressions_full)},
              {"beta", model.beta},
              {"sigma2", model.scales.sigma2},
              {"sigma_a2", model.scales.sigma_a2},
              {"sigma_b2", model.scales.sigma_b2}};
}

MixtureModel model_core_from_json(const Json& j, const std::string& where) {
  const Json* full = find(j, "expressions_full");
  const Json* beta = find(j, "beta");
  if (!full || !full->is_array() || !beta || !beta->is_array())
    throw ConfigError(where + ": missing expressions_full or beta");
  MixtureModel model;
  for (const Json& text : *full) {
    ExprTree tree = parse_infix(as_string(text, where + ".expressions_full"));
    model.trees.push_back(std::move(tree));
  }
  for (const Json& b : *beta)
    model.beta.push_back(as_number(b, where + ".beta"));
  if (model.beta.size() != model.trees.size() + 1)
    throw ConfigError(where + ": beta must have one entry per tree plus an intercept");
  const Json* s2 = find(j, "sigma2");
  const Json* sa = find(j, "sigma_a2");
  const Json* sb = find(j, "sigma_b2");
  if (!s2 || !sa || !sb) throw ConfigError(where + ": missing scale fields");
  model.scales.sigma2 = as_number(*s2, where + ".sigma2");
  model.scales.sigma_a2 = as_number(*sa, where + ".sigma_a2");
  model.scales.sigma_b2 = as_number(*sb, where + ".sigma_b2");
  return model;
}

Json parse_text(const std::string& text, const char* what) {
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded())
    throw ConfigError(std::string(what) + " is not valid JSON");
  return j;
}

}  // namespace

FullConfig default_config() {
  FullConfig cfg;
  cfg.run.prior.operators = OperatorSet::default_pool();
  cfg.run.prior.feature_weights.clear();  // uniform once the data is known
  return cfg;
}

FullConfig parse_config_json(const std::string& text) {
  const Json root = parse_text(text, "config");
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(root, "", {"prior", "run", "bench"});

  FullConfig cfg = default_config();
  if (const Json* j = find(root, "prior")) {
    if (!j->is_object()) throw ConfigError("config key 'prior' must be an object");
    read_prior(*j, cfg.run.prior);
  }
  if (const Json* j = find(root, "run")) {
    if (!j->is_object()) throw ConfigError("config key 'run' must be an object");
    read_run(*j, cfg.run);
  }
  if (const Json* j = find(root, "bench")) {
    if (!j->is_object()) throw ConfigError("config key 'bench' must be an object");
    read_bench(*j, cfg.bench);
  }
  return cfg;
}

FullConfig load_config_file(const std::string& path) {
  return parse_config_json(read_text_file(path));
}

std::string config_to_json(const FullConfig& cfg) {
  return config_to_json_obj(cfg).dump(2) + "\n";
}

void finalize_feature_weights(PriorConfig& prior, int num_features) {
  if (num_features < 1) throw ConfigError("data has no predictor columns");
  if (prior.feature_weights.empty()) {
    prior.feature_weights.assign(static_cast<std::size_t>(num_features),
                                 1.0 / num_features);
    return;
  }
  if (static_cast<int>(prior.feature_weights.size()) != num_features)
    throw ConfigError("config key 'prior.feature_weights' has " +
                      std::to_string(prior.feature_weights.size()) +
                      " entries but the data has " +
                      std::to_string(num_features) + " predictors");
}

std::string model_to_json(const ModelArtifact& artifact, const FullConfig& cfg) {
  Json j{{"format", "bsr-model-v1"},
         {"seed", artifact.seed},
         {"target", artifact.target},
         {"num_features", artifact.num_features},
         {"n_train", artifact.n_train}};
  j.update(model_core_to_json(artifact.model));
  j["mixture"] = format_mixture(artifact.model, 4);
  Json metrics{{"train_rmse", number_or_null(artifact.train_rmse)},
               {"log_lik", number_or_null(artifact.log_lik)}};
  if (artifact.sign_accuracy) metrics["sign_accuracy"] = *artifact.sign_accuracy;
  j["metrics"] = std::move(metrics);
  j["config"] = config_to_json_obj(cfg);
  return j.dump(2) + "\n";
}

ModelArtifact read_model_text(const std::string& text) {
  const Json j = parse_text(text, "model file");
  if (!j.is_object()) throw ConfigError("model file must be a JSON object");
  ModelArtifact artifact;
  artifact.model = model_core_from_json(j, "model file");
  if (const Json* seed = find(j, "seed")) {
    if (!seed->is_number_integer() && !seed->is_number_unsigned())
      throw ConfigError("model file.seed must be an integer");
    artifact.seed = seed->get<std::uint64_t>();
  }
  if (const Json* target = find(j, "target"))
    artifact.target = as_string(*target, "model file.target");
  if (const Json* d = find(j, "num_features"))
    artifact.num_features = static_cast<int>(as_integer(*d, "model file.num_features"));
  if (const Json* n = find(j, "n_train"))
    artifact.n_train = as_integer(*n, "model file.n_train");
  // a metric serialized as null (NaN) reads back as NaN, not as a default
  artifact.train_rmse = kNaN;
  artifact.log_lik = kNaN;
  if (const Json* metrics = find(j, "metrics")) {
    if (const Json* rmse = find(*metrics, "train_rmse"))
      artifact.train_rmse = number_or_nan(*rmse, "model file.metrics.train_rmse");
    if (const Json* ll = find(*metrics, "log_lik"))
      artifact.log_lik = number_or_nan(*ll, "model file.metrics.log_lik");
    if (const Json* acc = find(*metrics, "sign_accuracy"))
      artifact.sign_accuracy = as_number(*acc, "model file.metrics.sign_accuracy");
  }
  return artifact;
}

ModelArtifact read_model_file(const std::string& path) {
  return read_model_text(read_text_file(path));
}

std::string trace_to_csv(std::span<const TraceRow> rows) {
  std::string out =
      "iteration,tree_index,move,accepted,log_lik,sigma2,total_nodes,"
      "train_rmse\n";
  char buf[256];
  for (const TraceRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%ld,%d,%s,%d,%.17g,%.17g,%d,%.17g\n",
                  row.iteration, row.tree_index, move_name(row.move),
                  row.accepted ? 1 : 0, row.log_lik, row.sigma2,
                  row.total_nodes, row.train_rmse);
    out += buf;
  }
  return out;
}

std::string chain_state_to_json(const ChainState& state) {
  Json j = model_core_to_json(state.model);
  j["log_lik"] = number_or_null(state.log_lik);
  j["log_prior"] = number_or_null(state.log_prior);
  j["rss"] = number_or_null(state.rss);
  j["iteration"] = state.iteration;
  j["accept_count"] = state.accept_count;
  return j.dump(2) + "\n";
}

ChainState chain_state_from_json(const std::string& text) {
  const Json j = parse_text(text, "chain state");
  if (!j.is_object()) throw ConfigError("chain state must be a JSON object");
  ChainState state;
  state.model = model_core_from_json(j, "chain state");
  if (const Json* v = find(j, "log_lik"))
    state.log_lik = number_or_nan(*v, "chain state.log_lik");
  if (const Json* v = find(j, "log_prior"))
    state.log_prior = number_or_nan(*v, "chain state.log_prior");
  const auto rss = j.find("rss");
  state.rss = rss == j.end() ? kNaN : number_or_nan(*rss, "chain state.rss");
  if (const Json* v = find(j, "iteration"))
    state.iteration = as_integer(*v, "chain state.iteration");
  if (const Json* v = find(j, "accept_count"))
    state.accept_count = as_integer(*v, "chain state.accept_count");
  return state;
}

std::string checkpoint_to_json(const ChainState& state, const Rng& rng,
                               const FullConfig& cfg) {
  Json j{{"format", "bsr-checkpoint-v1"},
         {"state", Json::parse(chain_state_to_json(state))},
         {"rng", rng.save_state()},
         {"config", config_to_json_obj(cfg)}};
  return j.dump(2) + "\n";
}

Checkpoint read_checkpoint_text(const std::string& text) {
  const Json j = parse_text(text, "checkpoint");
  if (!j.is_object()) throw ConfigError("checkpoint must be a JSON object");
  const Json* state = find(j, "state");
  const Json* rng = find(j, "rng");
  const Json* config = find(j, "config");
  if (!state || !rng || !config)
    throw ConfigError("checkpoint must have state, rng and config fields");
  Checkpoint checkpoint;
  checkpoint.state = chain_state_from_json(state->dump());
  checkpoint.rng_state = as_string(*rng, "checkpoint.rng");
  checkpoint.config = parse_config_json(config->dump());
  return checkpoint;
}

Checkpoint read_checkpoint_file(const std::string& path) {
  return read_checkpoint_text(read_text_file(path));
}

namespace {

Json stats_to_json(const SummaryStats& s) {
  return Json{{"mean", s.mean}, {"sd", s.sd}, {"median", s.median}};
}

Json task_report_to_json(const TaskReport& report) {
  Json splits = Json::object();
  for (std::size_t s = 0; s < kNumSplits; ++s)
    splits[split_name(static_cast<Split>(s))] = stats_to_json(report.rmse[s]);
  Json replicates = Json::array();
  for (const ReplicateResult& rep : report.replicates) {
    Json rmse = Json::object();
    for (std::size_t s = 0; s < kNumSplits; ++s)
      rmse[split_name(static_cast<Split>(s))] = rep.rmse[s];
    replicates.push_back(Json{{"seed", rep.seed},
                              {"rmse", std::move(rmse)},
                              {"total_nodes", rep.total_nodes},
                              {"log_lik", rep.log_lik},
                              {"proposals", rep.proposals},
                              {"accepts", rep.accepts},
                              {"expression", rep.expression},
                              {"beta", rep.beta}});
  }
  return Json{{"task", report.task_id},
              {"seed", report.seed},
              {"n_reps", report.n_reps},
              {"budget", report.budget},
              {"num_trees", report.num_trees},
              {"rmse", std::move(splits)},
              {"total_nodes", stats_to_json(report.nodes)},
              {"replicates", std::move(replicates)}};
}

std::string fmt_stat(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void task_report_to_markdown(const TaskReport& report, std::string& out) {
  out += "## " + report.task_id + "\n\n";
  out += "K = " + std::to_string(report.num_trees) + ", " +
         std::to_string(report.n_reps) + " replicates, budget " +
         std::to_string(report.budget) + " proposals, master seed " +
         std::to_string(report.seed) + "\n\n";
  out += "| split | RMSE mean | RMSE sd | RMSE median |\n";
  out += "|---|---|---|---|\n";
  for (std::size_t s = 0; s < kNumSplits; ++s) {
    const SummaryStats& st = report.rmse[s];
    out += std::string("| ") + split_name(static_cast<Split>(s)) + " | " +
           fmt_stat(st.mean) + " | " + fmt_stat(st.sd) + " | " +
           fmt_stat(st.median) + " |\n";
  }
  out += "\nTotal nodes of the best model: mean " + fmt_stat(report.nodes.mean) +
         " (sd " + fmt_stat(report.nodes.sd) + "), median " +
         fmt_stat(report.nodes.median) + "\n\n";
  out += "| replicate seed | train RMSE | nodes | expression |\n";
  out += "|---|---|---|---|\n";
  for (const ReplicateResult& rep : report.replicates)
    out += "| " + std::to_string(rep.seed) + " | " +
           fmt_stat(rep.rmse[static_cast<std::size_t>(Split::Train)]) + " | " +
           std::to_string(rep.total_nodes) + " | `" + rep.expression + "` |\n";
  out += "\n";
}

}  // namespace

std::string report_to_json(std::span<const TaskReport> reports,
                           const FullConfig& cfg) {
  Json tasks = Json::array();
  for (const TaskReport& report : reports)
    tasks.push_back(task_report_to_json(report));
  Json j{{"format", "bsr-report-v1"},
         {"tasks", std::move(tasks)},
         {"config", config_to_json_obj(cfg)}};
  return j.dump(2) + "\n";
}

std::string report_to_markdown(std::span<const TaskReport> reports) {
  std::string out = "# Benchmark report\n\n";
  for (const TaskReport& report : reports) task_report_to_markdown(report, out);
  return out;
}

std::string ksens_to_json(const KSensReport& report, const FullConfig& cfg) {
  Json runs = Json::array();
  for (std::size_t i = 0; i < report.reports.size(); ++i) {
    Json entry = task_report_to_json(report.reports[i]);
    entry["k"] = report.k_values[i];
    runs.push_back(std::move(entry));
  }
  Json j{{"format", "bsr-ksens-v1"},
         {"task", report.task_id},
         {"k_values", report.k_values},
         {"runs", std::move(runs)},
         {"config", config_to_json_obj(cfg)}};
  return j.dump(2) + "\n";
}

std::string ksens_to_markdown(const KSensReport& report) {
  std::string out = "# Mixture-size sensitivity: " + report.task_id + "\n\n";
  out += "| K | train RMSE (median) | test[-3,3] (median) | test[-6,6] "
         "(median) | test[3,6] (median) | nodes (mean) |\n";
  out += "|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < report.reports.size(); ++i) {
    const TaskReport& r = report.reports[i];
    out += "| " + std::to_string(report.k_values[i]);
    for (std::size_t s = 0; s < kNumSplits; ++s)
      out += " | " + fmt_stat(r.rmse[s].median);
    out += " | " + fmt_stat(r.nodes.mean) + " |\n";
  }
  out += "\n";
  for (const TaskReport& r : report.reports) task_report_to_markdown(r, out);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream file(p, std::ios::binary);
  if (!file) throw ConfigError("cannot write file: " + path);
  file << content;
  if (!file) throw Error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open file: " + path);
  std::ostringstream out;
  out << file.rdbuf();
  return std::move(out).str();
}

}  // namespace bsr
