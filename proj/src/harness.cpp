#include "scb/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scb/beta_bernoulli.hpp"
#include "scb/glm.hpp"

namespace scb {

namespace {

class BetaAgentAdapter : public Agent {
 public:
  BetaAgentAdapter(std::string name, BetaBernoulliAgent agent, RngStream rng,
                   bool per_step_updates)
      : name_(std::move(name)),
        agent_(std::move(agent)),
        rng_(rng),
        per_step_(per_step_updates) {}

  ArmId select(const Context&, std::int64_t) override { return agent_.select(rng_); }

  void observe(const Context&, ArmId arm, int reward) override {
    if (per_step_) {
      agent_.update_now(arm, reward);
    } else {
      agent_.buffer(arm, reward);
    }
  }

  void flush() override { agent_.flush(); }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  BetaBernoulliAgent agent_;
  RngStream rng_;
  bool per_step_;
};

class GlmAgentAdapter : public Agent {
 public:
  GlmAgentAdapter(std::string name, GlmAgent agent, RngStream rng)
      : name_(std::move(name)), agent_(std::move(agent)), rng_(rng) {}

  ArmId select(const Context& x, std::int64_t) override {
    return agent_.select(x, rng_).arm;
  }

  void observe(const Context& x, ArmId arm, int reward) override {
    agent_.buffer(x, arm, reward);
  }

  void flush() override { agent_.batch_refit(); }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  GlmAgent agent_;
  RngStream rng_;
};

class ScbAgentAdapter : public Agent {
 public:
  ScbAgentAdapter(std::string name, ScbPolicy policy, RngStream rng_contextual,
                  RngStream rng_noncontextual)
      : name_(std::move(name)),
        policy_(std::move(policy)),
        rng_contextual_(rng_contextual),
        rng_noncontextual_(rng_noncontextual) {}

  ArmId select(const Context& x, std::int64_t t) override {
    DecisionRecord rec = policy_.select(x, t, rng_contextual_, rng_noncontextual_);
    delta_trace_.push_back(policy_.current_delta());
    records_.push_back(rec);
    return rec.final_arm;
  }

  void observe(const Context& x, ArmId arm, int reward) override {
    policy_.buffer(x, arm, reward);
  }

  void flush() override { policy_.flush(); }
  std::string name() const override { return name_; }
  const std::vector<DecisionRecord>* decisions() const override { return &records_; }
  const std::vector<double>* delta_trace() const override { return &delta_trace_; }

 private:
  std::string name_;
  ScbPolicy policy_;
  RngStream rng_contextual_;
  RngStream rng_noncontextual_;
  std::vector<DecisionRecord> records_;
  std::vector<double> delta_trace_;
};

ExplorationKind exploration_from_token(const std::string& token) {
  if (token == "ts") return ExplorationKind::ThompsonSampling;
  if (token == "ucb") return ExplorationKind::Ucb;
  if (token == "eg") return ExplorationKind::EpsilonGreedy;
  throw ConfigError("unknown exploration kind: " + token);
}

struct SpecParts {
  enum class Family { Noncontextual, Contextual, Hybrid } family;
  ExplorationKind exploration;
  Comparator comparator = Comparator::Ratio;
  NcSource source = NcSource::BetaBernoulliAgent;
};

SpecParts parse_spec(const std::string& spec) {
  // Roster names first.
  static const std::map<std::string, SpecParts> kRoster = {
      {"IndependentBernoulliArmsTSAgent",
       {SpecParts::Family::Noncontextual, ExplorationKind::ThompsonSampling}},
      {"IndependentBernoulliArmsUCBAgent",
       {SpecParts::Family::Noncontextual, ExplorationKind::Ucb}},
      {"IndependentBernoulliArmsEGAgent",
       {SpecParts::Family::Noncontextual, ExplorationKind::EpsilonGreedy}},
      {"LogisticRegressionTSAgent",
       {SpecParts::Family::Contextual, ExplorationKind::ThompsonSampling}},
      {"LogisticRegressionUCBAgent",
       {SpecParts::Family::Contextual, ExplorationKind::Ucb}},
      {"LogisticRegressionEGAgent",
       {SpecParts::Family::Contextual, ExplorationKind::EpsilonGreedy}},
      {"SCBTSAgent_Ratio",
       {SpecParts::Family::Hybrid, ExplorationKind::ThompsonSampling,
        Comparator::Ratio, NcSource::BetaBernoulliAgent}},
      {"meanSCBTSAgent_Ratio",
       {SpecParts::Family::Hybrid, ExplorationKind::ThompsonSampling,
        Comparator::Ratio, NcSource::MeanOverHistory}},
      {"SCBTSAgent_Diff",
       {SpecParts::Family::Hybrid, ExplorationKind::ThompsonSampling,
        Comparator::RelativeDifference, NcSource::BetaBernoulliAgent}},
      {"meanSCBTSAgent_Diff",
       {SpecParts::Family::Hybrid, ExplorationKind::ThompsonSampling,
        Comparator::RelativeDifference, NcSource::MeanOverHistory}},
      {"SCBEGAgent_Ratio",
       {SpecParts::Family::Hybrid, ExplorationKind::EpsilonGreedy,
        Comparator::Ratio, NcSource::BetaBernoulliAgent}},
      {"meanSCBEGAgent_Ratio",
       {SpecParts::Family::Hybrid, ExplorationKind::EpsilonGreedy,
        Comparator::Ratio, NcSource::MeanOverHistory}},
      {"SCBEGAgent_Diff",
       {SpecParts::Family::Hybrid, ExplorationKind::EpsilonGreedy,
        Comparator::RelativeDifference, NcSource::BetaBernoulliAgent}},
      {"meanSCBEGAgent_Diff",
       {SpecParts::Family::Hybrid, ExplorationKind::EpsilonGreedy,
        Comparator::RelativeDifference, NcSource::MeanOverHistory}},
      // The UCB hybrids compare relative differences.
      {"SCBUCBAgent",
       {SpecParts::Family::Hybrid, ExplorationKind::Ucb,
        Comparator::RelativeDifference, NcSource::BetaBernoulliAgent}},
      {"meanSCBUCBAgent",
       {SpecParts::Family::Hybrid, ExplorationKind::Ucb,
        Comparator::RelativeDifference, NcSource::MeanOverHistory}},
  };
  if (auto it = kRoster.find(spec); it != kRoster.end()) return it->second;

  // Composite form: scb:<ts|ucb|eg>:<ratio|reldiff>:<source>.
  if (spec.rfind("scb:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, ':')) parts.push_back(token);
    if (parts.size() != 4) {
      throw ConfigError("composite agent spec must be scb:<explore>:<comparator>:<source>");
    }
    SpecParts out{SpecParts::Family::Hybrid, exploration_from_token(parts[1]),
                  comparator_from_string(parts[2]), nc_source_from_string(parts[3])};
    return out;
  }
  throw ConfigError("unknown agent spec: " + spec);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (runs < 1) throw ConfigError("config: runs must be >= 1");
  if (horizon < 1) throw ConfigError("config: horizon must be >= 1");
  if (batch_size < 1 || batch_size > horizon) {
    throw ConfigError("config: batch size must lie in [1, horizon]");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError("config: epsilon must lie in [0, 1]");
  }
  if (!(lambda0 > 0.0)) throw ConfigError("config: lambda must be positive");
  if (ucb_c < 0.0 || alpha_ucb < 0.0) {
    throw ConfigError("config: UCB multipliers must be nonnegative");
  }
  scb.validate();
  parse_spec(agent_spec);
}

const std::vector<std::string>& roster() {
  static const std::vector<std::string> kNames = {
      "IndependentBernoulliArmsTSAgent",
      "IndependentBernoulliArmsUCBAgent",
      "IndependentBernoulliArmsEGAgent",
      "LogisticRegressionTSAgent",
      "LogisticRegressionUCBAgent",
      "LogisticRegressionEGAgent",
      "SCBTSAgent_Ratio",
      "meanSCBTSAgent_Ratio",
      "SCBTSAgent_Diff",
      "meanSCBTSAgent_Diff",
      "SCBEGAgent_Ratio",
      "meanSCBEGAgent_Ratio",
      "SCBEGAgent_Diff",
      "meanSCBEGAgent_Diff",
      "SCBUCBAgent",
      "meanSCBUCBAgent",
  };
  return kNames;
}

std::unique_ptr<Agent> build_agent(const std::string& spec, int num_arms, int dim,
                                   const ExperimentConfig& config,
                                   std::uint64_t run_seed) {
  const SpecParts parts = parse_spec(spec);
  ExplorationParams params;
  params.epsilon = config.epsilon;
  params.ucb_c = config.ucb_c;
  params.alpha_ucb = config.alpha_ucb;

  RngStream primary(derive_seed(run_seed, static_cast<std::uint64_t>(StreamRole::Agent)));
  RngStream secondary(
      derive_seed(run_seed, static_cast<std::uint64_t>(StreamRole::Noncontextual)));

  switch (parts.family) {
    case SpecParts::Family::Noncontextual:
      return std::make_unique<BetaAgentAdapter>(
          spec, BetaBernoulliAgent(num_arms, parts.exploration, params), primary,
          config.per_step_beta);
    case SpecParts::Family::Contextual:
      return std::make_unique<GlmAgentAdapter>(
          spec, GlmAgent(num_arms, dim, config.lambda0, parts.exploration, params),
          primary);
    case SpecParts::Family::Hybrid: {
      ScbConfig scb_config = config.scb;
      scb_config.comparator = parts.comparator;
      scb_config.nc_source = parts.source;
      GlmAgent contextual(num_arms, dim, config.lambda0, parts.exploration, params);
      std::optional<BetaBernoulliAgent> nc_agent;
      if (parts.source == NcSource::BetaBernoulliAgent) {
        nc_agent.emplace(num_arms, parts.exploration, params);
      }
      return std::make_unique<ScbAgentAdapter>(
          spec, ScbPolicy(std::move(scb_config), std::move(contextual), std::move(nc_agent)),
          primary, secondary);
    }
  }
  throw ConfigError("unknown agent spec: " + spec);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  LoadOptions options;
  options.standardize = config.standardize;
  auto dataset = std::make_shared<const Dataset>(
      load_dataset(config.dataset_path, config.label_column, options));
  return run_experiment(config, std::move(dataset));
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::shared_ptr<const Dataset> dataset) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  ExperimentResult result;
  result.config = config;
  result.dataset = DatasetInfo{dataset->size(), dataset->num_classes, dataset->dim(),
                               dataset->label_mapping, dataset->dropped_rows};

  for (int r = 0; r < config.runs; ++r) {
    const std::uint64_t run_seed = derive_seed(config.master_seed,
                                               static_cast<std::uint64_t>(r));
    std::int64_t failed_at = 0;
    try {
      BanditEnv env(dataset, config.horizon,
                    RngStream(derive_seed(
                        run_seed, static_cast<std::uint64_t>(StreamRole::Environment))),
                    config.sampling);
      std::unique_ptr<Agent> agent = build_agent(
          config.agent_spec, dataset->num_classes, dataset->dim(), config, run_seed);

      RunResult run;
      run.run_index = r;
      run.seed = run_seed;
      run.arms.reserve(static_cast<std::size_t>(config.horizon));
      run.rewards.reserve(static_cast<std::size_t>(config.horizon));
      for (std::int64_t t = 1; t <= config.horizon; ++t) {
        failed_at = t;
        const Context x = env.step();
        const ArmId arm = agent->select(x, t);
        const int reward = env.reward(arm);
        agent->observe(x, arm, reward);
        run.arms.push_back(arm);
        run.rewards.push_back(reward);
        if (t % config.batch_size == 0) agent->flush();
      }
      if (config.horizon % config.batch_size != 0) agent->flush();

      run.final_regret = normalized_cumulative_regret(run.rewards);
      if (const auto* decisions = agent->decisions()) {
        run.decisions = *decisions;
        run.noncontextual_frac = noncontextual_fraction(run.decisions);
      }
      if (const auto* deltas = agent->delta_trace()) run.delta_trace = *deltas;
      result.runs.push_back(std::move(run));
    } catch (const SolverError& e) {
      // Record and move on; the other runs are independent.
      result.failed_runs.push_back("run " + std::to_string(r) + ", t " +
                                   std::to_string(failed_at) + ": " + e.what());
    }
  }
  if (result.runs.empty()) {
    std::string detail;
    for (const std::string& failure : result.failed_runs) {
      detail += (detail.empty() ? "" : "; ") + failure;
    }
    throw SolverError("all runs failed: " + detail);
  }

  // Deterministic reduce ordered by run index.
  const auto horizon = static_cast<std::size_t>(config.horizon);
  result.mean_regret_curve.assign(horizon, 0.0);
  result.std_regret_curve.assign(horizon, 0.0);
  std::vector<std::vector<double>> curves;
  curves.reserve(result.runs.size());
  for (const RunResult& run : result.runs) curves.push_back(regret_curve(run.rewards));
  const double num_runs = static_cast<double>(result.runs.size());
  for (std::size_t t = 0; t < horizon; ++t) {
    double sum = 0.0;
    for (const auto& curve : curves) sum += curve[t];
    const double mean = sum / num_runs;
    double sq = 0.0;
    for (const auto& curve : curves) sq += (curve[t] - mean) * (curve[t] - mean);
    result.mean_regret_curve[t] = mean;
    result.std_regret_curve[t] = std::sqrt(sq / num_runs);
  }
  result.mean_final_regret = result.mean_regret_curve.back();
  result.std_final_regret = result.std_regret_curve.back();

  if (!result.runs.empty() && result.runs.front().noncontextual_frac) {
    double sum = 0.0;
    for (const RunResult& run : result.runs) sum += *run.noncontextual_frac;
    result.mean_noncontextual_fraction = sum / num_runs;
  }

  result.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["dataset"] = c.dataset_path;
  j["label_column"] = c.label_column;
  j["agent"] = c.agent_spec;
  j["runs"] = c.runs;
  j["horizon"] = c.horizon;
  j["batch_size"] = c.batch_size;
  j["epsilon"] = c.epsilon;
  j["ucb_c"] = c.ucb_c;
  j["alpha_ucb"] = c.alpha_ucb;
  j["lambda"] = c.lambda0;
  j["seed"] = c.master_seed;
  j["standardize"] = c.standardize;
  j["sampling"] = c.sampling == SamplingMode::CycleShuffled ? "cycle" : "iid";
  j["per_step_beta"] = c.per_step_beta;
  j["delta"] = c.scb.delta;
  j["comparator"] = to_string(c.scb.comparator);
  j["anneal_rate"] = c.scb.anneal_rate;
  j["anneal_epochs"] = c.scb.anneal_epochs;
  j["nc_source"] = to_string(c.scb.nc_source);
  j["default_arm"] = c.scb.default_arm;
  j["group_feature"] = c.scb.group_feature;
  j["history_capacity"] = c.scb.history_capacity;
  j["score_nc_with_contextual"] = c.scb.score_nc_with_contextual;
  return j;
}

}  // namespace

void emit_results(const ExperimentResult& result, const std::string& output_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw DataError("emit: cannot create directory '" + output_dir + "'");
  const fs::path out(output_dir);

  for (const RunResult& run : result.runs) {
    const std::string r = std::to_string(run.run_index);
    {
      std::ofstream trace(out / ("run_" + r + "_trace.csv"), std::ios::binary);
      if (!trace) throw DataError("emit: cannot write trace for run " + r);
      trace << "t,arm,reward\n";
      for (std::size_t t = 0; t < run.rewards.size(); ++t) {
        trace << (t + 1) << "," << run.arms[t] << "," << run.rewards[t] << "\n";
      }
    }
    if (!run.decisions.empty()) {
      std::ofstream dec(out / ("run_" + r + "_decisions.csv"), std::ios::binary);
      if (!dec) throw DataError("emit: cannot write decisions for run " + r);
      dec << "t,contextual_arm,noncontextual_arm,pred_c,pred_nc,final_arm,"
             "provenance,delta\n";
      for (std::size_t i = 0; i < run.decisions.size(); ++i) {
        const DecisionRecord& rec = run.decisions[i];
        dec << rec.t << "," << rec.contextual_arm << "," << rec.noncontextual_arm
            << "," << fmt17(rec.pred_contextual) << "," << fmt17(rec.pred_noncontextual)
            << "," << rec.final_arm << "," << to_string(rec.provenance) << ","
            << fmt17(run.delta_trace[i]) << "\n";
      }
    }
  }

  {
    std::ofstream agg(out / "aggregate_regret.csv", std::ios::binary);
    if (!agg) throw DataError("emit: cannot write aggregate regret curve");
    agg << "t,mean_regret,std_regret\n";
    for (std::size_t t = 0; t < result.mean_regret_curve.size(); ++t) {
      agg << (t + 1) << "," << fmt17(result.mean_regret_curve[t]) << ","
          << fmt17(result.std_regret_curve[t]) << "\n";
    }
  }

  nlohmann::json summary;
  summary["agent"] = result.config.agent_spec;
  summary["config"] = config_to_json(result.config);
  summary["dataset"] = {{"n", result.dataset.n},
                        {"K", result.dataset.num_classes},
                        {"d", result.dataset.dim},
                        {"label_mapping", result.dataset.label_mapping},
                        {"dropped_rows", result.dataset.dropped_rows}};
  summary["mean_final_regret"] = result.mean_final_regret;
  summary["std_final_regret"] = result.std_final_regret;
  if (result.mean_noncontextual_fraction) {
    summary["mean_noncontextual_fraction"] = *result.mean_noncontextual_fraction;
  } else {
    summary["mean_noncontextual_fraction"] = nullptr;
  }
  nlohmann::json runs = nlohmann::json::array();
  for (const RunResult& run : result.runs) {
    nlohmann::json jr;
    jr["run"] = run.run_index;
    jr["seed"] = run.seed;
    jr["final_regret"] = run.final_regret;
    if (run.noncontextual_frac) {
      jr["noncontextual_fraction"] = *run.noncontextual_frac;
    }
    runs.push_back(std::move(jr));
  }
  summary["runs"] = std::move(runs);
  summary["failed_runs"] = result.failed_runs;
  std::ofstream sum(out / "summary.json", std::ios::binary);
  if (!sum) throw DataError("emit: cannot write summary.json");
  sum << summary.dump(2) << "\n";
}

void emit_comparison(const std::vector<ExperimentResult>& results,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("emit: cannot write comparison file '" + path + "'");
  out << "agent,t,mean_regret,std_regret\n";
  for (const ExperimentResult& result : results) {
    for (std::size_t t = 0; t < result.mean_regret_curve.size(); ++t) {
      out << result.config.agent_spec << "," << (t + 1) << ","
          << fmt17(result.mean_regret_curve[t]) << ","
          << fmt17(result.std_regret_curve[t]) << "\n";
    }
  }
}

}  // namespace scb
