#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scb/env.hpp"
#include "scb/metrics.hpp"
#include "scb/scb.hpp"
#include "scb/types.hpp"

namespace scb {

// Behavioural contract every benchmark agent satisfies. select() must be
// called once per timestep in order; observe() buffers the outcome; flush()
// folds buffered outcomes into the posteriors at batch boundaries. A single
// agent instance serves exactly one run.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual ArmId select(const Context& x, std::int64_t t) = 0;
  virtual void observe(const Context& x, ArmId arm, int reward) = 0;
  virtual void flush() = 0;
  virtual std::string name() const = 0;

  // Hybrid agents expose their per-step audit trail; nullptr otherwise.
  virtual const std::vector<DecisionRecord>* decisions() const { return nullptr; }
  virtual const std::vector<double>* delta_trace() const { return nullptr; }
};

struct ExperimentConfig {
  std::string dataset_path;
  std::string label_column;
  std::string agent_spec = "LogisticRegressionTSAgent";
  int runs = 20;
  std::int64_t horizon = 3000;
  std::int64_t batch_size = 100;
  double epsilon = 0.2;
  double ucb_c = 1.0;      // Beta-arm UCB stddev multiplier
  double alpha_ucb = 1.0;  // GLM UCB width multiplier
  double lambda0 = 1.0;    // Gaussian prior scale
  ScbConfig scb;
  std::uint64_t master_seed = 0;
  std::string output_dir;
  bool standardize = true;
  SamplingMode sampling = SamplingMode::CycleShuffled;
  bool per_step_beta = false;  // apply Beta counts per step instead of per batch

  void validate() const;
};

// The agent identities evaluated in the benchmark: three noncontextual and
// three contextual baselines plus the ten hybrid variants.
const std::vector<std::string>& roster();

// Builds a fully wired agent for one run. `spec` is a roster name or a
// composite "scb:<ts|ucb|eg>:<ratio|reldiff>:<source>" description. The
// agent derives its exploration streams from run_seed with the documented
// StreamRole indices, so paired runs of different agents share draws.
std::unique_ptr<Agent> build_agent(const std::string& spec, int num_arms, int dim,
                                   const ExperimentConfig& config,
                                   std::uint64_t run_seed);

struct RunResult {
  int run_index = 0;
  std::uint64_t seed = 0;
  std::vector<ArmId> arms;
  std::vector<int> rewards;
  std::vector<DecisionRecord> decisions;  // hybrid agents only
  std::vector<double> delta_trace;        // hybrid agents only
  double final_regret = 0.0;
  std::optional<double> noncontextual_frac;
};

struct DatasetInfo {
  std::int64_t n = 0;
  int num_classes = 0;
  int dim = 0;
  std::vector<std::string> label_mapping;
  std::size_t dropped_rows = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  DatasetInfo dataset;
  std::vector<RunResult> runs;  // completed runs, ordered by run index
  // Solver failures aborting a single run, as "run <r>, t <t>: <reason>";
  // the remaining runs proceed and aggregation covers completed runs only.
  std::vector<std::string> failed_runs;
  std::vector<double> mean_regret_curve;
  std::vector<double> std_regret_curve;
  double mean_final_regret = 0.0;
  double std_final_regret = 0.0;
  std::optional<double> mean_noncontextual_fraction;
  // In-memory only; never serialized so that result files stay reproducible.
  double wall_clock_seconds = 0.0;
};

// Runs `config.runs` seeded runs: per run, derive the sub-seed, reshuffle,
// loop select/reward/observe over the horizon and flush updates at every
// batch boundary. Throws SolverError only when every run failed. The
// dataset overload skips file loading.
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::shared_ptr<const Dataset> dataset);

// Writes per-run trace CSVs (and decision CSVs for hybrid agents), the
// aggregate regret curve, and a summary JSON into output_dir. Identical
// inputs produce byte-identical files.
void emit_results(const ExperimentResult& result, const std::string& output_dir);

// Long-format comparison across agents: agent,t,mean_regret,std_regret.
void emit_comparison(const std::vector<ExperimentResult>& results,
                     const std::string& path);

}  // namespace scb
