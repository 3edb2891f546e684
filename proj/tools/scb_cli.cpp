// Benchmark CLI: seeded experiment runs, offline replay evaluation, and
// synthetic log generation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scb/harness.hpp"
#include "scb/replay.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitSolver = 4;

struct RunFlags {
  scb::ExperimentConfig config;
  std::vector<std::string> agents;
  std::string comparator = "ratio";
  std::string nc_source = "beta-bernoulli";
  std::string sampling = "cycle";
  bool no_standardize = false;
  bool nc_score_own = false;
};

void add_run_command(CLI::App& app, RunFlags& flags) {
  CLI::App* run = app.add_subcommand("run", "Run seeded benchmark experiments");
  run->add_option("--dataset", flags.config.dataset_path, "Dataset CSV path")
      ->required();
  run->add_option("--label-column", flags.config.label_column,
                  "Label column name or 0-based index")
      ->required();
  run->add_option("--agent", flags.agents,
                  "Agent spec(s); roster name or scb:<explore>:<comparator>:<source>")
      ->delimiter(',')
      ->required();
  run->add_option("--runs", flags.config.runs, "Seeded runs per agent");
  run->add_option("--horizon", flags.config.horizon, "Timesteps per run");
  run->add_option("--batch-size", flags.config.batch_size,
                  "Posterior update cadence");
  run->add_option("--epsilon", flags.config.epsilon, "Epsilon-greedy mix");
  run->add_option("--ucb-c", flags.config.ucb_c, "Beta UCB stddev multiplier");
  run->add_option("--alpha-ucb", flags.config.alpha_ucb, "GLM UCB width multiplier");
  run->add_option("--lambda", flags.config.lambda0, "Gaussian prior scale");
  run->add_option("--delta", flags.config.scb.delta, "SCB threshold");
  run->add_option("--comparator", flags.comparator, "ratio | reldiff");
  run->add_option("--anneal-rate", flags.config.scb.anneal_rate,
                  "Delta decay rate in (0, 1]");
  run->add_option("--anneal-epochs", flags.config.scb.anneal_epochs,
                  "Timesteps at which delta decays")
      ->delimiter(',');
  run->add_option("--nc-source", flags.nc_source,
                  "beta-bernoulli | mean-history | fixed-default | group-majority");
  run->add_option("--default-arm", flags.config.scb.default_arm,
                  "Arm for the fixed-default source");
  run->add_option("--group-feature", flags.config.scb.group_feature,
                  "Feature index keying the majority vote (-1 = global)");
  run->add_option("--history-capacity", flags.config.scb.history_capacity,
                  "Context history size for the mean source");
  run->add_flag("--nc-score-own", flags.nc_score_own,
                "Score the noncontextual candidate with its own model");
  run->add_option("--seed", flags.config.master_seed, "Master seed");
  run->add_option("--out", flags.config.output_dir, "Output directory")->required();
  run->add_flag("--no-standardize", flags.no_standardize,
                "Disable z-scoring of numeric features");
  run->add_option("--sampling", flags.sampling, "cycle | iid");
  run->add_flag("--per-step-beta", flags.config.per_step_beta,
                "Update Beta counts per step instead of per batch");
}

int do_run(RunFlags& flags) {
  flags.config.scb.comparator = scb::comparator_from_string(flags.comparator);
  flags.config.scb.nc_source = scb::nc_source_from_string(flags.nc_source);
  flags.config.standardize = !flags.no_standardize;
  flags.config.scb.score_nc_with_contextual = !flags.nc_score_own;
  if (flags.sampling == "cycle") {
    flags.config.sampling = scb::SamplingMode::CycleShuffled;
  } else if (flags.sampling == "iid") {
    flags.config.sampling = scb::SamplingMode::IidWithReplacement;
  } else {
    throw scb::ConfigError("--sampling must be cycle or iid");
  }

  scb::LoadOptions options;
  options.standardize = flags.config.standardize;
  auto dataset = std::make_shared<const scb::Dataset>(scb::load_dataset(
      flags.config.dataset_path, flags.config.label_column, options));

  namespace fs = std::filesystem;
  fs::create_directories(flags.config.output_dir);
  scb::write_dataset_manifest(
      *dataset, (fs::path(flags.config.output_dir) / "dataset_manifest.json").string());

  std::vector<scb::ExperimentResult> results;
  for (const std::string& agent : flags.agents) {
    scb::ExperimentConfig config = flags.config;
    config.agent_spec = agent;
    const scb::ExperimentResult result = scb::run_experiment(config, dataset);
    const std::string out_dir =
        flags.agents.size() == 1
            ? flags.config.output_dir
            : (fs::path(flags.config.output_dir) / agent).string();
    scb::emit_results(result, out_dir);
    std::cout << agent << ": final regret " << result.mean_final_regret << " +/- "
              << result.std_final_regret;
    if (result.mean_noncontextual_fraction) {
      std::cout << ", noncontextual fraction " << *result.mean_noncontextual_fraction;
    }
    std::cout << " (" << result.wall_clock_seconds << "s)\n";
    results.push_back(result);
  }
  if (results.size() > 1) {
    scb::emit_comparison(
        results, (fs::path(flags.config.output_dir) / "comparison.csv").string());
  }
  return 0;
}

struct ReplayFlags {
  std::string log_path;
  std::string policy = "contextual";
  std::string nc_policy = "fixed:0";
  std::string comparator = "ratio";
  double delta = 1.5;
  std::vector<double> delta_sweep;
  double lambda0 = 1.0;
  std::string out;
};

void add_replay_command(CLI::App& app, ReplayFlags& flags) {
  CLI::App* replay = app.add_subcommand("replay", "Off-policy replay evaluation");
  replay->add_option("--log", flags.log_path, "Logged exploration CSV")->required();
  replay->add_option("--policy", flags.policy,
                     "contextual | fixed:<arm> | majority | group-majority:<col> | scb");
  replay->add_option("--nc-policy", flags.nc_policy,
                     "SCB fallback: fixed:<arm> | majority | group-majority:<col>");
  replay->add_option("--comparator", flags.comparator, "ratio | reldiff");
  replay->add_option("--delta", flags.delta, "SCB threshold");
  replay->add_option("--delta-sweep", flags.delta_sweep,
                     "Sweep thresholds (one frozen replay per value)")
      ->delimiter(',');
  replay->add_option("--lambda", flags.lambda0, "Prior scale for the log fit");
  replay->add_option("--out", flags.out, "Output file (JSON report or sweep CSV)");
}

scb::ScbReplayPolicy::Winner make_winner(const std::string& spec,
                                         const scb::ReplayLog& log) {
  if (spec.rfind("fixed:", 0) == 0) {
    const auto arm = static_cast<scb::ArmId>(std::stol(spec.substr(6)));
    if (arm < 0) throw scb::ConfigError("fixed policy arm must be nonnegative");
    return [arm](const scb::LoggedEvent& event) {
      if (arm >= event.candidate_count) {
        throw scb::ConfigError("fixed policy arm outside the candidate set");
      }
      return arm;
    };
  }
  if (spec == "majority") {
    return scb::LogMajorityWinner(log);
  }
  if (spec.rfind("group-majority:", 0) == 0) {
    return scb::LogMajorityWinner(log, spec.substr(15));
  }
  throw scb::ConfigError("unknown noncontextual policy: " + spec);
}

void write_report_json(const scb::ReplayReport& report, const std::string& policy,
                       const std::string& path) {
  nlohmann::json j;
  j["policy"] = policy;
  j["matched_count"] = report.matched_count;
  j["total_count"] = report.total_count;
  j["rate_defined"] = report.rate_defined;
  if (report.rate_defined) {
    j["estimated_rate"] = report.estimated_rate;
    j["standard_error"] = report.standard_error;
  } else {
    j["estimated_rate"] = nullptr;
    j["standard_error"] = nullptr;
  }
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw scb::DataError("replay: cannot write '" + path + "'");
    out << text;
  }
}

int do_replay(const ReplayFlags& flags) {
  const scb::ReplayLog log = scb::read_replay_log(flags.log_path);
  const scb::Comparator comparator = scb::comparator_from_string(flags.comparator);

  if (flags.policy == "scb") {
    const scb::GlmAgent model = scb::fit_glm_from_log(log, flags.lambda0);
    auto scorer = [&model](const scb::Context& x, int k) {
      std::vector<double> scores(static_cast<std::size_t>(k));
      for (int a = 0; a < k; ++a) scores[static_cast<std::size_t>(a)] = model.predict(x, a);
      return scores;
    };
    const scb::ScbReplayPolicy::Winner winner = make_winner(flags.nc_policy, log);
    std::vector<double> deltas = flags.delta_sweep;
    if (deltas.empty()) deltas.push_back(flags.delta);
    const std::vector<scb::SweepPoint> sweep = scb::delta_sweep(
        [&](double delta) {
          return std::make_unique<scb::ScbReplayPolicy>(scorer, winner, comparator,
                                                        delta);
        },
        log, deltas);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!flags.out.empty()) {
      file.open(flags.out, std::ios::binary);
      if (!file) throw scb::DataError("replay: cannot write '" + flags.out + "'");
      out = &file;
    }
    (*out) << "delta,matched_count,total_count,estimated_rate,standard_error,"
              "noncontextual_fraction\n";
    char buf[160];
    for (const scb::SweepPoint& point : sweep) {
      std::snprintf(buf, sizeof(buf), "%.17g,%lld,%lld,%.17g,%.17g,%.17g\n",
                    point.delta, static_cast<long long>(point.report.matched_count),
                    static_cast<long long>(point.report.total_count),
                    point.report.estimated_rate, point.report.standard_error,
                    point.noncontextual_fraction);
      (*out) << buf;
    }
    return 0;
  }

  scb::ReplayReport report;
  if (flags.policy == "contextual") {
    const scb::GlmAgent model = scb::fit_glm_from_log(log, flags.lambda0);
    report = scb::replay_evaluate(
        [&model](const scb::Context& x, int k) {
          scb::ArmId best = 0;
          double best_score = model.predict(x, 0);
          for (scb::ArmId a = 1; a < k; ++a) {
            const double s = model.predict(x, a);
            if (s > best_score) {
              best_score = s;
              best = a;
            }
          }
          return best;
        },
        log);
  } else {
    class WinnerPolicy : public scb::ReplayPolicy {
     public:
      explicit WinnerPolicy(scb::ScbReplayPolicy::Winner w) : winner_(std::move(w)) {}
      scb::ArmId select(const scb::LoggedEvent& event) override { return winner_(event); }

     private:
      scb::ScbReplayPolicy::Winner winner_;
    };
    WinnerPolicy policy(make_winner(flags.policy, log));
    report = scb::replay_evaluate(policy, log);
  }
  write_report_json(report, flags.policy, flags.out);
  return 0;
}

struct GenLogFlags {
  scb::LogGenConfig config;
  std::string out;
  std::string manifest;
};

void add_gen_log_command(CLI::App& app, GenLogFlags& flags) {
  CLI::App* gen = app.add_subcommand("gen-log", "Generate a synthetic uniform log");
  gen->add_option("--events", flags.config.events, "Number of logged events");
  gen->add_option("--arms", flags.config.arms, "Candidate arms per event");
  gen->add_option("--dim", flags.config.dim, "Context dimension");
  gen->add_option("--model", flags.config.model, "independent | linear");
  gen->add_option("--means", flags.config.means, "Per-arm means (independent model)")
      ->delimiter(',');
  gen->add_option("--groups", flags.config.group_count,
                  "Distinct group values (0 = no group column)");
  gen->add_option("--seed", flags.config.seed, "Generator seed");
  gen->add_option("--out", flags.out, "Output log CSV")->required();
  gen->add_option("--manifest", flags.manifest,
                  "Ground-truth manifest path (default: <out>.manifest.json)");
}

int do_gen_log(const GenLogFlags& flags) {
  const scb::GeneratedLog generated = scb::generate_log(flags.config);
  scb::write_replay_log(generated.log, flags.out);
  const std::string manifest =
      flags.manifest.empty() ? flags.out + ".manifest.json" : flags.manifest;
  scb::write_log_manifest(flags.config, generated, manifest);
  std::cout << "wrote " << generated.log.events.size() << " events to " << flags.out
            << " (manifest: " << manifest << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selectively contextual bandit benchmark"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a config file");

  RunFlags run_flags;
  ReplayFlags replay_flags;
  GenLogFlags gen_flags;
  add_run_command(app, run_flags);
  add_replay_command(app, replay_flags);
  add_gen_log_command(app, gen_flags);

  try {
    app.parse(argc, argv);
    if (app.got_subcommand("run")) return do_run(run_flags);
    if (app.got_subcommand("replay")) return do_replay(replay_flags);
    if (app.got_subcommand("gen-log")) return do_gen_log(gen_flags);
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const scb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const scb::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const scb::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const scb::StateError& e) {
    std::cerr << "state error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
