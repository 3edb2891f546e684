#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "scb/beta_bernoulli.hpp"
#include "scb/env.hpp"
#include "scb/glm.hpp"
#include "scb/harness.hpp"
#include "scb/metrics.hpp"
#include "scb/replay.hpp"
#include "scb/rng.hpp"
#include "scb/scb.hpp"

namespace py = pybind11;

namespace {

void bind_core(py::module_& m) {
  py::register_exception<scb::ConfigError>(m, "ConfigError");
  py::register_exception<scb::DataError>(m, "DataError");
  py::register_exception<scb::SolverError>(m, "SolverError");
  py::register_exception<scb::StateError>(m, "StateError");
  py::register_exception<scb::ProtocolError>(m, "ProtocolError");

  py::enum_<scb::Provenance>(m, "Provenance")
      .value("Contextual", scb::Provenance::Contextual)
      .value("Noncontextual", scb::Provenance::Noncontextual)
      .value("Agreement", scb::Provenance::Agreement);

  py::enum_<scb::ExplorationKind>(m, "ExplorationKind")
      .value("ThompsonSampling", scb::ExplorationKind::ThompsonSampling)
      .value("Ucb", scb::ExplorationKind::Ucb)
      .value("EpsilonGreedy", scb::ExplorationKind::EpsilonGreedy);

  py::class_<scb::DecisionRecord>(m, "DecisionRecord")
      .def(py::init<>())
      .def_readwrite("t", &scb::DecisionRecord::t)
      .def_readwrite("contextual_arm", &scb::DecisionRecord::contextual_arm)
      .def_readwrite("noncontextual_arm", &scb::DecisionRecord::noncontextual_arm)
      .def_readwrite("pred_contextual", &scb::DecisionRecord::pred_contextual)
      .def_readwrite("pred_noncontextual", &scb::DecisionRecord::pred_noncontextual)
      .def_readwrite("final_arm", &scb::DecisionRecord::final_arm)
      .def_readwrite("provenance", &scb::DecisionRecord::provenance)
      .def("__repr__", [](const scb::DecisionRecord& r) {
        std::ostringstream ss;
        ss << "DecisionRecord(t=" << r.t << ", final_arm=" << r.final_arm << ", "
           << scb::to_string(r.provenance) << ")";
        return ss.str();
      });

  py::class_<scb::RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def_static("for_run", &scb::RngStream::for_run, py::arg("master_seed"),
                  py::arg("run_index"))
      .def("seed", &scb::RngStream::seed)
      .def("next_u64", &scb::RngStream::next_u64)
      .def("uniform", &scb::RngStream::uniform)
      .def("uniform_int", &scb::RngStream::uniform_int, py::arg("n"))
      .def("normal", &scb::RngStream::normal)
      .def("gamma", &scb::RngStream::gamma, py::arg("shape"))
      .def("beta", &scb::RngStream::beta, py::arg("a"), py::arg("b"));
  m.def("derive_seed", &scb::derive_seed, py::arg("master"), py::arg("index"));

  m.def("normalized_cumulative_regret", [](const std::vector<int>& rewards) {
    return scb::normalized_cumulative_regret(rewards);
  });
  m.def("regret_curve",
        [](const std::vector<int>& rewards) { return scb::regret_curve(rewards); });
  m.def("noncontextual_fraction", [](const std::vector<scb::DecisionRecord>& records) {
    return scb::noncontextual_fraction(records);
  });
}

void bind_agents(py::module_& m) {
  py::class_<scb::ExplorationParams>(m, "ExplorationParams")
      .def(py::init<>())
      .def_readwrite("epsilon", &scb::ExplorationParams::epsilon)
      .def_readwrite("ucb_c", &scb::ExplorationParams::ucb_c)
      .def_readwrite("alpha_ucb", &scb::ExplorationParams::alpha_ucb);

  py::class_<scb::BetaArmState>(m, "BetaArmState")
      .def(py::init<>())
      .def_readwrite("alpha", &scb::BetaArmState::alpha)
      .def_readwrite("beta", &scb::BetaArmState::beta)
      .def("mean", &scb::BetaArmState::mean)
      .def("variance", &scb::BetaArmState::variance);
  m.def("beta_updated", &scb::updated, py::arg("state"), py::arg("reward"));
  m.def("beta_ts_select", [](const std::vector<scb::BetaArmState>& states,
                             scb::RngStream& rng) { return scb::ts_select(states, rng); });
  m.def("beta_ucb_select", [](const std::vector<scb::BetaArmState>& states, double c) {
    return scb::ucb_select(states, c);
  });
  m.def("beta_eps_greedy_select",
        [](const std::vector<scb::BetaArmState>& states, double eps,
           scb::RngStream& rng) { return scb::eps_greedy_select(states, eps, rng); });

  py::class_<scb::BetaBernoulliAgent>(m, "BetaBernoulliAgent")
      .def(py::init<int, scb::ExplorationKind, scb::ExplorationParams>(),
           py::arg("num_arms"), py::arg("kind"),
           py::arg("params") = scb::ExplorationParams{})
      .def("select", &scb::BetaBernoulliAgent::select)
      .def("update_now", &scb::BetaBernoulliAgent::update_now)
      .def("buffer", &scb::BetaBernoulliAgent::buffer)
      .def("flush", &scb::BetaBernoulliAgent::flush)
      .def("num_arms", &scb::BetaBernoulliAgent::num_arms)
      .def("states", [](const scb::BetaBernoulliAgent& agent) {
        return std::vector<scb::BetaArmState>(agent.states().begin(),
                                              agent.states().end());
      });

  m.def("sigmoid", &scb::sigmoid, py::arg("z"));

  py::class_<scb::GaussianPosterior>(m, "GaussianPosterior")
      .def_static("prior", &scb::GaussianPosterior::prior, py::arg("dim"),
                  py::arg("lambda0"))
      .def_readwrite("mean", &scb::GaussianPosterior::mean)
      .def_readwrite("precision", &scb::GaussianPosterior::precision)
      .def_readonly("lambda0", &scb::GaussianPosterior::lambda0);

  m.def(
      "map_estimate",
      [](const scb::GaussianPosterior& prior,
         const std::vector<std::pair<Eigen::VectorXd, int>>& batch) {
        std::vector<scb::Observation> observations;
        observations.reserve(batch.size());
        for (const auto& [x, r] : batch) {
          observations.push_back(scb::Observation{x, 0, r});
        }
        const scb::MapResult fit = scb::map_estimate(prior, observations);
        return py::make_tuple(fit.w_map, fit.converged, fit.iterations,
                              fit.grad_inf_norm);
      },
      py::arg("prior"), py::arg("batch"),
      "MAP weights for one arm's (context, reward) batch; returns "
      "(w_map, converged, iterations, grad_inf_norm).");
  m.def("laplace_precision_update", &scb::laplace_precision_update,
        py::arg("precision_prev"), py::arg("w_map"), py::arg("x"));

  py::class_<scb::GlmAgent::Selection>(m, "GlmSelection")
      .def_readonly("arm", &scb::GlmAgent::Selection::arm)
      .def_readonly("scores", &scb::GlmAgent::Selection::scores);

  py::class_<scb::GlmAgent>(m, "GlmAgent")
      .def(py::init<int, int, double, scb::ExplorationKind, scb::ExplorationParams>(),
           py::arg("num_arms"), py::arg("dim"), py::arg("lambda0"), py::arg("kind"),
           py::arg("params") = scb::ExplorationParams{})
      .def("select", &scb::GlmAgent::select, py::arg("x"), py::arg("rng"))
      .def("ts_select", &scb::GlmAgent::ts_select, py::arg("x"), py::arg("rng"))
      .def("ucb_select", &scb::GlmAgent::ucb_select, py::arg("x"), py::arg("alpha_ucb"))
      .def("eps_greedy_select", &scb::GlmAgent::eps_greedy_select, py::arg("x"),
           py::arg("epsilon"), py::arg("rng"))
      .def("predict", &scb::GlmAgent::predict, py::arg("x"), py::arg("arm"))
      .def("buffer", &scb::GlmAgent::buffer, py::arg("x"), py::arg("arm"),
           py::arg("reward"))
      .def("batch_refit", &scb::GlmAgent::batch_refit)
      .def("num_arms", &scb::GlmAgent::num_arms)
      .def("dim", &scb::GlmAgent::dim)
      .def("posterior", &scb::GlmAgent::posterior, py::arg("arm"),
           py::return_value_policy::reference_internal)
      .def("mutable_posterior", &scb::GlmAgent::mutable_posterior, py::arg("arm"),
           py::return_value_policy::reference_internal)
      .def("checkpoint",
           [](const scb::GlmAgent& agent) {
             std::ostringstream ss;
             agent.save_checkpoint(ss);
             return ss.str();
           })
      .def("load_checkpoint", [](scb::GlmAgent& agent, const std::string& text) {
        std::istringstream ss(text);
        agent.load_checkpoint(ss);
      });
}

void bind_scb(py::module_& m) {
  py::enum_<scb::Comparator>(m, "Comparator")
      .value("Ratio", scb::Comparator::Ratio)
      .value("RelativeDifference", scb::Comparator::RelativeDifference);

  py::enum_<scb::NcSource>(m, "NcSource")
      .value("BetaBernoulliAgent", scb::NcSource::BetaBernoulliAgent)
      .value("MeanOverHistory", scb::NcSource::MeanOverHistory)
      .value("FixedDefaultArm", scb::NcSource::FixedDefaultArm)
      .value("GroupMajorityVote", scb::NcSource::GroupMajorityVote);

  py::class_<scb::ScbConfig>(m, "ScbConfig")
      .def(py::init<>())
      .def_readwrite("delta", &scb::ScbConfig::delta)
      .def_readwrite("comparator", &scb::ScbConfig::comparator)
      .def_readwrite("anneal_rate", &scb::ScbConfig::anneal_rate)
      .def_readwrite("anneal_epochs", &scb::ScbConfig::anneal_epochs)
      .def_readwrite("nc_source", &scb::ScbConfig::nc_source)
      .def_readwrite("default_arm", &scb::ScbConfig::default_arm)
      .def_readwrite("group_feature", &scb::ScbConfig::group_feature)
      .def_readwrite("history_capacity", &scb::ScbConfig::history_capacity)
      .def_readwrite("score_nc_with_contextual",
                     &scb::ScbConfig::score_nc_with_contextual)
      .def("validate", &scb::ScbConfig::validate);

  m.def("compare_ratio", &scb::compare_ratio, py::arg("r_c"), py::arg("r_nc"));
  m.def("compare_reldiff", &scb::compare_reldiff, py::arg("r_c"), py::arg("r_nc"));
  m.def("anneal", &scb::anneal, py::arg("delta"), py::arg("config"), py::arg("t"));

  py::class_<scb::ScbPolicy>(m, "ScbPolicy")
      .def(py::init([](const scb::ScbConfig& config, const scb::GlmAgent& contextual,
                       std::optional<scb::BetaBernoulliAgent> nc_agent) {
             return scb::ScbPolicy(config, contextual, std::move(nc_agent));
           }),
           py::arg("config"), py::arg("contextual"),
           py::arg("nc_agent") = std::nullopt)
      .def("select", &scb::ScbPolicy::select, py::arg("x"), py::arg("t"),
           py::arg("rng_contextual"), py::arg("rng_noncontextual"))
      .def("buffer", &scb::ScbPolicy::buffer)
      .def("flush", &scb::ScbPolicy::flush)
      .def("current_delta", &scb::ScbPolicy::current_delta);
}

void bind_env(py::module_& m) {
  py::class_<scb::LoadOptions>(m, "LoadOptions")
      .def(py::init<>())
      .def_readwrite("standardize", &scb::LoadOptions::standardize);

  py::class_<scb::Dataset, std::shared_ptr<scb::Dataset>>(m, "Dataset")
      .def_readonly("contexts", &scb::Dataset::contexts)
      .def_readonly("labels", &scb::Dataset::labels)
      .def_readonly("num_classes", &scb::Dataset::num_classes)
      .def_readonly("feature_names", &scb::Dataset::feature_names)
      .def_readonly("label_mapping", &scb::Dataset::label_mapping)
      .def_readonly("dropped_rows", &scb::Dataset::dropped_rows)
      .def("dim", &scb::Dataset::dim)
      .def("size", &scb::Dataset::size);

  m.def(
      "load_dataset",
      [](const std::string& path, const std::string& label_column,
         const scb::LoadOptions& options) {
        return std::make_shared<scb::Dataset>(
            scb::load_dataset(path, label_column, options));
      },
      py::arg("path"), py::arg("label_column"),
      py::arg("options") = scb::LoadOptions{});

  py::enum_<scb::SamplingMode>(m, "SamplingMode")
      .value("CycleShuffled", scb::SamplingMode::CycleShuffled)
      .value("IidWithReplacement", scb::SamplingMode::IidWithReplacement);

  py::class_<scb::BanditEnv>(m, "BanditEnv")
      .def(py::init([](std::shared_ptr<scb::Dataset> dataset, std::int64_t horizon,
                       std::uint64_t seed, scb::SamplingMode mode) {
             return scb::BanditEnv(std::move(dataset), horizon, scb::RngStream(seed),
                                   mode);
           }),
           py::arg("dataset"), py::arg("horizon"), py::arg("seed"),
           py::arg("mode") = scb::SamplingMode::CycleShuffled)
      .def("step", &scb::BanditEnv::step)
      .def("reward", &scb::BanditEnv::reward, py::arg("arm"))
      .def("horizon", &scb::BanditEnv::horizon)
      .def("t", &scb::BanditEnv::t)
      .def("done", &scb::BanditEnv::done);
}

void bind_replay(py::module_& m) {
  py::class_<scb::LoggedEvent>(m, "LoggedEvent")
      .def(py::init<>())
      .def_readwrite("context", &scb::LoggedEvent::context)
      .def_readwrite("logged_arm", &scb::LoggedEvent::logged_arm)
      .def_readwrite("reward", &scb::LoggedEvent::reward)
      .def_readwrite("candidate_count", &scb::LoggedEvent::candidate_count)
      .def_readwrite("group_values", &scb::LoggedEvent::group_values);

  py::class_<scb::ReplayLog>(m, "ReplayLog")
      .def(py::init<>())
      .def_readwrite("dim", &scb::ReplayLog::dim)
      .def_readwrite("group_columns", &scb::ReplayLog::group_columns)
      .def_readwrite("events", &scb::ReplayLog::events);

  py::class_<scb::ReplayReport>(m, "ReplayReport")
      .def_readonly("matched_count", &scb::ReplayReport::matched_count)
      .def_readonly("total_count", &scb::ReplayReport::total_count)
      .def_readonly("rate_defined", &scb::ReplayReport::rate_defined)
      .def_readonly("estimated_rate", &scb::ReplayReport::estimated_rate)
      .def_readonly("standard_error", &scb::ReplayReport::standard_error);

  m.def(
      "replay_evaluate",
      [](const std::function<scb::ArmId(const scb::Context&, int)>& policy,
         const scb::ReplayLog& log) { return scb::replay_evaluate(policy, log); },
      py::arg("policy"), py::arg("log"),
      "Frozen-policy replay: policy(context, candidate_count) -> arm.");

  py::class_<scb::SweepPoint>(m, "SweepPoint")
      .def_readonly("delta", &scb::SweepPoint::delta)
      .def_readonly("report", &scb::SweepPoint::report)
      .def_readonly("noncontextual_fraction", &scb::SweepPoint::noncontextual_fraction);

  m.def(
      "scb_delta_sweep",
      [](const std::function<std::vector<double>(const scb::Context&, int)>& scorer,
         const std::function<scb::ArmId(const scb::Context&, int)>& nc_winner,
         scb::Comparator comparator, const scb::ReplayLog& log,
         const std::vector<double>& deltas) {
        return scb::delta_sweep(
            [&](double delta) {
              return std::make_unique<scb::ScbReplayPolicy>(
                  scorer,
                  [&nc_winner](const scb::LoggedEvent& event) {
                    return nc_winner(event.context, event.candidate_count);
                  },
                  comparator, delta);
            },
            log, deltas);
      },
      py::arg("contextual_scores"), py::arg("nc_winner"), py::arg("comparator"),
      py::arg("log"), py::arg("deltas"),
      "Frozen SCB threshold sweep over a uniform log.");

  py::class_<scb::LogGenConfig>(m, "LogGenConfig")
      .def(py::init<>())
      .def_readwrite("events", &scb::LogGenConfig::events)
      .def_readwrite("arms", &scb::LogGenConfig::arms)
      .def_readwrite("dim", &scb::LogGenConfig::dim)
      .def_readwrite("model", &scb::LogGenConfig::model)
      .def_readwrite("means", &scb::LogGenConfig::means)
      .def_readwrite("weights", &scb::LogGenConfig::weights)
      .def_readwrite("group_count", &scb::LogGenConfig::group_count)
      .def_readwrite("seed", &scb::LogGenConfig::seed);

  m.def("generate_log", [](const scb::LogGenConfig& config) {
    scb::GeneratedLog generated = scb::generate_log(config);
    return py::make_tuple(generated.log, generated.arm_means, generated.weights);
  });
  m.def("read_replay_log", &scb::read_replay_log, py::arg("path"));
  m.def("write_replay_log", &scb::write_replay_log, py::arg("log"), py::arg("path"));
  m.def("fit_glm_from_log", &scb::fit_glm_from_log, py::arg("log"), py::arg("lambda0"));
}

void bind_harness(py::module_& m) {
  py::class_<scb::ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("dataset_path", &scb::ExperimentConfig::dataset_path)
      .def_readwrite("label_column", &scb::ExperimentConfig::label_column)
      .def_readwrite("agent_spec", &scb::ExperimentConfig::agent_spec)
      .def_readwrite("runs", &scb::ExperimentConfig::runs)
      .def_readwrite("horizon", &scb::ExperimentConfig::horizon)
      .def_readwrite("batch_size", &scb::ExperimentConfig::batch_size)
      .def_readwrite("epsilon", &scb::ExperimentConfig::epsilon)
      .def_readwrite("ucb_c", &scb::ExperimentConfig::ucb_c)
      .def_readwrite("alpha_ucb", &scb::ExperimentConfig::alpha_ucb)
      .def_readwrite("lambda0", &scb::ExperimentConfig::lambda0)
      .def_readwrite("scb", &scb::ExperimentConfig::scb)
      .def_readwrite("master_seed", &scb::ExperimentConfig::master_seed)
      .def_readwrite("output_dir", &scb::ExperimentConfig::output_dir)
      .def_readwrite("standardize", &scb::ExperimentConfig::standardize)
      .def_readwrite("sampling", &scb::ExperimentConfig::sampling)
      .def_readwrite("per_step_beta", &scb::ExperimentConfig::per_step_beta)
      .def("validate", &scb::ExperimentConfig::validate);

  py::class_<scb::RunResult>(m, "RunResult")
      .def_readonly("run_index", &scb::RunResult::run_index)
      .def_readonly("seed", &scb::RunResult::seed)
      .def_readonly("arms", &scb::RunResult::arms)
      .def_readonly("rewards", &scb::RunResult::rewards)
      .def_readonly("decisions", &scb::RunResult::decisions)
      .def_readonly("delta_trace", &scb::RunResult::delta_trace)
      .def_readonly("final_regret", &scb::RunResult::final_regret)
      .def_readonly("noncontextual_frac", &scb::RunResult::noncontextual_frac);

  py::class_<scb::ExperimentResult>(m, "ExperimentResult")
      .def_readonly("runs", &scb::ExperimentResult::runs)
      .def_readonly("failed_runs", &scb::ExperimentResult::failed_runs)
      .def_readonly("mean_regret_curve", &scb::ExperimentResult::mean_regret_curve)
      .def_readonly("std_regret_curve", &scb::ExperimentResult::std_regret_curve)
      .def_readonly("mean_final_regret", &scb::ExperimentResult::mean_final_regret)
      .def_readonly("std_final_regret", &scb::ExperimentResult::std_final_regret)
      .def_readonly("mean_noncontextual_fraction",
                    &scb::ExperimentResult::mean_noncontextual_fraction)
      .def_readonly("wall_clock_seconds", &scb::ExperimentResult::wall_clock_seconds);

  m.def("roster", [] { return scb::roster(); });
  m.def("run_experiment",
        py::overload_cast<const scb::ExperimentConfig&>(&scb::run_experiment),
        py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_experiment_on",
      [](const scb::ExperimentConfig& config, std::shared_ptr<scb::Dataset> dataset) {
        return scb::run_experiment(config, std::move(dataset));
      },
      py::arg("config"), py::arg("dataset"), py::call_guard<py::gil_scoped_release>());
  m.def("emit_results", &scb::emit_results, py::arg("result"), py::arg("output_dir"));
}

}  // namespace

PYBIND11_MODULE(_scbandits, m) {
  m.doc() = "Selectively contextual bandits: agents, environments, replay evaluation.";
  bind_core(m);
  bind_agents(m);
  bind_scb(m);
  bind_env(m);
  bind_replay(m);
  bind_harness(m);
  m.attr("__version__") = "0.1.0";
}
