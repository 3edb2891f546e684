#include "scb/replay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scb/glm.hpp"

namespace scb {

ReplayReport replay_evaluate(ReplayPolicy& policy, const ReplayLog& log,
                             bool update_on_match) {
  if (log.events.empty()) throw DataError("replay: log must be non-empty");
  ReplayReport report;
  report.total_count = static_cast<std::int64_t>(log.events.size());
  std::int64_t reward_sum = 0;
  for (const LoggedEvent& event : log.events) {
    const ArmId chosen = policy.select(event);
    if (chosen != event.logged_arm) continue;
    ++report.matched_count;
    reward_sum += event.reward;
    if (update_on_match) policy.observe(event);
  }
  if (report.matched_count > 0) {
    report.rate_defined = true;
    report.estimated_rate =
        static_cast<double>(reward_sum) / static_cast<double>(report.matched_count);
    report.standard_error =
        std::sqrt(report.estimated_rate * (1.0 - report.estimated_rate) /
                  static_cast<double>(report.matched_count));
  }
  return report;
}

namespace {

class FunctionPolicy : public ReplayPolicy {
 public:
  explicit FunctionPolicy(const std::function<ArmId(const Context&, int)>& fn)
      : fn_(fn) {}
  ArmId select(const LoggedEvent& event) override {
    return fn_(event.context, event.candidate_count);
  }

 private:
  const std::function<ArmId(const Context&, int)>& fn_;
};

}  // namespace

ReplayReport replay_evaluate(const std::function<ArmId(const Context&, int)>& policy,
                             const ReplayLog& log) {
  FunctionPolicy wrapper(policy);
  return replay_evaluate(wrapper, log);
}

ScbReplayPolicy::ScbReplayPolicy(Scorer contextual_scores, Winner noncontextual_winner,
                                 Comparator comparator, double delta)
    : scorer_(std::move(contextual_scores)),
      winner_(std::move(noncontextual_winner)),
      comparator_(comparator),
      delta_(delta) {}

ArmId ScbReplayPolicy::select(const LoggedEvent& event) {
  const std::vector<double> scores = scorer_(event.context, event.candidate_count);
  ArmId a_c = 0;
  for (std::size_t a = 1; a < scores.size(); ++a) {
    if (scores[a] > scores[static_cast<std::size_t>(a_c)]) a_c = static_cast<ArmId>(a);
  }
  const ArmId a_nc = winner_(event);
  ++decisions_;
  if (a_c == a_nc) return a_c;
  const double pred_c = scores[static_cast<std::size_t>(a_c)];
  const double pred_nc = scores[static_cast<std::size_t>(a_nc)];
  const double comparison = comparator_ == Comparator::Ratio
                                ? compare_ratio(pred_c, pred_nc)
                                : compare_reldiff(pred_c, pred_nc);
  if (comparison > delta_) return a_c;
  ++noncontextual_;
  return a_nc;
}

double ScbReplayPolicy::noncontextual_fraction() const {
  if (decisions_ == 0) return 0.0;
  return static_cast<double>(noncontextual_) / static_cast<double>(decisions_);
}

std::vector<SweepPoint> delta_sweep(
    const std::function<std::unique_ptr<ScbReplayPolicy>(double)>& policy_factory,
    const ReplayLog& log, std::span<const double> deltas) {
  if (deltas.empty()) throw ConfigError("delta_sweep: deltas must be non-empty");
  std::vector<SweepPoint> points;
  points.reserve(deltas.size());
  for (double delta : deltas) {
    std::unique_ptr<ScbReplayPolicy> policy = policy_factory(delta);
    SweepPoint point;
    point.delta = delta;
    point.report = replay_evaluate(*policy, log);
    point.noncontextual_fraction = policy->noncontextual_fraction();
    points.push_back(std::move(point));
  }
  return points;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

ReplayLog read_replay_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("replay log: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("replay log: empty file");
  const std::vector<std::string> header = split_line(line);

  // Layout: t, feature_*, logged_arm, reward, candidate_count, group...
  int dim = 0;
  while (dim + 1 < static_cast<int>(header.size()) &&
         header[static_cast<std::size_t>(dim + 1)].rfind("feature_", 0) == 0) {
    ++dim;
  }
  const std::size_t arm_col = static_cast<std::size_t>(1 + dim);
  if (header.size() < arm_col + 3 || header[arm_col] != "logged_arm" ||
      header[arm_col + 1] != "reward" || header[arm_col + 2] != "candidate_count") {
    throw DataError("replay log: unexpected header layout");
  }

  ReplayLog log;
  log.dim = dim;
  for (std::size_t c = arm_col + 3; c < header.size(); ++c) {
    log.group_columns.push_back(header[c]);
  }

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) throw DataError("replay log: ragged row");
    LoggedEvent event;
    event.context = Context(dim);
    for (int i = 0; i < dim; ++i) {
      event.context[i] = std::stod(cells[static_cast<std::size_t>(1 + i)]);
    }
    event.logged_arm = static_cast<ArmId>(std::stol(cells[arm_col]));
    event.reward = std::stoi(cells[arm_col + 1]);
    event.candidate_count = std::stoi(cells[arm_col + 2]);
    if (event.logged_arm < 0 || event.logged_arm >= event.candidate_count) {
      throw DataError("replay log: logged arm outside the candidate set");
    }
    if (event.reward != 0 && event.reward != 1) {
      throw DataError("replay log: rewards must be 0 or 1");
    }
    for (std::size_t c = arm_col + 3; c < cells.size(); ++c) {
      event.group_values.push_back(cells[c]);
    }
    log.events.push_back(std::move(event));
  }
  return log;
}

void write_replay_log(const ReplayLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("replay log: cannot write '" + path + "'");
  out << "t";
  for (int i = 0; i < log.dim; ++i) out << ",feature_" << i;
  out << ",logged_arm,reward,candidate_count";
  for (const std::string& g : log.group_columns) out << "," << g;
  out << "\n";
  char buf[32];
  for (std::size_t t = 0; t < log.events.size(); ++t) {
    const LoggedEvent& event = log.events[t];
    out << t;
    for (int i = 0; i < log.dim; ++i) {
      std::snprintf(buf, sizeof(buf), ",%.17g", event.context[i]);
      out << buf;
    }
    out << "," << event.logged_arm << "," << event.reward << ","
        << event.candidate_count;
    for (const std::string& g : event.group_values) out << "," << g;
    out << "\n";
  }
}

GeneratedLog generate_log(const LogGenConfig& config) {
  if (config.events <= 0) throw ConfigError("gen-log: events must be positive");
  if (config.arms < 2) throw ConfigError("gen-log: need at least 2 arms");
  if (config.dim <= 0) throw ConfigError("gen-log: dim must be positive");
  if (config.model != "independent" && config.model != "linear") {
    throw ConfigError("gen-log: model must be 'independent' or 'linear'");
  }

  RngStream rng(config.seed);
  GeneratedLog out;
  out.log.dim = config.dim;
  if (config.group_count > 0) out.log.group_columns.push_back("group");

  if (config.model == "independent") {
    out.arm_means = config.means;
    if (out.arm_means.empty()) {
      // Evenly spread means in [0.1, 0.9].
      for (int a = 0; a < config.arms; ++a) {
        out.arm_means.push_back(0.1 + 0.8 * static_cast<double>(a) /
                                          static_cast<double>(config.arms - 1));
      }
    }
    if (static_cast<int>(out.arm_means.size()) != config.arms) {
      throw ConfigError("gen-log: means must list one value per arm");
    }
    for (double m : out.arm_means) {
      if (!(m >= 0.0 && m <= 1.0)) throw ConfigError("gen-log: means must lie in [0, 1]");
    }
  } else if (!config.weights.empty()) {
    if (static_cast<int>(config.weights.size()) != config.arms) {
      throw ConfigError("gen-log: weights must list one row per arm");
    }
    for (const auto& row : config.weights) {
      if (static_cast<int>(row.size()) != config.dim) {
        throw ConfigError("gen-log: weight rows must have length dim");
      }
    }
    out.weights = config.weights;
  } else {
    out.weights.assign(static_cast<std::size_t>(config.arms),
                       std::vector<double>(static_cast<std::size_t>(config.dim)));
    for (auto& row : out.weights) {
      for (double& w : row) w = rng.normal();
    }
  }

  out.log.events.reserve(static_cast<std::size_t>(config.events));
  for (std::int64_t t = 0; t < config.events; ++t) {
    LoggedEvent event;
    event.context = Context(config.dim);
    for (int i = 0; i < config.dim; ++i) event.context[i] = rng.normal();
    event.candidate_count = config.arms;
    event.logged_arm = static_cast<ArmId>(rng.uniform_int(config.arms));
    double p;
    if (config.model == "independent") {
      p = out.arm_means[static_cast<std::size_t>(event.logged_arm)];
    } else {
      const auto& w = out.weights[static_cast<std::size_t>(event.logged_arm)];
      double z = 0.0;
      for (int i = 0; i < config.dim; ++i) z += w[static_cast<std::size_t>(i)] * event.context[i];
      p = sigmoid(z);
    }
    event.reward = rng.uniform() < p ? 1 : 0;
    if (config.group_count > 0) {
      event.group_values.push_back(
          "g" + std::to_string(rng.uniform_int(config.group_count)));
    }
    out.log.events.push_back(std::move(event));
  }
  return out;
}

GlmAgent fit_glm_from_log(const ReplayLog& log, double lambda0) {
  if (log.events.empty()) throw DataError("fit: log must be non-empty");
  int num_arms = 0;
  for (const LoggedEvent& event : log.events) {
    num_arms = std::max(num_arms, event.candidate_count);
  }
  GlmAgent agent(num_arms, log.dim, lambda0, ExplorationKind::ThompsonSampling);
  for (const LoggedEvent& event : log.events) {
    agent.buffer(event.context, event.logged_arm, event.reward);
  }
  agent.batch_refit();
  return agent;
}

LogMajorityWinner::LogMajorityWinner(const ReplayLog& log,
                                     const std::string& group_column) {
  for (const LoggedEvent& event : log.events) {
    num_arms_ = std::max(num_arms_, event.candidate_count);
  }
  if (num_arms_ < 2) throw DataError("majority: log needs at least 2 arms");
  if (!group_column.empty()) {
    for (std::size_t i = 0; i < log.group_columns.size(); ++i) {
      if (log.group_columns[i] == group_column) {
        group_index_ = static_cast<int>(i);
        break;
      }
    }
    if (group_index_ < 0) {
      throw ConfigError("majority: group column '" + group_column +
                        "' not present in the log");
    }
  }
  const auto arms = static_cast<std::size_t>(num_arms_);
  global_.positives.assign(arms, 0);
  global_.plays.assign(arms, 0);
  for (const LoggedEvent& event : log.events) {
    const auto idx = static_cast<std::size_t>(event.logged_arm);
    global_.plays[idx] += 1;
    global_.positives[idx] += event.reward == 1 ? 1 : 0;
    if (group_index_ >= 0) {
      const std::string& key =
          event.group_values.at(static_cast<std::size_t>(group_index_));
      auto [it, inserted] = by_group_.try_emplace(key);
      if (inserted) {
        it->second.positives.assign(arms, 0);
        it->second.plays.assign(arms, 0);
      }
      it->second.plays[idx] += 1;
      it->second.positives[idx] += event.reward == 1 ? 1 : 0;
    }
  }
}

std::optional<ArmId> LogMajorityWinner::winner_in(const Counts& counts) const {
  auto argmax_nonzero = [this](const std::vector<std::int64_t>& v) -> std::optional<ArmId> {
    ArmId best = 0;
    std::int64_t best_count = 0;
    for (ArmId a = 0; a < num_arms_; ++a) {
      if (v[static_cast<std::size_t>(a)] > best_count) {
        best_count = v[static_cast<std::size_t>(a)];
        best = a;
      }
    }
    if (best_count == 0) return std::nullopt;
    return best;
  };
  if (auto arm = argmax_nonzero(counts.positives)) return arm;
  return argmax_nonzero(counts.plays);
}

ArmId LogMajorityWinner::operator()(const LoggedEvent& event) const {
  if (group_index_ >= 0 &&
      static_cast<std::size_t>(group_index_) < event.group_values.size()) {
    auto it = by_group_.find(event.group_values[static_cast<std::size_t>(group_index_)]);
    if (it != by_group_.end()) {
      if (auto arm = winner_in(it->second)) return *arm;
    }
  }
  if (auto arm = winner_in(global_)) return *arm;
  return 0;
}

void write_log_manifest(const LogGenConfig& config, const GeneratedLog& generated,
                        const std::string& path) {
  nlohmann::json j;
  j["events"] = config.events;
  j["arms"] = config.arms;
  j["dim"] = config.dim;
  j["model"] = config.model;
  j["seed"] = config.seed;
  j["group_count"] = config.group_count;
  if (!generated.arm_means.empty()) j["arm_means"] = generated.arm_means;
  if (!generated.weights.empty()) j["weights"] = generated.weights;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("gen-log: cannot write manifest '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace scb
