#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scb/glm.hpp"
#include "scb/rng.hpp"
#include "scb/scb.hpp"
#include "scb/types.hpp"

namespace scb {

// One event from a uniformly-randomized logging policy.
struct LoggedEvent {
  Context context;
  ArmId logged_arm = 0;
  int reward = 0;
  int candidate_count = 0;  // arms available when the event was logged
  std::vector<std::string> group_values;  // aligned with ReplayLog::group_columns
};

struct ReplayLog {
  int dim = 0;
  std::vector<std::string> group_columns;
  std::vector<LoggedEvent> events;
};

struct ReplayReport {
  std::int64_t matched_count = 0;
  std::int64_t total_count = 0;
  bool rate_defined = false;  // false when no event matched
  double estimated_rate = 0.0;
  double standard_error = 0.0;
};

// Policy under offline evaluation. select() sees the full event (context,
// candidate count, group attributes); observe() is only invoked on matched
// events when learning replay is enabled.
class ReplayPolicy {
 public:
  virtual ~ReplayPolicy() = default;
  virtual ArmId select(const LoggedEvent& event) = 0;
  virtual void observe(const LoggedEvent& /*event*/) {}
};

// Replays the log in order. An event is matched iff the policy picks the
// logged arm; the estimated rate is the mean reward over matched events with
// a normal-approximation standard error. The policy is frozen unless
// update_on_match is set.
ReplayReport replay_evaluate(ReplayPolicy& policy, const ReplayLog& log,
                             bool update_on_match = false);
ReplayReport replay_evaluate(const std::function<ArmId(const Context&, int)>& policy,
                             const ReplayLog& log);

// Frozen hybrid policy for threshold sweeps: a deterministic contextual
// scorer against a noncontextual winner rule, compared at a fixed delta.
// Tracks the provenance mix across all evaluated events.
class ScbReplayPolicy : public ReplayPolicy {
 public:
  using Scorer = std::function<std::vector<double>(const Context&, int)>;
  using Winner = std::function<ArmId(const LoggedEvent&)>;

  ScbReplayPolicy(Scorer contextual_scores, Winner noncontextual_winner,
                  Comparator comparator, double delta);

  ArmId select(const LoggedEvent& event) override;

  std::int64_t decisions() const { return decisions_; }
  double noncontextual_fraction() const;

 private:
  Scorer scorer_;
  Winner winner_;
  Comparator comparator_;
  double delta_;
  std::int64_t decisions_ = 0;
  std::int64_t noncontextual_ = 0;
};

struct SweepPoint {
  double delta = 0.0;
  ReplayReport report;
  double noncontextual_fraction = 0.0;
};

// One frozen replay per delta; the estimated-rate column is the take-rate
// curve over the threshold sweep.
std::vector<SweepPoint> delta_sweep(
    const std::function<std::unique_ptr<ScbReplayPolicy>(double)>& policy_factory,
    const ReplayLog& log, std::span<const double> deltas);

// Log CSV format: t, feature_0..feature_{d-1}, logged_arm, reward,
// candidate_count, then any group columns.
ReplayLog read_replay_log(const std::string& path);
void write_replay_log(const ReplayLog& log, const std::string& path);

// Synthetic uniform-logging generator with a recorded ground truth.
struct LogGenConfig {
  std::int64_t events = 10000;
  int arms = 5;
  int dim = 5;
  // "independent": context-free Bernoulli(means[a]) rewards.
  // "linear": rewards ~ Bernoulli(sigmoid(w_a . x)); weights are drawn from
  // the generator seed unless given explicitly.
  std::string model = "independent";
  std::vector<double> means;                 // independent model; defaults to spread values
  std::vector<std::vector<double>> weights;  // linear model; one row per arm
  int group_count = 0;                       // adds one categorical group column when > 0
  std::uint64_t seed = 0;
};

struct GeneratedLog {
  ReplayLog log;
  // Ground truth: per-arm means (independent) or weight rows (linear).
  std::vector<double> arm_means;
  std::vector<std::vector<double>> weights;
};

GeneratedLog generate_log(const LogGenConfig& config);
void write_log_manifest(const LogGenConfig& config, const GeneratedLog& generated,
                        const std::string& path);

// One-pass disjoint logistic fit over the log: each arm's posterior is
// refit from the events where it was the logged action. Returns a frozen
// model for offline policies. The arm count is the largest candidate set.
GlmAgent fit_glm_from_log(const ReplayLog& log, double lambda0);

// Majority-vote winners computed from the log itself: most positive-reward
// events, else most-played, else arm 0; per group value when a group column
// is named, with unseen groups falling back to the global vote.
class LogMajorityWinner {
 public:
  LogMajorityWinner(const ReplayLog& log, const std::string& group_column = "");
  ArmId operator()(const LoggedEvent& event) const;

 private:
  struct Counts {
    std::vector<std::int64_t> positives;
    std::vector<std::int64_t> plays;
  };
  std::optional<ArmId> winner_in(const Counts& counts) const;

  int num_arms_ = 0;
  int group_index_ = -1;  // index into LoggedEvent::group_values
  Counts global_;
  std::map<std::string, Counts> by_group_;
};

}  // namespace scb
