#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "scb/beta_bernoulli.hpp"
#include "scb/glm.hpp"
#include "scb/rng.hpp"
#include "scb/types.hpp"

namespace scb {

enum class Comparator { Ratio, RelativeDifference };
enum class NcSource {
  BetaBernoulliAgent,
  MeanOverHistory,
  FixedDefaultArm,
  GroupMajorityVote,
};

const char* to_string(Comparator c);
const char* to_string(NcSource s);
Comparator comparator_from_string(std::string_view s);
NcSource nc_source_from_string(std::string_view s);

struct ScbConfig {
  double delta = 1.5;
  Comparator comparator = Comparator::Ratio;
  double anneal_rate = 1.0;                  // in (0, 1]; 1.0 = constant delta
  std::vector<std::int64_t> anneal_epochs;   // strictly increasing timesteps
  NcSource nc_source = NcSource::BetaBernoulliAgent;
  ArmId default_arm = 0;                     // FixedDefaultArm source
  int group_feature = -1;                    // GroupMajorityVote; -1 = global vote
  std::size_t history_capacity = 1000;       // MeanOverHistory buffer
  // True (default): both candidates are scored by the contextual policy's
  // selection draw. False: a Beta-Bernoulli source scores its own candidate
  // with its posterior mean instead.
  bool score_nc_with_contextual = true;

  void validate() const;
};

// Bounded FIFO of recently observed contexts for the mean-winner source.
class ContextHistory {
 public:
  explicit ContextHistory(std::size_t capacity = 1000);

  void push(const Context& x);
  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return buffer_.empty(); }
  const std::deque<Context>& contexts() const { return buffer_; }

 private:
  std::size_t capacity_;
  std::deque<Context> buffer_;
};

// r_c / r_nc with the denominator floored at 1e-9. Contextual wins a
// threshold check iff the result strictly exceeds delta.
double compare_ratio(double r_c, double r_nc);

// (r_c - r_nc) / r_nc with the same denominator floor.
double compare_reldiff(double r_c, double r_nc);

// Multiplies delta by the decay rate when t is an anneal epoch, clamped to
// the comparator's neutral threshold (1.0 for ratio, 0.0 for relative
// difference). Returns delta unchanged otherwise.
double anneal(double delta, const ScbConfig& config, std::int64_t t);

// Arm with the highest mean predicted reward across the history. Empty
// history falls back to arm 0 with a warning on stderr.
ArmId mean_noncontextual_winner(
    const std::function<double(const Context&, ArmId)>& predict, int num_arms,
    const ContextHistory& history);
ArmId mean_noncontextual_winner(const GlmAgent& agent, const ContextHistory& history);

// Constant arm from the config; the arm id must be < num_arms.
ArmId fixed_default_winner(const ScbConfig& config, int num_arms);

// Majority-vote state: per-arm positive-reward and play counts, globally and
// per group value (the context entry at a configured feature index).
class GroupMajorityTracker {
 public:
  GroupMajorityTracker(int num_arms, int group_feature = -1);

  void record(const Context& x, ArmId arm, int reward);

  // Winner cascade: most positive-reward events in scope, else most-played in
  // scope, else arm 0. Scope is the query's group when it has been seen,
  // otherwise the global vote. Ties break to the lowest index.
  ArmId winner(const Context& x) const;

  int group_feature() const { return group_feature_; }

 private:
  struct Counts {
    std::vector<std::int64_t> positives;
    std::vector<std::int64_t> plays;
  };
  std::optional<ArmId> winner_in(const Counts& counts) const;

  int num_arms_;
  int group_feature_;
  Counts global_;
  std::map<double, Counts> by_group_;
};

// One-shot form over a recorded reward history.
ArmId group_majority_winner(std::span<const Observation> history, int num_arms,
                            int group_feature, const Context& query);

// The hybrid layer: each step takes the contextual candidate and the
// noncontextual candidate, and keeps the contextual one only when the
// configured comparison of their estimated rewards strictly exceeds the
// current delta. Owns the contextual model; Beta-Bernoulli sources own their
// agent; updates are buffered and folded in at flush() like the constituents.
class ScbPolicy {
 public:
  ScbPolicy(ScbConfig config, GlmAgent contextual,
            std::optional<BetaBernoulliAgent> nc_agent = std::nullopt);

  // Must be called once per timestep t, in order. Annealing for epoch t is
  // applied before the comparison.
  DecisionRecord select(const Context& x, std::int64_t t, RngStream& rng_contextual,
                        RngStream& rng_noncontextual);

  void buffer(const Context& x, ArmId arm, int reward);
  void flush();

  double current_delta() const { return delta_; }
  const ScbConfig& config() const { return config_; }
  const GlmAgent& contextual() const { return contextual_; }
  GlmAgent& mutable_contextual() { return contextual_; }
  const BetaBernoulliAgent* noncontextual_agent() const {
    return nc_agent_ ? &*nc_agent_ : nullptr;
  }

 private:
  ArmId noncontextual_candidate(const Context& x, RngStream& rng_nc);

  ScbConfig config_;
  GlmAgent contextual_;
  std::optional<BetaBernoulliAgent> nc_agent_;
  ContextHistory history_;
  GroupMajorityTracker tracker_;
  std::vector<Observation> pending_votes_;
  std::optional<ArmId> cached_mean_winner_;
  double delta_;
};

}  // namespace scb
