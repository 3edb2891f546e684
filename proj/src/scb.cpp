#include "scb/scb.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

namespace scb {

namespace {
// Floor for the comparison denominator; predictions near zero would otherwise
// blow up the ratio.
constexpr double kDenominatorFloor = 1e-9;
}  // namespace

const char* to_string(Comparator c) {
  return c == Comparator::Ratio ? "ratio" : "reldiff";
}

const char* to_string(NcSource s) {
  switch (s) {
    case NcSource::BetaBernoulliAgent:
      return "beta-bernoulli";
    case NcSource::MeanOverHistory:
      return "mean-history";
    case NcSource::FixedDefaultArm:
      return "fixed-default";
    case NcSource::GroupMajorityVote:
      return "group-majority";
  }
  return "unknown";
}

Comparator comparator_from_string(std::string_view s) {
  if (s == "ratio") return Comparator::Ratio;
  if (s == "reldiff" || s == "relative-difference" || s == "diff") {
    return Comparator::RelativeDifference;
  }
  throw ConfigError("unknown comparator: " + std::string(s));
}

NcSource nc_source_from_string(std::string_view s) {
  if (s == "beta-bernoulli") return NcSource::BetaBernoulliAgent;
  if (s == "mean-history") return NcSource::MeanOverHistory;
  if (s == "fixed-default") return NcSource::FixedDefaultArm;
  if (s == "group-majority") return NcSource::GroupMajorityVote;
  throw ConfigError("unknown noncontextual source: " + std::string(s));
}

void ScbConfig::validate() const {
  if (!std::isfinite(delta) || delta < 0.0) {
    throw ConfigError("scb: delta must be finite and nonnegative");
  }
  if (!(anneal_rate > 0.0 && anneal_rate <= 1.0)) {
    throw ConfigError("scb: anneal rate must lie in (0, 1]");
  }
  for (std::size_t i = 1; i < anneal_epochs.size(); ++i) {
    if (anneal_epochs[i] <= anneal_epochs[i - 1]) {
      throw ConfigError("scb: anneal epochs must be strictly increasing");
    }
  }
  if (history_capacity == 0) {
    throw ConfigError("scb: history capacity must be positive");
  }
  if (group_feature < -1) {
    throw ConfigError("scb: group feature index must be >= -1");
  }
}

ContextHistory::ContextHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("ContextHistory: capacity must be positive");
}

void ContextHistory::push(const Context& x) {
  if (buffer_.size() == capacity_) buffer_.pop_front();
  buffer_.push_back(x);
}

double compare_ratio(double r_c, double r_nc) {
  return r_c / std::max(r_nc, kDenominatorFloor);
}

double compare_reldiff(double r_c, double r_nc) {
  const double floored = std::max(r_nc, kDenominatorFloor);
  return (r_c - floored) / floored;
}

double anneal(double delta, const ScbConfig& config, std::int64_t t) {
  if (!std::binary_search(config.anneal_epochs.begin(), config.anneal_epochs.end(), t)) {
    return delta;
  }
  const double floor = config.comparator == Comparator::Ratio ? 1.0 : 0.0;
  return std::max(delta * config.anneal_rate, floor);
}

ArmId mean_noncontextual_winner(
    const std::function<double(const Context&, ArmId)>& predict, int num_arms,
    const ContextHistory& history) {
  if (history.empty()) {
    std::cerr << "scb: mean winner requested with empty context history; "
                 "falling back to arm 0\n";
    return 0;
  }
  ArmId best = 0;
  double best_mean = -1.0;
  for (ArmId a = 0; a < num_arms; ++a) {
    double sum = 0.0;
    for (const Context& x : history.contexts()) sum += predict(x, a);
    const double mean = sum / static_cast<double>(history.size());
    if (mean > best_mean) {
      best_mean = mean;
      best = a;
    }
  }
  return best;
}

ArmId mean_noncontextual_winner(const GlmAgent& agent, const ContextHistory& history) {
  return mean_noncontextual_winner(
      [&agent](const Context& x, ArmId a) { return agent.predict(x, a); },
      agent.num_arms(), history);
}

ArmId fixed_default_winner(const ScbConfig& config, int num_arms) {
  if (config.default_arm < 0 || config.default_arm >= num_arms) {
    throw ConfigError("scb: default arm out of range");
  }
  return config.default_arm;
}

GroupMajorityTracker::GroupMajorityTracker(int num_arms, int group_feature)
    : num_arms_(num_arms), group_feature_(group_feature) {
  if (num_arms < 2) throw ConfigError("GroupMajorityTracker requires K >= 2");
  global_.positives.assign(static_cast<std::size_t>(num_arms), 0);
  global_.plays.assign(static_cast<std::size_t>(num_arms), 0);
}

void GroupMajorityTracker::record(const Context& x, ArmId arm, int reward) {
  if (arm < 0 || arm >= num_arms_) throw DataError("majority vote: arm out of range");
  const auto idx = static_cast<std::size_t>(arm);
  global_.plays[idx] += 1;
  global_.positives[idx] += reward == 1 ? 1 : 0;
  if (group_feature_ >= 0) {
    if (group_feature_ >= x.size()) {
      throw ConfigError("majority vote: group feature index out of range");
    }
    auto [it, inserted] = by_group_.try_emplace(x[group_feature_]);
    if (inserted) {
      it->second.positives.assign(static_cast<std::size_t>(num_arms_), 0);
      it->second.plays.assign(static_cast<std::size_t>(num_arms_), 0);
    }
    it->second.plays[idx] += 1;
    it->second.positives[idx] += reward == 1 ? 1 : 0;
  }
}

std::optional<ArmId> GroupMajorityTracker::winner_in(const Counts& counts) const {
  auto argmax_positive = [this](const std::vector<std::int64_t>& v) -> std::optional<ArmId> {
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
  if (auto arm = argmax_positive(counts.positives)) return arm;
  return argmax_positive(counts.plays);
}

ArmId GroupMajorityTracker::winner(const Context& x) const {
  if (group_feature_ >= 0 && group_feature_ < x.size()) {
    auto it = by_group_.find(x[group_feature_]);
    if (it != by_group_.end()) {
      if (auto arm = winner_in(it->second)) return *arm;
    }
    // Unseen or empty group: global vote.
  }
  if (auto arm = winner_in(global_)) return *arm;
  return 0;
}

ArmId group_majority_winner(std::span<const Observation> history, int num_arms,
                            int group_feature, const Context& query) {
  GroupMajorityTracker tracker(num_arms, group_feature);
  for (const Observation& obs : history) {
    tracker.record(obs.context, obs.arm, obs.reward);
  }
  return tracker.winner(query);
}

ScbPolicy::ScbPolicy(ScbConfig config, GlmAgent contextual,
                     std::optional<BetaBernoulliAgent> nc_agent)
    : config_(std::move(config)),
      contextual_(std::move(contextual)),
      nc_agent_(std::move(nc_agent)),
      history_(config_.history_capacity),
      tracker_(contextual_.num_arms(), config_.group_feature),
      delta_(config_.delta) {
  config_.validate();
  if (config_.nc_source == NcSource::BetaBernoulliAgent) {
    if (!nc_agent_) {
      throw ConfigError("scb: Beta-Bernoulli source requires a noncontextual agent");
    }
    if (nc_agent_->num_arms() != contextual_.num_arms()) {
      throw ConfigError("scb: constituent agents disagree on the number of arms");
    }
  }
  if (config_.nc_source == NcSource::FixedDefaultArm) {
    fixed_default_winner(config_, contextual_.num_arms());  // validates the arm id
  }
  if (config_.nc_source == NcSource::GroupMajorityVote &&
      config_.group_feature >= contextual_.dim()) {
    throw ConfigError("scb: group feature index out of range");
  }
}

ArmId ScbPolicy::noncontextual_candidate(const Context& x, RngStream& rng_nc) {
  switch (config_.nc_source) {
    case NcSource::BetaBernoulliAgent:
      return nc_agent_->select(rng_nc);
    case NcSource::MeanOverHistory:
      // Recomputed once per batch; predictions only change at refits.
      if (!cached_mean_winner_) {
        cached_mean_winner_ = mean_noncontextual_winner(contextual_, history_);
      }
      return *cached_mean_winner_;
    case NcSource::FixedDefaultArm:
      return config_.default_arm;
    case NcSource::GroupMajorityVote:
      return tracker_.winner(x);
  }
  throw ConfigError("scb: unknown noncontextual source");
}

DecisionRecord ScbPolicy::select(const Context& x, std::int64_t t,
                                 RngStream& rng_contextual, RngStream& rng_noncontextual) {
  delta_ = anneal(delta_, config_, t);

  const GlmAgent::Selection contextual_sel = contextual_.select(x, rng_contextual);
  const ArmId a_c = contextual_sel.arm;
  const ArmId a_nc = noncontextual_candidate(x, rng_noncontextual);

  if (config_.nc_source == NcSource::MeanOverHistory) history_.push(x);

  DecisionRecord rec;
  rec.t = t;
  rec.contextual_arm = a_c;
  rec.noncontextual_arm = a_nc;

  if (a_c == a_nc) {
    // Agreement short-circuit: the comparator is never evaluated.
    rec.final_arm = a_c;
    rec.provenance = Provenance::Agreement;
    rec.pred_contextual = contextual_sel.scores[static_cast<std::size_t>(a_c)];
    rec.pred_noncontextual = rec.pred_contextual;
    return rec;
  }

  rec.pred_contextual = contextual_sel.scores[static_cast<std::size_t>(a_c)];
  if (!config_.score_nc_with_contextual &&
      config_.nc_source == NcSource::BetaBernoulliAgent) {
    rec.pred_noncontextual =
        nc_agent_->states()[static_cast<std::size_t>(a_nc)].mean();
  } else {
    rec.pred_noncontextual = contextual_sel.scores[static_cast<std::size_t>(a_nc)];
  }

  const double comparison =
      config_.comparator == Comparator::Ratio
          ? compare_ratio(rec.pred_contextual, rec.pred_noncontextual)
          : compare_reldiff(rec.pred_contextual, rec.pred_noncontextual);
  if (comparison > delta_) {
    rec.final_arm = a_c;
    rec.provenance = Provenance::Contextual;
  } else {
    // Ties favor the shared (noncontextual) decision.
    rec.final_arm = a_nc;
    rec.provenance = Provenance::Noncontextual;
  }
  return rec;
}

void ScbPolicy::buffer(const Context& x, ArmId arm, int reward) {
  contextual_.buffer(x, arm, reward);
  if (config_.nc_source == NcSource::BetaBernoulliAgent) {
    nc_agent_->buffer(arm, reward);
  } else if (config_.nc_source == NcSource::GroupMajorityVote) {
    pending_votes_.push_back(Observation{x, arm, reward});
  }
}

void ScbPolicy::flush() {
  contextual_.batch_refit();
  if (nc_agent_) nc_agent_->flush();
  for (const Observation& obs : pending_votes_) {
    tracker_.record(obs.context, obs.arm, obs.reward);
  }
  pending_votes_.clear();
  cached_mean_winner_.reset();
}

}  // namespace scb
