#include "scb/beta_bernoulli.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace scb {

namespace {

void check_states(std::span<const BetaArmState> states) {
  if (states.size() < 2) {
    throw ConfigError("arm selection requires at least 2 arms");
  }
  for (const BetaArmState& s : states) {
    if (!std::isfinite(s.alpha) || !std::isfinite(s.beta) || s.alpha <= 0.0 ||
        s.beta <= 0.0) {
      throw StateError("Beta arm state has non-finite or non-positive parameters");
    }
  }
}

template <typename ScoreFn>
ArmId argmax_arm(std::size_t n, ScoreFn&& score) {
  ArmId best = 0;
  double best_score = score(0);
  for (std::size_t a = 1; a < n; ++a) {
    const double s = score(a);
    if (s > best_score) {  // strict: ties keep the lowest index
      best_score = s;
      best = static_cast<ArmId>(a);
    }
  }
  return best;
}

}  // namespace

double BetaArmState::stddev() const { return std::sqrt(variance()); }

BetaArmState updated(BetaArmState state, int reward) {
  if (reward != 0 && reward != 1) {
    throw DataError("Beta update: reward must be 0 or 1");
  }
  if (reward == 1) {
    state.alpha += 1.0;
  } else {
    state.beta += 1.0;
  }
  return state;
}

ArmId ts_select(std::span<const BetaArmState> states, RngStream& rng) {
  check_states(states);
  std::vector<double> draws(states.size());
  for (std::size_t a = 0; a < states.size(); ++a) {
    draws[a] = rng.beta(states[a].alpha, states[a].beta);
  }
  return argmax_arm(states.size(), [&](std::size_t a) { return draws[a]; });
}

ArmId ucb_select(std::span<const BetaArmState> states, double c) {
  check_states(states);
  if (c < 0.0) throw ConfigError("ucb_select: c must be nonnegative");
  return argmax_arm(states.size(), [&](std::size_t a) {
    return states[a].mean() + c * states[a].stddev();
  });
}

ArmId eps_greedy_select(std::span<const BetaArmState> states, double epsilon,
                        RngStream& rng) {
  check_states(states);
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError("eps_greedy_select: epsilon must lie in [0, 1]");
  }
  // Coin first; the uniform arm index is only drawn on the explore branch.
  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    return static_cast<ArmId>(rng.uniform_int(static_cast<std::int64_t>(states.size())));
  }
  return argmax_arm(states.size(), [&](std::size_t a) { return states[a].mean(); });
}

BetaBernoulliAgent::BetaBernoulliAgent(int num_arms, ExplorationKind kind,
                                       ExplorationParams params)
    : kind_(kind), params_(params) {
  if (num_arms < 2) throw ConfigError("BetaBernoulliAgent requires K >= 2");
  states_.assign(static_cast<std::size_t>(num_arms), BetaArmState{});
}

ArmId BetaBernoulliAgent::select(RngStream& rng) {
  switch (kind_) {
    case ExplorationKind::ThompsonSampling:
      return ts_select(states_, rng);
    case ExplorationKind::Ucb:
      return ucb_select(states_, params_.ucb_c);
    case ExplorationKind::EpsilonGreedy:
      return eps_greedy_select(states_, params_.epsilon, rng);
  }
  throw ConfigError("unknown exploration kind");
}

void BetaBernoulliAgent::update_now(ArmId arm, int reward) {
  states_.at(static_cast<std::size_t>(arm)) =
      updated(states_[static_cast<std::size_t>(arm)], reward);
}

void BetaBernoulliAgent::buffer(ArmId arm, int reward) {
  if (arm < 0 || arm >= num_arms()) throw DataError("buffer: arm out of range");
  if (reward != 0 && reward != 1) throw DataError("buffer: reward must be 0 or 1");
  pending_.emplace_back(arm, reward);
}

void BetaBernoulliAgent::flush() {
  for (const auto& [arm, reward] : pending_) update_now(arm, reward);
  pending_.clear();
}

void BetaBernoulliAgent::save_snapshot(std::ostream& out) const {
  out << "arm,alpha,beta\n";
  char buf[96];
  for (std::size_t a = 0; a < states_.size(); ++a) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", a, states_[a].alpha,
                  states_[a].beta);
    out << buf;
  }
}

void BetaBernoulliAgent::load_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("arm,alpha,beta", 0) != 0) {
    throw DataError("Beta snapshot: missing header");
  }
  std::vector<BetaArmState> states;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    BetaArmState s;
    std::getline(row, cell, ',');  // arm index; order is the arm id
    if (!std::getline(row, cell, ',')) throw DataError("Beta snapshot: bad row");
    s.alpha = std::stod(cell);
    if (!std::getline(row, cell, ',')) throw DataError("Beta snapshot: bad row");
    s.beta = std::stod(cell);
    states.push_back(s);
  }
  if (states.size() < 2) throw DataError("Beta snapshot: fewer than 2 arms");
  states_ = std::move(states);
  pending_.clear();
}

}  // namespace scb
