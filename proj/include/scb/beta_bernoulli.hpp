#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "scb/rng.hpp"
#include "scb/types.hpp"

namespace scb {

// Beta(alpha, beta) belief over one arm's Bernoulli mean. Defaults to the
// uniform Beta(1, 1) prior; parameters only ever grow by reward counting.
struct BetaArmState {
  double alpha = 1.0;
  double beta = 1.0;

  double mean() const { return alpha / (alpha + beta); }
  double variance() const {
    const double s = alpha + beta;
    return alpha * beta / (s * s * (s + 1.0));
  }
  double stddev() const;
};

// Conjugate update: reward 1 increments alpha, reward 0 increments beta.
BetaArmState updated(BetaArmState state, int reward);

// Thompson sampling: draw theta_a ~ Beta(alpha_a, beta_a) per arm, play the
// argmax. Ties break to the lowest arm index. Requires K >= 2 finite states.
ArmId ts_select(std::span<const BetaArmState> states, RngStream& rng);

// Bayes-UCB style score: posterior mean + c posterior standard deviations.
// Deterministic; ties to the lowest index. Requires c > 0 permitted as c >= 0
// (c = 0 degenerates to pure exploitation, used in tests).
ArmId ucb_select(std::span<const BetaArmState> states, double c);

// With probability 1 - epsilon play the arm with the highest posterior mean;
// otherwise play a uniformly random arm (the greedy arm included).
ArmId eps_greedy_select(std::span<const BetaArmState> states, double epsilon,
                        RngStream& rng);

// Exploration hyperparameters shared by the agent wrappers.
struct ExplorationParams {
  double epsilon = 0.2;    // epsilon-greedy mix weight
  double ucb_c = 1.0;      // Beta-arm UCB: mean + c * std
  double alpha_ucb = 1.0;  // GLM UCB width multiplier
};

// K-armed Bernoulli bandit agent. Updates may be applied immediately
// (update_now) or buffered and applied at batch boundaries (buffer + flush),
// matching the batched experiment protocol.
class BetaBernoulliAgent {
 public:
  BetaBernoulliAgent(int num_arms, ExplorationKind kind,
                     ExplorationParams params = {});

  ArmId select(RngStream& rng);

  void update_now(ArmId arm, int reward);
  void buffer(ArmId arm, int reward);
  void flush();

  int num_arms() const { return static_cast<int>(states_.size()); }
  std::span<const BetaArmState> states() const { return states_; }
  ExplorationKind kind() const { return kind_; }

  // Snapshot of (arm, alpha, beta) rows for checkpoint/resume.
  void save_snapshot(std::ostream& out) const;
  void load_snapshot(std::istream& in);

 private:
  std::vector<BetaArmState> states_;
  std::vector<std::pair<ArmId, int>> pending_;
  ExplorationKind kind_;
  ExplorationParams params_;
};

}  // namespace scb
