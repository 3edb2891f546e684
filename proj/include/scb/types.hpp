#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>

#include <Eigen/Dense>

namespace scb {

// Arm index in [0, K). K >= 2 for every agent and environment.
using ArmId = std::int32_t;

// Dense feature vector of fixed dimension d within one experiment.
using Context = Eigen::VectorXd;

// One bandit interaction: the context shown, the arm played, the binary
// reward observed for that arm only.
struct Observation {
  Context context;
  ArmId arm = 0;
  int reward = 0;  // 0 or 1
};

// Which constituent policy produced the final arm of a hybrid decision.
// Agreement iff both candidates named the same arm.
enum class Provenance { Contextual, Noncontextual, Agreement };

const char* to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

// Per-timestep audit record of a hybrid (contextual vs noncontextual)
// decision. final_arm is always one of the two candidates.
struct DecisionRecord {
  std::int64_t t = 0;
  ArmId contextual_arm = 0;
  ArmId noncontextual_arm = 0;
  double pred_contextual = 0.0;     // estimated reward of contextual_arm
  double pred_noncontextual = 0.0;  // estimated reward of noncontextual_arm
  ArmId final_arm = 0;
  Provenance provenance = Provenance::Agreement;
};

// Exploration strategy shared by the contextual and noncontextual agents.
enum class ExplorationKind { ThompsonSampling, Ucb, EpsilonGreedy };

const char* to_string(ExplorationKind k);

// Error categories. The CLI maps these onto distinct exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Corrupt agent state (non-finite parameters, failed factorization).
struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Misuse of a stateful call protocol (e.g. reward() called twice per step).
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace scb
