#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "scb/beta_bernoulli.hpp"
#include "scb/rng.hpp"
#include "scb/types.hpp"

namespace scb {

/// Numerically stable logistic function 1 / (1 + exp(-z)).
double sigmoid(double z);

/// log(1 + exp(z)) without overflow; log-likelihood building block.
double softplus(double z);

// Gaussian belief over one arm's weight vector, stored as (mean, precision).
// The precision is kept symmetric and positive definite; with no observations
// it equals (1/lambda0) * I and the mean is zero (prior covariance
// lambda0 * I).
struct GaussianPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd precision;
  double lambda0 = 1.0;

  static GaussianPosterior prior(int dim, double lambda0);

  int dim() const { return static_cast<int>(mean.size()); }
};

struct MapResult {
  Eigen::VectorXd w_map;
  bool converged = false;
  int iterations = 0;
  double grad_inf_norm = 0.0;
};

// Regularized Bernoulli log-posterior for one arm's weights:
//   -(1/2)(w - mu)' P (w - mu) + sum_i [ r_i log s(w'x_i) + (1-r_i) log(1 - s(w'x_i)) ]
// Exposed for gradient checks.
double log_posterior(const GaussianPosterior& prior, std::span<const Observation> batch,
                     const Eigen::VectorXd& w);
Eigen::VectorXd log_posterior_gradient(const GaussianPosterior& prior,
                                       std::span<const Observation> batch,
                                       const Eigen::VectorXd& w);

// MAP estimate of the log-posterior above by Newton iteration with
// step-halving, warm-started at the prior mean. Terminates when the gradient
// infinity norm drops to 1e-8 or after 100 iterations (converged flag).
MapResult map_estimate(const GaussianPosterior& prior,
                       std::span<const Observation> batch);

// Rank-one curvature update of the precision at the MAP point:
//   P_next = P_prev + s(w'x)(1 - s(w'x)) x x'
// Applied once per observation of a refit batch.
Eigen::MatrixXd laplace_precision_update(const Eigen::MatrixXd& precision_prev,
                                         const Eigen::VectorXd& w_map,
                                         const Context& x);

// Contextual bandit over disjoint per-arm Bayesian logistic models sharing
// the raw context. Selection never mutates state; observations are buffered
// per arm and folded into the posteriors by batch_refit().
class GlmAgent {
 public:
  GlmAgent(int num_arms, int dim, double lambda0, ExplorationKind kind,
           ExplorationParams params = {});

  struct Selection {
    ArmId arm = 0;
    // Per-arm reward estimates from the same draw that picked `arm`:
    // sampled sigmoids for TS, UCB scores for UCB, posterior-mean sigmoids
    // for epsilon-greedy. The hybrid layer compares candidates on these.
    std::vector<double> scores;
  };

  Selection select(const Context& x, RngStream& rng);

  ArmId ts_select(const Context& x, RngStream& rng);
  ArmId ucb_select(const Context& x, double alpha_ucb);
  ArmId eps_greedy_select(const Context& x, double epsilon, RngStream& rng);

  /// Deterministic expected-reward estimate at the posterior mean.
  double predict(const Context& x, ArmId arm) const;

  void buffer(const Context& x, ArmId arm, int reward);

  /// Folds each arm's buffered observations into its posterior: MAP refit
  /// seeded at the current posterior, then one rank-one precision update per
  /// observation. Buffers are cleared.
  void batch_refit();

  int num_arms() const { return static_cast<int>(arms_.size()); }
  int dim() const { return dim_; }
  double lambda0() const { return lambda0_; }
  ExplorationKind kind() const { return kind_; }

  const GaussianPosterior& posterior(ArmId arm) const;
  GaussianPosterior& mutable_posterior(ArmId arm);  // invalidates cached factor
  std::size_t buffered_count(ArmId arm) const;

  // Checkpoint: header with d, K, lambda0; per arm the mean vector and the
  // lower-triangular Cholesky factor of the precision.
  void save_checkpoint(std::ostream& out) const;
  void load_checkpoint(std::istream& in);

 private:
  struct Arm {
    GaussianPosterior posterior;
    std::vector<Observation> pending;
    mutable std::optional<Eigen::LLT<Eigen::MatrixXd>> chol;  // of precision
  };

  const Eigen::LLT<Eigen::MatrixXd>& cholesky(const Arm& arm) const;
  Selection select_scored(const Context& x, ExplorationKind kind, RngStream* rng);
  void check_arm(ArmId arm) const;
  void check_dim(const Context& x) const;

  std::vector<Arm> arms_;
  int dim_;
  double lambda0_;
  ExplorationKind kind_;
  ExplorationParams params_;
};

}  // namespace scb
