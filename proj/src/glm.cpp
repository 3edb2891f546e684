#include "scb/glm.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace scb {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

GaussianPosterior GaussianPosterior::prior(int dim, double lambda0) {
  if (dim <= 0) throw ConfigError("GaussianPosterior: dim must be positive");
  if (!(lambda0 > 0.0)) throw ConfigError("GaussianPosterior: lambda0 must be positive");
  GaussianPosterior p;
  p.mean = Eigen::VectorXd::Zero(dim);
  p.precision = Eigen::MatrixXd::Identity(dim, dim) / lambda0;
  p.lambda0 = lambda0;
  return p;
}

namespace {

void check_batch(const GaussianPosterior& prior, std::span<const Observation> batch) {
  for (const Observation& obs : batch) {
    if (obs.context.size() != prior.mean.size()) {
      throw DataError("map_estimate: observation dimension mismatch");
    }
    if (obs.reward != 0 && obs.reward != 1) {
      throw DataError("map_estimate: rewards must be 0 or 1");
    }
  }
}

}  // namespace

double log_posterior(const GaussianPosterior& prior, std::span<const Observation> batch,
                     const Eigen::VectorXd& w) {
  const Eigen::VectorXd diff = w - prior.mean;
  double value = -0.5 * diff.dot(prior.precision * diff);
  for (const Observation& obs : batch) {
    const double z = w.dot(obs.context);
    // log s(z) = -softplus(-z), log(1 - s(z)) = -softplus(z)
    value -= obs.reward == 1 ? softplus(-z) : softplus(z);
  }
  return value;
}

Eigen::VectorXd log_posterior_gradient(const GaussianPosterior& prior,
                                       std::span<const Observation> batch,
                                       const Eigen::VectorXd& w) {
  Eigen::VectorXd grad = -(prior.precision * (w - prior.mean));
  for (const Observation& obs : batch) {
    grad += (static_cast<double>(obs.reward) - sigmoid(w.dot(obs.context))) *
            obs.context;
  }
  return grad;
}

MapResult map_estimate(const GaussianPosterior& prior,
                       std::span<const Observation> batch) {
  check_batch(prior, batch);
  constexpr double kGradTol = 1e-8;
  constexpr int kMaxIterations = 100;
  constexpr int kMaxHalvings = 40;

  MapResult result;
  Eigen::VectorXd w = prior.mean;  // warm start at the current posterior mean
  double objective = log_posterior(prior, batch, w);

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const Eigen::VectorXd grad = log_posterior_gradient(prior, batch, w);
    result.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
    result.iterations = iter;
    if (result.grad_inf_norm <= kGradTol) {
      result.converged = true;
      break;
    }

    // Hessian of the negative log-posterior: P + sum s'(z_i) x_i x_i'.
    Eigen::MatrixXd hessian = prior.precision;
    for (const Observation& obs : batch) {
      const double s = sigmoid(w.dot(obs.context));
      hessian.noalias() += (s * (1.0 - s)) * obs.context * obs.context.transpose();
    }
    if (!grad.allFinite() || !hessian.allFinite()) {
      throw SolverError("map_estimate: non-finite gradient or Hessian");
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(hessian);
    if (llt.info() != Eigen::Success) {
      throw SolverError("map_estimate: Newton Hessian factorization failed");
    }
    const Eigen::VectorXd direction = llt.solve(grad);

    // Near the optimum the full step's objective gain drops below floating-
    // point resolution while the gradient still contracts quadratically.
    // Accepting on gradient halving is sound for this strictly concave
    // objective and drives the gradient to machine precision.
    const Eigen::VectorXd full_candidate = w + direction;
    const double full_grad_norm =
        log_posterior_gradient(prior, batch, full_candidate).lpNorm<Eigen::Infinity>();
    if (full_grad_norm < 0.5 * result.grad_inf_norm) {
      w = full_candidate;
      objective = log_posterior(prior, batch, w);
      continue;
    }

    // Otherwise step-halve on the objective, keeping it non-decreasing.
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h) {
      const Eigen::VectorXd candidate = w + step * direction;
      const double cand_objective = log_posterior(prior, batch, candidate);
      if (cand_objective >= objective) {
        w = candidate;
        objective = cand_objective;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stationary up to floating-point resolution
  }

  if (!result.converged) {
    const Eigen::VectorXd grad = log_posterior_gradient(prior, batch, w);
    result.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
    result.converged = result.grad_inf_norm <= kGradTol;
  }
  result.w_map = std::move(w);
  return result;
}

Eigen::MatrixXd laplace_precision_update(const Eigen::MatrixXd& precision_prev,
                                         const Eigen::VectorXd& w_map,
                                         const Context& x) {
  if (x.size() != w_map.size() || precision_prev.rows() != x.size()) {
    throw DataError("laplace_precision_update: dimension mismatch");
  }
  const double s = sigmoid(w_map.dot(x));
  Eigen::MatrixXd next = precision_prev;
  next.noalias() += (s * (1.0 - s)) * x * x.transpose();
  return next;
}

GlmAgent::GlmAgent(int num_arms, int dim, double lambda0, ExplorationKind kind,
                   ExplorationParams params)
    : dim_(dim), lambda0_(lambda0), kind_(kind), params_(params) {
  if (num_arms < 2) throw ConfigError("GlmAgent requires K >= 2");
  arms_.reserve(static_cast<std::size_t>(num_arms));
  for (int a = 0; a < num_arms; ++a) {
    arms_.push_back(Arm{GaussianPosterior::prior(dim, lambda0), {}, std::nullopt});
  }
}

void GlmAgent::check_arm(ArmId arm) const {
  if (arm < 0 || arm >= num_arms()) throw DataError("GlmAgent: arm out of range");
}

void GlmAgent::check_dim(const Context& x) const {
  if (x.size() != dim_) throw ConfigError("GlmAgent: context dimension mismatch");
  if (!x.allFinite()) throw DataError("GlmAgent: context has non-finite entries");
}

const Eigen::LLT<Eigen::MatrixXd>& GlmAgent::cholesky(const Arm& arm) const {
  if (!arm.chol) {
    if (!arm.posterior.precision.allFinite()) {
      throw StateError("GlmAgent: posterior precision has non-finite entries");
    }
    arm.chol.emplace(arm.posterior.precision);
    if (arm.chol->info() != Eigen::Success) {
      throw StateError("GlmAgent: posterior precision is not positive definite");
    }
  }
  return *arm.chol;
}

GlmAgent::Selection GlmAgent::select_scored(const Context& x, ExplorationKind kind,
                                            RngStream* rng) {
  check_dim(x);
  const std::size_t k = arms_.size();
  Selection sel;
  sel.scores.resize(k);

  switch (kind) {
    case ExplorationKind::ThompsonSampling: {
      // Per-arm draw w ~ N(mu, P^-1): with P = L L', solve L' s = z for
      // z ~ N(0, I), giving cov(mu + s) = P^-1. Arms consume draws in index
      // order, d normals each.
      for (std::size_t a = 0; a < k; ++a) {
        const Arm& arm = arms_[a];
        Eigen::VectorXd z(dim_);
        for (int i = 0; i < dim_; ++i) z[i] = rng->normal();
        const Eigen::MatrixXd& l = cholesky(arm).matrixLLT();
        const Eigen::VectorXd sample =
            arm.posterior.mean +
            l.triangularView<Eigen::Lower>().transpose().solve(z);
        sel.scores[a] = sigmoid(sample.dot(x));
      }
      break;
    }
    case ExplorationKind::Ucb: {
      const double alpha = params_.alpha_ucb;
      if (alpha < 0.0) throw ConfigError("GlmAgent: alpha_ucb must be nonnegative");
      for (std::size_t a = 0; a < k; ++a) {
        const Arm& arm = arms_[a];
        // x' P^-1 x = || L^-1 x ||^2.
        const Eigen::MatrixXd& l = cholesky(arm).matrixLLT();
        const Eigen::VectorXd y = l.triangularView<Eigen::Lower>().solve(x);
        const double width = std::sqrt(y.squaredNorm());
        sel.scores[a] = sigmoid(arm.posterior.mean.dot(x) + alpha * width);
      }
      break;
    }
    case ExplorationKind::EpsilonGreedy: {
      for (std::size_t a = 0; a < k; ++a) {
        sel.scores[a] = sigmoid(arms_[a].posterior.mean.dot(x));
      }
      break;
    }
  }

  ArmId best = 0;
  for (std::size_t a = 1; a < k; ++a) {
    if (sel.scores[a] > sel.scores[static_cast<std::size_t>(best)]) {
      best = static_cast<ArmId>(a);
    }
  }
  sel.arm = best;

  if (kind == ExplorationKind::EpsilonGreedy) {
    const double epsilon = params_.epsilon;
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
      throw ConfigError("GlmAgent: epsilon must lie in [0, 1]");
    }
    if (epsilon > 0.0 && rng->uniform() < epsilon) {
      sel.arm = static_cast<ArmId>(rng->uniform_int(static_cast<std::int64_t>(k)));
    }
  }
  return sel;
}

GlmAgent::Selection GlmAgent::select(const Context& x, RngStream& rng) {
  return select_scored(x, kind_, &rng);
}

ArmId GlmAgent::ts_select(const Context& x, RngStream& rng) {
  return select_scored(x, ExplorationKind::ThompsonSampling, &rng).arm;
}

ArmId GlmAgent::ucb_select(const Context& x, double alpha_ucb) {
  ExplorationParams saved = params_;
  params_.alpha_ucb = alpha_ucb;
  Selection sel = select_scored(x, ExplorationKind::Ucb, nullptr);
  params_ = saved;
  return sel.arm;
}

ArmId GlmAgent::eps_greedy_select(const Context& x, double epsilon, RngStream& rng) {
  ExplorationParams saved = params_;
  params_.epsilon = epsilon;
  Selection sel = select_scored(x, ExplorationKind::EpsilonGreedy, &rng);
  params_ = saved;
  return sel.arm;
}

double GlmAgent::predict(const Context& x, ArmId arm) const {
  check_arm(arm);
  check_dim(x);
  return sigmoid(arms_[static_cast<std::size_t>(arm)].posterior.mean.dot(x));
}

void GlmAgent::buffer(const Context& x, ArmId arm, int reward) {
  check_arm(arm);
  check_dim(x);
  if (reward != 0 && reward != 1) throw DataError("GlmAgent: reward must be 0 or 1");
  arms_[static_cast<std::size_t>(arm)].pending.push_back(Observation{x, arm, reward});
}

void GlmAgent::batch_refit() {
  for (std::size_t a = 0; a < arms_.size(); ++a) {
    Arm& arm = arms_[a];
    if (arm.pending.empty()) continue;
    try {
      MapResult fit = map_estimate(arm.posterior, arm.pending);
      Eigen::MatrixXd precision = arm.posterior.precision;
      for (const Observation& obs : arm.pending) {
        precision = laplace_precision_update(precision, fit.w_map, obs.context);
      }
      // Rank-one accumulation can drift off symmetric; restore it exactly.
      precision = 0.5 * (precision + precision.transpose()).eval();
      arm.posterior.mean = std::move(fit.w_map);
      arm.posterior.precision = std::move(precision);
      arm.pending.clear();
      arm.chol.reset();
    } catch (const SolverError& e) {
      throw SolverError("arm " + std::to_string(a) + ": " + e.what());
    }
  }
}

const GaussianPosterior& GlmAgent::posterior(ArmId arm) const {
  check_arm(arm);
  return arms_[static_cast<std::size_t>(arm)].posterior;
}

GaussianPosterior& GlmAgent::mutable_posterior(ArmId arm) {
  check_arm(arm);
  Arm& a = arms_[static_cast<std::size_t>(arm)];
  a.chol.reset();
  return a.posterior;
}

std::size_t GlmAgent::buffered_count(ArmId arm) const {
  check_arm(arm);
  return arms_[static_cast<std::size_t>(arm)].pending.size();
}

void GlmAgent::save_checkpoint(std::ostream& out) const {
  char buf[64];
  out << "d,K,lambda\n";
  std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", dim_, num_arms(), lambda0_);
  out << buf;
  for (std::size_t a = 0; a < arms_.size(); ++a) {
    const Arm& arm = arms_[a];
    out << "arm," << a << "\n";
    out << "mean";
    for (int i = 0; i < dim_; ++i) {
      std::snprintf(buf, sizeof(buf), ",%.17g", arm.posterior.mean[i]);
      out << buf;
    }
    out << "\n";
    const Eigen::MatrixXd l = cholesky(arm).matrixL();
    for (int r = 0; r < dim_; ++r) {
      out << "chol";
      for (int c = 0; c <= r; ++c) {
        std::snprintf(buf, sizeof(buf), ",%.17g", l(r, c));
        out << buf;
      }
      out << "\n";
    }
  }
}

void GlmAgent::load_checkpoint(std::istream& in) {
  auto next_line = [&in](std::string& line) {
    if (!std::getline(in, line)) throw DataError("GLM checkpoint: truncated");
  };
  std::string line;
  next_line(line);
  if (line != "d,K,lambda") throw DataError("GLM checkpoint: missing header");
  next_line(line);
  std::istringstream head(line);
  std::string cell;
  std::getline(head, cell, ',');
  const int d = std::stoi(cell);
  std::getline(head, cell, ',');
  const int k = std::stoi(cell);
  std::getline(head, cell, ',');
  const double lambda = std::stod(cell);
  if (d != dim_ || k != num_arms()) {
    throw DataError("GLM checkpoint: shape mismatch");
  }
  lambda0_ = lambda;

  for (int a = 0; a < k; ++a) {
    next_line(line);
    if (line.rfind("arm,", 0) != 0) throw DataError("GLM checkpoint: bad arm marker");
    next_line(line);
    std::istringstream mean_row(line);
    std::getline(mean_row, cell, ',');
    if (cell != "mean") throw DataError("GLM checkpoint: bad mean row");
    Eigen::VectorXd mean(d);
    for (int i = 0; i < d; ++i) {
      if (!std::getline(mean_row, cell, ',')) throw DataError("GLM checkpoint: bad mean row");
      mean[i] = std::stod(cell);
    }
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, d);
    for (int r = 0; r < d; ++r) {
      next_line(line);
      std::istringstream chol_row(line);
      std::getline(chol_row, cell, ',');
      if (cell != "chol") throw DataError("GLM checkpoint: bad factor row");
      for (int c = 0; c <= r; ++c) {
        if (!std::getline(chol_row, cell, ',')) {
          throw DataError("GLM checkpoint: bad factor row");
        }
        l(r, c) = std::stod(cell);
      }
    }
    Arm& arm = arms_[static_cast<std::size_t>(a)];
    arm.posterior.mean = std::move(mean);
    arm.posterior.precision = l * l.transpose();
    arm.posterior.lambda0 = lambda;
    arm.pending.clear();
    arm.chol.reset();
  }
}

}  // namespace scb
