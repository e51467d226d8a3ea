#pragma once

// Per-objective ridge regression over a shared Gram matrix, with the
// self-normalized confidence radius and closed-form optimistic indices.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace blend {

using ContextVector = Eigen::VectorXd;
using FeedbackVector = Eigen::VectorXd;

struct EstimatorConfig {
  std::size_t dim = 2;
  std::size_t objectives = 2;
  double lambda = 1.0;   // ridge regularizer
  double sigma = 0.1;    // subgaussian noise scale
  double S = 1.5;        // bound on ||theta_*||_2
  double L = 1.0;        // bound on ||psi||_2
  double delta = 0.1;    // confidence level

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// beta_t = sigma * sqrt(d log((1 + t L^2 / lambda) / delta)) + sqrt(lambda) S
double confidence_radius(const EstimatorConfig& config, std::uint64_t t);

/// Direct dense ridge solve (Psi^T Psi + lambda I)^{-1} Psi^T y, where the
/// rows of `contexts` are the Psi_s^T. With no rows the result is zero.
Eigen::VectorXd batch_solve(const Eigen::MatrixXd& contexts, const Eigen::VectorXd& targets,
                            double lambda);
Eigen::VectorXd batch_solve(std::span<const ContextVector> contexts,
                            std::span<const double> targets, double lambda, std::size_t dim);

class LinearEstimator {
 public:
  /// Residual ||V V^{-1} - I||_max above which the inverse is rebuilt.
  static constexpr double kInverseDriftTolerance = 1e-6;
  /// Unconditional rebuild cadence, in updates.
  static constexpr std::uint64_t kRefactorInterval = 1000;

  explicit LinearEstimator(const EstimatorConfig& config);

  /// Absorbs one observation. A context longer than L is counted in
  /// norm_bound_violations() but still used unchanged.
  void update(const ContextVector& psi, const FeedbackVector& y);

  double beta() const { return confidence_radius(config_, t_); }
  double inv_norm(const ContextVector& psi) const;
  double ucb_index(const ContextVector& psi, std::size_t objective) const;
  /// Optimistic index for every objective at once.
  Eigen::VectorXd ucb_vector(const ContextVector& psi) const;

  /// ||theta_hat_i - theta||_{V_t}
  double gram_distance(std::size_t objective, const Eigen::VectorXd& theta) const;

  const EstimatorConfig& config() const { return config_; }
  std::uint64_t steps() const { return t_; }
  const Eigen::MatrixXd& gram() const { return V_; }
  const Eigen::MatrixXd& gram_inverse() const { return V_inv_; }
  const Eigen::VectorXd& moment(std::size_t objective) const { return W_.at(objective); }
  const Eigen::VectorXd& theta_hat(std::size_t objective) const { return theta_.at(objective); }
  std::uint64_t norm_bound_violations() const { return norm_violations_; }
  std::uint64_t refactorizations() const { return refactorizations_; }

  /// Versioned JSON snapshot of V, W and t. V_inv and theta_hat are rebuilt on load.
  void save(std::ostream& out) const;
  static LinearEstimator load(std::istream& in, const EstimatorConfig& config);

 private:
  void check_context(const ContextVector& psi) const;
  void refactor();
  void refresh_theta();

  EstimatorConfig config_;
  Eigen::MatrixXd V_;
  Eigen::MatrixXd V_inv_;
  std::vector<Eigen::VectorXd> W_;
  std::vector<Eigen::VectorXd> theta_;
  std::uint64_t t_ = 0;
  std::uint64_t norm_violations_ = 0;
  std::uint64_t refactorizations_ = 0;
};

}  // namespace blend
