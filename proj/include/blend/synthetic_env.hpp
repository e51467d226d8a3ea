#pragma once

// Linear feedback with subgaussian noise and known coefficients.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "blend/environment.hpp"

namespace blend {

enum class NoiseKind { gaussian, uniform };
enum class NoiseCoupling { shared, per_objective };

struct SyntheticSpec {
  std::size_t arms = 3;
  std::size_t objectives = 2;
  std::size_t dim = 4;
  double sigma = 0.1;
  double S = 1.5;
  double L = 1.0;
  /// Radius of the per-step perturbation around each arm's context center.
  double jitter = 0.05;
  /// Smallest |mean difference| between two arms in any objective at the
  /// centers, beyond what the jitter can move. Keeps the dominance relation
  /// among arms the same in every state.
  double margin = 0.1;
  /// Require at least one arm that another arm dominates.
  bool require_dominated_arm = true;
  NoiseKind noise = NoiseKind::gaussian;
  NoiseCoupling coupling = NoiseCoupling::shared;
};

class SyntheticLinearEnv final : public Environment {
 public:
  /// theta_star is objectives x dim. Each step draws arm x's context uniformly
  /// from the ball of radius `jitter` around centers[x].
  SyntheticLinearEnv(Eigen::MatrixXd theta_star, std::vector<Eigen::VectorXd> centers,
                     double jitter, double L, double sigma, NoiseKind noise,
                     NoiseCoupling coupling, std::uint64_t seed);

  /// Rejection-samples an instance satisfying `spec` from the instance stream of `seed`.
  static SyntheticLinearEnv sample(const SyntheticSpec& spec, std::uint64_t seed);

  std::size_t arms() const override { return centers_.size(); }
  std::size_t dim() const override { return static_cast<std::size_t>(theta_star_.cols()); }
  std::size_t objectives() const override { return static_cast<std::size_t>(theta_star_.rows()); }

  std::span<const ContextVector> contexts() const override { return contexts_; }
  std::vector<ObjectiveVector> true_means() const override;
  /// Feedback theta_* psi_arm + eta at the current contexts, then fresh contexts.
  FeedbackVector apply(ArmId arm) override;

  /// Mean feedback theta_* psi for arbitrary per-arm contexts.
  std::vector<ObjectiveVector> true_means(std::span<const ContextVector> contexts) const;

  const Eigen::MatrixXd& theta_star() const { return theta_star_; }
  const std::vector<Eigen::VectorXd>& centers() const { return centers_; }
  double sigma() const { return sigma_; }
  /// The noise added to the most recent feedback.
  const Eigen::VectorXd& last_noise() const { return last_noise_; }

 private:
  void draw_contexts();
  double draw_noise();

  Eigen::MatrixXd theta_star_;
  std::vector<Eigen::VectorXd> centers_;
  double jitter_;
  double L_;
  double sigma_;
  NoiseKind noise_;
  NoiseCoupling coupling_;
  std::mt19937_64 context_rng_;
  std::mt19937_64 noise_rng_;
  std::vector<ContextVector> contexts_;
  Eigen::VectorXd last_noise_;
};

struct SynthStep {
  std::vector<ContextVector> contexts;  // the state the arm was applied in
  FeedbackVector feedback;
};

/// Applies `arm` and returns the contexts it was applied under with the feedback.
SynthStep synth_step(SyntheticLinearEnv& env, ArmId arm);

}  // namespace blend
