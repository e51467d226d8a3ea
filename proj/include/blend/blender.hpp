#pragma once

// Controller blending as a contextual multi-objective bandit: optimistic
// indices per arm, estimated maximal losses, and uniform pulls from the
// argmin set of those losses.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "blend/estimator.hpp"
#include "blend/pareto.hpp"

namespace blend {

using ArmId = std::size_t;

/// When the candidate set is formed relative to the pull it governs.
enum class ContextTiming {
  /// Candidates for step t+1 come from the contexts observed at step t.
  faithful,
  /// Contexts of the current state are supplied before pulling; candidates
  /// are recomputed from them.
  fresh,
};

struct BlenderConfig {
  EstimatorConfig estimator;
  std::size_t arms = 2;
  ContextTiming timing = ContextTiming::faithful;
};

struct StepRecord {
  std::uint64_t step = 0;  // 1-based
  ArmId arm = 0;
  ContextVector context_pulled;
  FeedbackVector feedback;
  /// Row x holds the optimistic index vector of arm x.
  std::vector<ObjectiveVector> ucb_indices;
  std::vector<double> est_losses;
  /// Argmin set of est_losses: the candidates for the next pull (faithful)
  /// or the set this pull was drawn from (fresh).
  std::vector<ArmId> candidates;
  /// ||Psi_t|| in the inverse Gram matrix that produced ucb_indices.
  double inv_norm_pulled = 0.0;
  /// Confidence radius that produced ucb_indices.
  double beta_t = 0.0;
};

/// Optimistic indices of every arm, their estimated maximal losses and the argmin set.
struct LossEstimate {
  std::vector<ObjectiveVector> ucb;
  std::vector<double> losses;
  std::vector<ArmId> argmin;
};

LossEstimate estimate_losses(const LinearEstimator& estimator,
                             std::span<const ContextVector> contexts);

/// Exact argmin set; ties are kept, no tolerance band.
std::vector<ArmId> argmin_set(std::span<const double> values);

/// Uniform draw from `candidates`. Throws std::logic_error when empty.
ArmId select_arm(std::span<const ArmId> candidates, std::mt19937_64& rng);

/// True iff no row of `ucb_rows` dominates the row of `arm`.
bool assert_nondominated_pick(std::span<const ObjectiveVector> ucb_rows, ArmId arm);
/// Checks record.arm against record.ucb_indices; meaningful when the pull was
/// drawn from the candidates computed alongside those indices (fresh timing).
bool assert_nondominated_pick(const StepRecord& record);

/// Counts pulls that were dominated among the indices which produced their
/// candidate set, pairing each pull with the right record for `timing`.
std::size_t nondominated_pick_violations(std::span<const StepRecord> records, ContextTiming timing);

class Blender {
 public:
  Blender(const BlenderConfig& config, std::uint64_t seed);

  /// Fresh timing only: recompute the candidate set from the current state's contexts.
  void refresh(std::span<const ContextVector> contexts);

  /// Uniform pull from the current candidate set.
  ArmId select_arm();

  /// Ingests the pulled arm's feedback together with the per-arm contexts of
  /// the state it was pulled in, and returns the step record.
  StepRecord observe(ArmId arm, const FeedbackVector& feedback,
                     std::span<const ContextVector> contexts);

  const std::vector<ArmId>& candidates() const { return candidates_; }
  const LinearEstimator& estimator() const { return estimator_; }
  const BlenderConfig& config() const { return config_; }
  std::uint64_t step() const { return step_; }

 private:
  void check_contexts(std::span<const ContextVector> contexts) const;

  BlenderConfig config_;
  LinearEstimator estimator_;
  std::vector<ArmId> candidates_;
  std::uint64_t step_ = 0;
  std::mt19937_64 rng_;

  struct Pending {
    LossEstimate estimate;
    double beta = 0.0;
    std::vector<double> inv_norms;
  };
  std::optional<Pending> pending_;  // fresh timing: estimate awaiting its pull
};

}  // namespace blend
