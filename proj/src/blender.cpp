#include "blend/blender.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "blend/rng.hpp"

namespace blend {

LossEstimate estimate_losses(const LinearEstimator& estimator,
                             std::span<const ContextVector> contexts) {
  LossEstimate out;
  out.ucb.reserve(contexts.size());
  for (const auto& psi : contexts) out.ucb.push_back(estimator.ucb_vector(psi));
  out.losses = maximal_losses(out.ucb);
  out.argmin = argmin_set(out.losses);
  return out;
}

std::vector<ArmId> argmin_set(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmin_set: empty input");
  const double best = *std::min_element(values.begin(), values.end());
  std::vector<ArmId> out;
  for (std::size_t x = 0; x < values.size(); ++x) {
    if (values[x] == best) out.push_back(x);
  }
  return out;
}

ArmId select_arm(std::span<const ArmId> candidates, std::mt19937_64& rng) {
  if (candidates.empty()) throw std::logic_error("select_arm: empty candidate set");
  if (candidates.size() == 1) return candidates.front();
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return candidates[pick(rng)];
}

bool assert_nondominated_pick(std::span<const ObjectiveVector> ucb_rows, ArmId arm) {
  if (arm >= ucb_rows.size()) throw std::out_of_range("assert_nondominated_pick: arm out of range");
  return std::none_of(ucb_rows.begin(), ucb_rows.end(),
                      [&](const ObjectiveVector& row) { return dominates(row, ucb_rows[arm]); });
}

bool assert_nondominated_pick(const StepRecord& record) {
  return assert_nondominated_pick(record.ucb_indices, record.arm);
}

std::size_t nondominated_pick_violations(std::span<const StepRecord> records, ContextTiming timing) {
  std::size_t violations = 0;
  for (std::size_t t = 0; t < records.size(); ++t) {
    if (timing == ContextTiming::fresh) {
      if (!assert_nondominated_pick(records[t])) ++violations;
    } else if (t > 0) {
      // The first pull is uniform over all arms and has no producing indices.
      if (!assert_nondominated_pick(records[t - 1].ucb_indices, records[t].arm)) ++violations;
    }
  }
  return violations;
}

Blender::Blender(const BlenderConfig& config, std::uint64_t seed)
    : config_(config),
      estimator_(config.estimator),
      rng_(make_stream(seed, Stream::arm_selection)) {
  if (config_.arms < 1) throw std::invalid_argument("blender.arms: must be at least 1");
  // The first pull is uniform over every arm.
  candidates_.resize(config_.arms);
  for (ArmId x = 0; x < config_.arms; ++x) candidates_[x] = x;
}

void Blender::check_contexts(std::span<const ContextVector> contexts) const {
  if (contexts.size() != config_.arms) {
    throw std::invalid_argument("expected contexts for " + std::to_string(config_.arms) +
                                " arms, got " + std::to_string(contexts.size()));
  }
}

void Blender::refresh(std::span<const ContextVector> contexts) {
  if (config_.timing != ContextTiming::fresh) {
    throw std::logic_error("Blender::refresh is only used with fresh context timing");
  }
  check_contexts(contexts);
  Pending p;
  p.estimate = estimate_losses(estimator_, contexts);
  p.beta = estimator_.beta();
  p.inv_norms.reserve(contexts.size());
  for (const auto& psi : contexts) p.inv_norms.push_back(estimator_.inv_norm(psi));
  candidates_ = p.estimate.argmin;
  pending_ = std::move(p);
}

ArmId Blender::select_arm() {
  if (config_.timing == ContextTiming::fresh && !pending_) {
    throw std::logic_error("fresh context timing requires refresh() before every pull");
  }
  return blend::select_arm(candidates_, rng_);
}

StepRecord Blender::observe(ArmId arm, const FeedbackVector& feedback,
                            std::span<const ContextVector> contexts) {
  check_contexts(contexts);
  if (arm >= config_.arms) throw std::out_of_range("observe: arm out of range");
  if (feedback.size() != static_cast<Eigen::Index>(config_.estimator.objectives)) {
    throw std::invalid_argument("observe: feedback has the wrong number of objectives");
  }
  if (!feedback.allFinite()) throw std::invalid_argument("observe: non-finite feedback");

  StepRecord rec;
  rec.step = ++step_;
  rec.arm = arm;
  rec.context_pulled = contexts[arm];
  rec.feedback = feedback;

  if (config_.timing == ContextTiming::fresh) {
    if (!pending_) throw std::logic_error("observe: no refreshed estimate for this pull");
    estimator_.update(contexts[arm], feedback);
    rec.ucb_indices = std::move(pending_->estimate.ucb);
    rec.est_losses = std::move(pending_->estimate.losses);
    rec.candidates = std::move(pending_->estimate.argmin);
    rec.inv_norm_pulled = pending_->inv_norms[arm];
    rec.beta_t = pending_->beta;
    pending_.reset();
    return rec;
  }

  estimator_.update(contexts[arm], feedback);
  LossEstimate est = estimate_losses(estimator_, contexts);
  candidates_ = est.argmin;
  rec.ucb_indices = std::move(est.ucb);
  rec.est_losses = std::move(est.losses);
  rec.candidates = candidates_;
  rec.inv_norm_pulled = estimator_.inv_norm(contexts[arm]);
  rec.beta_t = estimator_.beta();
  return rec;
}

}  // namespace blend
