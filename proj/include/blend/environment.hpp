#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "blend/blender.hpp"

namespace blend {

/// A feedback source for the blender. The current state exposes one context
/// per arm; applying an arm emits feedback and advances to the next state.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t arms() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::size_t objectives() const = 0;

  /// psi(z_t, x) for every arm x at the current state.
  virtual std::span<const ContextVector> contexts() const = 0;
  /// Expected one-step feedback of every arm at the current state.
  virtual std::vector<ObjectiveVector> true_means() const = 0;
  /// Applies `arm` at the current state and returns its feedback.
  virtual FeedbackVector apply(ArmId arm) = 0;
  /// Called before each episode of a rollout.
  virtual void begin_episode() {}
};

}  // namespace blend
