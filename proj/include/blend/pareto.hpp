#pragma once

// Pareto dominance algebra over objective vectors. Every objective is
// maximized; vectors compared together must share one length.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace blend {

using ObjectiveVector = Eigen::VectorXd;

struct GapResult {
  double psg = 0.0;           // Pareto suboptimality gap
  double maximal_loss = 0.0;  // loss in the worst individual objective
};

/// True iff u is at least as large as v everywhere and strictly larger somewhere.
/// Throws std::invalid_argument on a length mismatch.
bool dominates(const ObjectiveVector& u, const ObjectiveVector& v);

/// Indices of the vectors no other vector dominates, in ascending order.
/// Identical vectors do not dominate each other, so duplicates are all kept.
std::vector<std::size_t> non_dominated_set(std::span<const ObjectiveVector> vectors);

/// Smallest uniform shift e >= 0 such that means[arm] + e*1 is not dominated
/// by any other arm:  max(0, max_x' min_i (means[x']_i - means[arm]_i)).
double pareto_suboptimality_gap(std::span<const ObjectiveVector> means, std::size_t arm);

/// Infimum of the uniform shift e >= 0 for which means[arm] + e*1 dominates
/// every other arm:  max(0, max_x' max_i (means[x']_i - means[arm]_i)).
/// Identical competitors yield 0 (the closure of the strict condition).
double maximal_loss(std::span<const ObjectiveVector> means, std::size_t arm);

GapResult gaps(std::span<const ObjectiveVector> means, std::size_t arm);

/// maximal_loss for every arm.
std::vector<double> maximal_losses(std::span<const ObjectiveVector> means);

}  // namespace blend
