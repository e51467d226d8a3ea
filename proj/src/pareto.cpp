#include "blend/pareto.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace blend {
namespace {

void check_same_length(const ObjectiveVector& u, const ObjectiveVector& v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("objective vectors differ in length: " +
                                std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
}

void check_arm(std::span<const ObjectiveVector> means, std::size_t arm) {
  if (arm >= means.size()) {
    throw std::out_of_range("arm index " + std::to_string(arm) + " out of range for " +
                            std::to_string(means.size()) + " arms");
  }
  for (const auto& mu : means) check_same_length(mu, means[arm]);
}

}  // namespace

bool dominates(const ObjectiveVector& u, const ObjectiveVector& v) {
  check_same_length(u, v);
  bool strict = false;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] < v[i]) return false;
    if (u[i] > v[i]) strict = true;
  }
  return strict;
}

std::vector<std::size_t> non_dominated_set(std::span<const ObjectiveVector> vectors) {
  if (vectors.empty()) throw std::invalid_argument("non_dominated_set: empty input");
  for (const auto& v : vectors) check_same_length(v, vectors.front());

  // A dominator is lexicographically greater than what it dominates, so after
  // a descending lexicographic sort each vector only needs checking against
  // the front collected so far (dominance is transitive).
  std::vector<std::size_t> order(vectors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& u = vectors[a];
    const auto& v = vectors[b];
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (u[i] != v[i]) return u[i] > v[i];
    }
    return false;
  });

  std::vector<std::size_t> front;
  for (std::size_t idx : order) {
    const bool dominated = std::any_of(front.begin(), front.end(), [&](std::size_t f) {
      return dominates(vectors[f], vectors[idx]);
    });
    if (!dominated) front.push_back(idx);
  }
  std::sort(front.begin(), front.end());
  return front;
}

double pareto_suboptimality_gap(std::span<const ObjectiveVector> means, std::size_t arm) {
  check_arm(means, arm);
  const auto& mu = means[arm];
  double gap = 0.0;
  for (const auto& other : means) {
    gap = std::max(gap, (other - mu).minCoeff());
  }
  return gap;
}

double maximal_loss(std::span<const ObjectiveVector> means, std::size_t arm) {
  check_arm(means, arm);
  const auto& mu = means[arm];
  double loss = 0.0;
  for (const auto& other : means) {
    loss = std::max(loss, (other - mu).maxCoeff());
  }
  return loss;
}

GapResult gaps(std::span<const ObjectiveVector> means, std::size_t arm) {
  return {pareto_suboptimality_gap(means, arm), maximal_loss(means, arm)};
}

std::vector<double> maximal_losses(std::span<const ObjectiveVector> means) {
  std::vector<double> out(means.size());
  for (std::size_t x = 0; x < means.size(); ++x) out[x] = maximal_loss(means, x);
  return out;
}

}  // namespace blend
