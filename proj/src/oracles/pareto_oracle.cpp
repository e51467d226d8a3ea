#include <algorithm>
#include <cmath>
#include <random>

#include "blend/oracles.hpp"

namespace blend::oracle {
namespace {

bool weakly_geq_strict_somewhere(const ObjectiveVector& u, const ObjectiveVector& v) {
  bool all_geq = true;
  bool any_gt = false;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    all_geq = all_geq && (u[i] >= v[i]);
    any_gt = any_gt || (u[i] > v[i]);
  }
  return all_geq && any_gt;
}

double bracket(std::span<const ObjectiveVector> means) {
  double span = 0.0;
  for (const auto& a : means) span = std::max(span, a.cwiseAbs().maxCoeff());
  return 2.0 * span + 1.0;
}

template <typename Pred>
double bisect(Pred holds, double hi, int iterations) {
  if (holds(0.0)) return 0.0;
  double lo = 0.0;
  for (int k = 0; k < iterations; ++k) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

std::vector<std::size_t> non_dominated_pairwise(std::span<const ObjectiveVector> vectors) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      if (j != i && weakly_geq_strict_somewhere(vectors[j], vectors[i])) dominated = true;
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

double bisect_psg(std::span<const ObjectiveVector> means, std::size_t arm, int iterations) {
  auto undominated = [&](double e) {
    const ObjectiveVector shifted = means[arm].array() + e;
    for (const auto& other : means) {
      if (weakly_geq_strict_somewhere(other, shifted)) return false;
    }
    return true;
  };
  return bisect(undominated, bracket(means), iterations);
}

double bisect_maximal_loss(std::span<const ObjectiveVector> means, std::size_t arm, int iterations) {
  auto dominates_all = [&](double e) {
    const ObjectiveVector shifted = means[arm].array() + e;
    for (std::size_t x = 0; x < means.size(); ++x) {
      if (x != arm && !weakly_geq_strict_somewhere(shifted, means[x])) return false;
    }
    return true;
  };
  return bisect(dominates_all, bracket(means), iterations);
}

double Deviation::worst() const {
  return std::max({max_psg, max_maximal_loss, max_theta, max_inv_norm,
                   nondominated_mismatches > 0 ? 1.0 : 0.0});
}

Deviation check_pareto(std::size_t cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> arms_dist(1, 6);
  std::uniform_int_distribution<int> obj_dist(1, 4);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  Deviation dev;
  for (std::size_t c = 0; c < cases; ++c) {
    const int K = arms_dist(rng);
    const int m = obj_dist(rng);
    std::vector<ObjectiveVector> means(K, ObjectiveVector(m));
    for (auto& mu : means) {
      for (int i = 0; i < m; ++i) mu[i] = value(rng);
    }
    for (int x = 0; x < K; ++x) {
      dev.max_psg = std::max(dev.max_psg, std::abs(pareto_suboptimality_gap(means, x) -
                                                   bisect_psg(means, x)));
      dev.max_maximal_loss = std::max(dev.max_maximal_loss, std::abs(maximal_loss(means, x) -
                                                                     bisect_maximal_loss(means, x)));
    }
    if (non_dominated_set(means) != non_dominated_pairwise(means)) ++dev.nondominated_mismatches;
    ++dev.cases;
  }
  return dev;
}

}  // namespace blend::oracle
