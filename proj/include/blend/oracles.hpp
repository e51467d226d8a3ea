#pragma once

// Brute-force reference routes for the closed forms in blend_core. Nothing
// in blend_core depends on these.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "blend/pareto.hpp"

namespace blend::oracle {

/// O(n^2) pairwise scan.
std::vector<std::size_t> non_dominated_pairwise(std::span<const ObjectiveVector> vectors);

/// Bisection on "means[arm] + e*1 is dominated by nobody".
double bisect_psg(std::span<const ObjectiveVector> means, std::size_t arm, int iterations = 60);

/// Bisection on "means[arm] + e*1 strictly dominates every other arm".
double bisect_maximal_loss(std::span<const ObjectiveVector> means, std::size_t arm,
                           int iterations = 60);

/// Ridge solution from a QR factorization of the stacked system [X; sqrt(lambda) I].
Eigen::VectorXd ridge_qr(const Eigen::MatrixXd& contexts, const Eigen::VectorXd& targets, double lambda);

/// sqrt(psi^T inv(V) psi) with an explicitly formed dense inverse.
double dense_inverse_norm(const Eigen::MatrixXd& V, const Eigen::VectorXd& psi);

struct Deviation {
  std::size_t cases = 0;
  double max_psg = 0.0;
  double max_maximal_loss = 0.0;
  double max_theta = 0.0;
  double max_inv_norm = 0.0;
  std::size_t nondominated_mismatches = 0;
  double worst() const;
};

/// Random instances with up to 6 arms and 4 objectives, values in [-1, 1].
Deviation check_pareto(std::size_t cases, std::uint64_t seed);

/// `updates` random ridge updates per case with dimension up to 16; compares
/// the incremental estimator with ridge_qr and dense_inverse_norm.
Deviation check_estimator(std::size_t cases, std::size_t updates, std::uint64_t seed);

}  // namespace blend::oracle
