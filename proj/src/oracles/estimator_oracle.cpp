#include <algorithm>
#include <cmath>
#include <random>

#include "blend/estimator.hpp"
#include "blend/oracles.hpp"

namespace blend::oracle {

Eigen::VectorXd ridge_qr(const Eigen::MatrixXd& contexts, const Eigen::VectorXd& targets,
                         double lambda) {
  const Eigen::Index n = contexts.rows();
  const Eigen::Index d = contexts.cols();
  Eigen::MatrixXd stacked(n + d, d);
  stacked << contexts, std::sqrt(lambda) * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + d);
  rhs.head(n) = targets;
  return stacked.colPivHouseholderQr().solve(rhs);
}

double dense_inverse_norm(const Eigen::MatrixXd& V, const Eigen::VectorXd& psi) {
  const Eigen::MatrixXd inv = V.fullPivLu().inverse();
  return std::sqrt(std::max(psi.dot(inv * psi), 0.0));
}

Deviation check_estimator(std::size_t cases, std::size_t updates, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_dist(1, 16);
  std::uniform_int_distribution<int> obj_dist(1, 3);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Deviation dev;
  for (std::size_t c = 0; c < cases; ++c) {
    EstimatorConfig cfg;
    cfg.dim = static_cast<std::size_t>(dim_dist(rng));
    cfg.objectives = static_cast<std::size_t>(obj_dist(rng));
    const auto d = static_cast<Eigen::Index>(cfg.dim);
    const auto m = static_cast<Eigen::Index>(cfg.objectives);
    LinearEstimator est(cfg);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(updates), d);
    Eigen::MatrixXd Y(static_cast<Eigen::Index>(updates), m);
    Eigen::MatrixXd theta = Eigen::MatrixXd::NullaryExpr(m, d, [&] { return normal(rng); });
    for (std::size_t s = 0; s < updates; ++s) {
      Eigen::VectorXd psi = Eigen::VectorXd::NullaryExpr(d, [&] { return normal(rng); });
      psi *= unit(rng) / psi.norm();
      Eigen::VectorXd y = theta * psi;
      for (Eigen::Index i = 0; i < m; ++i) y[i] += 0.1 * normal(rng);
      est.update(psi, y);
      X.row(static_cast<Eigen::Index>(s)) = psi.transpose();
      Y.row(static_cast<Eigen::Index>(s)) = y.transpose();
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::VectorXd ref = ridge_qr(X, Y.col(i), cfg.lambda);
      dev.max_theta = std::max(dev.max_theta,
                               (est.theta_hat(static_cast<std::size_t>(i)) - ref).cwiseAbs().maxCoeff());
    }
    Eigen::MatrixXd V = X.transpose() * X;
    V.diagonal().array() += cfg.lambda;
    for (int probe = 0; probe < 8; ++probe) {
      const Eigen::VectorXd psi = Eigen::VectorXd::NullaryExpr(d, [&] { return normal(rng); });
      dev.max_inv_norm =
          std::max(dev.max_inv_norm, std::abs(est.inv_norm(psi) - dense_inverse_norm(V, psi)));
    }
    ++dev.cases;
  }
  return dev;
}

}  // namespace blend::oracle
