#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "blend/estimator.hpp"
#include "blend/oracles.hpp"

using blend::EstimatorConfig;
using blend::LinearEstimator;

namespace {

EstimatorConfig config2() {
  EstimatorConfig cfg;
  cfg.dim = 2;
  cfg.objectives = 1;
  return cfg;
}

Eigen::VectorXd v2(double a, double b) { return Eigen::Vector2d(a, b); }
Eigen::VectorXd scalar(double a) { return Eigen::VectorXd::Constant(1, a); }

Eigen::VectorXd random_context(std::mt19937_64& rng, Eigen::Index d, double max_norm = 1.0) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  Eigen::VectorXd psi = Eigen::VectorXd::NullaryExpr(d, [&] { return normal(rng); });
  return psi * (max_norm * unit(rng) / psi.norm());
}

}  // namespace

TEST(EstimatorConfig, Validation) {
  EstimatorConfig cfg = config2();
  EXPECT_NO_THROW(cfg.validate());
  cfg.L = 2.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = config2();
  cfg.delta = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = config2();
  cfg.dim = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = config2();
  cfg.lambda = 0.5;
  try {
    cfg.validate();
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("lambda"), std::string::npos);
  }
}

TEST(Estimator, Initialization) {
  LinearEstimator est(config2());
  EXPECT_TRUE(est.gram().isApprox(Eigen::Matrix2d::Identity()));
  EXPECT_EQ(est.theta_hat(0), Eigen::Vector2d::Zero());
  EstimatorConfig cfg;
  cfg.dim = 3;
  cfg.lambda = 2.0;
  LinearEstimator est3(cfg);
  EXPECT_TRUE(est3.gram_inverse().isApprox(0.5 * Eigen::Matrix3d::Identity()));
}

TEST(Estimator, HandSolvedUpdate) {
  LinearEstimator est(config2());
  est.update(v2(1, 0), scalar(1));
  EXPECT_TRUE(est.gram().isApprox((Eigen::Matrix2d() << 2, 0, 0, 1).finished()));
  EXPECT_TRUE(est.moment(0).isApprox(v2(1, 0)));
  EXPECT_NEAR(est.theta_hat(0)[0], 0.5, 1e-15);
  EXPECT_NEAR(est.theta_hat(0)[1], 0.0, 1e-15);
}

TEST(Estimator, ZeroContextOnlyAdvancesTime) {
  LinearEstimator est(config2());
  est.update(v2(0.3, 0.1), scalar(0.2));
  const Eigen::MatrixXd V = est.gram();
  const Eigen::VectorXd theta = est.theta_hat(0);
  est.update(v2(0, 0), scalar(0.7));
  EXPECT_EQ(est.steps(), 2u);
  EXPECT_EQ(est.gram(), V);
  EXPECT_EQ(est.theta_hat(0), theta);
}

TEST(Estimator, RejectsMismatchedShapes) {
  LinearEstimator est(config2());
  EXPECT_THROW(est.update(Eigen::Vector3d(1, 0, 0), scalar(1)), std::invalid_argument);
  EXPECT_THROW(est.update(v2(1, 0), Eigen::Vector2d(1, 1)), std::invalid_argument);
}

TEST(BatchSolve, Examples) {
  EXPECT_EQ(blend::batch_solve(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), 1.0), Eigen::Vector2d::Zero());
  Eigen::MatrixXd X(1, 2);
  X << 1, 0;
  const Eigen::VectorXd sol = blend::batch_solve(X, scalar(1), 1.0);
  EXPECT_NEAR(sol[0], 0.5, 1e-15);
  EXPECT_NEAR(sol[1], 0.0, 1e-15);
  EXPECT_EQ(blend::batch_solve(X, scalar(0), 1.0), Eigen::Vector2d::Zero());
}

TEST(Estimator, IncrementalMatchesBatch) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (Eigen::Index d : {1, 4, 16}) {
    EstimatorConfig cfg;
    cfg.dim = static_cast<std::size_t>(d);
    cfg.objectives = 2;
    LinearEstimator est(cfg);
    const std::size_t n = d == 16 ? 10000 : 50;
    Eigen::MatrixXd X(n, d);
    Eigen::MatrixXd Y(n, 2);
    for (std::size_t s = 0; s < n; ++s) {
      const Eigen::VectorXd psi = random_context(rng, d);
      const Eigen::Vector2d y(normal(rng), normal(rng));
      est.update(psi, y);
      X.row(s) = psi.transpose();
      Y.row(s) = y.transpose();
    }
    for (int i = 0; i < 2; ++i) {
      const Eigen::VectorXd batch = blend::batch_solve(X, Y.col(i), cfg.lambda);
      EXPECT_LE((est.theta_hat(i) - batch).cwiseAbs().maxCoeff(), 1e-8) << "d=" << d;
      const Eigen::VectorXd qr = blend::oracle::ridge_qr(X, Y.col(i), cfg.lambda);
      EXPECT_LE((est.theta_hat(i) - qr).cwiseAbs().maxCoeff(), 1e-8) << "d=" << d;
    }
    const Eigen::MatrixXd residual =
        est.gram() * est.gram_inverse() - Eigen::MatrixXd::Identity(d, d);
    EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-6);
    if (n >= 1000) {
      EXPECT_GE(est.refactorizations(), n / LinearEstimator::kRefactorInterval);
    }
  }
}

TEST(Estimator, GramGrowsAndInverseNormShrinks) {
  std::mt19937_64 rng(8);
  EstimatorConfig cfg;
  cfg.dim = 4;
  cfg.objectives = 1;
  LinearEstimator est(cfg);
  const Eigen::VectorXd probe = random_context(rng, 4);
  double prev_norm = est.inv_norm(probe);
  double prev_det = est.gram().determinant();
  Eigen::VectorXd prev_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(est.gram()).eigenvalues();
  for (int s = 0; s < 300; ++s) {
    est.update(random_context(rng, 4), scalar(0.0));
    const double norm = est.inv_norm(probe);
    const double det = est.gram().determinant();
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(est.gram()).eigenvalues();
    EXPECT_LE(norm, prev_norm + 1e-12);
    EXPECT_GE(det, prev_det * (1 - 1e-12));
    EXPECT_TRUE(((eig - prev_eig).array() >= -1e-9).all());
    EXPECT_GE(eig.minCoeff(), cfg.lambda - 1e-9);
    prev_norm = norm;
    prev_det = det;
    prev_eig = eig;
  }
}

TEST(ConfidenceRadius, Examples) {
  const EstimatorConfig cfg = config2();
  EXPECT_NEAR(blend::confidence_radius(cfg, 0), 0.1 * std::sqrt(2 * std::log(10.0)) + 1.5, 1e-12);
  EXPECT_NEAR(blend::confidence_radius(cfg, 0), 1.71459, 1e-5);
  EXPECT_NEAR(blend::confidence_radius(cfg, 1), 1.74478, 1e-5);
  EstimatorConfig noiseless = cfg;
  noiseless.sigma = 0.0;
  for (std::uint64_t t : {0u, 1u, 1000u}) EXPECT_EQ(blend::confidence_radius(noiseless, t), 1.5);
}

TEST(ConfidenceRadius, Monotonicity) {
  const EstimatorConfig base = config2();
  for (std::uint64_t t = 0; t < 5000; t += 37) {
    const double b = blend::confidence_radius(base, t);
    EXPECT_LE(b, blend::confidence_radius(base, t + 1));
    auto more = base;
    more.sigma = 0.2;
    EXPECT_LE(b, blend::confidence_radius(more, t));
    more = base;
    more.S = 2.0;
    EXPECT_LE(b, blend::confidence_radius(more, t));
    more = base;
    more.L = 0.9;
    EXPECT_GE(b, blend::confidence_radius(more, t));
    more = base;
    more.delta = 0.05;
    EXPECT_LE(b, blend::confidence_radius(more, t));
  }
}

TEST(UcbIndex, Examples) {
  LinearEstimator est(config2());
  EXPECT_NEAR(est.ucb_index(v2(1, 0), 0), 1.71459, 1e-5);
  EXPECT_EQ(est.ucb_index(v2(0, 0), 0), 0.0);

  EstimatorConfig cfg = config2();
  cfg.lambda = 4.0;
  LinearEstimator est4(cfg);
  EXPECT_DOUBLE_EQ(est4.inv_norm(v2(1, 0)), 0.5);
  EXPECT_EQ(est4.inv_norm(v2(0, 0)), 0.0);
}

TEST(UcbIndex, NoiselessBracketsTruth) {
  std::mt19937_64 rng(12);
  LinearEstimator est(config2());
  const Eigen::Vector2d theta(0.3, 0.4);
  for (int s = 0; s < 100; ++s) {
    const Eigen::VectorXd psi = random_context(rng, 2);
    est.update(psi, scalar(theta.dot(psi)));
  }
  for (int probe = 0; probe < 50; ++probe) {
    const Eigen::VectorXd psi = random_context(rng, 2);
    const double idx = est.ucb_index(psi, 0);
    EXPECT_GE(idx, theta.dot(psi) - 1e-12);
    EXPECT_LE(idx, theta.dot(psi) + 2.0 * est.beta() * est.inv_norm(psi) + 1e-12);
    EXPECT_NEAR(est.ucb_vector(psi)[0], idx, 1e-15);
  }
}

TEST(InvNorm, MatchesDenseInverse) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    EstimatorConfig cfg;
    cfg.dim = 1 + trial % 8;
    cfg.objectives = 1;
    const auto d = static_cast<Eigen::Index>(cfg.dim);
    LinearEstimator est(cfg);
    for (int s = 0; s < 30; ++s) est.update(random_context(rng, d), scalar(normal(rng)));
    const Eigen::VectorXd psi = Eigen::VectorXd::NullaryExpr(d, [&] { return normal(rng); });
    EXPECT_NEAR(est.inv_norm(psi), blend::oracle::dense_inverse_norm(est.gram(), psi), 1e-9);
  }
}

TEST(Estimator, CountsNormBoundViolations) {
  LinearEstimator est(config2());
  est.update(v2(0.6, 0.8), scalar(0));
  EXPECT_EQ(est.norm_bound_violations(), 0u);
  est.update(v2(3, 0), scalar(1));
  EXPECT_EQ(est.norm_bound_violations(), 1u);
  EXPECT_NEAR(est.gram()(0, 0), 1 + 0.36 + 9, 1e-12);
}

TEST(Estimator, SnapshotRoundTrip) {
  std::mt19937_64 rng(4);
  EstimatorConfig cfg;
  cfg.dim = 5;
  cfg.objectives = 3;
  LinearEstimator est(cfg);
  for (int s = 0; s < 40; ++s) est.update(random_context(rng, 5), Eigen::Vector3d(0.1 * s, -0.2, 0.3));
  std::stringstream buffer;
  est.save(buffer);
  const LinearEstimator back = LinearEstimator::load(buffer, cfg);
  EXPECT_EQ(back.steps(), est.steps());
  EXPECT_EQ(back.gram(), est.gram());
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.moment(i), est.moment(i));
    EXPECT_LE((back.theta_hat(i) - est.theta_hat(i)).cwiseAbs().maxCoeff(), 1e-12);
  }
  auto other = cfg;
  other.dim = 4;
  std::stringstream again;
  est.save(again);
  EXPECT_THROW(LinearEstimator::load(again, other), std::runtime_error);
  std::stringstream junk("{\"format\":\"something-else\"}");
  EXPECT_THROW(LinearEstimator::load(junk, cfg), std::runtime_error);
}
