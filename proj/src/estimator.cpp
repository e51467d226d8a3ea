#include "blend/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace blend {
namespace {

constexpr int kSnapshotVersion = 1;

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw std::invalid_argument("estimator." + field + ": " + what);
}

}  // namespace

void EstimatorConfig::validate() const {
  require(dim >= 1, "dim", "must be at least 1");
  require(objectives >= 1, "objectives", "must be at least 1");
  require(std::isfinite(sigma) && sigma >= 0.0, "sigma", "must be finite and non-negative");
  require(std::isfinite(S) && S > 0.0, "S", "must be positive");
  require(std::isfinite(L) && L > 0.0, "L", "must be positive");
  require(std::isfinite(lambda) && lambda > 0.0, "lambda", "must be positive");
  require(lambda >= std::max(1.0, L * L), "lambda", "must satisfy lambda >= max(1, L^2)");
  require(delta > 0.0 && delta < 1.0, "delta", "must lie in (0, 1)");
}

double confidence_radius(const EstimatorConfig& config, std::uint64_t t) {
  const double d = static_cast<double>(config.dim);
  const double growth = 1.0 + static_cast<double>(t) * config.L * config.L / config.lambda;
  const double arg = d * std::log(growth / config.delta);
  return config.sigma * std::sqrt(std::max(arg, 0.0)) + std::sqrt(config.lambda) * config.S;
}

Eigen::VectorXd batch_solve(const Eigen::MatrixXd& contexts, const Eigen::VectorXd& targets,
                            double lambda) {
  if (contexts.rows() != targets.size()) {
    throw std::invalid_argument("batch_solve: " + std::to_string(contexts.rows()) +
                                " contexts but " + std::to_string(targets.size()) + " targets");
  }
  Eigen::MatrixXd gram = contexts.transpose() * contexts;
  gram.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = contexts.transpose() * targets;
  return gram.ldlt().solve(rhs);
}

Eigen::VectorXd batch_solve(std::span<const ContextVector> contexts,
                            std::span<const double> targets, double lambda, std::size_t dim) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(contexts.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < contexts.size(); ++s) {
    if (contexts[s].size() != static_cast<Eigen::Index>(dim)) {
      throw std::invalid_argument("batch_solve: context dimension mismatch");
    }
    rows.row(static_cast<Eigen::Index>(s)) = contexts[s].transpose();
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t s = 0; s < targets.size(); ++s) y[static_cast<Eigen::Index>(s)] = targets[s];
  return batch_solve(rows, y, lambda);
}

LinearEstimator::LinearEstimator(const EstimatorConfig& config) : config_(config) {
  config_.validate();
  const auto d = static_cast<Eigen::Index>(config_.dim);
  V_ = config_.lambda * Eigen::MatrixXd::Identity(d, d);
  V_inv_ = (1.0 / config_.lambda) * Eigen::MatrixXd::Identity(d, d);
  W_.assign(config_.objectives, Eigen::VectorXd::Zero(d));
  theta_.assign(config_.objectives, Eigen::VectorXd::Zero(d));
}

void LinearEstimator::check_context(const ContextVector& psi) const {
  if (psi.size() != static_cast<Eigen::Index>(config_.dim)) {
    throw std::invalid_argument("context has dimension " + std::to_string(psi.size()) +
                                ", expected " + std::to_string(config_.dim));
  }
}

void LinearEstimator::update(const ContextVector& psi, const FeedbackVector& y) {
  check_context(psi);
  if (y.size() != static_cast<Eigen::Index>(config_.objectives)) {
    throw std::invalid_argument("feedback has " + std::to_string(y.size()) +
                                " objectives, expected " + std::to_string(config_.objectives));
  }
  if (!psi.allFinite() || !y.allFinite()) {
    throw std::invalid_argument("non-finite context or feedback");
  }
  if (psi.norm() > config_.L) ++norm_violations_;

  V_.noalias() += psi * psi.transpose();
  for (std::size_t i = 0; i < config_.objectives; ++i) W_[i] += y[static_cast<Eigen::Index>(i)] * psi;
  ++t_;

  // Sherman-Morrison: (V + pp^T)^{-1} = V^{-1} - (V^{-1}p)(V^{-1}p)^T / (1 + p^T V^{-1} p)
  const Eigen::VectorXd u = V_inv_ * psi;
  const double denom = 1.0 + psi.dot(u);
  V_inv_.noalias() -= (u * u.transpose()) / denom;

  const auto d = static_cast<Eigen::Index>(config_.dim);
  const double drift =
      (V_ * V_inv_ - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
  if (t_ % kRefactorInterval == 0 || drift > kInverseDriftTolerance) refactor();

  refresh_theta();
}

void LinearEstimator::refactor() {
  const auto d = static_cast<Eigen::Index>(config_.dim);
  V_inv_ = V_.llt().solve(Eigen::MatrixXd::Identity(d, d));
  V_inv_ = 0.5 * (V_inv_ + V_inv_.transpose()).eval();
  ++refactorizations_;
}

void LinearEstimator::refresh_theta() {
  for (std::size_t i = 0; i < config_.objectives; ++i) theta_[i].noalias() = V_inv_ * W_[i];
}

double LinearEstimator::inv_norm(const ContextVector& psi) const {
  check_context(psi);
  return std::sqrt(std::max(psi.dot(V_inv_ * psi), 0.0));
}

double LinearEstimator::ucb_index(const ContextVector& psi, std::size_t objective) const {
  if (objective >= config_.objectives) {
    throw std::out_of_range("objective " + std::to_string(objective) + " out of range");
  }
  return theta_[objective].dot(psi) + beta() * inv_norm(psi);
}

Eigen::VectorXd LinearEstimator::ucb_vector(const ContextVector& psi) const {
  const double bonus = beta() * inv_norm(psi);
  Eigen::VectorXd out(static_cast<Eigen::Index>(config_.objectives));
  for (std::size_t i = 0; i < config_.objectives; ++i) {
    out[static_cast<Eigen::Index>(i)] = theta_[i].dot(psi) + bonus;
  }
  return out;
}

double LinearEstimator::gram_distance(std::size_t objective, const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd diff = theta_.at(objective) - theta;
  return std::sqrt(std::max(diff.dot(V_ * diff), 0.0));
}

void LinearEstimator::save(std::ostream& out) const {
  nlohmann::json j;
  j["format"] = "blend-estimator";
  j["version"] = kSnapshotVersion;
  j["dim"] = config_.dim;
  j["objectives"] = config_.objectives;
  j["t"] = t_;
  j["V"] = std::vector<double>(V_.data(), V_.data() + V_.size());
  std::vector<double> w;
  for (const auto& wi : W_) w.insert(w.end(), wi.data(), wi.data() + wi.size());
  j["W"] = w;
  out << j.dump() << '\n';
}

LinearEstimator LinearEstimator::load(std::istream& in, const EstimatorConfig& config) {
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "blend-estimator" || j.value("version", 0) != kSnapshotVersion) {
    throw std::runtime_error("unsupported estimator snapshot");
  }
  LinearEstimator est(config);
  if (j.at("dim").get<std::size_t>() != config.dim ||
      j.at("objectives").get<std::size_t>() != config.objectives) {
    throw std::runtime_error("snapshot dimensions do not match the estimator config");
  }
  const auto v = j.at("V").get<std::vector<double>>();
  const auto w = j.at("W").get<std::vector<double>>();
  const std::size_t d = config.dim;
  if (v.size() != d * d || w.size() != d * config.objectives) {
    throw std::runtime_error("snapshot arrays have the wrong size");
  }
  est.V_ = Eigen::Map<const Eigen::MatrixXd>(v.data(), static_cast<Eigen::Index>(d),
                                             static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < config.objectives; ++i) {
    est.W_[i] = Eigen::Map<const Eigen::VectorXd>(w.data() + i * d, static_cast<Eigen::Index>(d));
  }
  est.t_ = j.at("t").get<std::uint64_t>();
  est.refactor();
  est.refactorizations_ = 0;
  est.refresh_theta();
  return est;
}

}  // namespace blend
