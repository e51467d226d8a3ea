#include "blend/synthetic_env.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "blend/rng.hpp"

namespace blend {
namespace {

Eigen::VectorXd random_direction(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  do {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  } while (v.norm() == 0.0);
  return v.normalized();
}

}  // namespace

SyntheticLinearEnv::SyntheticLinearEnv(Eigen::MatrixXd theta_star,
                                       std::vector<Eigen::VectorXd> centers, double jitter,
                                       double L, double sigma, NoiseKind noise,
                                       NoiseCoupling coupling, std::uint64_t seed)
    : theta_star_(std::move(theta_star)),
      centers_(std::move(centers)),
      jitter_(jitter),
      L_(L),
      sigma_(sigma),
      noise_(noise),
      coupling_(coupling),
      context_rng_(make_stream(seed, Stream::environment_contexts)),
      noise_rng_(make_stream(seed, Stream::environment_noise)) {
  if (centers_.empty()) throw std::invalid_argument("synthetic env: no arms");
  if (theta_star_.rows() < 1 || theta_star_.cols() < 1) {
    throw std::invalid_argument("synthetic env: empty coefficient matrix");
  }
  if (jitter_ < 0.0 || sigma_ < 0.0) throw std::invalid_argument("synthetic env: negative scale");
  for (const auto& c : centers_) {
    if (c.size() != theta_star_.cols()) {
      throw std::invalid_argument("synthetic env: center dimension mismatch");
    }
    if (c.norm() + jitter_ > L_ * (1.0 + 1e-12)) {
      throw std::invalid_argument("synthetic env: contexts could exceed the norm bound L");
    }
  }
  last_noise_ = Eigen::VectorXd::Zero(theta_star_.rows());
  draw_contexts();
}

SyntheticLinearEnv SyntheticLinearEnv::sample(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.arms < 1 || spec.objectives < 1 || spec.dim < 1) {
    throw std::invalid_argument("synthetic spec: arms, objectives and dim must be positive");
  }
  if (spec.jitter >= spec.L) throw std::invalid_argument("synthetic spec: jitter must be below L");
  auto rng = make_stream(seed, Stream::instance);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(spec.objectives);
  const auto d = static_cast<Eigen::Index>(spec.dim);

  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Eigen::MatrixXd theta(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
      theta.row(i) = random_direction(spec.dim, rng).transpose() * spec.S * (0.5 + 0.5 * unit(rng));
    }
    std::vector<Eigen::VectorXd> centers;
    for (std::size_t x = 0; x < spec.arms; ++x) {
      centers.push_back(random_direction(spec.dim, rng) * (spec.L - spec.jitter) *
                        (0.6 + 0.4 * unit(rng)));
    }

    std::vector<ObjectiveVector> means;
    for (const auto& c : centers) means.emplace_back(theta * c);
    bool separated = true;
    for (std::size_t a = 0; a < spec.arms && separated; ++a) {
      for (std::size_t b = a + 1; b < spec.arms && separated; ++b) {
        for (Eigen::Index k = 0; k < m; ++k) {
          const double slack = spec.margin + 2.0 * theta.row(k).norm() * spec.jitter;
          if (std::abs(means[a][k] - means[b][k]) < slack) {
            separated = false;
            break;
          }
        }
      }
    }
    if (!separated) continue;
    if (spec.require_dominated_arm && non_dominated_set(means).size() == spec.arms) continue;

    return SyntheticLinearEnv(std::move(theta), std::move(centers), spec.jitter, spec.L,
                              spec.sigma, spec.noise, spec.coupling, seed);
  }
  throw std::runtime_error("synthetic spec: no instance found after " +
                           std::to_string(kMaxAttempts) + " attempts; relax margin or jitter");
}

void SyntheticLinearEnv::draw_contexts() {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double inv_dim = 1.0 / static_cast<double>(dim());
  contexts_.resize(centers_.size());
  for (std::size_t x = 0; x < centers_.size(); ++x) {
    const double radius = jitter_ * std::pow(unit(context_rng_), inv_dim);
    contexts_[x] = centers_[x] + radius * random_direction(dim(), context_rng_);
  }
}

double SyntheticLinearEnv::draw_noise() {
  if (sigma_ == 0.0) return 0.0;
  if (noise_ == NoiseKind::gaussian) {
    std::normal_distribution<double> normal(0.0, sigma_);
    return normal(noise_rng_);
  }
  const double half_width = sigma_ * std::sqrt(3.0);
  std::uniform_real_distribution<double> uniform(-half_width, half_width);
  return uniform(noise_rng_);
}

std::vector<ObjectiveVector> SyntheticLinearEnv::true_means(
    std::span<const ContextVector> contexts) const {
  std::vector<ObjectiveVector> out;
  out.reserve(contexts.size());
  for (const auto& psi : contexts) {
    if (psi.size() != theta_star_.cols()) {
      throw std::invalid_argument("true_means: context dimension mismatch");
    }
    out.emplace_back(theta_star_ * psi);
  }
  return out;
}

std::vector<ObjectiveVector> SyntheticLinearEnv::true_means() const { return true_means(contexts_); }

FeedbackVector SyntheticLinearEnv::apply(ArmId arm) {
  if (arm >= arms()) throw std::out_of_range("synthetic env: arm out of range");
  const auto m = theta_star_.rows();
  if (coupling_ == NoiseCoupling::shared) {
    last_noise_.setConstant(draw_noise());
  } else {
    for (Eigen::Index i = 0; i < m; ++i) last_noise_[i] = draw_noise();
  }
  FeedbackVector y = theta_star_ * contexts_[arm] + last_noise_;
  draw_contexts();
  return y;
}

SynthStep synth_step(SyntheticLinearEnv& env, ArmId arm) {
  SynthStep out;
  out.contexts.assign(env.contexts().begin(), env.contexts().end());
  out.feedback = env.apply(arm);
  return out;
}

}  // namespace blend
