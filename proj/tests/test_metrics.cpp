#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "blend/metrics.hpp"
#include "blend/oracles.hpp"

using namespace blend;

namespace {

ObjectiveVector vec(double a, double b) { return Eigen::Vector2d(a, b); }

EstimatorConfig default_config() {
  EstimatorConfig cfg;
  cfg.dim = 2;
  cfg.objectives = 2;
  return cfg;
}

RunTrace constant_trace(const std::vector<ObjectiveVector>& means, const std::vector<ArmId>& arms) {
  RunTrace trace;
  trace.config = default_config();
  for (std::size_t t = 0; t < arms.size(); ++t) {
    StepRecord r;
    r.step = t + 1;
    r.arm = arms[t];
    r.est_losses.assign(means.size(), 0.0);
    trace.records.push_back(r);
    trace.true_means.push_back(means);
  }
  return trace;
}

RunTrace random_trace(std::mt19937_64& rng, std::size_t steps, std::size_t arms) {
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, arms - 1);
  RunTrace trace;
  trace.config = default_config();
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<ObjectiveVector> means;
    for (std::size_t x = 0; x < arms; ++x) means.push_back(vec(value(rng), value(rng)));
    StepRecord r;
    r.step = t + 1;
    r.arm = pick(rng);
    r.est_losses.assign(arms, value(rng));
    r.inv_norm_pulled = value(rng);
    trace.records.push_back(r);
    trace.true_means.push_back(means);
  }
  return trace;
}

}  // namespace

TEST(ParetoRegret, ExpertIsZero) {
  std::mt19937_64 rng(1);
  auto trace = random_trace(rng, 200, 3);
  for (std::size_t t = 0; t < trace.records.size(); ++t) {
    trace.records[t].arm = non_dominated_set(trace.true_means[t]).front();
  }
  for (double v : pareto_regret(trace)) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(correct_pick_rate(trace), 1.0);
}

TEST(ParetoRegret, WorkedExample) {
  const std::vector<ObjectiveVector> ab{vec(0, 1), vec(2, 0)};
  EXPECT_EQ(pareto_regret(constant_trace(ab, {0})).back(), 0.0);
  EXPECT_EQ(pareto_regret(constant_trace(ab, {1})).back(), 0.0);
}

TEST(CumulativeMaximalLoss, WorkedExample) {
  const std::vector<ObjectiveVector> ab{vec(0, 1), vec(2, 0)};
  const auto cml = cumulative_maximal_loss(constant_trace(ab, std::vector<ArmId>(10, 1)));
  EXPECT_EQ(cml.back(), 10.0);
  const std::vector<ObjectiveVector> single{vec(0.2, 0.9)};
  for (double v : cumulative_maximal_loss(constant_trace(single, std::vector<ArmId>(5, 0)))) EXPECT_EQ(v, 0.0);
}

TEST(Metrics, MatchOracleAndOrdering) {
  std::mt19937_64 rng(2);
  const auto trace = random_trace(rng, 100, 3);
  const auto pr = pareto_regret(trace);
  const auto cml = cumulative_maximal_loss(trace);
  double pr_oracle = 0.0, cml_oracle = 0.0;
  for (std::size_t t = 0; t < trace.records.size(); ++t) {
    pr_oracle += oracle::bisect_psg(trace.true_means[t], trace.records[t].arm);
    cml_oracle += oracle::bisect_maximal_loss(trace.true_means[t], trace.records[t].arm);
    EXPECT_NEAR(pr[t], pr_oracle, 1e-9);
    EXPECT_NEAR(cml[t], cml_oracle, 1e-9);
    EXPECT_LE(pr[t], cml[t]);
    if (t > 0) {
      EXPECT_GE(pr[t], pr[t - 1]);
      EXPECT_GE(cml[t], cml[t - 1]);
    }
  }
}

TEST(Metrics, RejectsIncompleteTrace) {
  std::mt19937_64 rng(3);
  auto trace = random_trace(rng, 10, 2);
  trace.true_means.pop_back();
  EXPECT_THROW(pareto_regret(trace), std::invalid_argument);
}

TEST(CmlUpperBound, SingleStep) {
  RunTrace trace = constant_trace({vec(0, 1), vec(2, 0)}, {1});
  trace.records[0].est_losses = {2.0, 1.0};
  trace.records[0].inv_norm_pulled = 0.25;
  const double beta_1 = confidence_radius(trace.config, 1);
  EXPECT_DOUBLE_EQ(cml_upper_bound(trace).front(), 1.0 + 2.0 * beta_1 * 0.25);
}

TEST(CmlUpperBound, UsesFinalHorizonRadius) {
  RunTrace trace = constant_trace({vec(0, 1), vec(2, 0)}, std::vector<ArmId>(50, 0));
  for (auto& r : trace.records) r.inv_norm_pulled = 0.1;
  const double beta_T = confidence_radius(trace.config, 50);
  EXPECT_NEAR(cml_upper_bound(trace).back(), 50 * 2.0 * beta_T * 0.1, 1e-12);
}

TEST(PrTheory, Examples) {
  const EstimatorConfig cfg = default_config();
  const double b1 = confidence_radius(cfg, 1);
  EXPECT_NEAR(pr_theory_bound(1, cfg), 8 * b1 * b1 * std::sqrt(4 * std::log(1.5)), 1e-12);
  EXPECT_NEAR(pr_theory_bound(1, cfg), 31.01, 0.01);
  for (std::uint64_t T : {100u, 1000u, 20000u}) {
    EXPECT_LT(pr_theory_bound(4 * T, cfg) / pr_theory_bound(T, cfg), 4.0);
  }
  EXPECT_THROW(pr_theory_bound(0, cfg), std::invalid_argument);
}

TEST(CorrectPick, UniformRandomOnDominatedPair) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.5);
  std::vector<ArmId> arms(10000);
  for (auto& a : arms) a = coin(rng) ? 1 : 0;
  const auto trace = constant_trace({vec(1, 1), vec(0, 0)}, arms);
  const double rate = correct_pick_rate(trace);
  EXPECT_NEAR(rate, 0.5, 3 * std::sqrt(0.25 / 10000));
}

TEST(ComputeMetrics, SeriesHaveTraceLength) {
  std::mt19937_64 rng(5);
  const auto trace = random_trace(rng, 37, 4);
  const auto s = compute_metrics(trace);
  EXPECT_EQ(s.psg.size(), 37u);
  EXPECT_EQ(s.ml.size(), 37u);
  EXPECT_EQ(s.cml_bound.size(), 37u);
  EXPECT_EQ(s.pr_theory.size(), 37u);
  EXPECT_EQ(s.correct_pick.size(), 37u);
  EXPECT_DOUBLE_EQ(s.pr_theory.front(), pr_theory_bound(1, trace.config));
}
