#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "blend/config.hpp"
#include "blend/csv_io.hpp"
#include "blend/experiment.hpp"

using namespace blend;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("blend_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string config_error(const std::string& text) {
  try {
    parse(text).validate();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

ExperimentConfig synthetic_run(std::size_t T, const fs::path& out) {
  ExperimentConfig cfg = parse("[experiment]\nenv = synthetic\nT = " + std::to_string(T) + "\n");
  cfg.output_dir = out;
  cfg.workers = 1;
  return cfg;
}

ExperimentConfig grid_run(PolicyKind policy, std::size_t episodes) {
  ExperimentConfig cfg = parse("[experiment]\nenv = gridworld\nmode = fresh_context\nepisodes = " +
                               std::to_string(episodes) + "\nepisode_len = 1000\nwrite_steps = false\n");
  cfg.policies = {policy};
  cfg.workers = 1;
  return cfg;
}

}  // namespace

TEST(Config, ParsesSectionsAndDefaults) {
  const auto cfg = parse(
      "[experiment]\nenv = synthetic\nmode = fresh_context\npolicy = blender, uniform_random\n"
      "T = 500\nseeds = 3..5\n[estimator]\nsigma = 0.2\ndelta = 0.05\n"
      "[synthetic]\narms = 4\ndim = 6\nnoise = uniform\ncoupling = per_objective\n");
  EXPECT_EQ(cfg.env, EnvKind::synthetic);
  EXPECT_EQ(cfg.mode, ContextTiming::fresh);
  EXPECT_EQ(cfg.policies, (std::vector<PolicyKind>{PolicyKind::blender, PolicyKind::uniform_random}));
  EXPECT_EQ(cfg.horizon(), 500u);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{3, 4, 5}));
  EXPECT_EQ(cfg.estimator.sigma, 0.2);
  EXPECT_EQ(cfg.estimator.delta, 0.05);
  EXPECT_EQ(cfg.estimator.lambda, 1.0);
  EXPECT_EQ(cfg.estimator.S, 1.5);
  EXPECT_EQ(cfg.estimator.dim, 6u);
  EXPECT_EQ(cfg.synthetic.arms, 4u);
  EXPECT_EQ(cfg.synthetic.noise, NoiseKind::uniform);
  EXPECT_NO_THROW(cfg.validate());

  const auto grid = parse("[experiment]\nenv = gridworld\nepisodes = 60\nepisode_len = 1000\n");
  EXPECT_EQ(grid.estimator.dim, 3u);
  EXPECT_EQ(grid.estimator.objectives, 2u);
  EXPECT_EQ(grid.horizon(), 60000u);
}

TEST(Config, SeedLists) {
  EXPECT_EQ(parse_seed_list("1,2,7"), (std::vector<std::uint64_t>{1, 2, 7}));
  EXPECT_EQ(parse_seed_list("0..2"), (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_THROW(parse_seed_list("4..2"), std::invalid_argument);
  EXPECT_THROW(parse_seed_list("x"), std::invalid_argument);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(config_error("[estimator]\nlambda = 0.5\n").find("lambda"), std::string::npos);
  EXPECT_NE(config_error("[estimator]\ndelta = 2\n").find("delta"), std::string::npos);
  EXPECT_NE(config_error("[experiment]\nmode = sometimes\n").find("experiment.mode"), std::string::npos);
  EXPECT_NE(config_error("[experiment]\npolicy = greedy\n").find("experiment.policy"), std::string::npos);
  EXPECT_NE(config_error("[experiment]\nbogus = 1\n").find("experiment.bogus"), std::string::npos);
  EXPECT_NE(config_error("[mystery]\nx = 1\n").find("mystery"), std::string::npos);
  EXPECT_NE(config_error("[experiment]\nT = ten\n").find("experiment.T"), std::string::npos);
  EXPECT_NE(config_error("[experiment]\nT = 10\nepisodes = 2\n").find("experiment.T"), std::string::npos);
  EXPECT_NE(config_error("[synthetic]\narms = 1\n").find("synthetic.arms"), std::string::npos);
  EXPECT_NE(config_error("[experiment]\nenv = gridworld\nmap = /no/such/map.txt\n").find("experiment.map"),
            std::string::npos);
}

TEST(Config, LoadResolvesMapRelativeToConfig) {
  const fs::path dir = scratch_dir("config_load");
  fs::create_directories(dir / "maps");
  std::ofstream(dir / "maps" / "tiny.txt") << "S.\n.G\n";
  std::ofstream(dir / "run.ini") << "[experiment]\nenv = gridworld\nmap = maps/tiny.txt\n";
  const auto cfg = load_config(dir / "run.ini");
  EXPECT_EQ(cfg.map_path, dir / "maps" / "tiny.txt");
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_THROW(load_config(dir / "absent.ini"), std::runtime_error);
}

TEST(StepCsv, SingleStepHasHeaderAndOneRow) {
  const fs::path dir = scratch_dir("csv_t1");
  run_experiment(synthetic_run(1, dir));
  const std::string text = slurp(dir / "blender" / "steps_seed0.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(StepCsv, RerunIsByteIdentical) {
  const fs::path a = scratch_dir("csv_a");
  const fs::path b = scratch_dir("csv_b");
  for (auto timing : {ContextTiming::faithful, ContextTiming::fresh}) {
    auto cfg_a = synthetic_run(800, a);
    auto cfg_b = synthetic_run(800, b);
    cfg_a.mode = cfg_b.mode = timing;
    cfg_a.seeds = cfg_b.seeds = {11, 12};
    cfg_b.workers = 2;
    run_experiment(cfg_a);
    run_experiment(cfg_b);
    for (auto seed : {11, 12}) {
      const auto name = "steps_seed" + std::to_string(seed) + ".csv";
      const std::string first = slurp(a / "blender" / name);
      ASSERT_FALSE(first.empty());
      EXPECT_EQ(first, slurp(b / "blender" / name));
    }
  }
}

TEST(StepCsv, RoundTripsTheTrace) {
  const fs::path dir = scratch_dir("csv_roundtrip");
  ExperimentConfig cfg = synthetic_run(300, dir);
  auto env = make_environment(cfg, 0);
  BlenderConfig bc;
  bc.estimator = cfg.estimator;
  bc.arms = env->arms();
  const Rollout run = rollout(*env, bc, PolicyKind::blender, 0, 1, 300);
  const MetricSeries series = compute_metrics(run.trace);
  write_step_csv(run.trace, series, dir / "trace.csv");
  const CsvTable table = read_csv(dir / "trace.csv");
  ASSERT_EQ(table.rows.size(), 300u);
  for (std::size_t t = 0; t < 300; ++t) {
    const auto& row = table.rows[t];
    const auto& rec = run.trace.records[t];
    EXPECT_EQ(row[table.column("step")], static_cast<double>(rec.step));
    EXPECT_EQ(row[table.column("arm")], static_cast<double>(rec.arm));
    EXPECT_NEAR(row[table.column("feedback_1")], rec.feedback[1], 1e-9);
    EXPECT_NEAR(row[table.column("ucb_2_0")], rec.ucb_indices[2][0], 1e-9);
    EXPECT_NEAR(row[table.column("est_loss_1")], rec.est_losses[1], 1e-9);
    EXPECT_NEAR(row[table.column("pr_cum")], series.pr_cum[t], 1e-9);
    EXPECT_NEAR(row[table.column("cml_bound")], series.cml_bound[t], 1e-9);
    EXPECT_NEAR(row[table.column("beta_t")], rec.beta_t, 1e-9);
    EXPECT_NEAR(row[table.column("inv_norm")], rec.inv_norm_pulled, 1e-9);
  }
}

TEST(Rollout, FreshBlenderPerSeed) {
  ExperimentConfig cfg = synthetic_run(200, scratch_dir("fresh_blender"));
  BlenderConfig bc;
  bc.estimator = cfg.estimator;
  bc.arms = 3;
  auto env1 = make_environment(cfg, 5);
  auto env2 = make_environment(cfg, 5);
  const Rollout first = rollout(*env1, bc, PolicyKind::blender, 5, 1, 200);
  rollout(*make_environment(cfg, 6), bc, PolicyKind::blender, 6, 1, 200);
  const Rollout again = rollout(*env2, bc, PolicyKind::blender, 5, 1, 200);
  for (std::size_t t = 0; t < 200; ++t) EXPECT_EQ(first.trace.records[t].arm, again.trace.records[t].arm);
}

TEST(Aggregation, SingleSeedHasZeroStdAndBatchCount) {
  ExperimentConfig cfg = grid_run(PolicyKind::blender, 65);
  const auto summary = run_experiment(cfg);
  EXPECT_EQ(summary.batches, 2u);
  ASSERT_EQ(summary.reward.size(), 2u);
  for (const auto* stats : {&summary.reward, &summary.cost, &summary.correct_pick}) {
    for (const auto& s : *stats) EXPECT_EQ(s.std, 0.0);
  }
  EXPECT_EQ(mean_std({}).mean, 0.0);
  const auto ms = mean_std({1.0, 3.0});
  EXPECT_EQ(ms.mean, 2.0);
  EXPECT_EQ(ms.std, 1.0);
}

TEST(Aggregation, GridworldPolicyOrdering) {
  const auto safe = run_experiment(grid_run(PolicyKind::always_safe, 30));
  const auto perf = run_experiment(grid_run(PolicyKind::always_performant, 30));
  const auto blend = run_experiment(grid_run(PolicyKind::blender, 30));
  EXPECT_NEAR(safe.cost[0].mean, 0.0, 1e-12);
  EXPECT_GT(perf.reward[0].mean, safe.reward[0].mean);
  EXPECT_GT(perf.cost[0].mean, safe.cost[0].mean);
  EXPECT_GT(blend.reward[0].mean, safe.reward[0].mean);
  EXPECT_LT(blend.reward[0].mean, perf.reward[0].mean);
  EXPECT_GT(blend.cost[0].mean, safe.cost[0].mean);
  EXPECT_LT(blend.cost[0].mean, perf.cost[0].mean);
  EXPECT_GT(blend.correct_pick[0].mean, 0.5);
}

TEST(Aggregation, UniformRandomOnTwoArmsPicksCorrectlyHalfTheTime) {
  ExperimentConfig cfg = synthetic_run(10000, scratch_dir("uniform"));
  cfg.synthetic.arms = 2;
  cfg.policies = {PolicyKind::uniform_random};
  cfg.write_steps = false;
  const auto summary = run_experiment(cfg);
  EXPECT_NEAR(summary.seeds[0].correct_pick_rate, 0.5, 3 * std::sqrt(0.25 / 10000));
}

TEST(RunAll, WritesSummaryAndPlotData) {
  const fs::path dir = scratch_dir("run_all");
  ExperimentConfig cfg = grid_run(PolicyKind::blender, 30);
  cfg.policies = {PolicyKind::blender, PolicyKind::always_safe};
  cfg.seeds = {0, 1};
  cfg.output_dir = dir;
  cfg.episode_len = 50;
  cfg.grid.episode_len = 50;
  run_all(cfg);
  for (const char* name : {"summary.csv", "plot_reward.csv", "plot_cost.csv", "plot_correct_pick.csv",
                           "plot_regret.csv"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  const CsvTable reward = read_csv(dir / "plot_reward.csv");
  EXPECT_EQ(reward.rows.size(), 1u);
  EXPECT_NO_THROW(reward.column("always_safe_std"));
  const CsvTable regret = read_csv(dir / "plot_regret.csv");
  EXPECT_EQ(regret.rows.size(), 30u * 50u);
  for (const auto& row : regret.rows) {
    EXPECT_GE(row[regret.column("pr_theory")], row[regret.column("blender_pr_mean")]);
  }
}
