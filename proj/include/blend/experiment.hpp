#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "blend/config.hpp"
#include "blend/environment.hpp"
#include "blend/metrics.hpp"

namespace blend {

struct EpisodeStats {
  double reward = 0.0;        // sum of the first feedback component
  double cost = 0.0;          // sum of 1 - second feedback component
  double correct_rate = 0.0;  // fraction of non-dominated pulls
};

struct Rollout {
  RunTrace trace;
  std::vector<EpisodeStats> episodes;
  std::uint64_t norm_bound_violations = 0;
};

/// Called after every step with the blender's state and the fresh record.
using StepObserver = std::function<void(const Blender&, const StepRecord&)>;

/// Runs one policy for `episodes` x `episode_len` steps with a fresh blender.
/// Baseline policies override the pull but the blender still observes every
/// step, so records are complete for every policy.
Rollout rollout(Environment& env, const BlenderConfig& blender_config, PolicyKind policy,
                std::uint64_t seed, std::size_t episodes, std::size_t episode_len,
                const StepObserver& observer = {});

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config, std::uint64_t seed);

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<EpisodeStats> episodes;
  std::vector<double> pr_cum;
  std::vector<double> cml_cum;
  std::vector<double> cml_bound;
  double final_pr = 0.0;
  double final_cml = 0.0;
  double final_cml_bound = 0.0;
  double pr_theory_T = 0.0;
  double correct_pick_rate = 0.0;
  bool cml_bound_held = false;  // cml_cum <= cml_bound at every step
  bool pr_bound_held = false;   // final PR <= pr_theory(T)
  std::size_t nondominated_violations = 0;
  std::uint64_t norm_bound_violations = 0;
};

struct BatchStat {
  double mean = 0.0;
  double std = 0.0;
};

struct AggregateSummary {
  PolicyKind policy = PolicyKind::blender;
  std::size_t batches = 0;
  /// Per batch of 30 episodes: mean and std across seeds of each seed's batch mean.
  std::vector<BatchStat> reward;
  std::vector<BatchStat> cost;
  std::vector<BatchStat> correct_pick;
  std::vector<SeedResult> seeds;  // in config seed order
  std::vector<double> pr_theory;  // per step
};

inline constexpr std::size_t kEpisodesPerBatch = 30;

/// Runs the first policy of `config` over every seed; writes per-step CSVs when
/// enabled and returns the aggregate.
AggregateSummary run_experiment(const ExperimentConfig& config);
/// Runs every configured policy, writes summary.csv and the plot data.
std::vector<AggregateSummary> run_all(const ExperimentConfig& config);

/// Mean and population standard deviation; {0, 0} for an empty input.
BatchStat mean_std(const std::vector<double>& values);

}  // namespace blend
