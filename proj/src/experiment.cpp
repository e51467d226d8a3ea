#include "blend/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "blend/csv_io.hpp"
#include "blend/rng.hpp"

namespace blend {
namespace {

ArmId baseline_arm(PolicyKind policy, std::size_t arms, std::mt19937_64& rng) {
  switch (policy) {
    case PolicyKind::always_performant: return kPerformantArm;
    case PolicyKind::always_safe: return kSafeArm;
    case PolicyKind::uniform_random: {
      std::uniform_int_distribution<std::size_t> pick(0, arms - 1);
      return pick(rng);
    }
    case PolicyKind::blender: break;
  }
  throw std::logic_error("baseline_arm: not a baseline policy");
}

template <typename Fn>
void for_each_seed(std::size_t count, std::size_t workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

BatchStat mean_std(const std::vector<double>& values) {
  if (values.empty()) return {};
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  return {mean, std::sqrt(std::max(m2 / static_cast<double>(n), 0.0))};
}

Rollout rollout(Environment& env, const BlenderConfig& blender_config, PolicyKind policy,
                std::uint64_t seed, std::size_t episodes, std::size_t episode_len,
                const StepObserver& observer) {
  Blender blender(blender_config, seed);
  auto baseline_rng = make_stream(seed, Stream::arm_selection);
  const bool fresh = blender_config.timing == ContextTiming::fresh;

  Rollout out;
  out.trace.config = blender_config.estimator;
  out.trace.records.reserve(episodes * episode_len);
  out.trace.true_means.reserve(episodes * episode_len);
  std::vector<ContextVector> contexts;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    env.begin_episode();
    EpisodeStats stats;
    std::size_t correct = 0;
    for (std::size_t k = 0; k < episode_len; ++k) {
      contexts.assign(env.contexts().begin(), env.contexts().end());
      auto truth = env.true_means();
      if (fresh) blender.refresh(contexts);
      const ArmId arm = policy == PolicyKind::blender
                            ? blender.select_arm()
                            : baseline_arm(policy, env.arms(), baseline_rng);
      const FeedbackVector y = env.apply(arm);
      StepRecord rec = blender.observe(arm, y, contexts);
      if (observer) observer(blender, rec);

      stats.reward += y[0];
      if (y.size() > 1) stats.cost += 1.0 - y[1];
      if (assert_nondominated_pick(truth, arm)) ++correct;
      out.trace.records.push_back(std::move(rec));
      out.trace.true_means.push_back(std::move(truth));
    }
    stats.correct_rate = static_cast<double>(correct) / static_cast<double>(episode_len);
    out.episodes.push_back(stats);
  }
  out.norm_bound_violations = blender.estimator().norm_bound_violations();
  return out;
}

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.env == EnvKind::gridworld) {
    GridMap map = config.map_path.empty() ? GridMap::fixture() : GridMap::load(config.map_path);
    GridParams params = config.grid;
    params.episode_len = static_cast<int>(config.episode_len);
    return std::make_unique<GridworldTask>(std::move(map), params);
  }
  return std::make_unique<SyntheticLinearEnv>(SyntheticLinearEnv::sample(config.synthetic, seed));
}

AggregateSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  AggregateSummary summary;
  summary.policy = config.policies.front();
  summary.seeds.resize(config.seeds.size());

  const std::uint64_t T = config.horizon();
  summary.pr_theory.resize(T);
  for (std::uint64_t t = 0; t < T; ++t) summary.pr_theory[t] = pr_theory_bound(t + 1, config.estimator);

  BlenderConfig bc;
  bc.estimator = config.estimator;
  bc.timing = config.mode;
  const auto policy_dir = config.output_dir / to_string(summary.policy);
  if (config.write_steps) std::filesystem::create_directories(policy_dir);

  for_each_seed(config.seeds.size(), config.workers, [&](std::size_t i) {
    const std::uint64_t seed = config.seeds[i];
    auto env = make_environment(config, seed);
    BlenderConfig local = bc;
    local.arms = env->arms();
    Rollout run = rollout(*env, local, summary.policy, seed, config.episodes, config.episode_len);
    const MetricSeries series = compute_metrics(run.trace);
    if (config.write_steps) {
      write_step_csv(run.trace, series, policy_dir / ("steps_seed" + std::to_string(seed) + ".csv"));
    }

    SeedResult r;
    r.seed = seed;
    r.episodes = std::move(run.episodes);
    r.final_pr = series.pr_cum.back();
    r.final_cml = series.cml_cum.back();
    r.final_cml_bound = series.cml_bound.back();
    r.pr_theory_T = series.pr_theory.back();
    r.correct_pick_rate = correct_pick_rate(run.trace);
    r.cml_bound_held = true;
    for (std::size_t t = 0; t < series.cml_cum.size(); ++t) {
      if (series.cml_cum[t] > series.cml_bound[t]) r.cml_bound_held = false;
    }
    r.pr_bound_held = r.final_pr <= r.pr_theory_T;
    r.nondominated_violations =
        summary.policy == PolicyKind::blender
            ? nondominated_pick_violations(run.trace.records, config.mode)
            : 0;
    r.norm_bound_violations = run.norm_bound_violations;
    r.pr_cum = series.pr_cum;
    r.cml_cum = series.cml_cum;
    r.cml_bound = series.cml_bound;
    summary.seeds[i] = std::move(r);
  });

  summary.batches = config.episodes / kEpisodesPerBatch;
  for (std::size_t b = 0; b < summary.batches; ++b) {
    std::vector<double> reward, cost, correct;
    for (const auto& s : summary.seeds) {
      double r = 0.0, c = 0.0, k = 0.0;
      for (std::size_t e = b * kEpisodesPerBatch; e < (b + 1) * kEpisodesPerBatch; ++e) {
        r += s.episodes[e].reward;
        c += s.episodes[e].cost;
        k += s.episodes[e].correct_rate;
      }
      const double n = static_cast<double>(kEpisodesPerBatch);
      reward.push_back(r / n);
      cost.push_back(c / n);
      correct.push_back(k / n);
    }
    summary.reward.push_back(mean_std(reward));
    summary.cost.push_back(mean_std(cost));
    summary.correct_pick.push_back(mean_std(correct));
  }
  return summary;
}

std::vector<AggregateSummary> run_all(const ExperimentConfig& config) {
  config.validate();
  std::vector<AggregateSummary> out;
  for (PolicyKind p : config.policies) {
    ExperimentConfig single = config;
    single.policies = {p};
    out.push_back(run_experiment(single));
  }
  std::filesystem::create_directories(config.output_dir);
  write_summary_csv(out, config.output_dir / "summary.csv");
  emit_plot_data(out, config.output_dir);
  return out;
}

}  // namespace blend
