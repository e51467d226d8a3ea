#pragma once

// Ground-truth accounting for a finished run and the computable bounds that
// accompany it.

#include <cstdint>
#include <vector>

#include "blend/blender.hpp"

namespace blend {

struct RunTrace {
  std::vector<StepRecord> records;
  /// true_means[t][x]: expected feedback of arm x in the state of step t.
  std::vector<std::vector<ObjectiveVector>> true_means;
  EstimatorConfig config;
};

struct MetricSeries {
  std::vector<double> psg;        // per-step Pareto suboptimality gap of the pull
  std::vector<double> ml;         // per-step maximal loss of the pull
  std::vector<double> pr_cum;
  std::vector<double> cml_cum;
  std::vector<double> cml_bound;
  std::vector<double> pr_theory;
  std::vector<bool> correct_pick;
};

/// Cumulative Pareto suboptimality gaps of the pulled arms.
std::vector<double> pareto_regret(const RunTrace& trace);
/// Cumulative maximal losses of the pulled arms.
std::vector<double> cumulative_maximal_loss(const RunTrace& trace);
/// Cumulative est_loss(pulled) + 2 beta_T ||Psi_t||, with beta_T at the final horizon.
std::vector<double> cml_upper_bound(const RunTrace& trace);

/// 8 beta_T^2 sqrt(2 T d log(lambda + T L / d)); T >= 1.
double pr_theory_bound(std::uint64_t T, const EstimatorConfig& config);

/// Per step: the pulled arm's true feedback is not dominated by another arm's.
std::vector<bool> correct_picks(const RunTrace& trace);
double correct_pick_rate(const RunTrace& trace);

MetricSeries compute_metrics(const RunTrace& trace);

}  // namespace blend
