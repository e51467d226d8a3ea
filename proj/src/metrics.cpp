#include "blend/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace blend {
namespace {

void check_ground_truth(const RunTrace& trace) {
  if (trace.true_means.size() != trace.records.size()) {
    throw std::invalid_argument("run trace: ground truth missing for some steps");
  }
  for (std::size_t t = 0; t < trace.records.size(); ++t) {
    if (trace.records[t].arm >= trace.true_means[t].size()) {
      throw std::invalid_argument("run trace: pulled arm has no ground-truth mean");
    }
  }
}

template <typename PerStep>
std::vector<double> cumulate(const RunTrace& trace, PerStep per_step) {
  std::vector<double> out(trace.records.size());
  double total = 0.0;
  for (std::size_t t = 0; t < trace.records.size(); ++t) {
    total += per_step(t);
    out[t] = total;
  }
  return out;
}

}  // namespace

std::vector<double> pareto_regret(const RunTrace& trace) {
  check_ground_truth(trace);
  return cumulate(trace, [&](std::size_t t) {
    return pareto_suboptimality_gap(trace.true_means[t], trace.records[t].arm);
  });
}

std::vector<double> cumulative_maximal_loss(const RunTrace& trace) {
  check_ground_truth(trace);
  return cumulate(trace, [&](std::size_t t) {
    return maximal_loss(trace.true_means[t], trace.records[t].arm);
  });
}

std::vector<double> cml_upper_bound(const RunTrace& trace) {
  const double beta_T = confidence_radius(trace.config, trace.records.size());
  for (const auto& r : trace.records) {
    if (r.arm >= r.est_losses.size()) {
      throw std::invalid_argument("run trace: record lacks estimated losses");
    }
  }
  return cumulate(trace, [&](std::size_t t) {
    const auto& r = trace.records[t];
    return r.est_losses[r.arm] + 2.0 * beta_T * r.inv_norm_pulled;
  });
}

double pr_theory_bound(std::uint64_t T, const EstimatorConfig& config) {
  if (T < 1) throw std::invalid_argument("pr_theory_bound: T must be at least 1");
  const double beta_T = confidence_radius(config, T);
  const double d = static_cast<double>(config.dim);
  const double t = static_cast<double>(T);
  return 8.0 * beta_T * beta_T * std::sqrt(2.0 * t * d * std::log(config.lambda + t * config.L / d));
}

std::vector<bool> correct_picks(const RunTrace& trace) {
  check_ground_truth(trace);
  std::vector<bool> out(trace.records.size());
  for (std::size_t t = 0; t < trace.records.size(); ++t) {
    out[t] = assert_nondominated_pick(trace.true_means[t], trace.records[t].arm);
  }
  return out;
}

double correct_pick_rate(const RunTrace& trace) {
  const auto picks = correct_picks(trace);
  if (picks.empty()) return 0.0;
  std::size_t good = 0;
  for (bool p : picks) good += p ? 1 : 0;
  return static_cast<double>(good) / static_cast<double>(picks.size());
}

MetricSeries compute_metrics(const RunTrace& trace) {
  check_ground_truth(trace);
  MetricSeries s;
  const std::size_t T = trace.records.size();
  s.psg.resize(T);
  s.ml.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    const auto g = gaps(trace.true_means[t], trace.records[t].arm);
    s.psg[t] = g.psg;
    s.ml[t] = g.maximal_loss;
  }
  s.pr_cum = pareto_regret(trace);
  s.cml_cum = cumulative_maximal_loss(trace);
  s.cml_bound = cml_upper_bound(trace);
  s.pr_theory.resize(T);
  for (std::size_t t = 0; t < T; ++t) s.pr_theory[t] = pr_theory_bound(t + 1, trace.config);
  s.correct_pick = correct_picks(trace);
  return s;
}

}  // namespace blend
