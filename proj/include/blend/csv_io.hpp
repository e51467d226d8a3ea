#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "blend/experiment.hpp"
#include "blend/metrics.hpp"

namespace blend {

/// Columns: step, arm, feedback_*, ucb_<arm>_<obj>, est_loss_*, psg_increment,
/// ml_increment, pr_cum, cml_cum, cml_bound, beta_t, inv_norm. Numbers are
/// written with 17 significant digits.
void write_step_csv(const RunTrace& trace, const MetricSeries& series,
                    const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// One row per seed and policy.
void write_summary_csv(const std::vector<AggregateSummary>& summaries,
                       const std::filesystem::path& path);

/// Writes plot_reward.csv, plot_cost.csv, plot_correct_pick.csv and
/// plot_regret.csv into `dir`.
void emit_plot_data(const std::vector<AggregateSummary>& summaries, const std::filesystem::path& dir);

}  // namespace blend
