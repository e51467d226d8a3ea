#include "blend/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blend {
namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void join(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

}  // namespace

void write_step_csv(const RunTrace& trace, const MetricSeries& series,
                    const std::filesystem::path& path) {
  const std::size_t T = trace.records.size();
  if (series.pr_cum.size() != T || series.psg.size() != T) {
    throw std::invalid_argument("write_step_csv: metric series does not match the trace");
  }
  auto out = open_out(path);
  if (T == 0) {
    out << "step,arm\n";
    finish(out, path);
    return;
  }
  const auto& first = trace.records.front();
  const std::size_t K = first.ucb_indices.size();
  const auto m = static_cast<std::size_t>(first.feedback.size());

  std::vector<std::string> header{"step", "arm"};
  for (std::size_t i = 0; i < m; ++i) header.push_back("feedback_" + std::to_string(i));
  for (std::size_t x = 0; x < K; ++x) {
    for (std::size_t i = 0; i < m; ++i) {
      header.push_back("ucb_" + std::to_string(x) + "_" + std::to_string(i));
    }
  }
  for (std::size_t x = 0; x < K; ++x) header.push_back("est_loss_" + std::to_string(x));
  for (const char* name : {"psg_increment", "ml_increment", "pr_cum", "cml_cum", "cml_bound",
                           "beta_t", "inv_norm"}) {
    header.emplace_back(name);
  }
  join(out, header);

  std::vector<std::string> row;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& r = trace.records[t];
    row.clear();
    row.push_back(std::to_string(r.step));
    row.push_back(std::to_string(r.arm));
    for (std::size_t i = 0; i < m; ++i) row.push_back(num(r.feedback[static_cast<Eigen::Index>(i)]));
    for (std::size_t x = 0; x < K; ++x) {
      for (std::size_t i = 0; i < m; ++i) {
        row.push_back(num(r.ucb_indices[x][static_cast<Eigen::Index>(i)]));
      }
    }
    for (std::size_t x = 0; x < K; ++x) row.push_back(num(r.est_losses[x]));
    row.push_back(num(series.psg[t]));
    row.push_back(num(series.ml[t]));
    row.push_back(num(series.pr_cum[t]));
    row.push_back(num(series.cml_cum[t]));
    row.push_back(num(series.cml_bound[t]));
    row.push_back(num(r.beta_t));
    row.push_back(num(r.inv_norm_pulled));
    join(out, row);
  }
  finish(out, path);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("csv: no column " + name);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = line.find(',', pos);
      const auto end = comma == std::string::npos ? line.size() : comma;
      double v = 0.0;
      const auto res = std::from_chars(line.data() + pos, line.data() + end, v);
      if (res.ec != std::errc{} || res.ptr != line.data() + end) {
        throw std::runtime_error("csv: bad number in " + path.string());
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (row.size() != table.header.size()) throw std::runtime_error("csv: ragged row in " + path.string());
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_summary_csv(const std::vector<AggregateSummary>& summaries,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "policy,seed,final_pr,final_cml,final_cml_bound,pr_theory_T,cml_bound_held,"
         "pr_bound_held,nondominated_violations,norm_bound_violations,mean_episode_reward,"
         "mean_episode_cost,correct_pick_rate\n";
  for (const auto& s : summaries) {
    for (const auto& r : s.seeds) {
      std::vector<double> reward, cost;
      for (const auto& e : r.episodes) {
        reward.push_back(e.reward);
        cost.push_back(e.cost);
      }
      join(out, {to_string(s.policy), std::to_string(r.seed), num(r.final_pr), num(r.final_cml),
                 num(r.final_cml_bound), num(r.pr_theory_T), r.cml_bound_held ? "1" : "0",
                 r.pr_bound_held ? "1" : "0", std::to_string(r.nondominated_violations),
                 std::to_string(r.norm_bound_violations), num(mean_std(reward).mean),
                 num(mean_std(cost).mean), num(r.correct_pick_rate)});
    }
  }
  finish(out, path);
}

void emit_plot_data(const std::vector<AggregateSummary>& summaries, const std::filesystem::path& dir) {
  if (summaries.empty()) throw std::invalid_argument("emit_plot_data: no summaries");
  std::filesystem::create_directories(dir);

  auto batch_file = [&](const std::string& name, auto member) {
    const auto path = dir / name;
    auto out = open_out(path);
    std::vector<std::string> header{"batch"};
    std::size_t batches = summaries.front().batches;
    for (const auto& s : summaries) {
      header.push_back(to_string(s.policy) + "_mean");
      header.push_back(to_string(s.policy) + "_std");
      batches = std::min(batches, s.batches);
    }
    join(out, header);
    for (std::size_t b = 0; b < batches; ++b) {
      std::vector<std::string> row{std::to_string(b)};
      for (const auto& s : summaries) {
        const BatchStat& st = (s.*member)[b];
        row.push_back(num(st.mean));
        row.push_back(num(st.std));
      }
      join(out, row);
    }
    finish(out, path);
  };
  batch_file("plot_reward.csv", &AggregateSummary::reward);
  batch_file("plot_cost.csv", &AggregateSummary::cost);
  batch_file("plot_correct_pick.csv", &AggregateSummary::correct_pick);

  const auto path = dir / "plot_regret.csv";
  auto out = open_out(path);
  std::vector<std::string> header{"t", "pr_theory"};
  std::size_t T = summaries.front().pr_theory.size();
  for (const auto& s : summaries) {
    const auto p = to_string(s.policy);
    for (const char* col : {"_pr_mean", "_pr_std", "_cml_mean", "_cml_std", "_cml_bound_mean",
                            "_cml_bound_std"}) {
      header.push_back(p + col);
    }
    T = std::min(T, s.pr_theory.size());
  }
  join(out, header);
  std::vector<double> pr, cml, bound;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<std::string> row{std::to_string(t + 1), num(summaries.front().pr_theory[t])};
    for (const auto& s : summaries) {
      pr.clear();
      cml.clear();
      bound.clear();
      for (const auto& r : s.seeds) {
        pr.push_back(r.pr_cum[t]);
        cml.push_back(r.cml_cum[t]);
        bound.push_back(r.cml_bound[t]);
      }
      for (const auto& v : {mean_std(pr), mean_std(cml), mean_std(bound)}) {
        row.push_back(num(v.mean));
        row.push_back(num(v.std));
      }
    }
    join(out, row);
  }
  finish(out, path);
}

}  // namespace blend
