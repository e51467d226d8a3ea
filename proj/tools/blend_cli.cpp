// blend_cli: run experiments, validate configs, and cross-check the closed
// forms against the brute-force oracles.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "blend/config.hpp"
#include "blend/experiment.hpp"
#include "blend/oracles.hpp"

namespace {

constexpr double kOracleTolerance = 1e-8;

int cmd_run(const std::string& config_path, const std::string& seeds, const std::string& out) {
  blend::ExperimentConfig config = blend::load_config(config_path);
  if (!seeds.empty()) config.seeds = blend::parse_seed_list(seeds);
  if (!out.empty()) config.output_dir = out;
  config.validate();

  const auto summaries = blend::run_all(config);
  for (const auto& summary : summaries) {
    double pr = 0.0, cml = 0.0, rate = 0.0;
    std::uint64_t violations = 0;
    for (const auto& s : summary.seeds) {
      pr += s.final_pr;
      cml += s.final_cml;
      rate += s.correct_pick_rate;
      violations += s.norm_bound_violations;
    }
    const double n = static_cast<double>(summary.seeds.size());
    std::cout << blend::to_string(summary.policy) << ": seeds=" << summary.seeds.size()
              << " mean_pr=" << pr / n << " mean_cml=" << cml / n
              << " correct_pick=" << rate / n << '\n';
    if (violations > 0) {
      std::cerr << "warning: " << violations
                << " contexts exceeded the configured norm bound L\n";
    }
  }
  std::cout << "outputs written to " << config.output_dir.string() << '\n';
  return EXIT_SUCCESS;
}

int cmd_validate(const std::string& config_path) {
  const blend::ExperimentConfig config = blend::load_config(config_path);
  config.validate();
  std::cout << "ok: env=" << blend::to_string(config.env) << " mode=" << blend::to_string(config.mode)
            << " T=" << config.horizon() << " seeds=" << config.seeds.size() << '\n';
  return EXIT_SUCCESS;
}

int cmd_oracle_check(const std::string& module, std::size_t cases, std::uint64_t seed) {
  blend::oracle::Deviation dev;
  if (module == "pareto") {
    dev = blend::oracle::check_pareto(cases, seed);
    std::cout << "pareto: cases=" << dev.cases << " max_psg_dev=" << dev.max_psg
              << " max_ml_dev=" << dev.max_maximal_loss
              << " nondominated_mismatches=" << dev.nondominated_mismatches << '\n';
  } else {
    dev = blend::oracle::check_estimator(cases, 20, seed);
    std::cout << "estimator: cases=" << dev.cases << " max_theta_dev=" << dev.max_theta
              << " max_inv_norm_dev=" << dev.max_inv_norm << '\n';
  }
  if (dev.worst() > kOracleTolerance) {
    std::cerr << "deviation above " << kOracleTolerance << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blended safe/performant controller experiments"};
  app.require_subcommand(1);

  std::string config_path, seeds, out;
  auto* run = app.add_subcommand("run", "Run the configured experiment");
  run->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seeds", seeds, "Seed list, e.g. 1,2,3 or 0..29");
  run->add_option("--out", out, "Output directory");

  auto* validate = app.add_subcommand("validate", "Parse and validate a config");
  validate->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);

  std::string module = "pareto";
  std::size_t cases = 1000;
  std::uint64_t seed = 1;
  auto* oracle = app.add_subcommand("oracle-check", "Compare closed forms with brute-force oracles");
  oracle->add_option("--module", module)->check(CLI::IsMember({"pareto", "estimator"}));
  oracle->add_option("--cases", cases)->check(CLI::PositiveNumber);
  oracle->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, seeds, out);
    if (*validate) return cmd_validate(config_path);
    return cmd_oracle_check(module, cases, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
}
