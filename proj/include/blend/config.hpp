#pragma once

// Experiment configuration: an INI-style file of `key = value` lines grouped
// in [experiment], [estimator], [synthetic] and [gridworld] sections.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "blend/blender.hpp"
#include "blend/gridworld.hpp"
#include "blend/synthetic_env.hpp"

namespace blend {

enum class EnvKind { synthetic, gridworld };
enum class PolicyKind { blender, always_safe, always_performant, uniform_random };

std::string to_string(EnvKind kind);
std::string to_string(PolicyKind kind);
std::string to_string(ContextTiming timing);
PolicyKind parse_policy(const std::string& text);

struct ExperimentConfig {
  EnvKind env = EnvKind::synthetic;
  /// Gridworld map file; empty selects the built-in 7x7 fixture.
  std::filesystem::path map_path;
  ContextTiming mode = ContextTiming::faithful;
  std::vector<PolicyKind> policies{PolicyKind::blender};
  /// dim and objectives are filled in from the environment.
  EstimatorConfig estimator;
  SyntheticSpec synthetic;
  GridParams grid;
  /// Horizon T = episodes * episode_len.
  std::size_t episodes = 1;
  std::size_t episode_len = 1000;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "out";
  /// Worker threads for the seed fan-out; 0 uses the hardware concurrency.
  std::size_t workers = 0;
  bool write_steps = true;

  std::uint64_t horizon() const { return static_cast<std::uint64_t>(episodes) * episode_len; }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Parses "a,b,c" and inclusive ranges "a..b" (mixable: "0..4,9").
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Relative map paths are resolved against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace blend
