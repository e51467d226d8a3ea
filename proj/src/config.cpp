#include "blend/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace blend {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
  auto blank = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), blank));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), blank).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::invalid_argument(field + ": " + what);
}

template <typename T>
T get(const pt::ptree& section, const std::string& prefix, const std::string& key, T fallback) {
  const auto node = section.get_optional<std::string>(key);
  if (!node) return fallback;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      const std::string v = trim(*node);
      if (v == "true" || v == "1" || v == "yes") return true;
      if (v == "false" || v == "0" || v == "no") return false;
      throw std::invalid_argument("not a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      return trim(*node);
    } else if constexpr (std::is_floating_point_v<T>) {
      std::size_t used = 0;
      const double v = std::stod(*node, &used);
      if (trim(node->substr(used)).size() != 0) throw std::invalid_argument("trailing text");
      return static_cast<T>(v);
    } else {
      const std::string v = trim(*node);
      if (!v.empty() && v.front() == '-') throw std::invalid_argument("negative");
      std::size_t used = 0;
      const unsigned long long n = std::stoull(v, &used);
      if (used != v.size()) throw std::invalid_argument("trailing text");
      return static_cast<T>(n);
    }
  } catch (const std::exception&) {
    fail(prefix + "." + key, "cannot parse '" + *node + "'");
  }
}

void reject_unknown(const pt::ptree& section, const std::string& name,
                    const std::set<std::string>& known) {
  for (const auto& [key, value] : section) {
    if (!known.count(key)) fail(name + "." + key, "unknown key");
  }
}

ContextTiming parse_mode(const std::string& text) {
  if (text == "faithful") return ContextTiming::faithful;
  if (text == "fresh_context" || text == "fresh") return ContextTiming::fresh;
  fail("experiment.mode", "expected faithful or fresh_context, got '" + text + "'");
}

}  // namespace

std::string to_string(EnvKind kind) { return kind == EnvKind::synthetic ? "synthetic" : "gridworld"; }

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::blender: return "blender";
    case PolicyKind::always_safe: return "always_safe";
    case PolicyKind::always_performant: return "always_performant";
    case PolicyKind::uniform_random: return "uniform_random";
  }
  return "unknown";
}

std::string to_string(ContextTiming timing) {
  return timing == ContextTiming::faithful ? "faithful" : "fresh_context";
}

PolicyKind parse_policy(const std::string& text) {
  for (auto kind : {PolicyKind::blender, PolicyKind::always_safe, PolicyKind::always_performant,
                    PolicyKind::uniform_random}) {
    if (text == to_string(kind)) return kind;
  }
  fail("experiment.policy", "unknown policy '" + text + "'");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (!s.empty() && s.front() == '-') throw std::invalid_argument("negative");
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) fail("experiment.seeds", "bad seed '" + s + "'");
    return static_cast<std::uint64_t>(v);
  };
  for (const auto& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(number(item));
      continue;
    }
    const auto lo = number(trim(item.substr(0, dots)));
    const auto hi = number(trim(item.substr(dots + 2)));
    if (hi < lo) fail("experiment.seeds", "empty range '" + item + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) fail("experiment.seeds", "no seeds given");
  return seeds;
}

void ExperimentConfig::validate() const {
  estimator.validate();
  if (episodes < 1) fail("experiment.episodes", "must be at least 1");
  if (episode_len < 1) fail("experiment.episode_len", "must be at least 1");
  if (seeds.empty()) fail("experiment.seeds", "must not be empty");
  if (policies.empty()) fail("experiment.policy", "must name at least one policy");
  if (env == EnvKind::gridworld) {
    if (!map_path.empty() && !std::filesystem::exists(map_path)) {
      fail("experiment.map", "file not found: " + map_path.string());
    }
    if (static_cast<std::size_t>(grid.episode_len) != episode_len) {
      fail("gridworld.episode_len", "must equal experiment.episode_len");
    }
    if (estimator.dim != 3 || estimator.objectives != 2) {
      fail("estimator.dim", "gridworld contexts are 3-dimensional with 2 objectives");
    }
    GridworldEnv probe(map_path.empty() ? GridMap::fixture() : GridMap::load(map_path), grid);
    (void)probe;
  } else {
    if (synthetic.arms < 2) fail("synthetic.arms", "blending needs at least 2 arms");
    if (synthetic.dim != estimator.dim || synthetic.objectives != estimator.objectives) {
      fail("synthetic.dim", "must match the estimator dimensions");
    }
    if (!(synthetic.jitter >= 0.0 && synthetic.jitter < synthetic.L)) {
      fail("synthetic.jitter", "must lie in [0, L)");
    }
    if (synthetic.margin < 0.0) fail("synthetic.margin", "must be non-negative");
    if (synthetic.sigma < 0.0) fail("synthetic.sigma", "must be non-negative");
  }
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  for (const auto& [name, section] : tree) {
    if (name != "experiment" && name != "estimator" && name != "synthetic" && name != "gridworld") {
      fail(name, "unknown section");
    }
  }
  const pt::ptree empty;
  const auto& ex = tree.get_child("experiment", empty);
  const auto& es = tree.get_child("estimator", empty);
  const auto& sy = tree.get_child("synthetic", empty);
  const auto& gr = tree.get_child("gridworld", empty);
  reject_unknown(ex, "experiment",
                 {"env", "map", "mode", "policy", "T", "episodes", "episode_len", "seeds",
                  "output_dir", "workers", "write_steps"});
  reject_unknown(es, "estimator", {"lambda", "sigma", "S", "L", "delta"});
  reject_unknown(sy, "synthetic",
                 {"arms", "objectives", "dim", "sigma", "S", "L", "jitter", "margin", "noise",
                  "coupling", "require_dominated_arm"});
  reject_unknown(gr, "gridworld", {"discount", "goal_bonus", "adjacent_cost"});

  ExperimentConfig c;
  const auto env = get<std::string>(ex, "experiment", "env", "synthetic");
  if (env == "synthetic") {
    c.env = EnvKind::synthetic;
  } else if (env == "gridworld") {
    c.env = EnvKind::gridworld;
  } else {
    fail("experiment.env", "expected synthetic or gridworld, got '" + env + "'");
  }
  const auto map = get<std::string>(ex, "experiment", "map", "");
  if (!map.empty()) {
    c.map_path = std::filesystem::path(map).is_absolute() ? std::filesystem::path(map) : base_dir / map;
  }
  c.mode = parse_mode(get<std::string>(ex, "experiment", "mode", "faithful"));
  c.policies.clear();
  for (const auto& p : split(get<std::string>(ex, "experiment", "policy", "blender"), ',')) {
    c.policies.push_back(parse_policy(p));
  }
  const bool has_T = ex.get_optional<std::string>("T").has_value();
  const bool has_episodes = ex.get_optional<std::string>("episodes").has_value() ||
                            ex.get_optional<std::string>("episode_len").has_value();
  if (has_T && has_episodes) fail("experiment.T", "give either T or episodes/episode_len, not both");
  if (has_T) {
    c.episodes = 1;
    c.episode_len = get<std::size_t>(ex, "experiment", "T", 1000);
  } else {
    c.episodes = get<std::size_t>(ex, "experiment", "episodes", 1);
    c.episode_len = get<std::size_t>(ex, "experiment", "episode_len", 1000);
  }
  c.seeds = parse_seed_list(get<std::string>(ex, "experiment", "seeds", "0"));
  c.output_dir = get<std::string>(ex, "experiment", "output_dir", "out");
  c.workers = get<std::size_t>(ex, "experiment", "workers", 0);
  c.write_steps = get<bool>(ex, "experiment", "write_steps", true);

  c.estimator.lambda = get<double>(es, "estimator", "lambda", 1.0);
  c.estimator.sigma = get<double>(es, "estimator", "sigma", 0.1);
  c.estimator.S = get<double>(es, "estimator", "S", 1.5);
  c.estimator.L = get<double>(es, "estimator", "L", 1.0);
  c.estimator.delta = get<double>(es, "estimator", "delta", 0.1);

  auto& s = c.synthetic;
  s.arms = get<std::size_t>(sy, "synthetic", "arms", s.arms);
  s.objectives = get<std::size_t>(sy, "synthetic", "objectives", s.objectives);
  s.dim = get<std::size_t>(sy, "synthetic", "dim", s.dim);
  s.sigma = get<double>(sy, "synthetic", "sigma", c.estimator.sigma);
  s.S = get<double>(sy, "synthetic", "S", c.estimator.S);
  s.L = get<double>(sy, "synthetic", "L", c.estimator.L);
  s.jitter = get<double>(sy, "synthetic", "jitter", s.jitter);
  s.margin = get<double>(sy, "synthetic", "margin", s.margin);
  s.require_dominated_arm = get<bool>(sy, "synthetic", "require_dominated_arm", true);
  const auto noise = get<std::string>(sy, "synthetic", "noise", "gaussian");
  if (noise == "gaussian") {
    s.noise = NoiseKind::gaussian;
  } else if (noise == "uniform") {
    s.noise = NoiseKind::uniform;
  } else {
    fail("synthetic.noise", "expected gaussian or uniform");
  }
  const auto coupling = get<std::string>(sy, "synthetic", "coupling", "shared");
  if (coupling == "shared") {
    s.coupling = NoiseCoupling::shared;
  } else if (coupling == "per_objective") {
    s.coupling = NoiseCoupling::per_objective;
  } else {
    fail("synthetic.coupling", "expected shared or per_objective");
  }

  c.grid.discount = get<double>(gr, "gridworld", "discount", c.grid.discount);
  c.grid.goal_bonus = get<double>(gr, "gridworld", "goal_bonus", c.grid.goal_bonus);
  c.grid.adjacent_cost = get<double>(gr, "gridworld", "adjacent_cost", c.grid.adjacent_cost);
  c.grid.episode_len = static_cast<int>(c.episode_len);

  if (c.env == EnvKind::gridworld) {
    c.estimator.dim = 3;
    c.estimator.objectives = 2;
  } else {
    c.estimator.dim = s.dim;
    c.estimator.objectives = s.objectives;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

}  // namespace blend
