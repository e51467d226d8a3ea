#pragma once

// Deterministic king-move gridworld with a goal and hazard cells, plus a
// performant and a safe controller derived from exact value tables. The
// controllers' action values provide the bandit contexts.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blend/environment.hpp"

namespace blend {

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Plain-text map: '#' hazard, 'G' goal, 'S' start, '.' free; one row per line.
struct GridMap {
  int width = 0;
  int height = 0;
  Cell start;
  Cell goal;
  std::vector<Cell> hazards;

  static GridMap parse(std::istream& in);
  static GridMap parse(const std::string& text);
  static GridMap load(const std::filesystem::path& path);
  /// 7x7, start (0,0), goal (6,6), hazards (3,2) and (3,3).
  static GridMap fixture();
  std::string to_text() const;
};

struct GridParams {
  int episode_len = 1000;
  /// Discount of the controllers' value tables.
  double discount = 0.9;
  /// Extra raw reward for entering the goal, on top of one unit of progress.
  double goal_bonus = 0.5;
  /// Raw cost of entering a cell next to a hazard; entering a hazard costs 1.
  double adjacent_cost = 0.5;
};

inline constexpr int kNumActions = 8;
/// King moves as (d_row, d_col), in tie-breaking order.
inline constexpr std::array<std::array<int, 2>, kNumActions> kMoves{{
    {{-1, -1}}, {{-1, 0}}, {{-1, 1}}, {{0, -1}}, {{0, 1}}, {{1, -1}}, {{1, 0}}, {{1, 1}}}};

/// One-step outcome of an action.
struct Transition {
  int entered = 0;   // cell index the move lands on (the goal when reached)
  int next = 0;      // resulting agent cell (start again after the goal)
  bool reached_goal = false;
  double reward = 0.0;  // normalized to [0, 1]
  double cost = 0.0;    // normalized to [0, 1]
};

class GridworldEnv {
 public:
  GridworldEnv(GridMap map, GridParams params);

  const GridMap& map() const { return map_; }
  const GridParams& params() const { return params_; }
  int num_cells() const { return map_.width * map_.height; }
  int index(Cell c) const { return c.row * map_.width + c.col; }
  Cell cell(int index) const { return {index / map_.width, index % map_.width}; }

  /// Chebyshev distance to the goal / to the nearest hazard.
  int goal_distance(int cell) const;
  int hazard_distance(int cell) const;
  bool is_hazard(int cell) const;
  /// Normalized cost of entering `cell`.
  double entry_cost(int cell) const;

  Transition transition(int cell, int action) const;

  /// Raw reward span (reward_scale) and maximal raw cost (cost_scale) used for normalization.
  double reward_scale() const { return 2.0 + params_.goal_bonus; }
  double cost_scale() const { return 1.0; }

  int agent() const { return agent_; }
  int steps_taken() const { return steps_; }
  bool done() const { return steps_ >= params_.episode_len; }
  void reset_episode();
  /// Applies `action` at the agent's cell. Throws std::logic_error once the episode is over.
  Transition step(int action);
  std::size_t state_hash() const;

 private:
  GridMap map_;
  GridParams params_;
  std::vector<char> hazard_;
  std::vector<int> hazard_dist_;
  int agent_ = 0;
  int steps_ = 0;
};

struct Controller {
  std::vector<int> policy;      // action per cell
  Eigen::MatrixXd q_objective;  // the table the policy is greedy in
  Eigen::MatrixXd q_reward;     // reward action values under `policy`
  Eigen::MatrixXd q_safety;     // (1 - cost) action values under `policy`
};

struct ControllerPair {
  Controller performant;
  Controller safe;
};

inline constexpr ArmId kPerformantArm = 0;
inline constexpr ArmId kSafeArm = 1;

/// Performant: reward-greedy, ignores hazards. Safe: reward-greedy but never
/// enters a hazard or a hazard-adjacent cell when it can avoid it; if no such
/// route reaches the goal it maximizes its clearance from hazards instead.
ControllerPair grid_build_controllers(const GridworldEnv& env);

/// Largest Bellman residual of the controller's tables under their own policy and signals.
double bellman_residual(const GridworldEnv& env, const Controller& controller, bool safe);

/// [(1-g) q_reward, (1-g) q_safety, 1] / sqrt(3) at `cell` for each controller's own action.
std::vector<ContextVector> grid_contexts(const GridworldEnv& env, const ControllerPair& controllers,
                                         int cell);

struct GridStep {
  std::vector<ContextVector> contexts;  // the state the arm was applied in
  FeedbackVector feedback;              // [reward, 1 - cost]
  bool done = false;
};

GridStep grid_step(GridworldEnv& env, ArmId arm, const ControllerPair& controllers);

/// Exact one-step feedback each controller would receive at the current state.
std::vector<ObjectiveVector> probe_true_feedback(const GridworldEnv& env,
                                                 const ControllerPair& controllers);

/// Gridworld as an Environment: arm 0 is the performant controller, arm 1 the safe one.
class GridworldTask final : public Environment {
 public:
  GridworldTask(GridMap map, GridParams params);

  std::size_t arms() const override { return 2; }
  std::size_t dim() const override { return 3; }
  std::size_t objectives() const override { return 2; }
  std::span<const ContextVector> contexts() const override { return contexts_; }
  std::vector<ObjectiveVector> true_means() const override;
  FeedbackVector apply(ArmId arm) override;

  bool done() const { return env_.done(); }
  void reset_episode();
  void begin_episode() override { reset_episode(); }
  const GridworldEnv& env() const { return env_; }
  const ControllerPair& controllers() const { return controllers_; }
  /// Normalized cost of the last applied step.
  double last_cost() const { return last_cost_; }

 private:
  GridworldEnv env_;
  ControllerPair controllers_;
  std::vector<ContextVector> contexts_;
  double last_cost_ = 0.0;
};

}  // namespace blend
