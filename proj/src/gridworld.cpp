#include "blend/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <functional>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace blend {
namespace {

constexpr double kValueTolerance = 1e-11;
constexpr int kMaxSweeps = 1000000;
constexpr double kGreedyTieBand = 1e-9;
constexpr int kClearanceCap = 3;

int chebyshev(Cell a, Cell b) { return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)); }

struct Tables {
  std::vector<std::array<Transition, kNumActions>> moves;  // per cell
};

Tables tabulate(const GridworldEnv& env) {
  Tables t;
  t.moves.resize(static_cast<std::size_t>(env.num_cells()));
  for (int s = 0; s < env.num_cells(); ++s) {
    for (int a = 0; a < kNumActions; ++a) t.moves[s][a] = env.transition(s, a);
  }
  return t;
}

using SignalFn = std::function<double(const Transition&)>;

Eigen::MatrixXd signal_table(const Tables& t, const SignalFn& signal) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(t.moves.size()), kNumActions);
  for (std::size_t s = 0; s < t.moves.size(); ++s) {
    for (int a = 0; a < kNumActions; ++a) out(static_cast<Eigen::Index>(s), a) = signal(t.moves[s][a]);
  }
  return out;
}

int greedy_action(const Eigen::MatrixXd& q, Eigen::Index s) {
  const double best = q.row(s).maxCoeff();
  for (int a = 0; a < kNumActions; ++a) {
    if (q(s, a) >= best - kGreedyTieBand) return a;
  }
  return 0;
}

// Q(s,a) = r(s,a) + g * max_a' Q(next, a')
Eigen::MatrixXd optimal_q(const Tables& t, const Eigen::MatrixXd& r, double g) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(r.rows(), r.cols());
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const Eigen::VectorXd v = q.rowwise().maxCoeff();
    Eigen::MatrixXd next(r.rows(), r.cols());
    for (Eigen::Index s = 0; s < r.rows(); ++s) {
      for (int a = 0; a < kNumActions; ++a) next(s, a) = r(s, a) + g * v[t.moves[s][a].next];
    }
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (change < kValueTolerance) return q;
  }
  throw std::runtime_error("value iteration did not converge");
}

// Q^pi(s,a) = r(s,a) + g * Q^pi(next, pi(next))
Eigen::MatrixXd evaluate_q(const Tables& t, const Eigen::MatrixXd& r, const std::vector<int>& policy,
                           double g) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(r.rows(), r.cols());
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    Eigen::MatrixXd next(r.rows(), r.cols());
    for (Eigen::Index s = 0; s < r.rows(); ++s) {
      for (int a = 0; a < kNumActions; ++a) {
        const int n = t.moves[s][a].next;
        next(s, a) = r(s, a) + g * q(n, policy[n]);
      }
    }
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (change < kValueTolerance) return q;
  }
  throw std::runtime_error("policy evaluation did not converge");
}

Controller make_controller(const Tables& t, const Eigen::MatrixXd& objective_signal, double g) {
  Controller c;
  c.q_objective = optimal_q(t, objective_signal, g);
  c.policy.resize(t.moves.size());
  for (std::size_t s = 0; s < t.moves.size(); ++s) {
    c.policy[s] = greedy_action(c.q_objective, static_cast<Eigen::Index>(s));
  }
  const auto reward = signal_table(t, [](const Transition& tr) { return tr.reward; });
  const auto safety = signal_table(t, [](const Transition& tr) { return 1.0 - tr.cost; });
  c.q_reward = evaluate_q(t, reward, c.policy, g);
  c.q_safety = evaluate_q(t, safety, c.policy, g);
  return c;
}

bool safe_route_exists(const GridworldEnv& env) {
  const auto& map = env.map();
  std::vector<char> seen(static_cast<std::size_t>(env.num_cells()), 0);
  std::queue<int> frontier;
  const int start = env.index(map.start);
  const int goal = env.index(map.goal);
  frontier.push(start);
  seen[start] = 1;
  while (!frontier.empty()) {
    const int s = frontier.front();
    frontier.pop();
    if (s == goal) return true;
    for (int a = 0; a < kNumActions; ++a) {
      const int n = env.transition(s, a).entered;
      if (seen[n] || (n != goal && env.entry_cost(n) > 0.0)) continue;
      seen[n] = 1;
      frontier.push(n);
    }
  }
  return false;
}

// Safe objective: reward minus a penalty on any cost large enough that no
// discounted reward gain can pay for entering a costly cell.
double safety_penalty(const GridworldEnv& env) {
  const double smallest_cost =
      env.params().adjacent_cost > 0.0 ? std::min(env.params().adjacent_cost, 1.0) : 1.0;
  return 2.0 / ((1.0 - env.params().discount) * smallest_cost);
}

}  // namespace

GridMap GridMap::parse(std::istream& in) {
  GridMap map;
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    if (line.empty()) continue;
    rows.push_back(line);
  }
  if (rows.empty()) throw std::invalid_argument("grid map: no rows");
  map.height = static_cast<int>(rows.size());
  map.width = static_cast<int>(rows.front().size());
  int starts = 0;
  int goals = 0;
  for (int r = 0; r < map.height; ++r) {
    if (static_cast<int>(rows[r].size()) != map.width) {
      throw std::invalid_argument("grid map: row " + std::to_string(r) + " has a different width");
    }
    for (int c = 0; c < map.width; ++c) {
      switch (rows[r][c]) {
        case '#': map.hazards.push_back({r, c}); break;
        case 'G': map.goal = {r, c}; ++goals; break;
        case 'S': map.start = {r, c}; ++starts; break;
        case '.': break;
        default:
          throw std::invalid_argument(std::string("grid map: unexpected character '") + rows[r][c] +
                                      "' at row " + std::to_string(r));
      }
    }
  }
  if (goals != 1) throw std::invalid_argument("grid map: expected exactly one goal 'G'");
  if (starts != 1) throw std::invalid_argument("grid map: expected exactly one start 'S'");
  return map;
}

GridMap GridMap::parse(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

GridMap GridMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid map " + path.string());
  return parse(in);
}

GridMap GridMap::fixture() {
  return parse(
      "S......\n"
      ".......\n"
      ".......\n"
      "..##...\n"
      ".......\n"
      ".......\n"
      "......G\n");
}

std::string GridMap::to_text() const {
  std::vector<std::string> rows(static_cast<std::size_t>(height), std::string(width, '.'));
  for (const auto& h : hazards) rows[h.row][h.col] = '#';
  rows[start.row][start.col] = 'S';
  rows[goal.row][goal.col] = 'G';
  std::string out;
  for (const auto& r : rows) out += r + '\n';
  return out;
}

GridworldEnv::GridworldEnv(GridMap map, GridParams params)
    : map_(std::move(map)), params_(params) {
  if (map_.width < 1 || map_.height < 1) throw std::invalid_argument("gridworld: empty map");
  auto on_grid = [&](Cell c) {
    return c.row >= 0 && c.row < map_.height && c.col >= 0 && c.col < map_.width;
  };
  if (!on_grid(map_.start) || !on_grid(map_.goal)) {
    throw std::invalid_argument("gridworld: start or goal off the grid");
  }
  if (map_.start == map_.goal) throw std::invalid_argument("gridworld: start equals goal");
  if (params_.episode_len < 1) throw std::invalid_argument("gridworld.episode_len: must be positive");
  if (!(params_.discount > 0.0 && params_.discount < 1.0)) {
    throw std::invalid_argument("gridworld.discount: must lie in (0, 1)");
  }
  if (params_.goal_bonus < 0.0) throw std::invalid_argument("gridworld.goal_bonus: must be >= 0");
  if (!(params_.adjacent_cost >= 0.0 && params_.adjacent_cost <= 1.0)) {
    throw std::invalid_argument("gridworld.adjacent_cost: must lie in [0, 1]");
  }

  hazard_.assign(static_cast<std::size_t>(num_cells()), 0);
  for (const auto& h : map_.hazards) {
    if (!on_grid(h)) throw std::invalid_argument("gridworld: hazard off the grid");
    if (h == map_.goal) throw std::invalid_argument("gridworld: goal lies on a hazard");
    hazard_[index(h)] = 1;
  }
  hazard_dist_.assign(static_cast<std::size_t>(num_cells()), std::numeric_limits<int>::max());
  for (int s = 0; s < num_cells(); ++s) {
    for (const auto& h : map_.hazards) hazard_dist_[s] = std::min(hazard_dist_[s], chebyshev(cell(s), h));
  }
  reset_episode();
}

int GridworldEnv::goal_distance(int c) const { return chebyshev(cell(c), map_.goal); }
int GridworldEnv::hazard_distance(int c) const { return hazard_dist_[c]; }
bool GridworldEnv::is_hazard(int c) const { return hazard_[c] != 0; }

double GridworldEnv::entry_cost(int c) const {
  if (hazard_[c]) return 1.0 / cost_scale();
  if (hazard_dist_[c] == 1) return params_.adjacent_cost / cost_scale();
  return 0.0;
}

Transition GridworldEnv::transition(int c, int action) const {
  if (action < 0 || action >= kNumActions) throw std::out_of_range("gridworld: bad action");
  const Cell from = cell(c);
  const Cell to{std::clamp(from.row + kMoves[action][0], 0, map_.height - 1),
                std::clamp(from.col + kMoves[action][1], 0, map_.width - 1)};
  Transition tr;
  tr.entered = index(to);
  tr.reached_goal = to == map_.goal;
  tr.next = tr.reached_goal ? index(map_.start) : tr.entered;
  const double progress = static_cast<double>(goal_distance(c) - goal_distance(tr.entered));
  const double raw = progress + (tr.reached_goal ? params_.goal_bonus : 0.0);
  tr.reward = std::clamp((raw + 1.0) / reward_scale(), 0.0, 1.0);
  tr.cost = entry_cost(tr.entered);
  return tr;
}

void GridworldEnv::reset_episode() {
  agent_ = index(map_.start);
  steps_ = 0;
}

Transition GridworldEnv::step(int action) {
  if (done()) throw std::logic_error("gridworld: stepping a finished episode");
  const Transition tr = transition(agent_, action);
  agent_ = tr.next;
  ++steps_;
  return tr;
}

std::size_t GridworldEnv::state_hash() const {
  return std::hash<long long>{}((static_cast<long long>(agent_) << 32) ^ steps_);
}

ControllerPair grid_build_controllers(const GridworldEnv& env) {
  const Tables t = tabulate(env);
  const double g = env.params().discount;
  const auto reward = signal_table(t, [](const Transition& tr) { return tr.reward; });

  ControllerPair out;
  out.performant = make_controller(t, reward, g);

  Eigen::MatrixXd safe_objective;
  if (safe_route_exists(env)) {
    const double penalty = safety_penalty(env);
    safe_objective = reward - penalty * signal_table(t, [](const Transition& tr) { return tr.cost; });
  } else {
    safe_objective = signal_table(t, [&](const Transition& tr) {
      return std::min(env.hazard_distance(tr.entered), kClearanceCap) / double(kClearanceCap);
    });
  }
  out.safe = make_controller(t, safe_objective, g);
  return out;
}

double bellman_residual(const GridworldEnv& env, const Controller& controller, bool safe) {
  const Tables t = tabulate(env);
  const double g = env.params().discount;
  const auto reward = signal_table(t, [](const Transition& tr) { return tr.reward; });
  const auto safety = signal_table(t, [](const Transition& tr) { return 1.0 - tr.cost; });
  Eigen::MatrixXd objective = reward;
  if (safe) {
    if (safe_route_exists(env)) {
      objective = reward - safety_penalty(env) *
                               signal_table(t, [](const Transition& tr) { return tr.cost; });
    } else {
      objective = signal_table(t, [&](const Transition& tr) {
        return std::min(env.hazard_distance(tr.entered), kClearanceCap) / double(kClearanceCap);
      });
    }
  }
  double worst = 0.0;
  for (int s = 0; s < env.num_cells(); ++s) {
    for (int a = 0; a < kNumActions; ++a) {
      const int n = t.moves[s][a].next;
      const int pn = controller.policy[n];
      worst = std::max(worst, std::abs(controller.q_reward(s, a) -
                                       (reward(s, a) + g * controller.q_reward(n, pn))));
      worst = std::max(worst, std::abs(controller.q_safety(s, a) -
                                       (safety(s, a) + g * controller.q_safety(n, pn))));
      worst = std::max(worst, std::abs(controller.q_objective(s, a) -
                                       (objective(s, a) + g * controller.q_objective.row(n).maxCoeff())));
    }
  }
  return worst;
}

std::vector<ContextVector> grid_contexts(const GridworldEnv& env, const ControllerPair& controllers,
                                         int c) {
  const double scale = 1.0 - env.params().discount;
  const double norm = 1.0 / std::sqrt(3.0);
  std::vector<ContextVector> out;
  for (const Controller* ctrl : {&controllers.performant, &controllers.safe}) {
    const int a = ctrl->policy[c];
    ContextVector psi(3);
    psi << scale * ctrl->q_reward(c, a), scale * ctrl->q_safety(c, a), 1.0;
    out.push_back(psi * norm);
  }
  return out;
}

GridStep grid_step(GridworldEnv& env, ArmId arm, const ControllerPair& controllers) {
  if (arm > kSafeArm) throw std::out_of_range("gridworld: arm out of range");
  GridStep out;
  out.contexts = grid_contexts(env, controllers, env.agent());
  const Controller& ctrl = arm == kPerformantArm ? controllers.performant : controllers.safe;
  const Transition tr = env.step(ctrl.policy[env.agent()]);
  out.feedback = FeedbackVector(2);
  out.feedback << tr.reward, 1.0 - tr.cost;
  out.done = env.done();
  return out;
}

std::vector<ObjectiveVector> probe_true_feedback(const GridworldEnv& env,
                                                 const ControllerPair& controllers) {
  std::vector<ObjectiveVector> out;
  for (const Controller* ctrl : {&controllers.performant, &controllers.safe}) {
    const Transition tr = env.transition(env.agent(), ctrl->policy[env.agent()]);
    ObjectiveVector y(2);
    y << tr.reward, 1.0 - tr.cost;
    out.push_back(y);
  }
  return out;
}

GridworldTask::GridworldTask(GridMap map, GridParams params)
    : env_(std::move(map), params), controllers_(grid_build_controllers(env_)) {
  contexts_ = grid_contexts(env_, controllers_, env_.agent());
}

std::vector<ObjectiveVector> GridworldTask::true_means() const {
  return probe_true_feedback(env_, controllers_);
}

FeedbackVector GridworldTask::apply(ArmId arm) {
  GridStep s = grid_step(env_, arm, controllers_);
  last_cost_ = 1.0 - s.feedback[1];
  contexts_ = grid_contexts(env_, controllers_, env_.agent());
  return s.feedback;
}

void GridworldTask::reset_episode() {
  env_.reset_episode();
  contexts_ = grid_contexts(env_, controllers_, env_.agent());
}

}  // namespace blend
