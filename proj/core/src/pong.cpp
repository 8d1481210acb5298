#include "neuropong/pong.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "neuropong/error.hpp"

namespace neuropong {

void FieldConfig::validate() const {
  if (n_columns < 2) throw ConfigError("env.n_columns must be >= 2");
  if (!(field_height > 0.0)) throw ConfigError("env.field_height must be > 0");
  if (!(ball_speed > 0.0)) throw ConfigError("env.ball_speed must be > 0");
  if (!(paddle_speed > 0.0)) throw ConfigError("env.paddle_speed must be > 0");
  if (!(paddle_halfwidth >= 0.0 && paddle_halfwidth < width())) {
    throw ConfigError("env.paddle_halfwidth must lie in [0, n_columns)");
  }
  if (!(launch_angle_deg >= 0.0 && launch_angle_deg < 90.0)) {
    throw ConfigError("env.launch_angle_deg must lie in [0, 90)");
  }
}

void RewardSchedule::validate() const {
  if (!(halfwidth >= 1.0)) throw ConfigError("reward.halfwidth must be >= 1");
}

std::size_t discretize_ball(const GameState& state, std::size_t n_columns) {
  if (n_columns == 0) throw ParameterError("field has no columns");
  const double col = std::floor(state.ball_x);
  if (!(col > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(col), n_columns - 1);
}

namespace {

// Folds a coordinate into [0, limit] by mirror reflection; returns whether
// the velocity sign flips.
bool reflect(double& pos, double limit) {
  bool flipped = false;
  while (pos < 0.0 || pos > limit) {
    pos = pos < 0.0 ? -pos : 2.0 * limit - pos;
    flipped = !flipped;
  }
  return flipped;
}

}  // namespace

GameState step_game(const GameState& state, const FieldConfig& cfg, std::size_t dt_steps) {
  GameState s = state;
  const double width = cfg.width();
  for (std::size_t k = 0; k < dt_steps; ++k) {
    if (!s.ball_at_paddle_row()) {
      double fraction = 1.0;
      if (s.ball_y + s.ball_vy < 0.0) fraction = s.ball_y / -s.ball_vy;
      s.ball_x += fraction * s.ball_vx;
      if (reflect(s.ball_x, width)) s.ball_vx = -s.ball_vx;
      if (fraction < 1.0) {
        s.ball_y = 0.0;
      } else {
        s.ball_y += s.ball_vy;
        if (reflect(s.ball_y, cfg.field_height)) s.ball_vy = -s.ball_vy;
      }
    }
    const double gap = s.paddle_target_x - s.paddle_x;
    if (std::abs(gap) <= cfg.paddle_speed) {
      s.paddle_x = s.paddle_target_x;
    } else {
      s.paddle_x += gap > 0.0 ? cfg.paddle_speed : -cfg.paddle_speed;
    }
    s.paddle_x = std::clamp(s.paddle_x, 0.0, width);
  }
  return s;
}

double compute_reward(std::size_t ball_column, std::size_t action_column,
                      const RewardSchedule& schedule) {
  const double distance = ball_column > action_column
                              ? static_cast<double>(ball_column - action_column)
                              : static_cast<double>(action_column - ball_column);
  return std::max(0.0, 1.0 - distance / (schedule.halfwidth + 1.0));
}

GameState launch_state(const FieldConfig& cfg, std::size_t start_column, int direction) {
  if (start_column >= cfg.n_columns) throw ParameterError("start column out of range");
  const double angle = cfg.launch_angle_deg * std::numbers::pi / 180.0;
  GameState s;
  s.ball_x = static_cast<double>(start_column) + 0.5;
  s.ball_y = cfg.field_height;
  s.ball_vx = (direction >= 0 ? 1.0 : -1.0) * cfg.ball_speed * std::sin(angle);
  s.ball_vy = -cfg.ball_speed * std::cos(angle);
  s.paddle_x = 0.5 * cfg.width();
  s.paddle_target_x = s.paddle_x;
  return s;
}

Episode play_episode(const Policy& policy, const FieldConfig& cfg, std::size_t start_column,
                     int direction) {
  cfg.validate();
  if (policy.size() != cfg.n_columns) throw ParameterError("policy must cover every column");
  Episode ep;
  GameState s = launch_state(cfg, start_column, direction);
  ep.trace.push_back(s);
  // The ball always descends, so the episode is bounded.
  while (!s.ball_at_paddle_row()) {
    const std::size_t target = policy[discretize_ball(s, cfg.n_columns)];
    if (target >= cfg.n_columns) throw ParameterError("policy maps outside the field");
    s.paddle_target_x = static_cast<double>(target) + 0.5;
    s = step_game(s, cfg, 1);
    ep.trace.push_back(s);
  }
  // Launches from column centres land on half-integers, so exact edge hits are
  // common; the tolerance keeps them from depending on rounding order.
  ep.caught = std::abs(s.paddle_x - s.ball_x) <= cfg.paddle_halfwidth + 0.5 + 1e-9;
  return ep;
}

bool catches(const Policy& policy, const FieldConfig& cfg, std::size_t start_column, int direction) {
  return play_episode(policy, cfg, start_column, direction).caught;
}

double evaluate_catch_fraction(const Policy& policy, const FieldConfig& cfg) {
  std::size_t caught = 0;
  for (std::size_t c = 0; c < cfg.n_columns; ++c) caught += catches(policy, cfg, c) ? 1 : 0;
  return static_cast<double>(caught) / static_cast<double>(cfg.n_columns);
}

}  // namespace neuropong
