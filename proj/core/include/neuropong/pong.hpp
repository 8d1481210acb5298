#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace neuropong {

// Field of n_columns unit-wide columns and field_height rows. The opponent is
// the top wall (y = field_height); the paddle moves along y = 0.
struct FieldConfig {
  std::size_t n_columns = 32;
  double field_height = 32.0;
  double ball_speed = 1.0;  // units per step
  double paddle_speed = 1.0;
  double paddle_halfwidth = 1.0;  // columns
  double launch_angle_deg = 45.0;  // from the vertical

  double width() const noexcept { return static_cast<double>(n_columns); }
  void validate() const;
};

struct GameState {
  double ball_x = 0.0;
  double ball_y = 0.0;
  double ball_vx = 0.0;
  double ball_vy = 0.0;
  double paddle_x = 0.0;
  double paddle_target_x = 0.0;

  bool ball_at_paddle_row() const noexcept { return ball_y <= 0.0; }
  friend bool operator==(const GameState&, const GameState&) = default;
};

struct RewardSchedule {
  double halfwidth = 1.0;
  void validate() const;
};

// Maps every ball column to a commanded paddle column.
using Policy = std::vector<std::size_t>;

std::size_t discretize_ball(const GameState& state, std::size_t n_columns);

// Advances `dt_steps` steps. The ball reflects specularly off the side walls
// and the top wall; once it reaches the paddle row (y = 0) it stays at the
// crossing point. The paddle moves toward its target at paddle_speed per step
// and stops on arrival.
GameState step_game(const GameState& state, const FieldConfig& cfg, std::size_t dt_steps = 1);

// max(0, 1 - |action - ball| / (halfwidth + 1)).
double compute_reward(std::size_t ball_column, std::size_t action_column,
                      const RewardSchedule& schedule);

// Ball launched from the top of `start_column` toward +x (`direction` = +1)
// or -x (-1); paddle starts in the field centre.
GameState launch_state(const FieldConfig& cfg, std::size_t start_column, int direction = +1);

struct Episode {
  std::vector<GameState> trace;  // trace[0] is the launch state
  bool caught = false;
};

// Plays one ball to the paddle row, commanding the paddle each step with
// policy[column of the ball] (column centre).
Episode play_episode(const Policy& policy, const FieldConfig& cfg, std::size_t start_column,
                     int direction = +1);

bool catches(const Policy& policy, const FieldConfig& cfg, std::size_t start_column,
             int direction = +1);

// Fraction of starting columns (standard launch) whose ball is caught.
double evaluate_catch_fraction(const Policy& policy, const FieldConfig& cfg);

}  // namespace neuropong
