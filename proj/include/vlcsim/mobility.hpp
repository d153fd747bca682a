#pragma once

#include "vlcsim/types.hpp"

namespace vlcsim {

struct Room {
  double width = 8.0;  // x extent (m)
  double depth = 4.0;  // y extent (m)

  void validate() const;
  bool contains(const Vec2& p) const;
  Vec2 clamp(const Vec2& p) const;
  double diagonal() const;
};

struct MobilityParams {
  double v_min = 0.0;      // m/s
  double v_max = 1.0;      // m/s
  double pause_min = 0.0;  // s
  double pause_max = 1.0;  // s

  void validate() const;
};

enum class MotionPhase { Moving, Paused };

/// Random-waypoint walker state. While Moving the user advances along the
/// segment position -> waypoint at `speed`; on arrival it pauses, then draws
/// a fresh waypoint and per-leg speed.
struct UserState {
  Vec2 position{0.0, 0.0};
  Vec2 waypoint{0.0, 0.0};
  double speed = 0.0;            // current leg speed (m/s)
  double pause_remaining = 0.0;  // s, meaningful while Paused
  MotionPhase phase = MotionPhase::Moving;
};

/// Draws `count` users from the stationary distribution of the random
/// waypoint process: leg endpoints uniform, legs length-biased (rejection
/// against the room diagonal), position uniform along the leg, speed from
/// the 1/v stationary density when v_min > 0 (uniform otherwise).
std::vector<UserState> rwp_init(const Room& room, const MobilityParams& params,
                                int count, std::uint64_t seed);

/// Advances a walker by dt seconds, handling any number of leg/pause
/// transitions inside the interval. Draw order is fixed (pause length at
/// arrival; waypoint then speed at pause end) so sub-stepping with the same
/// engine reproduces one long step.
void rwp_step(UserState& state, double dt, const Room& room,
              const MobilityParams& params, Rng& rng);

/// Constant-velocity extrapolation from two position fixes tau_p apart;
/// predictions are clamped to the room per coordinate.
std::vector<Vec2> predict(const Vec2& pos_prev, const Vec2& pos_now,
                          double tau_p, int horizon, const Room& room);

/// Probability that the user stops (reaches its waypoint) within
/// horizon * tau_p: min(1, v * T * tau_p / remaining_leg). A paused user
/// returns 1 (its motion over the horizon is unpredicted by construction).
double misprediction_probability(const UserState& state, int horizon, double tau_p);

/// Monte Carlo mean distance between two independent uniform points.
double expected_leg_length(const Room& room, std::int64_t samples, std::uint64_t seed);

/// Largest service time such that the expected misprediction probability over
/// the stationary ensemble stays below delta:
/// tau_p <= (delta / T) * ln(v_max / v_min) / (v_max - v_min) * E[l].
double service_time_bound(double delta, int horizon, double v_min, double v_max,
                          double expected_leg_m);

}  // namespace vlcsim
