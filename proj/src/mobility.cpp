#include "vlcsim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vlcsim {

void Room::validate() const {
  if (!(width > 0.0) || !(depth > 0.0))
    throw std::invalid_argument("room: width and depth must be > 0");
}

bool Room::contains(const Vec2& p) const {
  return p.x() >= 0.0 && p.x() <= width && p.y() >= 0.0 && p.y() <= depth;
}

Vec2 Room::clamp(const Vec2& p) const {
  return {std::clamp(p.x(), 0.0, width), std::clamp(p.y(), 0.0, depth)};
}

double Room::diagonal() const { return std::hypot(width, depth); }

void MobilityParams::validate() const {
  if (!(v_min >= 0.0) || !(v_max >= v_min))
    throw std::invalid_argument("mobility: need 0 <= v_min <= v_max");
  if (!(pause_min >= 0.0) || !(pause_max >= pause_min))
    throw std::invalid_argument("mobility: need 0 <= pause_min <= pause_max");
}

namespace {

Vec2 uniform_point(Rng& rng, const Room& room) {
  const double x = uniform01(rng) * room.width;
  const double y = uniform01(rng) * room.depth;
  return {x, y};
}

double draw_leg_speed(Rng& rng, const MobilityParams& p) {
  return uniform_in(rng, p.v_min, p.v_max);
}

// Stationary per-leg speed density is proportional to 1/v (slower legs last
// longer); its inverse CDF is v_min (v_max / v_min)^u. Falls back to the
// uniform draw when v_min = 0, where that density is not normalizable.
double draw_stationary_speed(Rng& rng, const MobilityParams& p) {
  if (p.v_min > 0.0 && p.v_max > p.v_min)
    return p.v_min * std::pow(p.v_max / p.v_min, uniform01(rng));
  return draw_leg_speed(rng, p);
}

}  // namespace

std::vector<UserState> rwp_init(const Room& room, const MobilityParams& params,
                                int count, std::uint64_t seed) {
  room.validate();
  params.validate();
  if (count < 1) throw std::invalid_argument("rwp_init: count must be >= 1");

  Rng rng(mix_seed(seed, 0x7770));
  const double diag = room.diagonal();
  std::vector<UserState> users;
  users.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    // Length-biased leg: accept a candidate segment with probability
    // proportional to its length, then place the user uniformly along it.
    Vec2 a, b;
    double len = 0.0;
    do {
      a = uniform_point(rng, room);
      b = uniform_point(rng, room);
      len = (b - a).norm();
    } while (uniform01(rng) * diag > len);
    UserState s;
    const double u = uniform01(rng);
    s.position = a + u * (b - a);
    s.waypoint = b;
    s.speed = draw_stationary_speed(rng, params);
    s.phase = MotionPhase::Moving;
    s.pause_remaining = 0.0;
    users.push_back(s);
  }
  return users;
}

void rwp_step(UserState& state, double dt, const Room& room,
              const MobilityParams& params, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("rwp_step: dt must be > 0");
  while (dt > 0.0) {
    if (state.phase == MotionPhase::Paused) {
      if (state.pause_remaining > dt) {
        state.pause_remaining -= dt;
        return;
      }
      dt -= state.pause_remaining;
      state.pause_remaining = 0.0;
      state.waypoint = uniform_point(rng, room);
      state.speed = uniform_in(rng, params.v_min, params.v_max);
      state.phase = MotionPhase::Moving;
    } else {
      const Vec2 delta = state.waypoint - state.position;
      const double dist = delta.norm();
      if (!(state.speed > 0.0)) return;  // parked mid-leg (v = 0 acts as a pause)
      const double time_to_arrive = dist / state.speed;
      if (time_to_arrive > dt) {
        state.position += delta * (state.speed * dt / dist);
        return;
      }
      state.position = state.waypoint;
      dt -= time_to_arrive;
      state.pause_remaining = uniform_in(rng, params.pause_min, params.pause_max);
      state.phase = MotionPhase::Paused;
    }
  }
}

std::vector<Vec2> predict(const Vec2& pos_prev, const Vec2& pos_now,
                          double tau_p, int horizon, const Room& room) {
  if (!(tau_p > 0.0)) throw std::invalid_argument("predict: tau_p must be > 0");
  if (horizon < 1) throw std::invalid_argument("predict: horizon must be >= 1");
  const Vec2 velocity = (pos_now - pos_prev) / tau_p;
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t)
    out.push_back(room.clamp(pos_now + static_cast<double>(t) * tau_p * velocity));
  return out;
}

double misprediction_probability(const UserState& state, int horizon, double tau_p) {
  if (horizon < 0) throw std::invalid_argument("misprediction_probability: horizon < 0");
  if (!(tau_p > 0.0)) throw std::invalid_argument("misprediction_probability: tau_p must be > 0");
  if (horizon == 0) return 0.0;
  if (state.phase == MotionPhase::Paused) return 1.0;
  const double remaining = (state.waypoint - state.position).norm();
  if (!(remaining > 0.0)) return 1.0;
  return std::min(1.0, state.speed * static_cast<double>(horizon) * tau_p / remaining);
}

double expected_leg_length(const Room& room, std::int64_t samples, std::uint64_t seed) {
  room.validate();
  if (samples < 1) throw std::invalid_argument("expected_leg_length: samples must be >= 1");
  Rng rng(mix_seed(seed, 0x1e6));
  long double acc = 0.0L;
  for (std::int64_t i = 0; i < samples; ++i) {
    const Vec2 a = uniform_point(rng, room);
    const Vec2 b = uniform_point(rng, room);
    acc += (b - a).norm();
  }
  return static_cast<double>(acc / static_cast<long double>(samples));
}

double service_time_bound(double delta, int horizon, double v_min, double v_max,
                          double expected_leg_m) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("service_time_bound: delta must be in (0, 1)");
  if (horizon < 1) throw std::invalid_argument("service_time_bound: horizon must be >= 1");
  if (!(v_min > 0.0))
    throw std::invalid_argument("service_time_bound: v_min must be > 0 (v_min = 0 acts as a pause)");
  if (!(v_max > v_min))
    throw std::invalid_argument("service_time_bound: need v_min < v_max");
  if (!(expected_leg_m > 0.0))
    throw std::invalid_argument("service_time_bound: expected leg length must be > 0");
  return delta / static_cast<double>(horizon) * std::log(v_max / v_min) /
         (v_max - v_min) * expected_leg_m;
}

}  // namespace vlcsim
