#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <variant>
#include <vector>

#include "ampaodv/core.hpp"
#include "ampaodv/random.hpp"

namespace ampaodv {

struct MobilityConfig {
  double area_width = 800.0;
  double area_height = 600.0;
  double v_min = 1.0;
  double v_max = 20.0;
  Seconds pause_time = 0.0;
  std::uint64_t rng_seed = 1;

  void validate() const {
    if (!(area_width > 0.0 && area_height > 0.0)) throw std::invalid_argument("area dimensions must be positive");
    if (!(v_min > 0.0 && v_min <= v_max)) throw std::invalid_argument("speeds must satisfy 0 < v_min <= v_max");
    if (!(pause_time >= 0.0)) throw std::invalid_argument("pause time must be non-negative");
  }

  [[nodiscard]] bool contains(Vec2 p) const {
    return p.x >= 0.0 && p.x <= area_width && p.y >= 0.0 && p.y <= area_height;
  }
};

/// One straight random-waypoint segment.
struct WaypointLeg {
  Vec2 start;
  Vec2 end;
  double speed = 0.0;
  Seconds depart_time = 0.0;

  [[nodiscard]] double length() const { return distance(start, end); }
  [[nodiscard]] Seconds travel_time() const { return length() / speed; }
  [[nodiscard]] Seconds arrival_time() const { return depart_time + travel_time(); }
  bool operator==(const WaypointLeg&) const = default;
};

/// Samples the next leg from `current`: uniform destination over the area, uniform speed.
[[nodiscard]] inline WaypointLeg next_leg(Vec2 current, const MobilityConfig& cfg, Rng& rng,
                                          Seconds depart_time = 0.0) {
  if (!cfg.contains(current)) throw std::invalid_argument("current position lies outside the area");
  WaypointLeg leg;
  leg.start = current;
  leg.end.x = rng.uniform(0.0, cfg.area_width);
  leg.end.y = rng.uniform(0.0, cfg.area_height);
  leg.speed = rng.uniform(cfg.v_min, cfg.v_max);
  leg.depart_time = depart_time;
  return leg;
}

[[nodiscard]] inline Vec2 position_at(const WaypointLeg& leg, Seconds t) {
  if (t < leg.depart_time) throw std::invalid_argument("time precedes leg departure");
  const double len = leg.length();
  const double travelled = leg.speed * (t - leg.depart_time);
  if (len == 0.0 || travelled >= len) return leg.end;
  return leg.start + (leg.end - leg.start) * (travelled / len);
}

[[nodiscard]] inline Vec2 velocity_at(const WaypointLeg& leg, Seconds t) {
  if (t < leg.depart_time) throw std::invalid_argument("time precedes leg departure");
  const double len = leg.length();
  if (len == 0.0 || leg.speed * (t - leg.depart_time) >= len) return {};
  return (leg.end - leg.start) * (leg.speed / len);
}

/// Linear prediction pos + vel * dt; ignores any future change of waypoint.
[[nodiscard]] inline Vec2 extrapolate(Vec2 pos, Vec2 vel, Seconds dt) {
  if (dt < 0.0) throw std::invalid_argument("extrapolation interval must be non-negative");
  return pos + vel * dt;
}

/// Lazily generated random-waypoint path of one node. Time must only move forward.
class Trajectory {
 public:
  Trajectory(const MobilityConfig& cfg, std::uint32_t node_index)
      : cfg_(cfg), rng_(Rng::derive(cfg.rng_seed, Stream::kMobility, node_index)) {
    cfg_.validate();
    Vec2 initial{rng_.uniform(0.0, cfg_.area_width), rng_.uniform(0.0, cfg_.area_height)};
    leg_ = next_leg(initial, cfg_, rng_, 0.0);
  }

  [[nodiscard]] const WaypointLeg& current_leg() const { return leg_; }

  /// Replaces the current leg with the next one; departure follows the pause.
  const WaypointLeg& advance() {
    leg_ = next_leg(leg_.end, cfg_, rng_, leg_.arrival_time() + cfg_.pause_time);
    return leg_;
  }

  void advance_to(Seconds t) {
    while (t >= next_departure()) advance();
  }

  [[nodiscard]] Seconds next_departure() const { return leg_.arrival_time() + cfg_.pause_time; }

  [[nodiscard]] Vec2 position(Seconds t) const {
    return t < leg_.depart_time ? leg_.start : position_at(leg_, t);
  }
  [[nodiscard]] Vec2 velocity(Seconds t) const {
    return t < leg_.depart_time ? Vec2{} : velocity_at(leg_, t);
  }

 private:
  MobilityConfig cfg_;
  Rng rng_;
  WaypointLeg leg_;
};

/// Full leg list of node `node_index` covering [0, horizon].
[[nodiscard]] inline std::vector<WaypointLeg> generate_legs(const MobilityConfig& cfg, std::uint32_t node_index,
                                                            Seconds horizon) {
  Trajectory traj(cfg, node_index);
  std::vector<WaypointLeg> legs{traj.current_leg()};
  while (traj.next_departure() <= horizon) legs.push_back(traj.advance());
  return legs;
}

/// Constant-velocity motion; used for hand-built topologies and static nodes.
struct LinearMotion {
  Vec2 origin;
  Vec2 velocity;
};

/// Per-node kinematics source owned by the engine.
class NodeMotion {
 public:
  explicit NodeMotion(Trajectory t) : m_(std::move(t)) {}
  explicit NodeMotion(LinearMotion l) : m_(l) {}

  [[nodiscard]] Vec2 position(Seconds t) const {
    if (const auto* l = std::get_if<LinearMotion>(&m_)) return l->origin + l->velocity * t;
    return std::get<Trajectory>(m_).position(t);
  }
  [[nodiscard]] Vec2 velocity(Seconds t) const {
    if (const auto* l = std::get_if<LinearMotion>(&m_)) return l->velocity;
    return std::get<Trajectory>(m_).velocity(t);
  }
  [[nodiscard]] Trajectory* trajectory() { return std::get_if<Trajectory>(&m_); }
  [[nodiscard]] const Trajectory* trajectory() const { return std::get_if<Trajectory>(&m_); }

 private:
  std::variant<Trajectory, LinearMotion> m_;
};

/// Comma-separated leg dump: node_id,depart_time,start_x,start_y,end_x,end_y,speed
inline void write_leg_header(std::ostream& os) { os << "node_id,depart_time,start_x,start_y,end_x,end_y,speed\n"; }

inline void write_leg(std::ostream& os, std::uint32_t node, const WaypointLeg& leg) {
  os << node << ',' << leg.depart_time << ',' << leg.start.x << ',' << leg.start.y << ',' << leg.end.x << ','
     << leg.end.y << ',' << leg.speed << '\n';
}

}  // namespace ampaodv
