#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ampaodv/core.hpp"
#include "ampaodv/mobility.hpp"

namespace ampaodv {

/// A maximal interval during which one node pair stayed within range.
/// Intervals that touch the start or end of the observation window are censored.
struct ConnectedInterval {
  NodeId a;
  NodeId b;
  Seconds start = 0.0;
  Seconds end = 0.0;
  bool censored = false;

  [[nodiscard]] Seconds duration() const { return end - start; }
};

struct Histogram {
  double bin_width = 0.0;
  std::vector<double> density;  // integrates to 1 over all bins
  std::vector<std::uint64_t> counts;
};

struct CensusResult {
  std::vector<ConnectedInterval> intervals;
  Histogram histogram;  // uncensored durations only
  std::size_t uncensored = 0;
  double mean = 0.0;
  double median = 0.0;
  double fraction_below_mean = 0.0;
};

/// Piece of a node's path with constant velocity.
struct MotionSegment {
  Seconds t0;
  Seconds t1;
  Vec2 p0;  // position at t0
  Vec2 vel;
};

/// Piecewise-linear path of a random-waypoint node over [0, horizon].
inline std::vector<MotionSegment> motion_segments(const std::vector<WaypointLeg>& legs, Seconds pause, Seconds horizon) {
  std::vector<MotionSegment> out;
  for (const auto& leg : legs) {
    const Seconds arrive = std::min(leg.arrival_time(), horizon);
    if (leg.depart_time >= horizon) break;
    if (arrive > leg.depart_time) out.push_back({leg.depart_time, arrive, leg.start, velocity_at(leg, leg.depart_time)});
    const Seconds resume = std::min(leg.arrival_time() + pause, horizon);
    if (resume > arrive) out.push_back({arrive, resume, leg.end, {}});
  }
  if (!out.empty() && out.back().t1 < horizon) {
    const auto& last = out.back();
    out.push_back({last.t1, horizon, last.p0 + last.vel * (last.t1 - last.t0), {}});
  }
  return out;
}

namespace detail {

// Sub-interval of [0, len] where |p + v*tau| <= r, if any.
inline bool inside_span(Vec2 p, Vec2 v, double r, double len, double& lo, double& hi) {
  const double a = v.norm2();
  const double c = p.norm2() - r * r;
  if (a == 0.0) {
    lo = 0.0;
    hi = len;
    return c <= 0.0;
  }
  const double b = p.dot(v);
  const double disc = b * b - a * c;
  if (disc < 0.0) return false;
  const double s = std::sqrt(disc);
  lo = std::max(0.0, (-b - s) / a);
  hi = std::min(len, (-b + s) / a);
  return lo <= hi;
}

}  // namespace detail

/// Exact maximal connected intervals for every node pair over [0, horizon],
/// plus a normalized histogram of the uncensored durations.
[[nodiscard]] inline CensusResult link_duration_census(const std::vector<std::vector<MotionSegment>>& paths,
                                                       double range, Seconds horizon, std::size_t bins = 50) {
  if (paths.size() < 2) throw std::invalid_argument("census needs at least two nodes");
  if (!(range > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("range and horizon must be positive");
  const auto node_count = static_cast<std::uint32_t>(paths.size());

  constexpr double kJoin = 1e-9;
  CensusResult res;
  for (std::uint32_t i = 0; i < node_count; ++i) {
    for (std::uint32_t j = i + 1; j < node_count; ++j) {
      const auto& pi = paths[i];
      const auto& pj = paths[j];
      std::size_t a = 0, b = 0;
      bool open = false;
      Seconds open_start = 0.0, open_end = 0.0;
      auto close = [&] {
        if (!open) return;
        const bool censored = open_start <= kJoin || open_end >= horizon - kJoin;
        res.intervals.push_back({NodeId{i}, NodeId{j}, open_start, open_end, censored});
        open = false;
      };
      while (a < pi.size() && b < pj.size()) {
        const Seconds t0 = std::max(pi[a].t0, pj[b].t0);
        const Seconds t1 = std::min(pi[a].t1, pj[b].t1);
        if (t1 > t0) {
          const Vec2 xi = pi[a].p0 + pi[a].vel * (t0 - pi[a].t0);
          const Vec2 xj = pj[b].p0 + pj[b].vel * (t0 - pj[b].t0);
          double lo, hi;
          if (detail::inside_span(xi - xj, pi[a].vel - pj[b].vel, range, t1 - t0, lo, hi)) {
            if (open && t0 + lo <= open_end + kJoin) {
              open_end = t0 + hi;
            } else {
              close();
              open = true;
              open_start = t0 + lo;
              open_end = t0 + hi;
            }
          }
          if (open && open_end < t1 - kJoin) close();
        }
        if (pi[a].t1 <= pj[b].t1) ++a;
        else ++b;
      }
      close();
    }
  }

  std::vector<double> durations;
  for (const auto& iv : res.intervals)
    if (!iv.censored) durations.push_back(iv.duration());
  res.uncensored = durations.size();
  if (durations.empty()) return res;
  std::sort(durations.begin(), durations.end());
  double sum = 0.0;
  for (double d : durations) sum += d;
  res.mean = sum / durations.size();
  const std::size_t n = durations.size();
  res.median = n % 2 ? durations[n / 2] : 0.5 * (durations[n / 2 - 1] + durations[n / 2]);
  res.fraction_below_mean =
      static_cast<double>(std::lower_bound(durations.begin(), durations.end(), res.mean) - durations.begin()) / n;

  bins = std::max<std::size_t>(1, bins);
  auto& h = res.histogram;
  h.bin_width = durations.back() / bins;
  if (h.bin_width <= 0.0) h.bin_width = 1.0;
  h.counts.assign(bins, 0);
  for (double d : durations) ++h.counts[std::min(bins - 1, static_cast<std::size_t>(d / h.bin_width))];
  for (auto c : h.counts) h.density.push_back(static_cast<double>(c) / (n * h.bin_width));
  return res;
}


/// Census of random-waypoint motion: simulates mobility only, no protocol.
[[nodiscard]] inline CensusResult link_duration_census(const MobilityConfig& mobility, std::uint32_t node_count,
                                                       double range, Seconds horizon, std::size_t bins = 50) {
  if (node_count < 2) throw std::invalid_argument("census needs at least two nodes");
  mobility.validate();
  std::vector<std::vector<MotionSegment>> paths;
  for (std::uint32_t i = 0; i < node_count; ++i)
    paths.push_back(motion_segments(generate_legs(mobility, i, horizon), mobility.pause_time, horizon));
  return link_duration_census(paths, range, horizon, bins);
}

/// Census of constant-velocity nodes.
[[nodiscard]] inline CensusResult link_duration_census(const std::vector<LinearMotion>& nodes, double range,
                                                       Seconds horizon, std::size_t bins = 50) {
  std::vector<std::vector<MotionSegment>> paths;
  for (const auto& m : nodes) paths.push_back({MotionSegment{0.0, horizon, m.origin, m.velocity}});
  return link_duration_census(paths, range, horizon, bins);
}

}  // namespace ampaodv
