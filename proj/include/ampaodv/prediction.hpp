#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <span>
#include <stdexcept>

#include "ampaodv/core.hpp"

namespace ampaodv {

/// A non-negative number of seconds, or the distinguished value "unbounded".
/// Unbounded compares greater than every finite value.
template <class Tag>
class MaybeUnbounded {
 public:
  static constexpr MaybeUnbounded unbounded() { return MaybeUnbounded(); }
  static MaybeUnbounded finite(double s) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("duration must be finite and non-negative");
    return MaybeUnbounded(s);
  }

  [[nodiscard]] constexpr bool is_unbounded() const { return unbounded_; }
  [[nodiscard]] constexpr bool is_finite() const { return !unbounded_; }

  /// Finite value in seconds; throws when unbounded.
  [[nodiscard]] double seconds() const {
    if (unbounded_) throw std::logic_error("unbounded duration has no finite value");
    return value_;
  }
  /// Finite value, or `cap` when unbounded or larger than cap.
  [[nodiscard]] constexpr double clamped(double cap) const { return unbounded_ ? cap : std::min(value_, cap); }

  constexpr bool operator==(const MaybeUnbounded& o) const {
    return unbounded_ == o.unbounded_ && (unbounded_ || value_ == o.value_);
  }
  constexpr std::partial_ordering operator<=>(const MaybeUnbounded& o) const {
    if (unbounded_ || o.unbounded_) return unbounded_ <=> o.unbounded_;
    return value_ <=> o.value_;
  }

  template <class OtherTag>
  explicit operator MaybeUnbounded<OtherTag>() const {
    return unbounded_ ? MaybeUnbounded<OtherTag>::unbounded() : MaybeUnbounded<OtherTag>::finite(value_);
  }

 private:
  constexpr MaybeUnbounded() : value_(0.0), unbounded_(true) {}
  constexpr explicit MaybeUnbounded(double s) : value_(s), unbounded_(false) {}

  double value_;
  bool unbounded_;
};

struct LinkDurationTag {};
struct RouteExpirationTag {};

/// Predicted remaining lifetime of one link.
using LinkDuration = MaybeUnbounded<LinkDurationTag>;
/// Least link duration along a route.
using RouteExpiration = MaybeUnbounded<RouteExpirationTag>;

/// Position and velocity of node i relative to node j.
struct RelativeState {
  Vec2 rel_pos;
  Vec2 rel_vel;

  static RelativeState between(Vec2 pos_i, Vec2 vel_i, Vec2 pos_j, Vec2 vel_j) {
    return {pos_i - pos_j, vel_i - vel_j};
  }
  [[nodiscard]] RelativeState reversed() const { return {-rel_pos, -rel_vel}; }
};

/// Time until the predicted separation |p + v*dt| first exceeds `range`.
///
/// Solves |p + v*dt|^2 = r^2 for its non-negative root. The pair must be
/// connected now; a disconnected pair means the caller measured a link that
/// does not exist.
[[nodiscard]] inline LinkDuration compute_ldt(const RelativeState& rel, double range) {
  if (!(range > 0.0)) throw std::invalid_argument("transmission range must be positive");
  const Vec2 p = rel.rel_pos;
  const Vec2 v = rel.rel_vel;
  const double c = p.norm2() - range * range;
  if (c > 0.0) throw std::domain_error("link duration requested for a disconnected pair");
  const double a = v.norm2();
  if (a == 0.0) return LinkDuration::unbounded();
  const double b = p.dot(v);
  const double root = std::sqrt(std::max(0.0, b * b - a * c));
  // Separating pairs use the conjugate form to avoid cancellation.
  const double dt = b <= 0.0 ? (root - b) / a : (b + root == 0.0 ? 0.0 : -c / (b + root));
  return LinkDuration::finite(std::max(0.0, dt));
}

[[nodiscard]] inline RouteExpiration fold_ret(RouteExpiration current, LinkDuration ldt) {
  const auto as_ret = static_cast<RouteExpiration>(ldt);
  return as_ret < current ? as_ret : current;
}

/// Minimum link duration over a route.
[[nodiscard]] inline RouteExpiration compute_ret(std::span<const LinkDuration> link_durations) {
  if (link_durations.empty()) throw std::invalid_argument("route expiration needs at least one link");
  auto ret = RouteExpiration::unbounded();
  for (const auto& ldt : link_durations) ret = fold_ret(ret, ldt);
  return ret;
}

inline constexpr double kDefaultHelloIntervalCap = 10.0;

/// Adaptive hello interval max{1, min_ldt / alpha}, limited above by `cap`.
[[nodiscard]] inline Seconds hello_interval(LinkDuration min_neighbor_ldt, double alpha,
                                            Seconds cap = kDefaultHelloIntervalCap) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (min_neighbor_ldt.is_unbounded()) return cap;
  return std::min(cap, std::max(1.0, min_neighbor_ldt.seconds() / alpha));
}

}  // namespace ampaodv
