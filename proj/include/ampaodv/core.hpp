#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ampaodv {

/// Simulation clock value in seconds.
using Seconds = double;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr bool operator==(const Vec2&) const = default;

  [[nodiscard]] constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  [[nodiscard]] constexpr double norm2() const { return dot(*this); }
  [[nodiscard]] double norm() const { return std::hypot(x, y); }
  [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline constexpr Vec2 operator*(double k, Vec2 v) { return v * k; }

struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}
  constexpr auto operator<=>(const NodeId&) const = default;
};

inline std::string to_string(NodeId id) { return std::to_string(id.value); }

/// Undirected link; endpoints stored in canonical order so Link(i,j) == Link(j,i).
class Link {
 public:
  Link(NodeId a, NodeId b) {
    if (a == b) throw std::invalid_argument("link endpoints must differ");
    a_ = a < b ? a : b;
    b_ = a < b ? b : a;
  }
  [[nodiscard]] NodeId a() const { return a_; }
  [[nodiscard]] NodeId b() const { return b_; }
  auto operator<=>(const Link&) const = default;

 private:
  NodeId a_;
  NodeId b_;
};

/// Loop-free ordered hop list from source to destination.
class Route {
 public:
  explicit Route(std::vector<NodeId> hops) : hops_(std::move(hops)) {
    if (hops_.size() < 2) throw std::invalid_argument("route needs at least two nodes");
    for (std::size_t i = 0; i < hops_.size(); ++i)
      for (std::size_t j = i + 1; j < hops_.size(); ++j)
        if (hops_[i] == hops_[j]) throw std::invalid_argument("route revisits a node");
  }
  [[nodiscard]] const std::vector<NodeId>& hops() const { return hops_; }
  [[nodiscard]] std::size_t hop_count() const { return hops_.size() - 1; }
  [[nodiscard]] NodeId source() const { return hops_.front(); }
  [[nodiscard]] NodeId destination() const { return hops_.back(); }
  [[nodiscard]] std::vector<Link> links() const {
    std::vector<Link> out;
    for (std::size_t i = 0; i + 1 < hops_.size(); ++i) out.emplace_back(hops_[i], hops_[i + 1]);
    return out;
  }

 private:
  std::vector<NodeId> hops_;
};

[[nodiscard]] inline double distance(Vec2 p, Vec2 q) { return (p - q).norm(); }

/// Unit-disk connectivity; a pair exactly at range counts as connected.
[[nodiscard]] inline bool is_connected(Vec2 p, Vec2 q, double range) {
  if (!(range > 0.0)) throw std::invalid_argument("transmission range must be positive");
  return (p - q).norm2() <= range * range || distance(p, q) <= range;
}

}  // namespace ampaodv

template <>
struct std::hash<ampaodv::NodeId> {
  std::size_t operator()(ampaodv::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
