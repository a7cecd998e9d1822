#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ampaodv/engine.hpp"
#include "ampaodv/scenario.hpp"
#include "ampaodv/selection.hpp"

namespace ampaodv::fixture {

// Node ids of the eight-node example topology.
inline constexpr NodeId kSource{0};
inline constexpr NodeId kDestination{7};

/// Routes of the worked example: s-1-2-d (3 hops, RET 12), s-1-6-d (3 hops,
/// RET 15), s-3-4-5-d (4 hops, RET 17). Each is identified at the destination
/// by its last relay.
struct ExampleRoute {
  const char* path;
  NodeId last_relay;
  std::uint32_t hops;
  double ret;
};

inline constexpr std::array<ExampleRoute, 3> kExampleRoutes{{
    {"s-1-2-d", NodeId{2}, 3, 12.0},
    {"s-1-6-d", NodeId{6}, 3, 15.0},
    {"s-3-4-5-d", NodeId{5}, 4, 17.0},
}};

[[nodiscard]] inline std::vector<RouteCandidate> example_candidates() {
  std::vector<RouteCandidate> out;
  for (const auto& r : kExampleRoutes) out.push_back({r.last_relay, r.hops, RouteExpiration::finite(r.ret)});
  return out;
}

/// Index into kExampleRoutes each selection rule must pick.
[[nodiscard]] inline std::size_t expected_choice(ProtocolVariant v) {
  switch (v) {
    case ProtocolVariant::kAmpII: return 2;
    case ProtocolVariant::kAodvBaseline: return 0;  // first arrival
    default: return 1;
  }
}

/// Constant-velocity placement realizing the example with a 250 m range.
/// Only relays 2, 6 and 4 move, each along the perpendicular bisector of its
/// two route neighbours, so both of its links expire together at the
/// route's RET; every other link has zero relative velocity.
[[nodiscard]] inline std::vector<LinearMotion> example_topology(double range = 250.0) {
  const Vec2 s{0, 0}, n1{200, 80}, d{600, 0}, n3{60, -230}, n5{540, -230};
  const Vec2 mid = (n1 + d) * 0.5;
  const Vec2 along = d - n1;
  const double half = along.norm() / 2.0;
  Vec2 perp{-along.y / along.norm(), along.x / along.norm()};
  if (perp.y < 0) perp = -perp;
  const double offset = 60.0;
  const double reach = std::sqrt(range * range - half * half) - offset;
  const Vec2 n2 = mid + perp * offset;
  const Vec2 n6 = mid - perp * offset;
  const Vec2 n4{300, -290};
  const double reach4 = std::sqrt(range * range - 240.0 * 240.0) - offset;
  return {
      {s, {}},
      {n1, {}},
      {n2, perp * (reach / kExampleRoutes[0].ret)},
      {n3, {}},
      {n4, Vec2{0, -1} * (reach4 / kExampleRoutes[2].ret)},
      {n5, {}},
      {n6, -perp * (reach / kExampleRoutes[1].ret)},
      {d, {}},
  };
}

/// Example topology with one packet from s to d at t = 0.
[[nodiscard]] inline ScenarioConfig example_scenario(ProtocolVariant v) {
  ScenarioConfig cfg;
  cfg.placed_nodes = example_topology(cfg.radio.range);
  cfg.protocol.variant = v;
  cfg.sim_time = 1.0;
  Flow f;
  f.source = kSource;
  f.destination = kDestination;
  f.rate = 1.0;
  f.start_time = 0.0;
  f.stop_time = 0.5;
  cfg.flows = {f};
  return cfg;
}

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Selection-table checks plus a simulated discovery on the example topology.
[[nodiscard]] inline std::vector<Check> run_example_checks() {
  std::vector<Check> checks;
  const auto cands = example_candidates();
  for (auto v : {ProtocolVariant::kAmpI, ProtocolVariant::kAmpII, ProtocolVariant::kAmpIII}) {
    const std::size_t got = select_route(v, cands);
    const std::size_t want = expected_choice(v);
    checks.push_back({"table " + std::string(variant_name(v)), got == want,
                      std::string("chose ") + kExampleRoutes[got].path + ", expected " + kExampleRoutes[want].path});
  }

  for (auto v : kAllVariants) {
    Simulator sim(build_setup(example_scenario(v)));
    const auto report = sim.run(1.0);
    const auto* route = sim.router(kSource).routing_table().find(kDestination);
    const auto& want = kExampleRoutes[expected_choice(v)];
    Check c{"topology " + std::string(variant_name(v)), false, ""};
    if (!route || report.raw.delivered != 1) {
      c.detail = "no route established";
    } else {
      const std::uint32_t hops = route->hop_count;
      const auto& sel = sim.router(kDestination).selections();
      NodeId relay = want.last_relay;
      std::string rets;
      if (uses_prediction(v)) {
        if (sel.size() == 1) {
          relay = sel[0].candidates[sel[0].chosen].reverse_next_hop;
          for (const auto& cand : sel[0].candidates) {
            if (!rets.empty()) rets += ' ';
            rets += to_string(cand.reverse_next_hop) + ":" + format_double(std::round(cand.ret.seconds() * 1000) / 1000);
          }
        } else {
          relay = NodeId{~0u};
        }
      } else {
        relay = sim.router(kDestination).routing_table().find(kSource)->next_hop;
      }
      c.passed = hops == want.hops && relay == want.last_relay;
      c.detail = "hops " + std::to_string(hops) + " via " + to_string(relay) + ", expected " + want.path;
      if (!rets.empty()) c.detail += " (candidates " + rets + ")";
    }
    checks.push_back(std::move(c));
  }
  return checks;
}

}  // namespace ampaodv::fixture
