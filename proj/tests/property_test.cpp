#include <gtest/gtest.h>

#include <map>
#include <set>
#include <tuple>

#include "ampaodv/ampaodv.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/property.hpp"

using namespace ampaodv;
using prop::describe;

namespace {

constexpr std::uint64_t kCases = 1000;

#define EXPECT_PROPERTY(outcome)                                                                 \
  do {                                                                                           \
    const auto o_ = (outcome);                                                                   \
    EXPECT_TRUE(o_.ok()) << "case " << o_.failing_case << ": " << o_.counterexample;             \
    EXPECT_GE(o_.cases_run, kCases);                                                             \
  } while (0)

SimulationSetup placed(std::vector<LinearMotion> nodes, ProtocolVariant v, std::uint64_t seed) {
  SimulationSetup s;
  s.protocol.variant = v;
  s.seed = seed;
  for (const auto& m : nodes) s.motions.emplace_back(m);
  return s;
}

Flow single_packet(std::uint32_t src, std::uint32_t dst) {
  Flow f;
  f.source = NodeId{src};
  f.destination = NodeId{dst};
  f.rate = 1.0;
  f.start_time = 0.0;
  f.stop_time = 0.5;
  return f;
}

ProtocolVariant any_variant(Rng& rng) { return kAllVariants[rng.below(4)]; }

}  // namespace

// --- prediction --------------------------------------------------------------

TEST(Properties, LdtMatchesTimeSteppingOracle) {
  EXPECT_PROPERTY(prop::for_all(10000, 11, [](Rng& rng, std::uint64_t i) -> std::string {
    const double r = rng.below(2) ? 250.0 : 300.0;
    const Vec2 p = gen::point_in_disk(rng, r);
    const Vec2 v = i % 10 == 0 ? Vec2{} : gen::velocity(rng, 0.5, 40.0);
    const auto got = compute_ldt({p, v}, r);
    if (v == Vec2{}) return got.is_unbounded() ? "" : describe("expected unbounded", p.x, p.y);
    const auto want = oracle::stepped_link_duration({p.x, p.y}, {v.x, v.y}, r);
    if (!want || got.is_unbounded()) return describe("unexpected unbounded", p.x, p.y, v.x, v.y);
    return std::abs(got.seconds() - *want) <= 1e-3 ? "" : describe(p.x, p.y, v.x, v.y, got.seconds(), *want);
  }));
}

TEST(Properties, LdtIsSymmetric) {
  EXPECT_PROPERTY(prop::for_all(kCases, 12, [](Rng& rng, std::uint64_t) -> std::string {
    const Vec2 pi = gen::point_in_disk(rng, 500), vi = gen::velocity(rng, 0, 30);
    const Vec2 pj = pi + gen::point_in_disk(rng, 250), vj = gen::velocity(rng, 0, 30);
    const auto a = compute_ldt(RelativeState::between(pi, vi, pj, vj), 250);
    const auto b = compute_ldt(RelativeState::between(pj, vj, pi, vi), 250);
    return a == b ? "" : describe(pi.x, pi.y, pj.x, pj.y);
  }));
}

TEST(Properties, LdtScalesInverselyWithSpeed) {
  EXPECT_PROPERTY(prop::for_all(kCases, 13, [](Rng& rng, std::uint64_t) -> std::string {
    const Vec2 p = gen::point_in_disk(rng, 250), v = gen::velocity(rng, 0.1, 30);
    const double c = rng.uniform(0.05, 20);
    const double base = compute_ldt({p, v}, 250).seconds();
    const double scaled = compute_ldt({p, v * c}, 250).seconds();
    if (base == 0.0) return scaled == 0.0 ? "" : "zero duration did not stay zero";
    return std::abs(scaled * c - base) / base < 1e-9 ? "" : describe(p.x, p.y, v.x, v.y, c, base, scaled);
  }));
}

TEST(Properties, LdtLandsOnTheRangeBoundary) {
  EXPECT_PROPERTY(prop::for_all(kCases, 14, [](Rng& rng, std::uint64_t) -> std::string {
    const double r = rng.uniform(50, 400);
    const Vec2 p = gen::point_in_disk(rng, r), v = gen::velocity(rng, 0.1, 40);
    const double t = compute_ldt({p, v}, r).seconds();
    const double d = (p + v * t).norm();
    return std::abs(d - r) <= 1e-6 ? "" : describe(p.x, p.y, v.x, v.y, t, d);
  }));
}

TEST(Properties, ComputeRetIsLeftFold) {
  EXPECT_PROPERTY(prop::for_all(kCases, 15, [](Rng& rng, std::uint64_t) -> std::string {
    std::vector<LinkDuration> xs(1 + rng.below(12), LinkDuration::unbounded());
    for (auto& x : xs) x = gen::link_duration(rng);
    auto folded = RouteExpiration::unbounded();
    for (const auto& x : xs) folded = fold_ret(folded, x);
    return compute_ret(xs) == folded ? "" : "fold mismatch";
  }));
}

TEST(Properties, HelloIntervalStaysWithinBounds) {
  EXPECT_PROPERTY(prop::for_all(kCases, 16, [](Rng& rng, std::uint64_t) -> std::string {
    const auto ldt = gen::link_duration(rng);
    const double alpha = rng.uniform(0.1, 10), cap = rng.uniform(1, 30);
    const double h = hello_interval(ldt, alpha, cap);
    return h >= 1.0 && h <= std::max(1.0, cap) ? "" : describe(alpha, cap, h);
  }));
}

// --- selection ---------------------------------------------------------------

TEST(Properties, SelectionIsScaleInvariant) {
  EXPECT_PROPERTY(prop::for_all(kCases, 17, [](Rng& rng, std::uint64_t) -> std::string {
    auto cs = gen::candidates(rng);
    const double c = rng.below(2) ? static_cast<double>(1 + rng.below(9)) : rng.uniform(0.01, 100);
    auto scaled = cs;
    for (auto& s : scaled)
      if (s.ret.is_finite()) s.ret = RouteExpiration::finite(s.ret.seconds() * c);
    for (auto v : {ProtocolVariant::kAmpI, ProtocolVariant::kAmpII, ProtocolVariant::kAmpIII})
      if (select_route(v, cs) != select_route(v, scaled)) return describe(variant_name(v), c, cs.size());
    return "";
  }));
}

TEST(Properties, AmpIPicksFewestHops) {
  EXPECT_PROPERTY(prop::for_all(kCases, 18, [](Rng& rng, std::uint64_t) -> std::string {
    auto cs = gen::candidates(rng);
    const auto& chosen = cs[select_route(ProtocolVariant::kAmpI, cs)];
    for (const auto& c : cs)
      if (c.hop_count < chosen.hop_count) return describe(c.hop_count, chosen.hop_count);
    return "";
  }));
}

TEST(Properties, SelectionIsOrderIndependent) {
  EXPECT_PROPERTY(prop::for_all(kCases, 19, [](Rng& rng, std::uint64_t) -> std::string {
    auto cs = gen::candidates(rng);
    auto shuffled = cs;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    for (auto v : {ProtocolVariant::kAmpI, ProtocolVariant::kAmpII, ProtocolVariant::kAmpIII}) {
      const auto& a = cs[select_route(v, cs)];
      const auto& b = shuffled[select_route(v, shuffled)];
      if (a.reverse_next_hop != b.reverse_next_hop || a.hop_count != b.hop_count || !(a.ret == b.ret))
        return describe(variant_name(v));
    }
    return "";
  }));
}

// --- mobility ----------------------------------------------------------------

TEST(Properties, TrajectoriesStayInsideAndAreContinuous) {
  EXPECT_PROPERTY(prop::for_all(kCases, 20, [](Rng& rng, std::uint64_t i) -> std::string {
    MobilityConfig cfg;
    cfg.area_width = rng.uniform(50, 2000);
    cfg.area_height = rng.uniform(50, 2000);
    cfg.v_min = rng.uniform(0.5, 10);
    cfg.v_max = cfg.v_min + rng.uniform(0, 20);
    cfg.pause_time = rng.below(3) == 0 ? rng.uniform(0, 20) : 0.0;
    cfg.rng_seed = i;
    const auto legs = generate_legs(cfg, static_cast<std::uint32_t>(rng.below(100)), 900);
    for (std::size_t k = 0; k < legs.size(); ++k) {
      const auto& leg = legs[k];
      if (!cfg.contains(leg.start) || !cfg.contains(leg.end)) return describe("leg", k, "leaves the area");
      if (leg.speed < cfg.v_min || leg.speed > cfg.v_max) return describe("speed", leg.speed);
      if (k > 0 && !(legs[k - 1].end == leg.start)) return describe("gap before leg", k);
      const double t = leg.depart_time + rng.uniform01() * leg.travel_time();
      if (!cfg.contains(position_at(leg, t))) return describe("position outside at", t);
      // Prediction is exact while the node stays on its leg.
      const double dt = rng.uniform01() * (leg.arrival_time() - t);
      const Vec2 predicted = extrapolate(position_at(leg, t), velocity_at(leg, t), dt);
      if ((predicted - position_at(leg, t + dt)).norm() > 1e-6) return describe("extrapolation error", k);
    }
    return "";
  }));
}

TEST(Properties, TrajectoryPositionIsLipschitz) {
  EXPECT_PROPERTY(prop::for_all(kCases, 21, [](Rng& rng, std::uint64_t i) -> std::string {
    MobilityConfig cfg;
    cfg.rng_seed = i;
    cfg.pause_time = rng.uniform(0, 5);
    Trajectory traj(cfg, 0);
    double t = 0;
    Vec2 prev = traj.position(0);
    for (int k = 0; k < 200; ++k) {
      const double step = rng.uniform(0.01, 5);
      t += step;
      traj.advance_to(t);
      const Vec2 now = traj.position(t);
      if ((now - prev).norm() > cfg.v_max * step + 1e-9) return describe("jump at", t);
      prev = now;
    }
    return "";
  }));
}

// --- protocol on simulated topologies ----------------------------------------

TEST(Properties, FloodsTerminate) {
  EXPECT_PROPERTY(prop::for_all(kCases, 22, [](Rng& rng, std::uint64_t i) -> std::string {
    const auto n = static_cast<std::uint32_t>(4 + rng.below(14));
    auto nodes = gen::scatter(rng, n, rng.uniform(200, 900));
    const auto src = static_cast<std::uint32_t>(rng.below(n));
    const auto dst = static_cast<std::uint32_t>((src + 1 + rng.below(n - 1)) % n);
    auto setup = placed(nodes, any_variant(rng), i);
    setup.flows = {single_packet(src, dst)};
    Simulator sim(std::move(setup));
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> per_node;  // (node, origin) -> RREQ sends
    std::size_t total = 0;
    sim.set_observer([&](const TraceRecord& r) {
      if (r.kind == TraceKind::kTransmit && std::holds_alternative<Rreq>(r.frame->body)) {
        ++per_node[{r.node.value, std::get<Rreq>(r.frame->body).origin.value}];
        ++total;
      }
    });
    (void)sim.run(0.45);  // one flood, before the first retry
    for (const auto& [k, c] : per_node)
      if (c > 1) return describe("node", k.first, "sent", c, "copies");
    return total <= n ? "" : describe("total", total, "nodes", n);
  }));
}

TEST(Properties, RetNeverGrowsAlongAFlood) {
  EXPECT_PROPERTY(prop::for_all(kCases, 23, [](Rng& rng, std::uint64_t i) -> std::string {
    const auto n = static_cast<std::uint32_t>(5 + rng.below(15));
    auto nodes = gen::scatter(rng, n, rng.uniform(300, 800), 25.0);
    const auto variant = kAllVariants[1 + rng.below(3)];
    auto setup = placed(nodes, variant, i);
    setup.flows = {single_packet(0, n - 1)};
    Simulator sim(std::move(setup));
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>, Rreq> first_heard;  // (node, origin, flood id)
    std::string failure;
    sim.set_observer([&](const TraceRecord& r) {
      if (!r.frame || !std::holds_alternative<Rreq>(r.frame->body)) return;
      const auto& q = std::get<Rreq>(r.frame->body);
      const auto key = std::make_tuple(r.node.value, q.origin.value, q.broadcast_id);
      if (r.kind == TraceKind::kDeliver) {
        first_heard.try_emplace(key, q);
      } else if (r.kind == TraceKind::kTransmit && q.origin != r.node) {
        const auto it = first_heard.find(key);
        if (it == first_heard.end()) failure = "rebroadcast without reception";
        else if (q.hop_count != it->second.hop_count + 1) failure = "hop count not incremented";
        else if (it->second.ret < q.ret) failure = describe("ret grew at node", r.node.value);
      }
    });
    (void)sim.run(0.45);
    return failure;
  }));
}

TEST(Properties, NoRoutingLoopsOnStaticTopologies) {
  EXPECT_PROPERTY(prop::for_all(kCases, 24, [](Rng& rng, std::uint64_t i) -> std::string {
    const auto n = static_cast<std::uint32_t>(4 + rng.below(16));
    auto nodes = gen::scatter(rng, n, rng.uniform(200, 900));
    auto setup = placed(std::move(nodes), any_variant(rng), i);
    for (int f = 0; f < 3; ++f) {
      const auto a = static_cast<std::uint32_t>(rng.below(n));
      const auto b = static_cast<std::uint32_t>((a + 1 + rng.below(n - 1)) % n);
      Flow fl = single_packet(a, b);
      fl.rate = 4.0;
      fl.stop_time = 2.0;
      setup.flows.push_back(fl);
    }
    Simulator sim(std::move(setup));
    const Seconds end = 3.0;
    (void)sim.run(end);
    for (std::uint32_t u = 0; u < n; ++u) {
      for (const auto& [dest, entry] : sim.router(NodeId{u}).routing_table().entries()) {
        if (!entry.usable(end)) continue;
        // Loop freedom via the freshness ordering: along the chain the sequence
        // number never drops, and at equal sequence numbers hop count shrinks.
        NodeId at{u};
        const RoutingTableEntry* cur = &entry;
        std::set<NodeId> visited{at};
        while (at != dest) {
          at = cur->next_hop;
          if (!visited.insert(at).second) return describe("loop from", u, "to", dest.value);
          if (at == dest) break;
          const auto* next = sim.router(at).routing_table().find(dest);
          if (!next || !next->usable(end)) break;  // broken chain is not a loop
          if (next->dest_seq < cur->dest_seq || (next->dest_seq == cur->dest_seq && next->hop_count >= cur->hop_count))
            return describe("freshness order violated at", at.value, "toward", dest.value);
          cur = next;
        }
      }
    }
    return "";
  }));
}

TEST(Properties, PacketsAreConserved) {
  EXPECT_PROPERTY(prop::for_all(kCases, 25, [](Rng& rng, std::uint64_t i) -> std::string {
    ScenarioConfig cfg;
    cfg.node_count = static_cast<std::uint32_t>(4 + rng.below(12));
    cfg.mobility.area_width = rng.uniform(200, 1200);
    cfg.mobility.area_height = rng.uniform(200, 1200);
    cfg.mobility.v_max = rng.uniform(1, 40);
    cfg.mobility.v_min = std::min(cfg.mobility.v_max, rng.uniform(0.5, 5));
    cfg.traffic.flow_count = static_cast<std::uint32_t>(1 + rng.below(3));
    cfg.radio.loss_probability = rng.below(4) == 0 ? rng.uniform(0, 0.3) : 0.0;
    cfg.protocol.variant = any_variant(rng);
    cfg.sim_time = rng.uniform(1, 8);
    cfg.seed = i;
    const auto m = run_scenario(cfg);
    if (!m.conserves_packets()) return describe("conservation", m.serialize());
    if (m.raw.latencies.size() != m.raw.delivered) return "latency count";
    if (m.pdr && (*m.pdr < 0 || *m.pdr > 1)) return "pdr out of range";
    return "";
  }));
}

TEST(Properties, StaticConnectedDiscoveryAlwaysSucceeds) {
  EXPECT_PROPERTY(prop::for_all(kCases, 26, [](Rng& rng, std::uint64_t i) -> std::string {
    const auto n = static_cast<std::uint32_t>(3 + rng.below(12));
    // Random chain-of-disks layout keeps the snapshot connected.
    std::vector<LinearMotion> nodes{{{0, 0}, {}}};
    for (std::uint32_t k = 1; k < n; ++k) {
      const Vec2 anchor = nodes[rng.below(k)].origin;
      nodes.push_back({anchor + gen::point_in_disk(rng, 250), {}});
    }
    const auto src = static_cast<std::uint32_t>(rng.below(n));
    const auto dst = static_cast<std::uint32_t>((src + 1 + rng.below(n - 1)) % n);
    auto setup = placed(nodes, any_variant(rng), i);
    setup.flows = {single_packet(src, dst)};
    Simulator sim(std::move(setup));
    const auto m = sim.run(4.0);
    return m.raw.delivered == 1 ? "" : describe("undelivered", src, dst, n);
  }));
}
