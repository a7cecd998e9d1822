#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ampaodv/engine.hpp"
#include "ampaodv/metrics.hpp"
#include "ampaodv/mobility.hpp"
#include "ampaodv/random.hpp"
#include "ampaodv/router.hpp"

namespace ampaodv {

struct TrafficConfig {
  std::uint32_t flow_count = 5;
  double rate = 5.0;
  std::uint32_t packet_size = 512;
};

/// Everything needed to reproduce one run.
struct ScenarioConfig {
  std::uint32_t node_count = 30;
  MobilityConfig mobility;
  RadioConfig radio;
  TrafficConfig traffic;
  std::vector<Flow> flows;                  // explicit flows; sampled from `traffic` when empty
  std::vector<LinearMotion> placed_nodes;   // explicit kinematics; replaces random waypoint when non-empty
  ProtocolConfig protocol;
  Seconds sim_time = 900.0;
  std::uint64_t seed = 1;
  MessageSizes sizes;

  /// 30 nodes on 800 m x 600 m, 5 flows, uniform 1-20 m/s.
  static ScenarioConfig desk_scale() { return {}; }

  /// 100 nodes on 2 km x 1.5 km, 10 flows.
  static ScenarioConfig full_scale() {
    ScenarioConfig c;
    c.node_count = 100;
    c.mobility.area_width = 2000.0;
    c.mobility.area_height = 1500.0;
    c.traffic.flow_count = 10;
    return c;
  }

  [[nodiscard]] std::uint32_t effective_node_count() const {
    return placed_nodes.empty() ? node_count : static_cast<std::uint32_t>(placed_nodes.size());
  }

  void validate() const {
    if (effective_node_count() < 1) throw std::invalid_argument("scenario needs at least one node");
    if (!(sim_time > 0.0)) throw std::invalid_argument("simulation time must be positive");
    if (placed_nodes.empty()) mobility.validate();
    radio.validate();
    protocol.validate();
    for (const auto& f : flows) f.validate(effective_node_count());
    if (flows.empty() && traffic.flow_count > 0) {
      const std::uint64_t n = effective_node_count();
      if (n < 2 || traffic.flow_count > n * (n - 1)) throw std::invalid_argument("not enough node pairs for the flows");
      if (!(traffic.rate > 0.0)) throw std::invalid_argument("flow rate must be positive");
    }
  }
};

/// Seeded flow endpoints. Endpoints are distinct nodes when there are enough of
/// them; otherwise distinct ordered pairs. Each flow starts within its first period.
[[nodiscard]] inline std::vector<Flow> make_flows(const ScenarioConfig& cfg) {
  if (!cfg.flows.empty()) return cfg.flows;
  const std::uint32_t n = cfg.effective_node_count();
  const std::uint32_t k = cfg.traffic.flow_count;
  Rng rng = Rng::derive(cfg.seed, Stream::kTraffic);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  if (2ULL * k <= n) {
    std::vector<std::uint32_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0u);
    for (std::uint32_t i = 0; i < 2 * k; ++i) std::swap(ids[i], ids[i + rng.below(n - i)]);
    for (std::uint32_t i = 0; i < k; ++i) pairs.emplace_back(ids[2 * i], ids[2 * i + 1]);
  } else {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> all;
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b)
        if (a != b) all.emplace_back(a, b);
    for (std::uint32_t i = 0; i < k; ++i) {
      std::swap(all[i], all[i + rng.below(all.size() - i)]);
      pairs.push_back(all[i]);
    }
  }
  std::vector<Flow> flows;
  for (const auto& [a, b] : pairs) {
    Flow f;
    f.source = NodeId{a};
    f.destination = NodeId{b};
    f.rate = cfg.traffic.rate;
    f.packet_size = cfg.traffic.packet_size;
    f.start_time = rng.uniform01() / cfg.traffic.rate;
    f.stop_time = cfg.sim_time;
    flows.push_back(f);
  }
  return flows;
}

[[nodiscard]] inline SimulationSetup build_setup(const ScenarioConfig& cfg) {
  cfg.validate();
  SimulationSetup s;
  s.protocol = cfg.protocol;
  s.radio = cfg.radio;
  s.sizes = cfg.sizes;
  s.seed = cfg.seed;
  s.flows = make_flows(cfg);
  if (!cfg.placed_nodes.empty()) {
    for (const auto& m : cfg.placed_nodes) s.motions.emplace_back(m);
  } else {
    MobilityConfig mob = cfg.mobility;
    mob.rng_seed = cfg.seed;
    for (std::uint32_t i = 0; i < cfg.node_count; ++i) s.motions.emplace_back(Trajectory(mob, i));
  }
  return s;
}

[[nodiscard]] inline MetricsReport run_scenario(const ScenarioConfig& cfg, std::ostream* trace = nullptr) {
  Simulator sim(build_setup(cfg));
  sim.set_trace(trace);
  return sim.run(cfg.sim_time);
}

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  T v{};
  is >> v;
  if (!is || !is.eof()) throw ConfigError("bad value for '" + key + "': " + text);
  return v;
}

}  // namespace detail

/// Applies one `key = value` setting to `cfg`.
inline void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  auto num = [&] { return detail::parse_number<double>(value, key); };
  auto count = [&] { return detail::parse_number<std::uint64_t>(value, key); };
  auto& p = cfg.protocol;
  if (key == "preset") {
    if (value == "desk") cfg = ScenarioConfig::desk_scale();
    else if (value == "full") cfg = ScenarioConfig::full_scale();
    else throw ConfigError("unknown preset: " + value);
  } else if (key == "nodes") cfg.node_count = static_cast<std::uint32_t>(count());
  else if (key == "area_width") cfg.mobility.area_width = num();
  else if (key == "area_height") cfg.mobility.area_height = num();
  else if (key == "v_min") cfg.mobility.v_min = num();
  else if (key == "v_max") cfg.mobility.v_max = num();
  else if (key == "speed") cfg.mobility.v_min = cfg.mobility.v_max = num();
  else if (key == "pause_time") cfg.mobility.pause_time = num();
  else if (key == "range") cfg.radio.range = p.range = num();
  else if (key == "per_hop_latency") cfg.radio.per_hop_latency = num();
  else if (key == "loss_probability") cfg.radio.loss_probability = num();
  else if (key == "flows") cfg.traffic.flow_count = static_cast<std::uint32_t>(count());
  else if (key == "flow_rate") cfg.traffic.rate = num();
  else if (key == "packet_size") cfg.traffic.packet_size = static_cast<std::uint32_t>(count());
  else if (key == "flow") {
    const auto comma = value.find(',');
    if (comma == std::string::npos) throw ConfigError("flow needs 'source,destination'");
    Flow f;
    f.source = NodeId{static_cast<std::uint32_t>(detail::parse_number<std::uint64_t>(detail::trim(value.substr(0, comma)), key))};
    f.destination = NodeId{static_cast<std::uint32_t>(detail::parse_number<std::uint64_t>(detail::trim(value.substr(comma + 1)), key))};
    f.rate = cfg.traffic.rate;
    f.packet_size = cfg.traffic.packet_size;
    f.stop_time = cfg.sim_time;
    cfg.flows.push_back(f);
  } else if (key == "variant") {
    auto v = parse_variant(value);
    if (!v) throw ConfigError("unknown variant: " + value);
    p.variant = *v;
  } else if (key == "sim_time") {
    cfg.sim_time = num();
    for (auto& f : cfg.flows) f.stop_time = cfg.sim_time;
  } else if (key == "seed") cfg.seed = count();
  else if (key == "collection_window") p.collection_window = num();
  else if (key == "alpha") p.alpha = num();
  else if (key == "route_lifetime_cap") p.route_lifetime_cap = num();
  else if (key == "hello_interval_cap") p.hello_interval_cap = num();
  else if (key == "hello_interval") p.hello_interval = num();
  else if (key == "active_route_timeout") p.active_route_timeout = num();
  else if (key == "reverse_route_lifetime") p.reverse_route_lifetime = num();
  else if (key == "allowed_hello_loss") p.allowed_hello_loss = num();
  else if (key == "rreq_retries") p.rreq_retries = static_cast<std::uint32_t>(count());
  else if (key == "discovery_timeout") p.discovery_timeout = num();
  else if (key == "queue_limit") p.queue_limit = count();
  else if (key == "maintenance_period") p.maintenance_period = num();
  else throw ConfigError("unknown key: " + key);
}

/// Reads `key = value` lines ('#' starts a comment) on top of `base`.
[[nodiscard]] inline ScenarioConfig parse_config(std::istream& in, ScenarioConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

}  // namespace ampaodv
