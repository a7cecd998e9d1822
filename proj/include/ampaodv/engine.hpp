#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <variant>
#include <vector>

#include "ampaodv/core.hpp"
#include "ampaodv/messages.hpp"
#include "ampaodv/metrics.hpp"
#include "ampaodv/mobility.hpp"
#include "ampaodv/random.hpp"
#include "ampaodv/router.hpp"

namespace ampaodv {

struct RadioConfig {
  double range = 250.0;
  Seconds per_hop_latency = 0.002;
  double loss_probability = 0.0;

  void validate() const {
    if (!(range > 0.0)) throw std::invalid_argument("radio range must be positive");
    if (!(per_hop_latency > 0.0)) throw std::invalid_argument("per-hop latency must be positive");
    if (!(loss_probability >= 0.0 && loss_probability <= 1.0))
      throw std::invalid_argument("loss probability must lie in [0, 1]");
  }
};

/// Constant-bit-rate source.
struct Flow {
  NodeId source;
  NodeId destination;
  double rate = 5.0;  // packets per second
  std::uint32_t packet_size = 512;
  Seconds start_time = 0.0;
  Seconds stop_time = 900.0;

  void validate(std::uint32_t node_count) const {
    if (source == destination) throw std::invalid_argument("flow source and destination must differ");
    if (source.value >= node_count || destination.value >= node_count)
      throw std::invalid_argument("flow endpoint out of range");
    if (!(rate > 0.0)) throw std::invalid_argument("flow rate must be positive");
  }

  /// Generation instant of the k-th packet.
  [[nodiscard]] Seconds time_of(std::uint64_t k) const { return start_time + static_cast<double>(k) / rate; }
};

/// All generation instants of a flow: start + k/rate within [start, stop).
[[nodiscard]] inline std::vector<Seconds> cbr_times(const Flow& flow) {
  if (!(flow.rate > 0.0)) throw std::invalid_argument("flow rate must be positive");
  std::vector<Seconds> out;
  for (std::uint64_t k = 0;; ++k) {
    const Seconds t = flow.time_of(k);
    if (t >= flow.stop_time) break;
    out.push_back(t);
  }
  return out;
}

struct SimulationSetup {
  ProtocolConfig protocol;
  RadioConfig radio;
  MessageSizes sizes;
  std::vector<NodeMotion> motions;
  std::vector<Flow> flows;
  std::uint64_t seed = 1;
};

enum class TraceKind : std::uint8_t { kTransmit, kDeliver, kTxFailure, kTimer, kAppGenerate, kWaypoint };

struct TraceRecord {
  Seconds time = 0.0;
  TraceKind kind = TraceKind::kTransmit;
  NodeId node;
  std::optional<NodeId> peer;
  const Frame* frame = nullptr;
};

/// Single-threaded discrete-event core: clock, event queue, unit-disk radio
/// with per-node FIFO transmit serialization, and CBR sources.
class Simulator final : public NodeServices {
 public:
  explicit Simulator(SimulationSetup setup) : setup_(std::move(setup)), channel_rng_(Rng::derive(setup_.seed, Stream::kChannel)) {
    setup_.radio.validate();
    setup_.protocol.range = setup_.radio.range;
    const auto n = static_cast<std::uint32_t>(setup_.motions.size());
    if (n == 0) throw std::invalid_argument("scenario has no nodes");
    for (const auto& f : setup_.flows) f.validate(n);
    routers_.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) routers_.emplace_back(NodeId{i}, n, setup_.protocol, *this, setup_.seed);
    busy_until_.assign(n, 0.0);
  }

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  void set_observer(std::function<void(const TraceRecord&)> obs) { observer_ = std::move(obs); }
  void set_trace(std::ostream* os) { trace_ = os; }

  /// Processes every event with fire time <= until. Runs once per instance.
  MetricsReport run(Seconds until) {
    if (started_) throw std::logic_error("simulator already ran");
    started_ = true;
    for (auto& r : routers_) r.start();
    for (std::uint32_t f = 0; f < setup_.flows.size(); ++f) {
      const Flow& flow = setup_.flows[f];
      if (flow.time_of(0) < flow.stop_time) push(flow.time_of(0), AppGenerateEv{f, 0});
    }
    for (std::uint32_t i = 0; i < routers_.size(); ++i)
      if (const auto* traj = setup_.motions[i].trajectory()) push(traj->next_departure(), WaypointEv{NodeId{i}});

    while (!heap_.empty() && heap_.front().time <= until) {
      std::pop_heap(heap_.begin(), heap_.end(), Later{});
      Event ev = std::move(heap_.back());
      heap_.pop_back();
      now_ = ev.time;
      std::visit([&](auto& e) { dispatch(e); }, ev.payload);
    }
    now_ = std::max(now_, until);
    counters_.in_flight_at_horizon = in_flight();
    return compute_metrics(counters_);
  }

  [[nodiscard]] std::size_t node_count() const { return routers_.size(); }
  [[nodiscard]] Router& router(NodeId id) { return routers_.at(id.value); }
  [[nodiscard]] const Router& router(NodeId id) const { return routers_.at(id.value); }
  [[nodiscard]] Vec2 position(NodeId id) const { return setup_.motions.at(id.value).position(now_); }
  [[nodiscard]] const RawCounters& counters() const { return counters_; }

  // NodeServices
  [[nodiscard]] Seconds now() const override { return now_; }

  [[nodiscard]] Kinematics kinematics(NodeId node) const override {
    const auto& m = setup_.motions.at(node.value);
    return {m.position(now_), m.velocity(now_), now_};
  }

  void broadcast(NodeId from, Message msg) override { enqueue_tx(from, std::nullopt, std::move(msg)); }

  void unicast(NodeId from, NodeId to, Message msg) override {
    if (from == to) throw std::invalid_argument("unicast to self");
    if (to.value >= routers_.size()) throw std::invalid_argument("unicast to unknown node");
    enqueue_tx(from, to, std::move(msg));
  }

  void schedule(NodeId node, Seconds at, Timer timer) override { push(at, TimerEv{node, timer}); }

  void delivered(NodeId, const Data& pkt) override {
    ++counters_.delivered;
    counters_.latencies.push_back(now_ - pkt.created_at);
  }

  void dropped(NodeId, const Data&, DropReason why) override {
    switch (why) {
      case DropReason::kNoRoute: ++counters_.dropped_no_route; break;
      case DropReason::kQueueOverflow: ++counters_.dropped_queue_overflow; break;
      case DropReason::kLinkFailure: ++counters_.dropped_link_failure; break;
      case DropReason::kChannelLoss: ++counters_.dropped_channel_loss; break;
    }
  }

 private:
  struct TransmitEv {
    NodeId node;
    std::optional<NodeId> to;
    Message msg;
  };
  struct DeliverEv {
    NodeId to;
    Frame frame;
  };
  struct TxFailureEv {
    NodeId node;
    NodeId to;
    Message msg;
  };
  struct TimerEv {
    NodeId node;
    Timer timer;
  };
  struct AppGenerateEv {
    std::uint32_t flow = 0;
    std::uint64_t index = 0;
  };
  struct WaypointEv {
    NodeId node;
  };
  using Payload = std::variant<TransmitEv, DeliverEv, TxFailureEv, TimerEv, AppGenerateEv, WaypointEv>;

  struct Event {
    Seconds time;
    std::uint64_t sequence;
    Payload payload;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.sequence > b.sequence;
    }
  };

  void push(Seconds at, Payload p) {
    if (at < now_) throw std::logic_error("event scheduled in the past");
    heap_.push_back(Event{at, next_sequence_++, std::move(p)});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
  }

  // Transmissions from one node are serialized: each occupies the radio for one hop latency.
  void enqueue_tx(NodeId from, std::optional<NodeId> to, Message msg) {
    const Seconds start = std::max(now_, busy_until_[from.value]);
    busy_until_[from.value] = start + setup_.radio.per_hop_latency;
    push(start, TransmitEv{from, to, std::move(msg)});
  }

  bool channel_drops() { return setup_.radio.loss_probability > 0.0 && channel_rng_.uniform01() < setup_.radio.loss_probability; }

  void count_transmission(const Message& m) {
    switch (kind_of(m)) {
      case MessageKind::kRreq: ++counters_.rreq; break;
      case MessageKind::kRrep: ++counters_.rrep; break;
      case MessageKind::kRerr: ++counters_.rerr; break;
      case MessageKind::kHello: ++counters_.hello; break;
      case MessageKind::kData: ++counters_.data_transmissions; return;
    }
    counters_.control_bytes += setup_.sizes.of(m);
  }

  void dispatch(TransmitEv& e) {
    count_transmission(e.msg);
    Frame frame{e.node, kinematics(e.node), std::move(e.msg)};
    emit(TraceKind::kTransmit, e.node, e.to, &frame);
    const Seconds arrive = now_ + setup_.radio.per_hop_latency;
    const Vec2 here = frame.sender_state.pos;
    const double range = setup_.radio.range;
    if (e.to) {
      if (!is_connected(here, position(*e.to), range)) {
        push(arrive, TxFailureEv{e.node, *e.to, std::move(frame.body)});
      } else if (channel_drops()) {
        if (const auto* d = std::get_if<Data>(&frame.body)) dropped(e.node, *d, DropReason::kChannelLoss);
      } else {
        push(arrive, DeliverEv{*e.to, std::move(frame)});
      }
      return;
    }
    for (std::uint32_t j = 0; j < routers_.size(); ++j) {
      if (j == e.node.value || !is_connected(here, position(NodeId{j}), range) || channel_drops()) continue;
      push(arrive, DeliverEv{NodeId{j}, frame});
    }
  }

  void dispatch(DeliverEv& e) {
    emit(TraceKind::kDeliver, e.to, e.frame.sender, &e.frame);
    routers_[e.to.value].receive(e.frame);
  }

  void dispatch(TxFailureEv& e) {
    emit(TraceKind::kTxFailure, e.node, e.to, nullptr);
    routers_[e.node.value].on_unicast_failure(e.to, e.msg);
  }

  void dispatch(TimerEv& e) {
    emit(TraceKind::kTimer, e.node, std::nullopt, nullptr);
    routers_[e.node.value].on_timer(e.timer);
  }

  void dispatch(AppGenerateEv& e) {
    const Flow& flow = setup_.flows[e.flow];
    emit(TraceKind::kAppGenerate, flow.source, flow.destination, nullptr);
    Data pkt{next_packet_id_++, flow.source, flow.destination, flow.packet_size, now_};
    ++counters_.generated;
    if (const Seconds next = flow.time_of(e.index + 1); next < flow.stop_time) push(next, AppGenerateEv{e.flow, e.index + 1});
    routers_[flow.source.value].originate_data(pkt);
  }

  void dispatch(WaypointEv& e) {
    emit(TraceKind::kWaypoint, e.node, std::nullopt, nullptr);
    auto* traj = setup_.motions[e.node.value].trajectory();
    traj->advance();
    push(traj->next_departure(), WaypointEv{e.node});
  }

  void emit(TraceKind kind, NodeId node, std::optional<NodeId> peer, const Frame* frame) {
    if (observer_) observer_(TraceRecord{now_, kind, node, peer, frame});
    if (!trace_) return;
    static constexpr const char* kNames[] = {"transmit", "deliver", "tx_failure", "timer", "app_generate", "waypoint"};
    *trace_ << format_double(now_) << ',' << kNames[static_cast<int>(kind)] << ',' << node.value << ','
            << (peer ? std::to_string(peer->value) : std::string("-")) << ','
            << (frame ? kind_name(kind_of(frame->body)) : std::string_view("-")) << '\n';
  }

  [[nodiscard]] std::uint64_t in_flight() const {
    std::uint64_t n = 0;
    for (const auto& ev : heap_) {
      std::visit(
          [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, TransmitEv> || std::is_same_v<T, TxFailureEv>)
              n += std::holds_alternative<Data>(e.msg);
            else if constexpr (std::is_same_v<T, DeliverEv>)
              n += std::holds_alternative<Data>(e.frame.body);
          },
          ev.payload);
    }
    for (const auto& r : routers_) n += r.queued_packets();
    return n;
  }

  SimulationSetup setup_;
  Rng channel_rng_;
  std::vector<Router> routers_;
  std::vector<Seconds> busy_until_;
  std::vector<Event> heap_;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t next_packet_id_ = 0;
  Seconds now_ = 0.0;
  bool started_ = false;
  RawCounters counters_;
  std::function<void(const TraceRecord&)> observer_;
  std::ostream* trace_ = nullptr;
};

}  // namespace ampaodv
