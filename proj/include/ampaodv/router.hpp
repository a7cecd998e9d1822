#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ampaodv/core.hpp"
#include "ampaodv/messages.hpp"
#include "ampaodv/mobility.hpp"
#include "ampaodv/prediction.hpp"
#include "ampaodv/random.hpp"
#include "ampaodv/selection.hpp"
#include "ampaodv/tables.hpp"

namespace ampaodv {

/// Protocol constants. Defaults follow stock AODV where the prediction
/// scheme leaves a value open.
struct ProtocolConfig {
  ProtocolVariant variant = ProtocolVariant::kAodvBaseline;
  double range = 250.0;
  Seconds collection_window = 0.1;       // destination-side RREQ collection time
  double alpha = 2.0;                    // hello interval divisor
  Seconds route_lifetime_cap = 100.0;    // clamp for unbounded RET lifetimes
  Seconds hello_interval_cap = 10.0;
  Seconds hello_interval = 1.0;          // fixed baseline interval
  Seconds active_route_timeout = 10.0;   // baseline route lifetime
  Seconds reverse_route_lifetime = 10.0;
  double allowed_hello_loss = 2.0;
  std::uint32_t rreq_retries = 2;
  Seconds discovery_timeout = 0.5;       // first wait; doubles per retry
  std::size_t queue_limit = 64;          // per destination
  Seconds rreq_cache_lifetime = 10.0;
  Seconds maintenance_period = 0.5;
  Seconds active_flow_window = 1.0;      // origin traffic this recent counts as an active flow

  void validate() const {
    if (!(range > 0.0)) throw std::invalid_argument("range must be positive");
    if (!(collection_window >= 0.0)) throw std::invalid_argument("collection window must be non-negative");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(route_lifetime_cap > 0.0 && hello_interval_cap > 0.0 && hello_interval > 0.0 &&
          active_route_timeout > 0.0 && reverse_route_lifetime > 0.0 && discovery_timeout > 0.0 &&
          maintenance_period > 0.0))
      throw std::invalid_argument("protocol timers must be positive");
    if (queue_limit == 0) throw std::invalid_argument("queue limit must be positive");
  }
};

enum class DropReason : std::uint8_t { kNoRoute, kQueueOverflow, kLinkFailure, kChannelLoss };

enum class TimerKind : std::uint8_t { kHello, kMaintenance, kDiscoveryRetry, kCollectionWindow };

struct Timer {
  TimerKind kind = TimerKind::kHello;
  NodeId peer;              // discovery target or flood origin
  std::uint64_t key = 0;    // broadcast id for collection windows
  std::uint64_t token = 0;  // stale timers carry an outdated token
};

/// What a node may ask of the simulator. One instance serves every node.
class NodeServices {
 public:
  virtual ~NodeServices() = default;
  [[nodiscard]] virtual Seconds now() const = 0;
  [[nodiscard]] virtual Kinematics kinematics(NodeId node) const = 0;
  virtual void broadcast(NodeId from, Message msg) = 0;
  virtual void unicast(NodeId from, NodeId to, Message msg) = 0;
  virtual void schedule(NodeId node, Seconds at, Timer timer) = 0;
  virtual void delivered(NodeId at, const Data& pkt) = 0;
  virtual void dropped(NodeId at, const Data& pkt, DropReason why) = 0;
};

struct ProtocolCounters {
  std::uint64_t rreq_duplicates = 0;
  std::uint64_t rreq_own_echoes = 0;
  std::uint64_t malformed = 0;
  std::uint64_t rrep_no_reverse_route = 0;
  std::uint64_t rrep_stale = 0;
  std::uint64_t rrep_lost = 0;
  std::uint64_t discoveries = 0;
  std::uint64_t discovery_failures = 0;
  std::uint64_t link_failures = 0;
};

/// Outcome of one destination-side collection window.
struct CollectionRecord {
  NodeId origin;
  std::uint64_t broadcast_id = 0;
  std::vector<RouteCandidate> candidates;
  std::size_t chosen = 0;
  Seconds decided_at = 0.0;
};

/// Per-node AODV state machine with the optional mobility-prediction extensions.
class Router {
 public:
  Router(NodeId self, std::uint32_t node_count, const ProtocolConfig& cfg, NodeServices& services,
         std::uint64_t seed)
      : self_(self),
        node_count_(node_count),
        cfg_(cfg),
        net_(services),
        rng_(Rng::derive(seed, Stream::kProtocol, self.value)),
        hello_interval_(cfg.hello_interval) {
    cfg_.validate();
    if (self.value >= node_count) throw std::invalid_argument("node id out of range");
  }

  Router(const Router&) = delete;
  Router& operator=(const Router&) = delete;
  Router(Router&&) = default;

  /// Arms the first hello (jittered within one baseline interval) and the maintenance tick.
  void start() {
    const Seconds now = net_.now();
    arm_hello(now + rng_.uniform01() * cfg_.hello_interval);
    net_.schedule(self_, now + cfg_.maintenance_period, Timer{TimerKind::kMaintenance, {}, 0, 0});
  }

  /// CBR packet created at this node.
  void originate_data(const Data& pkt) {
    const Seconds now = net_.now();
    last_originated_[pkt.destination] = now;
    if (auto* e = table_.lookup(pkt.destination, now)) {
      send_data(pkt, *e);
      return;
    }
    auto& q = queue_[pkt.destination];
    if (q.size() >= cfg_.queue_limit) {
      net_.dropped(self_, q.front(), DropReason::kQueueOverflow);
      q.pop_front();
    }
    q.push_back(pkt);
    originate_discovery(pkt.destination);
  }

  /// Floods a fresh RREQ unless a usable route exists or a discovery is already pending.
  bool originate_discovery(NodeId dest) {
    const Seconds now = net_.now();
    if (table_.lookup(dest, now) || pending_.contains(dest)) return false;
    ++counters_.discoveries;
    pending_[dest] = Pending{0, ++token_};
    flood_rreq(dest);
    net_.schedule(self_, now + cfg_.discovery_timeout, Timer{TimerKind::kDiscoveryRetry, dest, 0, token_});
    return true;
  }

  void receive(const Frame& frame) {
    if (frame.sender.value >= node_count_ || frame.sender == self_) {
      ++counters_.malformed;
      return;
    }
    const Seconds now = net_.now();
    const Seconds default_interval = predicting() ? cfg_.hello_interval_cap : cfg_.hello_interval;
    auto& nb = neighbors_.touch(frame.sender, now, default_interval);
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Rreq>) handle_rreq(frame, m, nb);
          else if constexpr (std::is_same_v<T, Rrep>) handle_rrep(frame.sender, m);
          else if constexpr (std::is_same_v<T, Rerr>) handle_rerr(frame.sender, m);
          else if constexpr (std::is_same_v<T, Hello>) handle_hello(frame, m, nb);
          else handle_data(m);
        },
        frame.body);
  }

  void on_timer(const Timer& t) {
    switch (t.kind) {
      case TimerKind::kHello:
        if (t.token == hello_token_) send_hello();
        break;
      case TimerKind::kMaintenance: maintenance(); break;
      case TimerKind::kDiscoveryRetry: retry_discovery(t); break;
      case TimerKind::kCollectionWindow: drain_collection(t.peer, t.key); break;
    }
  }

  /// The radio could not reach `to` with a unicast frame.
  void on_unicast_failure(NodeId to, const Message& msg) {
    if (const auto* d = std::get_if<Data>(&msg)) net_.dropped(self_, *d, DropReason::kLinkFailure);
    if (std::holds_alternative<Rrep>(msg)) ++counters_.rrep_lost;
    handle_link_failure(to);
  }

  /// Invalidates routes through `lost`, reports them upstream, and restarts local flows.
  void handle_link_failure(NodeId lost) {
    ++counters_.link_failures;
    const bool was_neighbor = neighbors_.erase(lost);
    auto affected = table_.invalidate_via(lost);
    if (!affected.empty()) net_.broadcast(self_, Rerr{affected});
    for (const auto& [dest, seq] : affected) maybe_rediscover(dest);
    if (was_neighbor) refresh_hello_interval();
  }

  std::vector<NodeId> route_expiry_sweep() { return table_.expire(net_.now()); }

  [[nodiscard]] NodeId id() const { return self_; }
  [[nodiscard]] const RoutingTable& routing_table() const { return table_; }
  [[nodiscard]] RoutingTable& routing_table() { return table_; }
  [[nodiscard]] const NeighborTable& neighbors() const { return neighbors_; }
  [[nodiscard]] Seconds current_hello_interval() const { return hello_interval_; }
  [[nodiscard]] const ProtocolCounters& counters() const { return counters_; }
  [[nodiscard]] const std::vector<CollectionRecord>& selections() const { return selections_; }
  [[nodiscard]] bool discovery_pending(NodeId dest) const { return pending_.contains(dest); }
  [[nodiscard]] SeqNo sequence_number() const { return own_seq_; }
  [[nodiscard]] std::uint64_t last_broadcast_id() const { return broadcast_id_; }

  [[nodiscard]] std::size_t queued_packets() const {
    std::size_t n = 0;
    for (const auto& [d, q] : queue_) n += q.size();
    return n;
  }

 private:
  struct Pending {
    std::uint32_t retries = 0;
    std::uint64_t token = 0;
  };
  struct Collection {
    std::vector<RouteCandidate> candidates;
    SeqNo origin_seq = 0;
    SeqNo requested_seq = 0;
  };
  using FloodKey = std::pair<NodeId, std::uint64_t>;

  [[nodiscard]] bool predicting() const { return uses_prediction(cfg_.variant); }

  /// LDT to the sender, its position extrapolated to now from the piggybacked state.
  [[nodiscard]] LinkDuration measure_ldt(const Kinematics& sender) const {
    const Seconds now = net_.now();
    const Kinematics me = net_.kinematics(self_);
    const Vec2 sender_pos = extrapolate(sender.pos, sender.vel, std::max(0.0, now - sender.at));
    const auto rel = RelativeState::between(me.pos, me.vel, sender_pos, sender.vel);
    // Both ends moved during the hop latency; a pair that has just drifted past
    // the range is leaving now.
    if (rel.rel_pos.norm2() > cfg_.range * cfg_.range) return LinkDuration::finite(0.0);
    return compute_ldt(rel, cfg_.range);
  }

  void flood_rreq(NodeId dest) {
    ++own_seq_;
    ++broadcast_id_;
    Rreq req;
    req.origin = self_;
    req.origin_seq = own_seq_;
    req.broadcast_id = broadcast_id_;
    req.destination = dest;
    const auto* known = table_.find(dest);
    req.dest_seq = known ? known->dest_seq : 0;
    req.hop_count = 1;
    req.ret = RouteExpiration::unbounded();
    seen_[{self_, broadcast_id_}] = net_.now();
    net_.broadcast(self_, req);
  }

  void retry_discovery(const Timer& t) {
    auto it = pending_.find(t.peer);
    if (it == pending_.end() || it->second.token != t.token) return;
    const Seconds now = net_.now();
    if (table_.lookup(t.peer, now)) {
      pending_.erase(it);
      return;
    }
    if (it->second.retries < cfg_.rreq_retries) {
      ++it->second.retries;
      it->second.token = ++token_;
      flood_rreq(t.peer);
      const Seconds wait = cfg_.discovery_timeout * static_cast<double>(1u << it->second.retries);
      net_.schedule(self_, now + wait, Timer{TimerKind::kDiscoveryRetry, t.peer, 0, it->second.token});
      return;
    }
    pending_.erase(it);
    ++counters_.discovery_failures;
    if (auto q = queue_.find(t.peer); q != queue_.end()) {
      for (const auto& pkt : q->second) net_.dropped(self_, pkt, DropReason::kNoRoute);
      queue_.erase(q);
    }
  }

  void handle_rreq(const Frame& frame, const Rreq& req, NeighborEntry& nb) {
    if (req.origin == self_) {
      ++counters_.rreq_own_echoes;
      return;
    }
    const Seconds now = net_.now();
    const FloodKey key{req.origin, req.broadcast_id};

    auto ret = req.ret;
    if (predicting()) {
      nb.ldt = measure_ldt(frame.sender_state);
      ret = fold_ret(req.ret, nb.ldt);
      refresh_hello_interval();
    }

    if (predicting() && req.destination == self_) {
      if (auto open = collecting_.find(key); open != collecting_.end()) {
        open->second.candidates.push_back({frame.sender, req.hop_count, ret});
        return;
      }
    }
    if (seen_.contains(key)) {
      ++counters_.rreq_duplicates;
      return;
    }
    seen_[key] = now;

    if (predicting() && req.destination == self_) {
      Collection c;
      c.candidates.push_back({frame.sender, req.hop_count, ret});
      c.origin_seq = req.origin_seq;
      c.requested_seq = req.dest_seq;
      collecting_.emplace(key, std::move(c));
      net_.schedule(self_, now + cfg_.collection_window,
                    Timer{TimerKind::kCollectionWindow, req.origin, req.broadcast_id, 0});
      return;
    }

    install_reverse_route(req.origin, frame.sender, req.hop_count, req.origin_seq);

    if (req.destination == self_) {
      send_rrep(req.origin, req.dest_seq, cfg_.active_route_timeout);
      return;
    }
    if (!predicting()) {
      // Stock AODV: an intermediate node with a fresh enough route answers for the destination.
      if (const auto* e = table_.lookup(req.destination, now); e && e->dest_seq > 0 && e->dest_seq >= req.dest_seq) {
        Rrep rep{req.destination, e->dest_seq, req.origin, e->hop_count, e->expiry_time - now};
        net_.unicast(self_, frame.sender, rep);
        return;
      }
    }
    Rreq fwd = req;
    fwd.hop_count = req.hop_count + 1;
    fwd.ret = ret;
    net_.broadcast(self_, fwd);
  }

  void install_reverse_route(NodeId origin, NodeId via, std::uint32_t hops, SeqNo origin_seq) {
    const Seconds now = net_.now();
    auto* e = table_.find(origin);
    const bool better = !e || !e->usable(now) || origin_seq > e->dest_seq ||
                        (origin_seq == e->dest_seq && hops < e->hop_count);
    if (better) {
      table_.upsert({origin, via, hops, std::max(origin_seq, e ? e->dest_seq : 0), now + cfg_.reverse_route_lifetime,
                     cfg_.reverse_route_lifetime, true});
    } else {
      e->expiry_time = std::max(e->expiry_time, now + cfg_.reverse_route_lifetime);
    }
  }

  void drain_collection(NodeId origin, std::uint64_t broadcast_id) {
    auto it = collecting_.find({origin, broadcast_id});
    if (it == collecting_.end()) return;
    Collection c = std::move(it->second);
    collecting_.erase(it);
    const Seconds now = net_.now();
    const std::size_t chosen = select_route(cfg_.variant, c.candidates);
    const RouteCandidate& best = c.candidates[chosen];
    // A fresher route to the origin learned during the window wins over the collected one.
    const auto* known = table_.find(origin);
    if (!known || !known->usable(now) || c.origin_seq >= known->dest_seq) {
      table_.upsert({origin, best.reverse_next_hop, best.hop_count, std::max(c.origin_seq, known ? known->dest_seq : 0),
                     now + cfg_.reverse_route_lifetime, cfg_.reverse_route_lifetime, true});
    }
    selections_.push_back({origin, broadcast_id, c.candidates, chosen, now});
    send_rrep(origin, c.requested_seq, best.ret.clamped(cfg_.route_lifetime_cap));
  }

  void send_rrep(NodeId origin, SeqNo requested_seq, Seconds lifetime) {
    own_seq_ = std::max(own_seq_, requested_seq) + 1;
    const auto* back = table_.lookup(origin, net_.now());
    if (!back) {
      ++counters_.rrep_no_reverse_route;
      return;
    }
    net_.unicast(self_, back->next_hop, Rrep{self_, own_seq_, origin, 0, lifetime});
  }

  void handle_rrep(NodeId sender, const Rrep& rep) {
    const Seconds now = net_.now();
    const std::uint32_t hops = rep.hop_count + 1;
    auto* existing = table_.find(rep.destination);
    if (existing && rep.dest_seq < existing->dest_seq) {
      ++counters_.rrep_stale;
      return;
    }
    const bool update = !existing || !existing->usable(now) || rep.dest_seq > existing->dest_seq ||
                        hops < existing->hop_count;
    if (update) table_.upsert({rep.destination, sender, hops, rep.dest_seq, now + rep.lifetime, rep.lifetime, true});

    if (rep.origin == self_) {
      pending_.erase(rep.destination);
      flush_queue(rep.destination);
      return;
    }
    const auto* back = table_.lookup(rep.origin, now);
    if (!back) {
      ++counters_.rrep_no_reverse_route;
      return;
    }
    Rrep fwd = rep;
    fwd.hop_count = hops;
    net_.unicast(self_, back->next_hop, fwd);
  }

  void handle_rerr(NodeId sender, const Rerr& err) {
    std::vector<std::pair<NodeId, SeqNo>> affected;
    for (const auto& [dest, seq] : err.unreachable) {
      auto* e = table_.find(dest);
      if (e && e->valid && e->next_hop == sender) {
        e->valid = false;
        e->dest_seq = std::max(e->dest_seq, seq);
        affected.emplace_back(dest, e->dest_seq);
      }
    }
    if (affected.empty()) return;
    net_.broadcast(self_, Rerr{affected});
    for (const auto& [dest, seq] : affected) maybe_rediscover(dest);
  }

  void handle_hello(const Frame& frame, const Hello& hello, NeighborEntry& nb) {
    nb.expected_interval = hello.interval;
    if (predicting()) {
      nb.ldt = measure_ldt(frame.sender_state);
      refresh_hello_interval();
    }
  }

  void handle_data(const Data& pkt) {
    if (pkt.destination == self_) {
      net_.delivered(self_, pkt);
      return;
    }
    const Seconds now = net_.now();
    if (auto* e = table_.lookup(pkt.destination, now)) {
      send_data(pkt, *e);
      return;
    }
    net_.dropped(self_, pkt, DropReason::kNoRoute);
    const auto* stale = table_.find(pkt.destination);
    net_.broadcast(self_, Rerr{{{pkt.destination, stale ? stale->dest_seq : 0}}});
  }

  void send_data(const Data& pkt, RoutingTableEntry& route) {
    route.expiry_time = std::max(route.expiry_time, net_.now() + route.lifetime);
    net_.unicast(self_, route.next_hop, pkt);
  }

  void flush_queue(NodeId dest) {
    auto it = queue_.find(dest);
    if (it == queue_.end()) return;
    std::deque<Data> q = std::move(it->second);
    queue_.erase(it);
    auto* route = table_.lookup(dest, net_.now());
    for (const auto& pkt : q) {
      if (route) send_data(pkt, *route);
      else net_.dropped(self_, pkt, DropReason::kNoRoute);
    }
  }

  void maybe_rediscover(NodeId dest) {
    const Seconds now = net_.now();
    const bool queued = queue_.contains(dest) && !queue_[dest].empty();
    auto last = last_originated_.find(dest);
    const bool active = last != last_originated_.end() && now - last->second <= cfg_.active_flow_window;
    if (queued || active) originate_discovery(dest);
  }

  void maintenance() {
    const Seconds now = net_.now();
    for (NodeId n : neighbors_.silent(now, cfg_.allowed_hello_loss)) handle_link_failure(n);
    route_expiry_sweep();
    std::erase_if(seen_, [&](const auto& kv) { return now - kv.second > cfg_.rreq_cache_lifetime; });
    net_.schedule(self_, now + cfg_.maintenance_period, Timer{TimerKind::kMaintenance, {}, 0, 0});
  }

  void refresh_hello_interval() {
    if (!predicting()) return;
    hello_interval_ = hello_interval(neighbors_.min_ldt(), cfg_.alpha, cfg_.hello_interval_cap);
    const Seconds due = std::max(net_.now(), last_hello_ + hello_interval_);
    if (due < next_hello_) arm_hello(due);
  }

  void arm_hello(Seconds at) {
    next_hello_ = at;
    net_.schedule(self_, at, Timer{TimerKind::kHello, NodeId{}, 0, ++hello_token_});
  }

  void send_hello() {
    const Seconds now = net_.now();
    net_.broadcast(self_, Hello{hello_interval_});
    last_hello_ = now;
    arm_hello(now + hello_interval_);
  }

  NodeId self_;
  std::uint32_t node_count_;
  ProtocolConfig cfg_;
  NodeServices& net_;
  Rng rng_;

  RoutingTable table_;
  NeighborTable neighbors_;
  SeqNo own_seq_ = 0;
  std::uint64_t broadcast_id_ = 0;
  std::map<FloodKey, Seconds> seen_;
  std::map<FloodKey, Collection> collecting_;
  std::map<NodeId, Pending> pending_;
  std::map<NodeId, std::deque<Data>> queue_;
  std::map<NodeId, Seconds> last_originated_;
  std::vector<CollectionRecord> selections_;

  Seconds hello_interval_;
  Seconds last_hello_ = 0.0;
  Seconds next_hello_ = 0.0;
  std::uint64_t hello_token_ = 0;
  std::uint64_t token_ = 0;
  ProtocolCounters counters_;
};

}  // namespace ampaodv
