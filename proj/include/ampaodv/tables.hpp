#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ampaodv/core.hpp"
#include "ampaodv/messages.hpp"
#include "ampaodv/prediction.hpp"

namespace ampaodv {

struct RoutingTableEntry {
  NodeId destination;
  NodeId next_hop;
  std::uint32_t hop_count = 1;
  SeqNo dest_seq = 0;
  Seconds expiry_time = 0.0;
  Seconds lifetime = 0.0;  // extension granted on each use
  bool valid = false;

  [[nodiscard]] bool usable(Seconds now) const { return valid && expiry_time > now; }
};

class RoutingTable {
 public:
  [[nodiscard]] const RoutingTableEntry* find(NodeId dest) const {
    auto it = entries_.find(dest);
    return it == entries_.end() ? nullptr : &it->second;
  }
  [[nodiscard]] RoutingTableEntry* find(NodeId dest) {
    auto it = entries_.find(dest);
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Entry for `dest` only if valid and unexpired at `now`.
  [[nodiscard]] RoutingTableEntry* lookup(NodeId dest, Seconds now) {
    auto* e = find(dest);
    return e && e->usable(now) ? e : nullptr;
  }

  RoutingTableEntry& upsert(const RoutingTableEntry& entry) { return entries_[entry.destination] = entry; }

  /// Marks every entry with expiry_time <= now invalid; returns their destinations.
  std::vector<NodeId> expire(Seconds now) {
    std::vector<NodeId> out;
    for (auto& [dest, e] : entries_) {
      if (e.valid && e.expiry_time <= now) {
        e.valid = false;
        out.push_back(dest);
      }
    }
    return out;
  }

  /// Invalidates valid entries routed through `hop`, bumping their sequence numbers.
  std::vector<std::pair<NodeId, SeqNo>> invalidate_via(NodeId hop) {
    std::vector<std::pair<NodeId, SeqNo>> out;
    for (auto& [dest, e] : entries_) {
      if (e.valid && e.next_hop == hop) {
        e.valid = false;
        ++e.dest_seq;
        out.emplace_back(dest, e.dest_seq);
      }
    }
    return out;
  }

  [[nodiscard]] const std::map<NodeId, RoutingTableEntry>& entries() const { return entries_; }

 private:
  std::map<NodeId, RoutingTableEntry> entries_;
};

struct NeighborEntry {
  NodeId neighbor;
  Seconds last_heard = 0.0;
  LinkDuration ldt = LinkDuration::unbounded();
  Seconds expected_interval = 1.0;  // neighbor's announced hello interval
};

class NeighborTable {
 public:
  NeighborEntry& touch(NodeId n, Seconds now, Seconds default_interval) {
    auto [it, inserted] = entries_.try_emplace(n);
    if (inserted) {
      it->second.neighbor = n;
      it->second.expected_interval = default_interval;
    }
    it->second.last_heard = now;
    return it->second;
  }

  bool erase(NodeId n) { return entries_.erase(n) > 0; }

  [[nodiscard]] bool contains(NodeId n) const { return entries_.contains(n); }
  [[nodiscard]] const NeighborEntry* find(NodeId n) const {
    auto it = entries_.find(n);
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Neighbors silent for longer than `allowance` announced intervals.
  [[nodiscard]] std::vector<NodeId> silent(Seconds now, double allowance) const {
    std::vector<NodeId> out;
    for (const auto& [n, e] : entries_)
      if (now - e.last_heard > allowance * e.expected_interval) out.push_back(n);
    return out;
  }

  [[nodiscard]] LinkDuration min_ldt() const {
    auto m = LinkDuration::unbounded();
    for (const auto& [n, e] : entries_)
      if (e.ldt < m) m = e.ldt;
    return m;
  }

  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] const std::map<NodeId, NeighborEntry>& entries() const { return entries_; }

 private:
  std::map<NodeId, NeighborEntry> entries_;
};

}  // namespace ampaodv
