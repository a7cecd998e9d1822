#pragma once

#include <charconv>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace ampaodv {

/// Counters accumulated by the engine during one run.
struct RawCounters {
  std::uint64_t rreq = 0;
  std::uint64_t rrep = 0;
  std::uint64_t rerr = 0;
  std::uint64_t hello = 0;
  std::uint64_t data_transmissions = 0;
  std::uint64_t control_bytes = 0;

  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_no_route = 0;
  std::uint64_t dropped_queue_overflow = 0;
  std::uint64_t dropped_link_failure = 0;
  std::uint64_t dropped_channel_loss = 0;
  std::uint64_t in_flight_at_horizon = 0;

  std::vector<double> latencies;  // one per delivered packet, seconds

  bool operator==(const RawCounters&) const = default;
};

struct MetricsReport {
  RawCounters raw;
  std::optional<double> normalized_routing_load;  // empty: nothing delivered
  std::optional<double> pdr;                      // empty: nothing generated
  std::optional<double> avg_end_to_end_delay;     // empty: nothing delivered

  [[nodiscard]] std::uint64_t overhead() const { return raw.rreq + raw.rrep + raw.rerr + raw.hello; }
  [[nodiscard]] std::uint64_t dropped() const {
    return raw.dropped_no_route + raw.dropped_queue_overflow + raw.dropped_link_failure + raw.dropped_channel_loss;
  }
  /// generated == delivered + every drop + still in flight
  [[nodiscard]] bool conserves_packets() const {
    return raw.generated == raw.delivered + dropped() + raw.in_flight_at_horizon;
  }

  /// Canonical text form; identical runs give identical strings.
  [[nodiscard]] std::string serialize() const;

  bool operator==(const MetricsReport&) const = default;
};

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

inline std::string MetricsReport::serialize() const {
  std::string s;
  auto put = [&](const char* k, const std::string& v) {
    s += k;
    s += '=';
    s += v;
    s += '\n';
  };
  put("rreq", std::to_string(raw.rreq));
  put("rrep", std::to_string(raw.rrep));
  put("rerr", std::to_string(raw.rerr));
  put("hello", std::to_string(raw.hello));
  put("data_transmissions", std::to_string(raw.data_transmissions));
  put("control_bytes", std::to_string(raw.control_bytes));
  put("generated", std::to_string(raw.generated));
  put("delivered", std::to_string(raw.delivered));
  put("dropped_no_route", std::to_string(raw.dropped_no_route));
  put("dropped_queue_overflow", std::to_string(raw.dropped_queue_overflow));
  put("dropped_link_failure", std::to_string(raw.dropped_link_failure));
  put("dropped_channel_loss", std::to_string(raw.dropped_channel_loss));
  put("in_flight_at_horizon", std::to_string(raw.in_flight_at_horizon));
  put("pdr", format_optional(pdr));
  put("nrl", format_optional(normalized_routing_load));
  put("avg_delay_s", format_optional(avg_end_to_end_delay));
  std::string lat;
  for (double l : raw.latencies) {
    lat += format_double(l);
    lat += ' ';
  }
  put("latencies", lat);
  return s;
}

/// Derives the ratio metrics. Undefined ratios are left empty instead of dividing by zero.
[[nodiscard]] inline MetricsReport compute_metrics(RawCounters raw) {
  MetricsReport r;
  r.raw = std::move(raw);
  const auto& c = r.raw;
  if (c.delivered > 0)
    r.normalized_routing_load = static_cast<double>(c.rreq + c.rrep + c.rerr + c.hello) / c.delivered;
  if (!c.latencies.empty())
    r.avg_end_to_end_delay = std::accumulate(c.latencies.begin(), c.latencies.end(), 0.0) / c.latencies.size();
  if (c.generated > 0) r.pdr = static_cast<double>(c.delivered) / c.generated;
  return r;
}

}  // namespace ampaodv
