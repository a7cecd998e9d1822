#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ampaodv/core.hpp"
#include "ampaodv/prediction.hpp"

namespace ampaodv {

using SeqNo = std::uint64_t;

/// Sender position and velocity sampled when the frame left the radio.
struct Kinematics {
  Vec2 pos;
  Vec2 vel;
  Seconds at = 0.0;
};

struct Rreq {
  NodeId origin;
  SeqNo origin_seq = 0;
  std::uint64_t broadcast_id = 0;
  NodeId destination;
  SeqNo dest_seq = 0;  // 0: unknown
  std::uint32_t hop_count = 1;
  RouteExpiration ret = RouteExpiration::unbounded();
};

struct Rrep {
  NodeId destination;
  SeqNo dest_seq = 0;
  NodeId origin;
  std::uint32_t hop_count = 0;  // hops from the transmitting node to `destination`
  Seconds lifetime = 0.0;
};

struct Rerr {
  std::vector<std::pair<NodeId, SeqNo>> unreachable;
};

struct Hello {
  Seconds interval = 1.0;  // sender's current hello interval
};

struct Data {
  std::uint64_t packet_id = 0;
  NodeId origin;
  NodeId destination;
  std::uint32_t payload_bytes = 512;
  Seconds created_at = 0.0;
};

using Message = std::variant<Rreq, Rrep, Rerr, Hello, Data>;

enum class MessageKind : std::uint8_t { kRreq, kRrep, kRerr, kHello, kData };

[[nodiscard]] inline MessageKind kind_of(const Message& m) { return static_cast<MessageKind>(m.index()); }

[[nodiscard]] inline std::string_view kind_name(MessageKind k) {
  switch (k) {
    case MessageKind::kRreq: return "RREQ";
    case MessageKind::kRrep: return "RREP";
    case MessageKind::kRerr: return "RERR";
    case MessageKind::kHello: return "HELLO";
    case MessageKind::kData: return "DATA";
  }
  return "?";
}

/// One radio transmission: message body plus piggybacked sender state.
struct Frame {
  NodeId sender;
  Kinematics sender_state;
  Message body;
};

/// Header-equivalent sizes used for byte accounting.
struct MessageSizes {
  std::uint32_t rreq = 48;
  std::uint32_t rrep = 36;
  std::uint32_t rerr = 20;
  std::uint32_t hello = 32;

  [[nodiscard]] std::uint32_t of(const Message& m) const {
    switch (kind_of(m)) {
      case MessageKind::kRreq: return rreq;
      case MessageKind::kRrep: return rrep;
      case MessageKind::kRerr: return rerr;
      case MessageKind::kHello: return hello;
      case MessageKind::kData: return std::get<Data>(m).payload_bytes;
    }
    return 0;
  }
};

namespace wire {

/// RET field encoding: milliseconds, with all-ones reserved for "unbounded".
inline constexpr std::uint32_t kUnboundedRet = std::numeric_limits<std::uint32_t>::max();

[[nodiscard]] inline std::uint32_t encode_ret(RouteExpiration ret) {
  if (ret.is_unbounded()) return kUnboundedRet;
  const double ms = std::round(ret.seconds() * 1000.0);
  return ms >= static_cast<double>(kUnboundedRet) ? kUnboundedRet - 1 : static_cast<std::uint32_t>(ms);
}

[[nodiscard]] inline RouteExpiration decode_ret(std::uint32_t field) {
  return field == kUnboundedRet ? RouteExpiration::unbounded() : RouteExpiration::finite(field / 1000.0);
}

}  // namespace wire

}  // namespace ampaodv
