#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ampaodv/core.hpp"
#include "ampaodv/prediction.hpp"

namespace ampaodv {

enum class ProtocolVariant : std::uint8_t {
  kAodvBaseline,
  kAmpI,    // longest RET among the fewest-hop candidates
  kAmpII,   // longest RET overall
  kAmpIII,  // largest RET per hop
};

[[nodiscard]] inline bool uses_prediction(ProtocolVariant v) { return v != ProtocolVariant::kAodvBaseline; }

[[nodiscard]] inline std::string_view variant_name(ProtocolVariant v) {
  switch (v) {
    case ProtocolVariant::kAodvBaseline: return "aodv";
    case ProtocolVariant::kAmpI: return "amp1";
    case ProtocolVariant::kAmpII: return "amp2";
    case ProtocolVariant::kAmpIII: return "amp3";
  }
  return "?";
}

[[nodiscard]] inline std::optional<ProtocolVariant> parse_variant(std::string_view s) {
  for (auto v : {ProtocolVariant::kAodvBaseline, ProtocolVariant::kAmpI, ProtocolVariant::kAmpII,
                 ProtocolVariant::kAmpIII})
    if (variant_name(v) == s) return v;
  return std::nullopt;
}

inline constexpr ProtocolVariant kAllVariants[] = {ProtocolVariant::kAodvBaseline, ProtocolVariant::kAmpI,
                                                   ProtocolVariant::kAmpII, ProtocolVariant::kAmpIII};

/// A path offered to the destination by one RREQ copy.
struct RouteCandidate {
  NodeId reverse_next_hop;
  std::uint32_t hop_count = 1;
  RouteExpiration ret = RouteExpiration::unbounded();
};

namespace detail {

// Strictly-better comparisons per variant. Exact ties return false both ways.
inline bool longer_ret(const RouteCandidate& a, const RouteCandidate& b) { return a.ret > b.ret; }

inline bool better_ratio(const RouteCandidate& a, const RouteCandidate& b) {
  // An unbounded RET is the limit of an ever larger one: unbounded beats finite,
  // and between two unbounded routes the shorter one has the larger ratio.
  if (a.ret.is_unbounded() || b.ret.is_unbounded()) {
    if (a.ret.is_unbounded() && b.ret.is_unbounded()) return a.hop_count < b.hop_count;
    return a.ret.is_unbounded();
  }
  const long double lhs = static_cast<long double>(a.ret.seconds()) * b.hop_count;
  const long double rhs = static_cast<long double>(b.ret.seconds()) * a.hop_count;
  return lhs > rhs;
}

inline bool fewer_hops_then_longer_ret(const RouteCandidate& a, const RouteCandidate& b) {
  if (a.hop_count != b.hop_count) return a.hop_count < b.hop_count;
  return longer_ret(a, b);
}

}  // namespace detail

/// Index of the candidate the destination answers. Exact ties go to the lowest
/// reverse next hop so runs are reproducible.
[[nodiscard]] inline std::size_t select_route(ProtocolVariant variant, std::span<const RouteCandidate> candidates) {
  if (candidates.empty()) throw std::invalid_argument("route selection needs at least one candidate");
  bool (*better)(const RouteCandidate&, const RouteCandidate&) = nullptr;
  switch (variant) {
    case ProtocolVariant::kAmpI: better = detail::fewer_hops_then_longer_ret; break;
    case ProtocolVariant::kAmpII: better = detail::longer_ret; break;
    case ProtocolVariant::kAmpIII: better = detail::better_ratio; break;
    case ProtocolVariant::kAodvBaseline:
      throw std::invalid_argument("baseline AODV answers the first RREQ and never selects");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const auto& b = candidates[best];
    if (better(c, b) || (!better(b, c) && c.reverse_next_hop < b.reverse_next_hop)) best = i;
  }
  return best;
}

}  // namespace ampaodv
