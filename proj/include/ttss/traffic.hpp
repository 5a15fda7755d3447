#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ttss/rng.hpp"
#include "ttss/rule.hpp"

namespace ttss {

struct TraceRecord {
  PacketHeader hdr;
  std::uint64_t arrival_ns = 0;
  std::uint32_t size_bytes = 64;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Traffic classes, in mix-weight order.
enum class TrafficClass : std::uint8_t {
  Rtp = 0,      // UDP, ToS 46 (EF)
  UdpLowTtl,    // UDP, ToS 34 (AF), TTL in [1, threshold]
  UdpHighTtl,   // UDP, ToS 0, TTL in [threshold+1, 255]
  Tcp,
};

struct TrafficConfig {
  std::uint64_t seed = 1;
  std::uint64_t packet_count = 0;
  std::uint32_t size_bytes = 64;
  std::uint32_t rate_mbps = 1000;
  std::uint32_t gap_ns = 96;
  std::array<double, 4> mix{1, 1, 1, 1};  // {rtp, udp-low, udp-high, tcp}
  std::uint8_t ttl_threshold = kDefaultTtlThreshold;
  IpPrefix src_pool{0x0A000000, 8};   // 10.0.0.0/8
  IpPrefix dst_pool{0xC0A80000, 16};  // 192.168.0.0/16
};

/// Serialization time of one packet on the wire, in ns.
inline std::uint64_t wire_time_ns(std::uint32_t size_bytes,
                                  std::uint32_t rate_mbps) {
  // bits / (Mb/s) = microseconds; x1000 for ns. 64 B @ 1000 Mb/s = 512 ns.
  return static_cast<std::uint64_t>(size_bytes) * 8000ull / rate_mbps;
}

inline void validate_traffic_config(const TrafficConfig& cfg) {
  if (cfg.rate_mbps == 0) throw std::invalid_argument("traffic: rate is zero");
  if (cfg.size_bytes == 0) throw std::invalid_argument("traffic: size is zero");
  if (cfg.ttl_threshold < 1 || cfg.ttl_threshold > 254)
    throw std::invalid_argument("traffic: ttl_threshold out of range");
  double total = 0;
  for (double w : cfg.mix) {
    if (w < 0) throw std::invalid_argument("traffic: negative mix weight");
    total += w;
  }
  if (total == 0) throw std::invalid_argument("traffic: all mix weights zero");
}

namespace detail {

inline std::uint32_t draw_addr(Rng& rng, const IpPrefix& pool) {
  std::uint32_t low_bits = pool.length >= 32
                               ? 0
                               : static_cast<std::uint32_t>(rng.below(
                                     1ull << (32 - pool.length)));
  return pool.value | low_bits;
}

}  // namespace detail

/// Constant-rate synthetic trace: packet i arrives at
/// i * (wire_time + gap), its class drawn from the mix. Pure function of
/// the config; the same seed always yields a byte-identical trace.
inline std::vector<TraceRecord> generate_trace(const TrafficConfig& cfg) {
  validate_traffic_config(cfg);
  Rng rng(cfg.seed);
  const std::uint64_t inter =
      wire_time_ns(cfg.size_bytes, cfg.rate_mbps) + cfg.gap_ns;
  std::vector<TraceRecord> trace;
  trace.reserve(cfg.packet_count);
  for (std::uint64_t i = 0; i < cfg.packet_count; ++i) {
    TraceRecord rec;
    rec.arrival_ns = i * inter;
    rec.size_bytes = cfg.size_bytes;
    rec.hdr.src = detail::draw_addr(rng, cfg.src_pool);
    rec.hdr.dst = detail::draw_addr(rng, cfg.dst_pool);
    auto cls = static_cast<TrafficClass>(rng.pick_weighted(cfg.mix));
    switch (cls) {
      case TrafficClass::Rtp:
        rec.hdr.proto = kProtoUdp;
        rec.hdr.tos = 46;
        rec.hdr.ttl = static_cast<std::uint8_t>(rng.range(1, 255));
        break;
      case TrafficClass::UdpLowTtl:
        rec.hdr.proto = kProtoUdp;
        rec.hdr.tos = 34;
        rec.hdr.ttl = static_cast<std::uint8_t>(rng.range(1, cfg.ttl_threshold));
        break;
      case TrafficClass::UdpHighTtl:
        rec.hdr.proto = kProtoUdp;
        rec.hdr.tos = 0;
        rec.hdr.ttl =
            static_cast<std::uint8_t>(rng.range(cfg.ttl_threshold + 1, 255));
        break;
      case TrafficClass::Tcp:
        rec.hdr.proto = kProtoTcp;
        rec.hdr.tos = 0;
        rec.hdr.ttl = static_cast<std::uint8_t>(rng.range(1, 255));
        break;
    }
    trace.push_back(rec);
  }
  return trace;
}

/// The four-flow policy the traffic generator is built around, plus a
/// catch-all. Flow 1: RTP (UDP + ToS 46). Flow 2: delay-sensitive UDP with
/// low TTL and ToS 34. Flow 3: UDP with high TTL. Flow 4: TCP. Flow 5:
/// everything else.
inline RuleSet demo_policy_ruleset(
    std::uint8_t ttl_threshold = kDefaultTtlThreshold) {
  RuleSet rs;
  rs.ttl_threshold = ttl_threshold;
  auto add = [&rs](std::optional<std::uint8_t> proto, TtlBand ttl,
                   std::optional<std::uint8_t> tos, FlowId flow) {
    Rule r;
    r.id = static_cast<std::uint32_t>(rs.rules.size() + 1);
    r.priority = r.id;
    r.proto = proto;
    r.ttl = ttl;
    r.tos = tos;
    r.flow = flow;
    rs.rules.push_back(r);
  };
  add(kProtoUdp, TtlBand::Any, 46, 1);
  add(kProtoUdp, TtlBand::Low, 34, 2);
  add(kProtoUdp, TtlBand::High, std::nullopt, 3);
  add(kProtoTcp, TtlBand::Any, std::nullopt, 4);
  add(std::nullopt, TtlBand::Any, std::nullopt, 5);
  return rs;
}

struct RulesetGenConfig {
  std::uint64_t seed = 1;
  std::uint32_t n_rules = 0;
  // Weights for prefix lengths {0, 8, 16, 24, 32}, applied to src and dst
  // independently.
  std::array<double, 5> length_weights{1, 1, 1, 1, 1};
  std::uint8_t ttl_threshold = kDefaultTtlThreshold;
};

/// Seeded random rule set for scaling runs: unique priorities 1..n in
/// order, ids positional, and the last rule forced to a catch-all wildcard
/// so every header classifies.
inline RuleSet generate_ruleset(const RulesetGenConfig& cfg) {
  if (cfg.n_rules < 1)
    throw std::invalid_argument("ruleset generator: n_rules must be >= 1");
  static constexpr std::uint8_t kLengths[5] = {0, 8, 16, 24, 32};
  RuleSet rs;
  rs.ttl_threshold = cfg.ttl_threshold;
  Rng rng(cfg.seed);
  auto draw_prefix = [&]() {
    std::uint8_t len = kLengths[rng.pick_weighted(cfg.length_weights)];
    return IpPrefix{static_cast<std::uint32_t>(rng.next()), len}
        .canonicalized();
  };
  for (std::uint32_t i = 1; i <= cfg.n_rules; ++i) {
    Rule r;
    r.id = i;
    r.priority = i;
    if (i == cfg.n_rules) {  // catch-all, wildcard in every field
      r.flow = 4;
      rs.rules.push_back(r);
      break;
    }
    r.src = draw_prefix();
    r.dst = draw_prefix();
    switch (rng.below(4)) {
      case 0: r.proto = kProtoTcp; break;
      case 1: case 2: r.proto = kProtoUdp; break;
      default: break;  // any
    }
    switch (rng.below(4)) {
      case 0: r.ttl = TtlBand::Low; break;
      case 1: r.ttl = TtlBand::High; break;
      default: break;
    }
    switch (rng.below(4)) {
      case 0: r.tos = 46; break;
      case 1: r.tos = 34; break;
      default: break;
    }
    r.flow = static_cast<FlowId>(1 + rng.below(4));
    rs.rules.push_back(r);
  }
  return rs;
}

}  // namespace ttss
