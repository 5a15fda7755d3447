#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ttss {

using FlowId = std::uint32_t;

inline constexpr std::uint8_t kProtoTcp = 6;
inline constexpr std::uint8_t kProtoUdp = 17;
inline constexpr std::uint8_t kDefaultTtlThreshold = 64;

/// IPv4 prefix in canonical form: every bit below position (32 - length)
/// is zero, and length 0 (full wildcard) forces value 0.
struct IpPrefix {
  std::uint32_t value = 0;
  std::uint8_t length = 0;  // 0..=32

  static constexpr std::uint32_t mask_of(std::uint8_t length) {
    return length == 0 ? 0u : ~0u << (32u - length);
  }

  constexpr std::uint32_t mask() const { return mask_of(length); }
  constexpr bool is_canonical() const { return (value & ~mask()) == 0; }
  constexpr IpPrefix canonicalized() const {
    return IpPrefix{value & mask(), length};
  }
  constexpr bool contains(std::uint32_t addr) const {
    return (addr & mask()) == value;
  }

  friend constexpr bool operator==(const IpPrefix&, const IpPrefix&) = default;
};

/// TTL is matched as a band relative to a classifier-wide threshold, which
/// keeps the field hashable inside fixed-width tuple keys.
enum class TtlBand : std::uint8_t { Any = 0, Low = 1, High = 2 };

constexpr bool ttl_in_band(TtlBand band, std::uint8_t ttl,
                           std::uint8_t threshold) {
  switch (band) {
    case TtlBand::Low:
      return ttl <= threshold;
    case TtlBand::High:
      return ttl > threshold;
    case TtlBand::Any:
    default:
      return true;
  }
}

/// One 5-field filter. 8-bit fields use optional: nullopt means "any",
/// a value means exact match.
struct Rule {
  std::uint32_t id = 0;        // unique within a RuleSet; 1-based position
  std::uint32_t priority = 0;  // lower number = more preferred, unique
  IpPrefix src;
  IpPrefix dst;
  std::optional<std::uint8_t> proto;
  TtlBand ttl = TtlBand::Any;
  std::optional<std::uint8_t> tos;
  FlowId flow = 0;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct PacketHeader {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint8_t proto = 0;
  std::uint8_t ttl = 0;
  std::uint8_t tos = 0;

  friend bool operator==(const PacketHeader&, const PacketHeader&) = default;
};

/// Specificity signature of a rule: prefix lengths plus one flag per exact
/// field. Rules with equal tuples share one hash table.
struct Tuple {
  std::uint8_t dst_len = 0;
  std::uint8_t src_len = 0;
  bool proto_spec = false;
  bool ttl_spec = false;
  bool tos_spec = false;

  constexpr int spec_count() const {
    return int(proto_spec) + int(ttl_spec) + int(tos_spec);
  }
  // Canonical 3-bit encoding of the flags; used as a deterministic
  // sub-order among tuples with equal spec_count.
  constexpr int flag_code() const {
    return (int(proto_spec) << 2) | (int(ttl_spec) << 1) | int(tos_spec);
  }

  friend constexpr bool operator==(const Tuple&, const Tuple&) = default;
  friend constexpr auto operator<=>(const Tuple&, const Tuple&) = default;
};

struct RuleSet {
  std::vector<Rule> rules;
  std::uint8_t ttl_threshold = kDefaultTtlThreshold;

  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

inline bool rule_matches(const Rule& r, const PacketHeader& h,
                         std::uint8_t ttl_threshold) {
  return r.src.contains(h.src) && r.dst.contains(h.dst) &&
         (!r.proto || *r.proto == h.proto) &&
         ttl_in_band(r.ttl, h.ttl, ttl_threshold) &&
         (!r.tos || *r.tos == h.tos);
}

inline Tuple tuple_of_rule(const Rule& r) {
  return Tuple{r.dst.length, r.src.length, r.proto.has_value(),
               r.ttl != TtlBand::Any, r.tos.has_value()};
}

/// The single match order all classifiers share. Compares
/// (dst_len, src_len, spec_count) lexicographically, then prefers the
/// lower priority number. Greater = better; "best match" is the maximum
/// over the matching rules.
inline std::strong_ordering match_order(const Tuple& ta, std::uint32_t pa,
                                        const Tuple& tb, std::uint32_t pb) {
  if (auto c = ta.dst_len <=> tb.dst_len; c != 0) return c;
  if (auto c = ta.src_len <=> tb.src_len; c != 0) return c;
  if (auto c = ta.spec_count() <=> tb.spec_count(); c != 0) return c;
  return pb <=> pa;
}

inline bool match_beats(const Tuple& ta, std::uint32_t pa, const Tuple& tb,
                        std::uint32_t pb) {
  return match_order(ta, pa, tb, pb) > 0;
}

/// Checks RuleSet invariants: non-empty, canonical prefixes, unique ids and
/// priorities, positive flows. Throws std::invalid_argument.
inline void validate_ruleset(const RuleSet& rs) {
  if (rs.rules.empty())
    throw std::invalid_argument("ruleset: empty");
  if (rs.ttl_threshold < 1 || rs.ttl_threshold > 254)
    throw std::invalid_argument("ruleset: ttl_threshold out of range");
  std::vector<std::uint32_t> ids, prios;
  ids.reserve(rs.rules.size());
  prios.reserve(rs.rules.size());
  for (const Rule& r : rs.rules) {
    if (!r.src.is_canonical() || !r.dst.is_canonical())
      throw std::invalid_argument("ruleset: non-canonical prefix in rule " +
                                  std::to_string(r.id));
    if (r.src.length > 32 || r.dst.length > 32)
      throw std::invalid_argument("ruleset: prefix length > 32");
    if (r.flow == 0)
      throw std::invalid_argument("ruleset: flow must be positive");
    ids.push_back(r.id);
    prios.push_back(r.priority);
  }
  auto has_dup = [](std::vector<std::uint32_t>& v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
  };
  if (has_dup(ids)) throw std::invalid_argument("ruleset: duplicate rule id");
  if (has_dup(prios))
    throw std::invalid_argument("ruleset: duplicate priority");
}

// Dotted-quad helpers shared by the ruleset and trace text formats.

inline std::string format_ipv4(std::uint32_t addr) {
  return std::to_string(addr >> 24) + '.' + std::to_string((addr >> 16) & 0xFF) +
         '.' + std::to_string((addr >> 8) & 0xFF) + '.' +
         std::to_string(addr & 0xFF);
}

inline bool parse_ipv4(std::string_view text, std::uint32_t& out) {
  std::uint32_t addr = 0;
  int octets = 0;
  std::size_t i = 0;
  while (octets < 4) {
    if (i >= text.size() || text[i] < '0' || text[i] > '9') return false;
    std::uint32_t v = 0;
    std::size_t digits = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
      v = v * 10 + (text[i] - '0');
      if (v > 255 || ++digits > 3) return false;
      ++i;
    }
    addr = (addr << 8) | v;
    ++octets;
    if (octets < 4) {
      if (i >= text.size() || text[i] != '.') return false;
      ++i;
    }
  }
  if (i != text.size()) return false;
  out = addr;
  return true;
}

}  // namespace ttss
