#pragma once

#include <array>
#include <cstdint>

#include "ttss/hash.hpp"
#include "ttss/rule.hpp"

namespace ttss {

/// Fixed-width probe key: masked dst (4 bytes, big-endian), masked src
/// (4 bytes), proto byte, ttl-band byte, tos byte. Fields the tuple leaves
/// unspecified contribute zero bytes; the tuple's flags already distinguish
/// them, so the layout stays constant.
using MaskedKey = std::array<std::uint8_t, 11>;

namespace detail {

inline void put_be32(MaskedKey& k, std::size_t at, std::uint32_t v) {
  k[at] = static_cast<std::uint8_t>(v >> 24);
  k[at + 1] = static_cast<std::uint8_t>(v >> 16);
  k[at + 2] = static_cast<std::uint8_t>(v >> 8);
  k[at + 3] = static_cast<std::uint8_t>(v);
}

}  // namespace detail

/// Projects a packet header onto a tuple's specified bits.
inline MaskedKey key_of(const PacketHeader& hdr, const Tuple& t,
                        std::uint8_t ttl_threshold) {
  MaskedKey k{};
  detail::put_be32(k, 0, hdr.dst & IpPrefix::mask_of(t.dst_len));
  detail::put_be32(k, 4, hdr.src & IpPrefix::mask_of(t.src_len));
  k[8] = t.proto_spec ? hdr.proto : 0;
  k[9] = t.ttl_spec
             ? static_cast<std::uint8_t>(hdr.ttl <= ttl_threshold ? 1 : 2)
             : 0;
  k[10] = t.tos_spec ? hdr.tos : 0;
  return k;
}

/// The key under which a rule is stored; key_of on any header the rule
/// matches yields exactly this key for the rule's tuple.
inline MaskedKey key_of_rule(const Rule& r) {
  MaskedKey k{};
  detail::put_be32(k, 0, r.dst.value);
  detail::put_be32(k, 4, r.src.value);
  k[8] = r.proto.value_or(0);
  k[9] = static_cast<std::uint8_t>(r.ttl);  // Any=0, Low=1, High=2
  k[10] = r.tos.value_or(0);
  return k;
}

inline std::uint64_t hash_key(const MaskedKey& k, std::uint64_t seed) {
  return fnv1a64(std::span<const std::uint8_t>(k.data(), k.size()), seed);
}

}  // namespace ttss
