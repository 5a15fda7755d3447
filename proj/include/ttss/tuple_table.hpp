#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ttss/masked_key.hpp"
#include "ttss/rule.hpp"

namespace ttss {

/// One hash table holding every rule of one tuple (optionally narrowed to
/// one exact protocol value when protocol partitioning is on). Buckets
/// chain on the 64-bit key hash and every probe verifies full key equality,
/// so correctness does not depend on the hash at all.
class TupleTable {
 public:
  struct Entry {
    MaskedKey key;
    std::uint32_t rule_id;
    std::uint32_t priority;
    FlowId flow;
  };

  TupleTable(const Tuple& tuple, std::optional<std::uint8_t> proto_group,
             std::uint64_t hash_seed, bool degenerate_hash)
      : tuple_(tuple),
        proto_group_(proto_group),
        hash_seed_(hash_seed),
        degenerate_hash_(degenerate_hash) {}

  void insert(const Rule& r) {
    Entry e{key_of_rule(r), r.id, r.priority, r.flow};
    buckets_[hash(e.key)].push_back(e);
    ++size_;
  }

  /// Lowest-priority entry whose key equals `key`, or nullptr.
  const Entry* probe(const MaskedKey& key) const {
    auto it = buckets_.find(hash(key));
    if (it == buckets_.end()) return nullptr;
    const Entry* best = nullptr;
    for (const Entry& e : it->second) {
      if (e.key != key) continue;
      if (!best || e.priority < best->priority) best = &e;
    }
    return best;
  }

  const Tuple& tuple() const { return tuple_; }
  std::optional<std::uint8_t> proto_group() const { return proto_group_; }
  std::size_t size() const { return size_; }

  /// Entries in a canonical order (key bytes, then rule id), independent of
  /// bucket layout.
  std::vector<Entry> sorted_entries() const {
    std::vector<Entry> out;
    out.reserve(size_);
    for (const auto& [h, chain] : buckets_)
      out.insert(out.end(), chain.begin(), chain.end());
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
      if (a.key != b.key) return a.key < b.key;
      return a.rule_id < b.rule_id;
    });
    return out;
  }

 private:
  std::uint64_t hash(const MaskedKey& key) const {
    // The degenerate mode pins every key to one bucket; used to prove that
    // classification results do not depend on the hash.
    if (degenerate_hash_) return 0x9e3779b97f4a7c15ull;
    return hash_key(key, hash_seed_);
  }

  Tuple tuple_;
  std::optional<std::uint8_t> proto_group_;
  std::uint64_t hash_seed_;
  bool degenerate_hash_;
  std::size_t size_ = 0;
  std::unordered_map<std::uint64_t, std::vector<Entry>> buckets_;
};

}  // namespace ttss
