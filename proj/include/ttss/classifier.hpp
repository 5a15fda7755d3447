#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "ttss/rule.hpp"

namespace ttss {

struct MatchResult {
  std::optional<std::uint32_t> rule_id;
  std::optional<FlowId> flow;
  std::uint32_t probes = 0;  // tables (or rules, for linear) examined

  bool matched() const { return flow.has_value(); }
};

/// Work counters a classifier reports per search, consumed by the pipeline
/// cost model. `probes` are hash-table lookups, `node_visits` are trie
/// elements examined while steering the search, `list_scans` are flat
/// table-list entries examined to find applicable tables.
struct SearchCost {
  std::uint32_t probes = 0;
  std::uint32_t node_visits = 0;
  std::uint32_t list_scans = 0;
};

class PacketClassifier {
 public:
  virtual ~PacketClassifier() = default;

  virtual MatchResult classify(const PacketHeader& hdr,
                               SearchCost* cost = nullptr) const = 0;
  virtual std::string_view name() const = 0;

  /// Total rules stored across all hash tables; exactly N for every
  /// classifier in this library.
  virtual std::size_t entry_count() const = 0;
  virtual std::size_t table_count() const = 0;
  virtual std::size_t tuple_count() const = 0;

  /// Deterministic digest of the built structure, for rebuild-identity
  /// checks. Equal rule sets must build to equal digests.
  virtual std::uint64_t structure_digest() const = 0;
};

}  // namespace ttss
