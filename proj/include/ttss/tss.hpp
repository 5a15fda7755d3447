#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "ttss/classifier.hpp"
#include "ttss/tuple_table.hpp"

namespace ttss {

struct TssOptions {
  // Narrow each tuple's table by exact protocol value, so a search only
  // probes the header's protocol group plus the wildcard-protocol group.
  bool proto_partition = true;
  std::uint64_t hash_seed = 0;
  bool degenerate_hash = false;  // test hook, see TupleTable
};

/// Tuple Space Search: rules grouped into per-tuple hash tables; a search
/// probes every applicable table and keeps the best match under
/// match_order. The table list is in build-insertion order (first
/// appearance of each tuple), which makes rebuilds reproducible; results
/// do not depend on the order since every applicable table is probed.
class TssClassifier final : public PacketClassifier {
 public:
  explicit TssClassifier(RuleSet rules, TssOptions options = {})
      : rules_(std::move(rules)), options_(options) {
    validate_ruleset(rules_);
    build();
  }

  MatchResult classify(const PacketHeader& hdr,
                       SearchCost* cost = nullptr) const override {
    MatchResult result;
    Tuple best_tuple;
    std::uint32_t best_prio = 0;
    std::uint32_t probes = 0;
    for (const TupleTable& table : tables_) {
      if (cost) ++cost->list_scans;
      auto group = table.proto_group();
      if (group && *group != hdr.proto) continue;
      ++probes;
      const TupleTable::Entry* e =
          table.probe(key_of(hdr, table.tuple(), rules_.ttl_threshold));
      if (!e) continue;
      if (!result.matched() ||
          match_beats(table.tuple(), e->priority, best_tuple, best_prio)) {
        result.rule_id = e->rule_id;
        result.flow = e->flow;
        best_tuple = table.tuple();
        best_prio = e->priority;
      }
    }
    result.probes = probes;
    if (cost) cost->probes = probes;
    return result;
  }

  std::string_view name() const override { return "tss"; }

  std::size_t entry_count() const override {
    std::size_t n = 0;
    for (const TupleTable& t : tables_) n += t.size();
    return n;
  }
  std::size_t table_count() const override { return tables_.size(); }
  std::size_t tuple_count() const override {
    std::set<Tuple> tuples;
    for (const TupleTable& t : tables_) tuples.insert(t.tuple());
    return tuples.size();
  }

  std::uint64_t structure_digest() const override {
    std::uint64_t h = 0;
    for (const TupleTable& t : tables_) {
      const Tuple& tp = t.tuple();
      std::uint8_t head[8] = {tp.dst_len,
                              tp.src_len,
                              static_cast<std::uint8_t>(tp.flag_code()),
                              static_cast<std::uint8_t>(t.proto_group() ? 1 : 0),
                              t.proto_group().value_or(0),
                              static_cast<std::uint8_t>(t.size() >> 16),
                              static_cast<std::uint8_t>(t.size() >> 8),
                              static_cast<std::uint8_t>(t.size())};
      h = fnv1a64(head, h);
      for (const TupleTable::Entry& e : t.sorted_entries()) {
        h = fnv1a64(e.key, h);
        std::uint8_t tail[4] = {static_cast<std::uint8_t>(e.rule_id >> 24),
                                static_cast<std::uint8_t>(e.rule_id >> 16),
                                static_cast<std::uint8_t>(e.rule_id >> 8),
                                static_cast<std::uint8_t>(e.rule_id)};
        h = fnv1a64(tail, h);
      }
    }
    return h;
  }

  const std::vector<TupleTable>& tables() const { return tables_; }
  const RuleSet& rules() const { return rules_; }
  const TssOptions& options() const { return options_; }

 private:
  void build() {
    std::map<std::pair<Tuple, int>, std::size_t> index;
    for (const Rule& r : rules_.rules) {
      Tuple t = tuple_of_rule(r);
      std::optional<std::uint8_t> group;
      if (options_.proto_partition && r.proto) group = *r.proto;
      std::pair<Tuple, int> key{t, group ? int(*group) : -1};
      auto it = index.find(key);
      if (it == index.end()) {
        it = index.emplace(key, tables_.size()).first;
        tables_.emplace_back(t, group, options_.hash_seed,
                             options_.degenerate_hash);
      }
      tables_[it->second].insert(r);
    }
  }

  RuleSet rules_;
  TssOptions options_;
  std::vector<TupleTable> tables_;
};

}  // namespace ttss
