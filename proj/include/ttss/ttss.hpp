#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "ttss/classifier.hpp"
#include "ttss/tuple_table.hpp"

namespace ttss {

enum class TtssVersion { V1, V2 };

struct TtssOptions {
  TtssVersion version = TtssVersion::V1;
  bool proto_partition = true;
  std::uint64_t hash_seed = 0;
  bool degenerate_hash = false;
};

/// Trie-organized tuple space: a two-level length-indexed structure whose
/// ordered elements reference tuple hash tables. Level 1 is indexed by dst
/// prefix length, level 2 by src prefix length, and each leaf holds the
/// tuples for that (dst_len, src_len) pair ordered by spec_count. Only
/// lengths present in the rule set appear.
///
/// V1 orders everything most-specific-first, which is exactly descending
/// match_order on tuples, so the search may stop at the first *rank* (run
/// of tuples with equal (dst_len, src_len, spec_count)) that produced a
/// hit: nothing later can beat it, and ties inside the rank are settled by
/// priority. V2 orders least-specific-first and has no such exit, so it
/// probes every applicable table and keeps the best.
class TtssClassifier final : public PacketClassifier {
 public:
  explicit TtssClassifier(RuleSet rules, TtssOptions options = {})
      : rules_(std::move(rules)), options_(options) {
    validate_ruleset(rules_);
    build();
  }

  MatchResult classify(const PacketHeader& hdr,
                       SearchCost* cost = nullptr) const override {
    const bool v1 = options_.version == TtssVersion::V1;
    MatchResult result;
    Tuple best_tuple;
    std::uint32_t best_prio = 0;
    std::uint32_t probes = 0;
    std::uint32_t visits = 0;
    for (const DstElement& de : root_) {
      ++visits;
      for (const SrcElement& se : de.children) {
        ++visits;
        for (const TupleGroup& g : se.groups) {
          ++visits;
          if (const TupleTable* table = g.table_for(hdr.proto)) {
            ++probes;
            const TupleTable::Entry* e =
                table->probe(key_of(hdr, g.tuple, rules_.ttl_threshold));
            if (e && (!result.matched() ||
                      match_beats(g.tuple, e->priority, best_tuple,
                                  best_prio))) {
              result.rule_id = e->rule_id;
              result.flow = e->flow;
              best_tuple = g.tuple;
              best_prio = e->priority;
            }
          }
          if (v1 && g.rank_end && result.matched()) {
            result.probes = probes;
            if (cost) {
              cost->probes = probes;
              cost->node_visits = visits;
            }
            return result;
          }
        }
      }
    }
    result.probes = probes;
    if (cost) {
      cost->probes = probes;
      cost->node_visits = visits;
    }
    return result;
  }

  std::string_view name() const override {
    return options_.version == TtssVersion::V1 ? "ttss-v1" : "ttss-v2";
  }

  std::size_t entry_count() const override {
    std::size_t n = 0;
    for (const DstElement& de : root_)
      for (const SrcElement& se : de.children)
        for (const TupleGroup& g : se.groups)
          for (const TupleTable& t : g.tables) n += t.size();
    return n;
  }
  std::size_t table_count() const override {
    std::size_t n = 0;
    for (const DstElement& de : root_)
      for (const SrcElement& se : de.children)
        for (const TupleGroup& g : se.groups) n += g.tables.size();
    return n;
  }
  std::size_t tuple_count() const override {
    std::size_t n = 0;
    for (const DstElement& de : root_)
      for (const SrcElement& se : de.children) n += se.groups.size();
    return n;
  }

  /// dst lengths in traversal order.
  std::vector<std::uint8_t> root_lengths() const {
    std::vector<std::uint8_t> out;
    for (const DstElement& de : root_) out.push_back(de.dst_len);
    return out;
  }
  /// src lengths under one root element, in traversal order.
  std::vector<std::uint8_t> child_lengths(std::uint8_t dst_len) const {
    std::vector<std::uint8_t> out;
    for (const DstElement& de : root_)
      if (de.dst_len == dst_len)
        for (const SrcElement& se : de.children) out.push_back(se.src_len);
    return out;
  }
  /// Tuples in full traversal order, one per leaf group.
  std::vector<Tuple> enumeration_order() const {
    std::vector<Tuple> out;
    for (const DstElement& de : root_)
      for (const SrcElement& se : de.children)
        for (const TupleGroup& g : se.groups) out.push_back(g.tuple);
    return out;
  }

  std::uint64_t structure_digest() const override {
    std::uint64_t h = options_.version == TtssVersion::V1 ? 1 : 2;
    for (const DstElement& de : root_) {
      for (const SrcElement& se : de.children) {
        for (const TupleGroup& g : se.groups) {
          std::uint8_t head[6] = {de.dst_len,
                                  se.src_len,
                                  static_cast<std::uint8_t>(g.tuple.flag_code()),
                                  static_cast<std::uint8_t>(g.rank_end ? 1 : 0),
                                  static_cast<std::uint8_t>(g.tables.size() >> 8),
                                  static_cast<std::uint8_t>(g.tables.size())};
          h = fnv1a64(head, h);
          for (const TupleTable& t : g.tables) {
            std::uint8_t gh[2] = {
                static_cast<std::uint8_t>(t.proto_group() ? 1 : 0),
                t.proto_group().value_or(0)};
            h = fnv1a64(gh, h);
            for (const TupleTable::Entry& e : t.sorted_entries()) {
              h = fnv1a64(e.key, h);
              std::uint8_t tail[4] = {static_cast<std::uint8_t>(e.rule_id >> 24),
                                      static_cast<std::uint8_t>(e.rule_id >> 16),
                                      static_cast<std::uint8_t>(e.rule_id >> 8),
                                      static_cast<std::uint8_t>(e.rule_id)};
              h = fnv1a64(tail, h);
            }
          }
        }
      }
    }
    return h;
  }

  const RuleSet& rules() const { return rules_; }
  const TtssOptions& options() const { return options_; }
  TtssVersion version() const { return options_.version; }

 private:
  // One tuple's tables at a leaf. Without partitioning (or for tuples that
  // do not specify the protocol) there is exactly one table; with
  // partitioning there is one table per exact protocol value present, and
  // a header probes at most one of them.
  struct TupleGroup {
    Tuple tuple;
    std::vector<TupleTable> tables;  // sorted by proto group value
    bool rank_end = false;  // last group of its (dst,src,spec_count) rank

    const TupleTable* table_for(std::uint8_t proto) const {
      for (const TupleTable& t : tables) {
        auto g = t.proto_group();
        if (!g) return &t;
        if (*g == proto) return &t;
      }
      return nullptr;
    }
  };
  struct SrcElement {
    std::uint8_t src_len = 0;
    std::vector<TupleGroup> groups;  // ordered by (spec_count, flag_code)
  };
  struct DstElement {
    std::uint8_t dst_len = 0;
    std::vector<SrcElement> children;  // ordered by src_len
  };

  void build() {
    const bool v1 = options_.version == TtssVersion::V1;
    // Canonical sort key: (dst_len, src_len, spec_count, flag_code,
    // proto_group), fully ordered so rebuilds are bit-identical.
    std::map<std::tuple<int, int, int, int, int>, TupleTable> tables;
    for (const Rule& r : rules_.rules) {
      Tuple t = tuple_of_rule(r);
      std::optional<std::uint8_t> group;
      if (options_.proto_partition && r.proto) group = *r.proto;
      int sign = v1 ? -1 : 1;
      std::tuple<int, int, int, int, int> key{
          sign * int(t.dst_len), sign * int(t.src_len),
          sign * t.spec_count(), sign * t.flag_code(),
          group ? int(*group) : -1};
      auto it = tables.find(key);
      if (it == tables.end())
        it = tables
                 .emplace(key, TupleTable(t, group, options_.hash_seed,
                                          options_.degenerate_hash))
                 .first;
      it->second.insert(r);
    }

    for (auto& [key, table] : tables) {
      const Tuple& t = table.tuple();
      if (root_.empty() || root_.back().dst_len != t.dst_len)
        root_.push_back(DstElement{t.dst_len, {}});
      DstElement& de = root_.back();
      if (de.children.empty() || de.children.back().src_len != t.src_len)
        de.children.push_back(SrcElement{t.src_len, {}});
      SrcElement& se = de.children.back();
      if (se.groups.empty() || se.groups.back().tuple != t)
        se.groups.push_back(TupleGroup{t, {}, false});
      se.groups.back().tables.push_back(std::move(table));
    }
    tables.clear();

    // Mark rank boundaries: a rank is a maximal run of groups within one
    // leaf sharing spec_count; the last group of each leaf always ends one.
    for (DstElement& de : root_) {
      for (SrcElement& se : de.children) {
        for (std::size_t i = 0; i < se.groups.size(); ++i) {
          se.groups[i].rank_end =
              i + 1 == se.groups.size() ||
              se.groups[i + 1].tuple.spec_count() !=
                  se.groups[i].tuple.spec_count();
        }
      }
    }
  }

  RuleSet rules_;
  TtssOptions options_;
  std::vector<DstElement> root_;
};

}  // namespace ttss
