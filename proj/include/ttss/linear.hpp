#pragma once

#include <set>
#include <utility>

#include "ttss/classifier.hpp"
#include "ttss/hash.hpp"
#include "ttss/rule.hpp"

namespace ttss {

/// Scans every rule and keeps the best match under match_order. Probes
/// always equal N. This is the ground truth the hashed classifiers are
/// checked against; keep it naive.
inline MatchResult classify_linear(const RuleSet& rs, const PacketHeader& hdr) {
  MatchResult result;
  Tuple best_tuple;
  std::uint32_t best_prio = 0;
  for (const Rule& r : rs.rules) {
    if (!rule_matches(r, hdr, rs.ttl_threshold)) continue;
    Tuple t = tuple_of_rule(r);
    if (!result.matched() || match_beats(t, r.priority, best_tuple, best_prio)) {
      result.rule_id = r.id;
      result.flow = r.flow;
      best_tuple = t;
      best_prio = r.priority;
    }
  }
  result.probes = static_cast<std::uint32_t>(rs.rules.size());
  return result;
}

class LinearClassifier final : public PacketClassifier {
 public:
  explicit LinearClassifier(RuleSet rules) : rules_(std::move(rules)) {
    validate_ruleset(rules_);
  }

  MatchResult classify(const PacketHeader& hdr,
                       SearchCost* cost = nullptr) const override {
    MatchResult r = classify_linear(rules_, hdr);
    if (cost) cost->probes = r.probes;
    return r;
  }

  std::string_view name() const override { return "linear"; }
  std::size_t entry_count() const override { return rules_.rules.size(); }
  std::size_t table_count() const override { return 1; }
  std::size_t tuple_count() const override {
    std::set<Tuple> tuples;
    for (const Rule& r : rules_.rules) tuples.insert(tuple_of_rule(r));
    return tuples.size();
  }

  std::uint64_t structure_digest() const override {
    std::uint64_t h = 0;
    for (const Rule& r : rules_.rules) {
      std::uint8_t bytes[20] = {};
      auto put32 = [&](int at, std::uint32_t v) {
        for (int i = 0; i < 4; ++i)
          bytes[at + i] = static_cast<std::uint8_t>(v >> (24 - 8 * i));
      };
      put32(0, r.id);
      put32(4, r.priority);
      put32(8, r.src.value);
      put32(12, r.dst.value);
      bytes[16] = r.src.length;
      bytes[17] = r.dst.length;
      bytes[18] = static_cast<std::uint8_t>(tuple_of_rule(r).flag_code());
      bytes[19] = static_cast<std::uint8_t>(r.flow);
      h = fnv1a64(bytes, h);
    }
    return h;
  }

  const RuleSet& rules() const { return rules_; }

 private:
  RuleSet rules_;
};

}  // namespace ttss
