#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ttss/classifier.hpp"
#include "ttss/rule.hpp"

namespace ttss {

struct ProbeSummary {
  std::uint64_t packets = 0;
  std::uint32_t min_probes = 0;
  std::uint32_t max_probes = 0;
  double mean_probes = 0.0;
  std::uint64_t unmatched = 0;
  // Hit histogram: winning rule's tuple -> packet count.
  std::vector<std::pair<Tuple, std::uint64_t>> tuple_hits;
};

/// Probe statistics over a trace of headers. `rules` maps winning rule ids
/// back to their tuples for the histogram.
inline ProbeSummary probe_stats(const PacketClassifier& c, const RuleSet& rules,
                                std::span<const PacketHeader> trace) {
  ProbeSummary s;
  if (trace.empty()) return s;
  std::map<std::uint32_t, Tuple> tuple_of_id;
  for (const Rule& r : rules.rules) tuple_of_id.emplace(r.id, tuple_of_rule(r));
  std::map<Tuple, std::uint64_t> hits;
  std::uint64_t total = 0;
  s.min_probes = ~0u;
  for (const PacketHeader& hdr : trace) {
    MatchResult r = c.classify(hdr);
    total += r.probes;
    s.min_probes = std::min(s.min_probes, r.probes);
    s.max_probes = std::max(s.max_probes, r.probes);
    if (r.rule_id)
      ++hits[tuple_of_id.at(*r.rule_id)];
    else
      ++s.unmatched;
  }
  s.packets = trace.size();
  s.mean_probes = static_cast<double>(total) / static_cast<double>(s.packets);
  s.tuple_hits.assign(hits.begin(), hits.end());
  return s;
}

}  // namespace ttss
