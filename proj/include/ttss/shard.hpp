#pragma once

#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "ttss/classifier.hpp"
#include "ttss/traffic.hpp"

namespace ttss {

/// Per-packet flow decisions for a whole trace (0 = no match). With
/// workers > 1 the trace is split into contiguous shards classified on
/// separate threads over the shared immutable classifier; the output is
/// identical for any worker count.
inline std::vector<FlowId> classify_trace(const PacketClassifier& c,
                                          std::span<const TraceRecord> trace,
                                          unsigned workers = 1) {
  std::vector<FlowId> flows(trace.size(), 0);
  if (workers <= 1 || trace.size() < 2) {
    for (std::size_t i = 0; i < trace.size(); ++i)
      flows[i] = c.classify(trace[i].hdr).flow.value_or(0);
    return flows;
  }
  if (workers > trace.size()) workers = static_cast<unsigned>(trace.size());
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::size_t chunk = (trace.size() + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(trace.size(), begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i)
        flows[i] = c.classify(trace[i].hdr).flow.value_or(0);
    });
  }
  for (auto& t : threads) t.join();
  return flows;
}

}  // namespace ttss
