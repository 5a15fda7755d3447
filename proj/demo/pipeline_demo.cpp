// Generates a skewed trace, runs the receive -> classify -> transmit
// pipeline once per engine, and prints the headline metrics.

#include <cstdio>

#include "ttss/pipesim.hpp"
#include "ttss/tss.hpp"
#include "ttss/ttss.hpp"

using namespace ttss;

int main() {
  RuleSet rules = demo_policy_ruleset();

  TrafficConfig tc;
  tc.seed = 7;
  tc.packet_count = 20000;
  tc.rate_mbps = 8000;                 // overload the classify stage
  tc.mix = {0.04, 0.90, 0.03, 0.03};   // mostly flow-2 traffic

  auto trace = generate_trace(tc);

  SimConfig sim;
  sim.classify.workers = 1;
  sim.port_rate_mbps = 8000;

  TssClassifier tss(rules);
  TtssClassifier v1(rules, {.version = TtssVersion::V1});
  TtssClassifier v2(rules, {.version = TtssVersion::V2});

  std::printf("%-8s %10s %10s %14s %16s\n", "engine", "sent", "recv",
              "tx Mb/s", "classify idle ns");
  const PacketClassifier* engines[] = {&v1, &v2, &tss};
  for (const PacketClassifier* c : engines) {
    SimReport r = run_sim(trace, *c, sim);
    std::printf("%-8s %10llu %10llu %14.1f %16llu\n",
                std::string(c->name()).c_str(),
                static_cast<unsigned long long>(r.sent),
                static_cast<unsigned long long>(r.received),
                r.transmit_rate_mbps,
                static_cast<unsigned long long>(r.classify.idle_ns));
  }
  return 0;
}
