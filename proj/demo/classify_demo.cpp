// Builds the four-flow policy, classifies a handful of headers with each
// engine, and prints the decisions side by side.

#include <cstdio>

#include "ttss/linear.hpp"
#include "ttss/ruleset_text.hpp"
#include "ttss/traffic.hpp"
#include "ttss/tss.hpp"
#include "ttss/ttss.hpp"

using namespace ttss;

int main() {
  RuleSet rules = demo_policy_ruleset();
  std::printf("%s\n", format_ruleset(rules).c_str());

  LinearClassifier linear(rules);
  TssClassifier tss(rules);
  TtssClassifier v1(rules, {.version = TtssVersion::V1});
  TtssClassifier v2(rules, {.version = TtssVersion::V2});

  PacketHeader samples[] = {
      {0x0A000001, 0xC0A80001, kProtoUdp, 120, 46},  // RTP -> flow 1
      {0x0A000002, 0xC0A80002, kProtoUdp, 30, 34},   // low-TTL UDP -> flow 2
      {0x0A000003, 0xC0A80003, kProtoUdp, 200, 0},   // high-TTL UDP -> flow 3
      {0x0A000004, 0xC0A80004, kProtoTcp, 64, 0},    // TCP -> flow 4
      {0x0A000005, 0xC0A80005, 1, 64, 0},            // ICMP -> catch-all
  };

  std::printf("%-28s %-7s %-7s %-12s %-12s\n", "header", "linear", "tss",
              "ttss-v1", "ttss-v2");
  for (const PacketHeader& h : samples) {
    auto l = linear.classify(h);
    auto t = tss.classify(h);
    auto a = v1.classify(h);
    auto b = v2.classify(h);
    std::printf("proto=%-3u ttl=%-3u tos=%-3u    %-7u %-7u %u (p=%u)%6s %u (p=%u)\n",
                h.proto, h.ttl, h.tos, *l.flow, *t.flow, *a.flow, a.probes, "",
                *b.flow, b.probes);
  }
  return 0;
}
