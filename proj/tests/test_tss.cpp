#include <catch2/catch_amalgamated.hpp>

#include "support/gen.hpp"
#include "ttss/linear.hpp"
#include "ttss/tss.hpp"

using namespace ttss;

TEST_CASE("key_of masks addresses to the tuple lengths") {
  PacketHeader h;
  h.dst = 0x0A010203;  // 10.1.2.3
  Tuple t{8, 0, false, false, false};
  MaskedKey k = key_of(h, t, 64);
  CHECK(k[0] == 10);
  CHECK(k[1] == 0);
  CHECK(k[2] == 0);
  CHECK(k[3] == 0);
  for (std::size_t i = 4; i < k.size(); ++i) CHECK(k[i] == 0);
}

TEST_CASE("key_of with the all-zero tuple ignores the header") {
  PacketHeader h;
  h.src = 0xFFFFFFFF;
  h.dst = 0x12345678;
  h.proto = kProtoUdp;
  h.ttl = 5;
  h.tos = 46;
  MaskedKey k = key_of(h, Tuple{}, 64);
  CHECK(k == MaskedKey{});
}

TEST_CASE("key_of encodes the ttl band") {
  PacketHeader h;
  h.ttl = 200;
  Tuple t{0, 0, false, true, false};
  CHECK(key_of(h, t, 64)[9] == 2);  // high
  h.ttl = 64;
  CHECK(key_of(h, t, 64)[9] == 1);  // low, boundary inclusive
  CHECK(key_of(h, t, 200)[9] == 1);
}

TEST_CASE("rule keys agree with header keys on matching headers") {
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    RuleSet rs = testgen::random_ruleset(rng, 2);
    const Rule& r = rs.rules[0];
    PacketHeader h = testgen::random_header(rng, rs);
    if (rule_matches(r, h, rs.ttl_threshold))
      CHECK(key_of(h, tuple_of_rule(r), rs.ttl_threshold) == key_of_rule(r));
  }
}

TEST_CASE("build groups rules by tuple") {
  RuleSet rs;
  auto mk = [](std::uint32_t n, std::uint8_t dst_len) {
    Rule r;
    r.id = n;
    r.priority = n;
    r.dst = IpPrefix{0, dst_len};
    r.flow = n;
    return r;
  };
  rs.rules = {mk(1, 8), mk(2, 8), mk(3, 16)};
  TssClassifier c(rs);
  REQUIRE(c.table_count() == 2);
  CHECK(c.tables()[0].size() == 2);
  CHECK(c.tables()[1].size() == 1);
  CHECK(c.entry_count() == 3);
}

TEST_CASE("every rule is stored exactly once") {
  Rng rng(7);
  RuleSet rs = testgen::random_ruleset(rng, 100);
  for (bool partition : {true, false}) {
    TssClassifier c(rs, TssOptions{.proto_partition = partition});
    CHECK(c.entry_count() == 100);
  }
}

TEST_CASE("proto partition splits one tuple into per-protocol tables") {
  RuleSet rs;
  auto mk = [](std::uint32_t n, std::optional<std::uint8_t> proto) {
    Rule r;
    r.id = n;
    r.priority = n;
    r.proto = proto;
    r.flow = n;
    return r;
  };
  // Same (0,0) prefix signature; proto exactness differs, so these are two
  // tuples, and the udp/tcp pair shares one. Partitioning splits that pair.
  rs.rules = {mk(1, kProtoUdp), mk(2, kProtoTcp), mk(3, std::nullopt)};
  TssClassifier on(rs, TssOptions{.proto_partition = true});
  CHECK(on.table_count() == 3);
  CHECK(on.tuple_count() == 2);
  TssClassifier off(rs, TssOptions{.proto_partition = false});
  CHECK(off.table_count() == 2);
}

TEST_CASE("classify agrees with linear on the nested-dst set") {
  RuleSet rs;
  Rule r1;
  r1.id = 1;
  r1.priority = 1;
  r1.dst = IpPrefix{0x0A000000, 8};
  r1.flow = 1;
  Rule r2 = r1;
  r2.id = 2;
  r2.priority = 2;
  r2.dst = IpPrefix{0x0A010000, 16};
  r2.flow = 2;
  Rule r3;
  r3.id = 3;
  r3.priority = 3;
  r3.flow = 3;
  rs.rules = {r1, r2, r3};
  TssClassifier c(rs);
  PacketHeader h;
  h.dst = 0x0A010203;
  MatchResult m = c.classify(h);
  REQUIRE(m.matched());
  CHECK(*m.flow == 2);
  CHECK(m.flow == classify_linear(rs, h).flow);
}

TEST_CASE("probe count equals table count without partitioning") {
  Rng rng(12);
  RuleSet rs = testgen::random_ruleset(rng, 40);
  TssClassifier c(rs, TssOptions{.proto_partition = false});
  std::size_t tables = c.table_count();
  CHECK(c.tuple_count() == tables);
  for (int i = 0; i < 200; ++i) {
    PacketHeader h = testgen::random_header(rng, rs);
    CHECK(c.classify(h).probes == tables);
  }
}

TEST_CASE("probes never exceed the distinct tuple count") {
  Rng rng(13);
  RuleSet rs = testgen::random_ruleset(rng, 60);
  TssClassifier c(rs);  // partition on
  for (int i = 0; i < 200; ++i) {
    PacketHeader h = testgen::random_header(rng, rs);
    CHECK(c.classify(h).probes <= c.tuple_count());
  }
}

TEST_CASE("oracle equivalence over random rule sets") {
  Rng rng(2718);
  std::size_t cases = 0;
  for (int round = 0; round < 12; ++round) {
    RuleSet rs = testgen::random_ruleset(
        rng, static_cast<std::uint32_t>(1 + rng.below(80)));
    TssClassifier on(rs);
    TssClassifier off(rs, TssOptions{.proto_partition = false});
    for (int i = 0; i < 1000; ++i) {
      PacketHeader h = testgen::random_header(rng, rs);
      MatchResult expect = classify_linear(rs, h);
      MatchResult a = on.classify(h);
      MatchResult b = off.classify(h);
      REQUIRE(a.flow == expect.flow);
      REQUIRE(a.rule_id == expect.rule_id);
      REQUIRE(b.flow == expect.flow);
      REQUIRE(b.rule_id == expect.rule_id);
      ++cases;
    }
  }
  CHECK(cases >= 10000);
}

TEST_CASE("forcing the hash to a constant changes nothing but cost") {
  Rng rng(314);
  RuleSet rs = testgen::random_ruleset(rng, 50);
  TssClassifier normal(rs);
  TssClassifier degenerate(rs, TssOptions{.degenerate_hash = true});
  TssClassifier reseeded(rs, TssOptions{.hash_seed = 0xABCDEF});
  for (int i = 0; i < 2000; ++i) {
    PacketHeader h = testgen::random_header(rng, rs);
    MatchResult a = normal.classify(h);
    MatchResult b = degenerate.classify(h);
    MatchResult c = reseeded.classify(h);
    REQUIRE(a.flow == b.flow);
    REQUIRE(a.rule_id == b.rule_id);
    REQUIRE(a.probes == b.probes);
    REQUIRE(a.flow == c.flow);
    REQUIRE(a.rule_id == c.rule_id);
  }
}

TEST_CASE("single-tuple rule set degenerates to one probe everywhere") {
  RuleSet rs;
  for (std::uint32_t i = 1; i <= 20; ++i) {
    Rule r;
    r.id = i;
    r.priority = i;
    r.dst = IpPrefix{i << 24, 8};
    r.flow = 1 + (i % 4);
    rs.rules.push_back(r);
  }
  TssClassifier tss(rs);
  CHECK(tss.table_count() == 1);
  Rng rng(64);
  for (int i = 0; i < 200; ++i) {
    PacketHeader h = testgen::random_header(rng, rs);
    CHECK(tss.classify(h).probes == 1);
  }
}

TEST_CASE("rebuild from the same rules is identical") {
  Rng rng(555);
  RuleSet rs = testgen::random_ruleset(rng, 64);
  TssClassifier a(rs);
  TssClassifier b(rs);
  CHECK(a.structure_digest() == b.structure_digest());
}
