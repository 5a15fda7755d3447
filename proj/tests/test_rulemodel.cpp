#include <catch2/catch_amalgamated.hpp>

#include "support/gen.hpp"
#include "ttss/rule.hpp"
#include "ttss/ruleset_text.hpp"
#include "ttss/traffic.hpp"

using namespace ttss;

TEST_CASE("prefix canonicalization and containment") {
  IpPrefix p{0xC0A80107, 24};  // 192.168.1.7/24
  CHECK_FALSE(p.is_canonical());
  IpPrefix c = p.canonicalized();
  CHECK(c.value == 0xC0A80100);
  CHECK(c.is_canonical());
  CHECK(c.canonicalized() == c);  // idempotent
  CHECK(c.contains(0xC0A8014D));  // 192.168.1.77
  CHECK_FALSE(c.contains(0xC0A80201));

  IpPrefix wild{0, 0};
  CHECK(wild.is_canonical());
  CHECK(wild.contains(0xFFFFFFFF));
  CHECK(IpPrefix::mask_of(0) == 0);
  CHECK(IpPrefix::mask_of(32) == 0xFFFFFFFF);
}

TEST_CASE("canonicalization is idempotent on random prefixes") {
  Rng rng(101);
  for (int i = 0; i < 2000; ++i) {
    IpPrefix p{static_cast<std::uint32_t>(rng.next()),
               static_cast<std::uint8_t>(rng.below(33))};
    IpPrefix c = p.canonicalized();
    CHECK(c.is_canonical());
    CHECK(c.canonicalized() == c);
  }
}

TEST_CASE("parse_ruleset: documented grammar") {
  RuleSet rs = parse_ruleset("10 192.168.1.0/24 10.0.0.0/8 udp low 46 1\n");
  REQUIRE(rs.rules.size() == 1);
  const Rule& r = rs.rules[0];
  CHECK(r.priority == 10);
  CHECK(r.src == IpPrefix{0xC0A80100, 24});
  CHECK(r.dst == IpPrefix{0x0A000000, 8});
  CHECK(r.proto == kProtoUdp);
  CHECK(r.ttl == TtlBand::Low);
  CHECK(r.tos == 46);
  CHECK(r.flow == 1);
  CHECK(r.id == 1);
}

TEST_CASE("parse_ruleset: wildcards") {
  RuleSet rs = parse_ruleset("5 * * tcp any * 4\n");
  REQUIRE(rs.rules.size() == 1);
  const Rule& r = rs.rules[0];
  CHECK(r.src == IpPrefix{0, 0});
  CHECK(r.dst == IpPrefix{0, 0});
  CHECK(r.proto == kProtoTcp);
  CHECK(r.ttl == TtlBand::Any);
  CHECK_FALSE(r.tos.has_value());
  CHECK(r.flow == 4);
}

TEST_CASE("parse_ruleset: duplicate priority names the second line") {
  const char* text =
      "7 * * udp any * 1\n"
      "7 * * tcp any * 2\n";
  try {
    parse_ruleset(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("duplicate priority") !=
          std::string::npos);
  }
}

TEST_CASE("parse_ruleset: comments, threshold header, warnings") {
  std::vector<std::string> warnings;
  RuleSet rs = parse_ruleset(
      "# demo\n"
      "!ttl_threshold 100\n"
      "1 192.168.1.7/24 * * any * 2   # trailing comment\n",
      &warnings);
  CHECK(rs.ttl_threshold == 100);
  REQUIRE(rs.rules.size() == 1);
  CHECK(rs.rules[0].src == IpPrefix{0xC0A80100, 24});  // canonicalized
  CHECK(warnings.size() == 1);

  CHECK_THROWS_AS(parse_ruleset("1 * *\n"), ParseError);      // field count
  CHECK_THROWS_AS(parse_ruleset("x * * * any * 1\n"), ParseError);
  CHECK_THROWS_AS(parse_ruleset("1 1.2.3.4/33 * * any * 1\n"), ParseError);
  CHECK_THROWS_AS(parse_ruleset("1 * * * weird * 1\n"), ParseError);
  CHECK_THROWS_AS(parse_ruleset("1 * * * any 300 1\n"), ParseError);
  CHECK_THROWS_AS(parse_ruleset("1 * * * any * 0\n"), ParseError);
  CHECK_THROWS_AS(parse_ruleset("!ttl_threshold 0\n1 * * * any * 1\n"),
                  ParseError);
}

TEST_CASE("parse after format is identity") {
  Rng rng(77);
  for (int round = 0; round < 50; ++round) {
    RuleSet rs = testgen::random_ruleset(
        rng, static_cast<std::uint32_t>(1 + rng.below(40)),
        static_cast<std::uint8_t>(rng.range(1, 254)));
    RuleSet back = parse_ruleset(format_ruleset(rs));
    CHECK(back == rs);
  }
  RuleSet demo = demo_policy_ruleset(90);
  CHECK(parse_ruleset(format_ruleset(demo)) == demo);
}

TEST_CASE("rule_matches basics") {
  std::uint32_t src = 0;
  REQUIRE(parse_ipv4("192.168.1.0", src));

  Rule prefix_only;
  prefix_only.src = IpPrefix{src, 24};
  prefix_only.flow = 1;
  PacketHeader h;
  REQUIRE(parse_ipv4("192.168.1.77", h.src));
  CHECK(rule_matches(prefix_only, h, 64));

  Rule low_ttl;
  low_ttl.ttl = TtlBand::Low;
  low_ttl.flow = 1;
  PacketHeader hot;
  hot.ttl = 200;
  CHECK_FALSE(rule_matches(low_ttl, hot, 64));
  hot.ttl = 64;
  CHECK(rule_matches(low_ttl, hot, 64));  // boundary is inclusive

  Rule udp_only;
  udp_only.proto = kProtoUdp;
  udp_only.flow = 1;
  PacketHeader tcp;
  tcp.proto = kProtoTcp;
  CHECK_FALSE(rule_matches(udp_only, tcp, 64));
}

TEST_CASE("tuple_of_rule is the specificity signature") {
  Rule r;
  r.src = IpPrefix{0x0A000000, 24};
  r.dst = IpPrefix{0x0A000000, 16};
  r.proto = kProtoUdp;
  CHECK(tuple_of_rule(r) == Tuple{16, 24, true, false, false});

  Rule wild;
  CHECK(tuple_of_rule(wild) == Tuple{0, 0, false, false, false});

  Rule full;
  full.src = IpPrefix{1, 32};
  full.dst = IpPrefix{2, 32};
  full.proto = kProtoTcp;
  full.ttl = TtlBand::High;
  full.tos = 46;
  CHECK(tuple_of_rule(full) == Tuple{32, 32, true, true, true});
  CHECK(tuple_of_rule(full).spec_count() == 3);
}

TEST_CASE("tuple depends on specificity only") {
  Rng rng(5150);
  for (int i = 0; i < 500; ++i) {
    Rule r = testgen::random_rule(rng, 1, 1);
    Tuple before = tuple_of_rule(r);
    // Mutate values but not lengths or specified-ness.
    r.src.value = (static_cast<std::uint32_t>(rng.next()) & r.src.mask());
    r.dst.value = (static_cast<std::uint32_t>(rng.next()) & r.dst.mask());
    if (r.proto) r.proto = static_cast<std::uint8_t>(rng.below(256));
    if (r.ttl != TtlBand::Any)
      r.ttl = rng.below(2) ? TtlBand::Low : TtlBand::High;
    if (r.tos) r.tos = static_cast<std::uint8_t>(rng.below(256));
    r.flow = static_cast<FlowId>(1 + rng.below(9));
    r.priority += 17;
    CHECK(tuple_of_rule(r) == before);
  }
}

TEST_CASE("match_order examples") {
  Tuple a{24, 0, false, false, false};
  Tuple b{16, 32, true, true, true};
  CHECK(match_beats(a, 9, b, 1));  // dst_len dominates

  Tuple same{8, 8, true, false, false};
  CHECK(match_beats(same, 3, same, 8));  // lower priority number wins
  CHECK_FALSE(match_beats(same, 8, same, 3));

  Tuple three{8, 8, true, true, true};
  Tuple one{8, 8, true, false, false};
  CHECK(match_beats(three, 9, one, 1));  // spec_count beats priority
}

TEST_CASE("match_order is a strict total order") {
  Rng rng(42);
  auto random_pair = [&rng]() {
    Tuple t{static_cast<std::uint8_t>(rng.below(33)),
            static_cast<std::uint8_t>(rng.below(33)), rng.below(2) == 0,
            rng.below(2) == 0, rng.below(2) == 0};
    return std::pair<Tuple, std::uint32_t>(
        t, static_cast<std::uint32_t>(rng.below(1000)));
  };
  for (int i = 0; i < 3000; ++i) {
    auto [ta, pa] = random_pair();
    auto [tb, pb] = random_pair();
    auto [tc, pc] = random_pair();
    auto ab = match_order(ta, pa, tb, pb);
    auto ba = match_order(tb, pb, ta, pa);
    // Totality and antisymmetry: with distinct priorities exactly one
    // direction is greater.
    if (pa != pb) {
      CHECK(ab != std::strong_ordering::equal);
      CHECK((ab == std::strong_ordering::greater) ==
            (ba == std::strong_ordering::less));
    }
    // Transitivity.
    if (ab != std::strong_ordering::less &&
        match_order(tb, pb, tc, pc) != std::strong_ordering::less)
      CHECK(match_order(ta, pa, tc, pc) != std::strong_ordering::less);
  }
}

TEST_CASE("validate_ruleset rejects broken sets") {
  CHECK_THROWS_AS(validate_ruleset(RuleSet{}), std::invalid_argument);

  RuleSet dup;
  dup.rules.resize(2);
  dup.rules[0] = Rule{1, 1, {}, {}, {}, TtlBand::Any, {}, 1};
  dup.rules[1] = Rule{2, 1, {}, {}, {}, TtlBand::Any, {}, 1};
  CHECK_THROWS_AS(validate_ruleset(dup), std::invalid_argument);

  RuleSet bad_prefix;
  bad_prefix.rules.push_back(Rule{1, 1, IpPrefix{5, 8}, {}, {}, TtlBand::Any,
                                  {}, 1});
  CHECK_THROWS_AS(validate_ruleset(bad_prefix), std::invalid_argument);
}

TEST_CASE("dotted quad round trip") {
  Rng rng(31337);
  for (int i = 0; i < 1000; ++i) {
    std::uint32_t addr = static_cast<std::uint32_t>(rng.next());
    std::uint32_t back = 0;
    REQUIRE(parse_ipv4(format_ipv4(addr), back));
    CHECK(back == addr);
  }
  std::uint32_t out = 0;
  CHECK_FALSE(parse_ipv4("1.2.3", out));
  CHECK_FALSE(parse_ipv4("1.2.3.256", out));
  CHECK_FALSE(parse_ipv4("1.2.3.4.5", out));
  CHECK_FALSE(parse_ipv4("1.2.3.4x", out));
}
