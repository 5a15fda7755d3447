#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ttss/rule.hpp"

namespace ttss {

// Ruleset text format, one rule per line:
//   <priority> <src-prefix|*> <dst-prefix|*> <proto-name|proto-num|*>
//   <low|high|any> <tos-num|*> <flow-id>
// '#' starts a comment, blank lines are skipped, and an optional header
// line '!ttl_threshold <n>' sets the Low/High boundary (default 64).
// Rule ids are assigned by position, 1-based.

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline bool parse_uint(std::string_view s, std::uint32_t& out) {
  if (s.empty()) return false;
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return false;
  out = v;
  return true;
}

inline IpPrefix parse_prefix(std::string_view s, std::size_t line,
                             bool& canonicalized) {
  canonicalized = false;
  if (s == "*") return IpPrefix{};
  std::string_view addr_part = s;
  std::uint32_t length = 32;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    addr_part = s.substr(0, slash);
    if (!parse_uint(s.substr(slash + 1), length) || length > 32)
      throw ParseError(line, "bad prefix length in '" + std::string(s) + "'");
  }
  std::uint32_t addr = 0;
  if (!parse_ipv4(addr_part, addr))
    throw ParseError(line, "bad address in '" + std::string(s) + "'");
  IpPrefix p{addr, static_cast<std::uint8_t>(length)};
  if (!p.is_canonical()) {
    canonicalized = true;
    p = p.canonicalized();
  }
  return p;
}

inline std::optional<std::uint8_t> parse_proto(std::string_view s,
                                               std::size_t line) {
  if (s == "*") return std::nullopt;
  if (s == "tcp") return kProtoTcp;
  if (s == "udp") return kProtoUdp;
  std::uint32_t v = 0;
  if (!parse_uint(s, v) || v > 255)
    throw ParseError(line, "bad protocol '" + std::string(s) + "'");
  return static_cast<std::uint8_t>(v);
}

inline TtlBand parse_band(std::string_view s, std::size_t line) {
  if (s == "low") return TtlBand::Low;
  if (s == "high") return TtlBand::High;
  if (s == "any") return TtlBand::Any;
  throw ParseError(line, "bad ttl band '" + std::string(s) +
                             "' (expected low|high|any)");
}

inline std::optional<std::uint8_t> parse_tos(std::string_view s,
                                             std::size_t line) {
  if (s == "*") return std::nullopt;
  std::uint32_t v = 0;
  if (!parse_uint(s, v) || v > 255)
    throw ParseError(line, "bad tos '" + std::string(s) + "'");
  return static_cast<std::uint8_t>(v);
}

}  // namespace detail

/// Parses ruleset text. Non-canonical prefixes are canonicalized and
/// reported through `warnings` (one message per occurrence) rather than
/// rejected; real syntax problems and duplicate priorities throw ParseError.
inline RuleSet parse_ruleset(std::string_view text,
                             std::vector<std::string>* warnings = nullptr) {
  RuleSet rs;
  std::unordered_set<std::uint32_t> seen_priorities;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_rule = false;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    auto fields = detail::split_fields(line);
    if (fields.empty()) {
      if (pos > text.size()) break;
      continue;
    }
    if (fields[0] == "!ttl_threshold") {
      if (saw_rule)
        throw ParseError(line_no, "!ttl_threshold must precede all rules");
      std::uint32_t v = 0;
      if (fields.size() != 2 || !detail::parse_uint(fields[1], v) || v < 1 ||
          v > 254)
        throw ParseError(line_no, "bad !ttl_threshold (expected 1..254)");
      rs.ttl_threshold = static_cast<std::uint8_t>(v);
      continue;
    }
    if (fields.size() != 7)
      throw ParseError(line_no, "expected 7 fields, got " +
                                    std::to_string(fields.size()));
    Rule r;
    if (!detail::parse_uint(fields[0], r.priority))
      throw ParseError(line_no, "bad priority '" + std::string(fields[0]) + "'");
    bool src_fixed = false, dst_fixed = false;
    r.src = detail::parse_prefix(fields[1], line_no, src_fixed);
    r.dst = detail::parse_prefix(fields[2], line_no, dst_fixed);
    r.proto = detail::parse_proto(fields[3], line_no);
    r.ttl = detail::parse_band(fields[4], line_no);
    r.tos = detail::parse_tos(fields[5], line_no);
    std::uint32_t flow = 0;
    if (!detail::parse_uint(fields[6], flow) || flow == 0)
      throw ParseError(line_no, "bad flow id '" + std::string(fields[6]) + "'");
    r.flow = flow;
    if (!seen_priorities.insert(r.priority).second)
      throw ParseError(line_no,
                       "duplicate priority " + std::to_string(r.priority));
    if (warnings && (src_fixed || dst_fixed))
      warnings->push_back("line " + std::to_string(line_no) +
                          ": prefix canonicalized");
    r.id = static_cast<std::uint32_t>(rs.rules.size() + 1);
    rs.rules.push_back(r);
    saw_rule = true;
    if (pos > text.size()) break;
  }
  return rs;
}

inline std::string format_prefix(const IpPrefix& p) {
  if (p.length == 0) return "*";
  return format_ipv4(p.value) + '/' + std::to_string(p.length);
}

inline std::string format_proto(const std::optional<std::uint8_t>& proto) {
  if (!proto) return "*";
  if (*proto == kProtoTcp) return "tcp";
  if (*proto == kProtoUdp) return "udp";
  return std::to_string(*proto);
}

inline std::string format_band(TtlBand band) {
  switch (band) {
    case TtlBand::Low:
      return "low";
    case TtlBand::High:
      return "high";
    case TtlBand::Any:
    default:
      return "any";
  }
}

/// Inverse of parse_ruleset on valid rule sets whose ids are positional:
/// parse_ruleset(format_ruleset(rs)) == rs.
inline std::string format_ruleset(const RuleSet& rs) {
  std::string out = "!ttl_threshold " + std::to_string(rs.ttl_threshold) + '\n';
  for (const Rule& r : rs.rules) {
    out += std::to_string(r.priority);
    out += ' ';
    out += format_prefix(r.src);
    out += ' ';
    out += format_prefix(r.dst);
    out += ' ';
    out += format_proto(r.proto);
    out += ' ';
    out += format_band(r.ttl);
    out += ' ';
    out += r.tos ? std::to_string(*r.tos) : std::string("*");
    out += ' ';
    out += std::to_string(r.flow);
    out += '\n';
  }
  return out;
}

}  // namespace ttss
