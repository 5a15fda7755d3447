#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ttss/rule.hpp"
#include "ttss/ruleset_text.hpp"  // ParseError, split helpers
#include "ttss/traffic.hpp"

namespace ttss {

// Trace CSV: header row then one record per line,
//   arrival_ns,src,dst,proto,ttl,tos,size
// with dotted-quad addresses. Round-trips exactly.

inline constexpr std::string_view kTraceCsvHeader =
    "arrival_ns,src,dst,proto,ttl,tos,size";

inline void write_trace(std::ostream& os,
                        const std::vector<TraceRecord>& trace) {
  os << kTraceCsvHeader << '\n';
  for (const TraceRecord& r : trace) {
    os << r.arrival_ns << ',' << format_ipv4(r.hdr.src) << ','
       << format_ipv4(r.hdr.dst) << ',' << unsigned(r.hdr.proto) << ','
       << unsigned(r.hdr.ttl) << ',' << unsigned(r.hdr.tos) << ','
       << r.size_bytes << '\n';
  }
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::uint64_t parse_u64_field(std::string_view s, std::size_t line,
                                     std::uint64_t max,
                                     const char* what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v > max)
    throw ParseError(line, std::string("bad ") + what + " '" +
                               std::string(s) + "'");
  return v;
}

}  // namespace detail

inline std::vector<TraceRecord> read_trace(std::istream& is) {
  std::vector<TraceRecord> trace;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::uint64_t prev_arrival = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kTraceCsvHeader)
        throw ParseError(line_no, "missing trace CSV header row");
      saw_header = true;
      continue;
    }
    auto f = detail::split_csv(line);
    if (f.size() != 7)
      throw ParseError(line_no,
                       "expected 7 fields, got " + std::to_string(f.size()));
    TraceRecord r;
    r.arrival_ns = detail::parse_u64_field(f[0], line_no, ~0ull, "arrival_ns");
    if (!parse_ipv4(f[1], r.hdr.src))
      throw ParseError(line_no, "bad src address '" + std::string(f[1]) + "'");
    if (!parse_ipv4(f[2], r.hdr.dst))
      throw ParseError(line_no, "bad dst address '" + std::string(f[2]) + "'");
    r.hdr.proto = static_cast<std::uint8_t>(
        detail::parse_u64_field(f[3], line_no, 255, "proto"));
    r.hdr.ttl = static_cast<std::uint8_t>(
        detail::parse_u64_field(f[4], line_no, 255, "ttl"));
    r.hdr.tos = static_cast<std::uint8_t>(
        detail::parse_u64_field(f[5], line_no, 255, "tos"));
    r.size_bytes = static_cast<std::uint32_t>(
        detail::parse_u64_field(f[6], line_no, 0xFFFFFFFFull, "size"));
    if (r.size_bytes == 0) throw ParseError(line_no, "bad size '0'");
    if (!trace.empty() && r.arrival_ns < prev_arrival)
      throw ParseError(line_no, "arrival_ns not non-decreasing");
    prev_arrival = r.arrival_ns;
    trace.push_back(r);
  }
  return trace;
}

inline void write_trace_file(const std::string& path,
                             const std::vector<TraceRecord>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_trace(out, trace);
  if (!out) throw std::runtime_error("write failed on " + path);
}

inline std::vector<TraceRecord> read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_trace(in);
}

}  // namespace ttss
