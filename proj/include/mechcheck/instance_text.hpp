#pragma once

// Canonical line-oriented auction instance format:
//
//   auction <name>
//   items <id> <id> ...
//   mechanism vcg|vickrey|english
//   reserve <int>                      (optional, default 0)
//   duration <int>                     (optional, default 0)
//   bid <agent> { <id> ... } <int>
//   valuation <agent> { <id> ... } <int>
//   end
//
// '#' starts a comment that runs to end of line.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mechcheck/error.hpp"
#include "mechcheck/model.hpp"

namespace mechcheck {

namespace detail {

inline std::vector<std::string> split_instance_line(std::string_view line) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '\r') {
      flush();
    } else if (c == '{' || c == '}') {
      flush();
      tokens.emplace_back(1, c);
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return tokens;
}

inline std::int64_t parse_int_token(const std::string& tok, std::size_t line_no) {
  std::int64_t value = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw Error(ErrorCode::Syntax, "line " + std::to_string(line_no) + ": expected integer, got '" + tok + "'");
  return value;
}

}  // namespace detail

inline AuctionInstance parse_instance(std::string_view text) {
  AuctionInstance inst;
  bool have_header = false, have_items = false, have_mechanism = false, have_reserve = false,
       have_duration = false, ended = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;

  auto fail = [&](const std::string& msg) -> void {
    throw Error(ErrorCode::Syntax, "line " + std::to_string(line_no) + ": " + msg);
  };

  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = detail::split_instance_line(line);
    if (tok.empty()) continue;
    if (ended) fail("content after 'end'");

    const std::string& kw = tok[0];
    if (!have_header) {
      if (kw != "auction" || tok.size() != 2) fail("expected 'auction <name>'");
      inst.name = tok[1];
      have_header = true;
      continue;
    }

    auto parse_bundle_line = [&]() -> RawBid {
      // <kw> <agent> { ids } <int>
      if (tok.size() < 5 || tok[2] != "{" || tok[tok.size() - 2] != "}")
        fail("expected '" + kw + " <agent> { <id> ... } <int>'");
      if (tok[1] == "{" || tok[1] == "}") fail("missing agent id");
      RawBid b;
      b.agent = tok[1];
      for (std::size_t i = 3; i + 2 < tok.size(); ++i) {
        if (tok[i] == "{" || tok[i] == "}") fail("unbalanced braces");
        b.items.push_back(tok[i]);
      }
      b.amount = detail::parse_int_token(tok.back(), line_no);
      return b;
    };

    if (kw == "items") {
      if (have_items) fail("duplicate 'items' line");
      if (tok.size() < 2) fail("'items' needs at least one id");
      for (std::size_t i = 1; i < tok.size(); ++i) {
        if (tok[i] == "{" || tok[i] == "}") fail("unexpected brace in items");
        inst.items.push_back(tok[i]);
      }
      have_items = true;
    } else if (kw == "mechanism") {
      if (have_mechanism) fail("duplicate 'mechanism' line");
      if (tok.size() != 2) fail("expected 'mechanism vcg|vickrey|english'");
      auto m = parse_mechanism(tok[1]);
      if (!m) fail("unknown mechanism '" + tok[1] + "'");
      inst.config.mechanism = *m;
      have_mechanism = true;
    } else if (kw == "reserve") {
      if (have_reserve || tok.size() != 2) fail("expected a single 'reserve <int>'");
      inst.config.reserve = detail::parse_int_token(tok[1], line_no);
      have_reserve = true;
    } else if (kw == "duration") {
      if (have_duration || tok.size() != 2) fail("expected a single 'duration <int>'");
      inst.config.duration = detail::parse_int_token(tok[1], line_no);
      have_duration = true;
    } else if (kw == "bid") {
      inst.bids.push_back(parse_bundle_line());
    } else if (kw == "valuation") {
      inst.valuations.push_back(parse_bundle_line());
    } else if (kw == "end") {
      if (tok.size() != 1) fail("'end' takes no arguments");
      ended = true;
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }

  if (!have_header) throw Error(ErrorCode::Syntax, "missing 'auction <name>' header");
  if (!have_items) throw Error(ErrorCode::Syntax, "missing 'items' line");
  if (!have_mechanism) throw Error(ErrorCode::Syntax, "missing 'mechanism' line");
  if (!ended) throw Error(ErrorCode::Syntax, "missing 'end'");
  return inst;
}

inline std::string format_bundle(const std::vector<std::string>& items) {
  std::string out = "{";
  for (const auto& i : items) out += " " + i;
  out += " }";
  return out;
}

inline std::string format_instance(const AuctionInstance& inst) {
  std::ostringstream os;
  os << "auction " << inst.name << "\n";
  os << "items";
  for (const auto& i : inst.items) os << " " << i;
  os << "\n";
  os << "mechanism " << to_string(inst.config.mechanism) << "\n";
  if (inst.config.reserve != 0) os << "reserve " << inst.config.reserve << "\n";
  if (inst.config.duration != 0) os << "duration " << inst.config.duration << "\n";
  for (const auto& b : inst.bids) os << "bid " << b.agent << " " << format_bundle(b.items) << " " << b.amount << "\n";
  for (const auto& v : inst.valuations)
    os << "valuation " << v.agent << " " << format_bundle(v.items) << " " << v.amount << "\n";
  os << "end\n";
  return os.str();
}

inline ValidatedInstance load_instance(std::string_view text) { return validate_instance(parse_instance(text)); }

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mechcheck
