#pragma once

// Certificates let an auctioneer run an expensive property check once and
// hand the result to bidders, who re-check it against the exact instance
// text they were given.
//
// The digest is FNV-1a 64 over a canonicalised text. It detects accidental
// or careless edits; it is NOT a cryptographic hash and offers no protection
// against a deliberate forger.
//
// Certificate format (LF line endings):
//
//   MECHCERT 1
//   digest <16 hex digits>
//   property strategyproof
//   mechanism <vcg|vickrey|english>
//   agents <n>
//   grid <lo>..<hi>:<step>
//   cells <count>
//   verdict <PASS|FAIL>
//   witness agent=<i> v=<int> others=<int,...> dev=<int> u_truth=<int> u_dev=<int>   (FAIL only)

#include <charconv>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mechcheck/error.hpp"
#include "mechcheck/instance_text.hpp"
#include "mechcheck/model.hpp"
#include "mechcheck/properties.hpp"

namespace mechcheck {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = kFnvOffsetBasis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

/// Drops '#' comments, normalises line endings, collapses blank runs to a
/// single space, trims trailing blanks and removes empty lines. Kept lines
/// are joined with '\n' and no trailing newline.
inline std::string canonicalize(std::string_view text) {
  std::string out;
  std::string line;
  auto finish = [&] {
    while (!line.empty() && line.back() == ' ') line.pop_back();
    if (!line.empty()) {
      if (!out.empty()) out += '\n';
      out += line;
    }
    line.clear();
  };
  bool in_comment = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      finish();
      in_comment = false;
      continue;
    }
    if (in_comment) continue;
    if (c == '#') {
      in_comment = true;
    } else if (c == ' ' || c == '\t') {
      if (line.empty() || line.back() != ' ') line += ' ';
    } else {
      line += c;
    }
  }
  finish();
  return out;
}

inline std::string to_hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 15];
  return s;
}

inline std::string canonical_digest(std::string_view text) { return to_hex64(fnv1a64(canonicalize(text))); }

struct Certificate {
  int version = 1;
  std::string digest;
  PropertyId property = PropertyId::strategyproof;
  Mechanism mechanism = Mechanism::vcg;
  std::size_t agents = 0;
  Grid grid;
  std::uint64_t cells = 0;
  bool pass = true;
  std::optional<DeviationWitness> witness;

  bool operator==(const Certificate&) const = default;
};

inline std::string format_certificate(const Certificate& c) {
  std::ostringstream os;
  os << "MECHCERT " << c.version << "\n";
  os << "digest " << c.digest << "\n";
  os << "property " << to_string(c.property) << "\n";
  os << "mechanism " << to_string(c.mechanism) << "\n";
  os << "agents " << c.agents << "\n";
  os << "grid " << format_grid(c.grid) << "\n";
  os << "cells " << c.cells << "\n";
  os << "verdict " << (c.pass ? "PASS" : "FAIL") << "\n";
  if (c.witness) os << "witness " << format_witness(*c.witness) << "\n";
  return os.str();
}

namespace detail {

[[noreturn]] inline void malformed(const std::string& why) { throw Error(ErrorCode::MalformedCertificate, why); }

template <class Int>
Int parse_number(std::string_view s) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) malformed("bad number '" + std::string(s) + "'");
  return v;
}

inline std::string_view field(std::string_view line, std::string_view key) {
  if (line.size() <= key.size() || line.substr(0, key.size()) != key || line[key.size()] != ' ')
    malformed("expected '" + std::string(key) + " ...'");
  return line.substr(key.size() + 1);
}

inline DeviationWitness parse_witness(std::string_view body) {
  DeviationWitness w;
  std::vector<std::string_view> parts;
  for (std::size_t pos = 0; pos <= body.size();) {
    std::size_t sp = body.find(' ', pos);
    if (sp == std::string_view::npos) sp = body.size();
    parts.push_back(body.substr(pos, sp - pos));
    pos = sp + 1;
  }
  static constexpr std::string_view keys[] = {"agent=", "v=", "others=", "dev=", "u_truth=", "u_dev="};
  if (parts.size() != 6) malformed("witness needs six fields");
  std::string_view vals[6];
  for (int k = 0; k < 6; ++k) {
    if (parts[k].substr(0, keys[k].size()) != keys[k]) malformed("expected witness field " + std::string(keys[k]));
    vals[k] = parts[k].substr(keys[k].size());
  }
  w.agent = parse_number<std::size_t>(vals[0]);
  w.valuation = parse_number<Money>(vals[1]);
  if (!vals[2].empty()) {
    for (std::size_t pos = 0; pos <= vals[2].size();) {
      std::size_t comma = vals[2].find(',', pos);
      if (comma == std::string_view::npos) comma = vals[2].size();
      w.others.push_back(parse_number<Money>(vals[2].substr(pos, comma - pos)));
      pos = comma + 1;
    }
  }
  w.deviation = parse_number<Money>(vals[3]);
  w.truthful_utility = parse_number<Money>(vals[4]);
  w.deviating_utility = parse_number<Money>(vals[5]);
  return w;
}

}  // namespace detail

inline Certificate parse_certificate(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.size() != 8 && lines.size() != 9) detail::malformed("wrong number of lines");

  Certificate c;
  if (lines[0] != "MECHCERT 1") detail::malformed("unsupported header");
  c.digest = std::string(detail::field(lines[1], "digest"));
  if (c.digest.size() != 16 || c.digest.find_first_not_of("0123456789abcdef") != std::string::npos)
    detail::malformed("digest must be 16 lowercase hex digits");
  auto prop = parse_property(detail::field(lines[2], "property"));
  if (!prop) detail::malformed("unknown property");
  c.property = *prop;
  auto mech = parse_mechanism(detail::field(lines[3], "mechanism"));
  if (!mech) detail::malformed("unknown mechanism");
  c.mechanism = *mech;
  c.agents = detail::parse_number<std::size_t>(detail::field(lines[4], "agents"));
  try {
    c.grid = parse_grid(detail::field(lines[5], "grid"));
  } catch (const Error& e) {
    detail::malformed(e.what());
  }
  c.cells = detail::parse_number<std::uint64_t>(detail::field(lines[6], "cells"));
  auto verdict = detail::field(lines[7], "verdict");
  if (verdict != "PASS" && verdict != "FAIL") detail::malformed("verdict must be PASS or FAIL");
  c.pass = verdict == "PASS";
  if (lines.size() == 9) c.witness = detail::parse_witness(detail::field(lines[8], "witness"));
  if (c.pass == c.witness.has_value()) detail::malformed("FAIL needs a witness and PASS must not have one");
  return c;
}

/// Runs the exhaustive check and records the result. Only strategyproofness
/// is certifiable; `cells` is the size of the whole quantifier domain.
inline Certificate emit_certificate(std::string_view instance_text, PropertyId property, const Grid& grid,
                                    std::uint64_t cell_cap = kDefaultCellCap) {
  if (property != PropertyId::strategyproof)
    throw Error(ErrorCode::UnsupportedProperty, "only strategyproof certificates are supported");
  ValidatedInstance inst = load_instance(instance_text);
  Verdict v = check_strategyproof(inst, inst.agent_count(), grid, cell_cap);
  Certificate c;
  c.digest = canonical_digest(instance_text);
  c.property = property;
  c.mechanism = inst.config.mechanism;
  c.agents = inst.agent_count();
  c.grid = grid;
  c.cells = strategyproof_cell_count(c.agents, grid);
  c.pass = v.holds();
  c.witness = v.witness;
  return c;
}

enum class RejectReason {
  none,
  DigestMismatch,
  WitnessDoesNotReproduce,
  ViolationFoundDespitePass,
  CellCountMismatch,
  MalformedCertificate,
};

inline std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::none: return "none";
    case RejectReason::DigestMismatch: return "DigestMismatch";
    case RejectReason::WitnessDoesNotReproduce: return "WitnessDoesNotReproduce";
    case RejectReason::ViolationFoundDespitePass: return "ViolationFoundDespitePass";
    case RejectReason::CellCountMismatch: return "CellCountMismatch";
    case RejectReason::MalformedCertificate: return "MalformedCertificate";
  }
  return "none";
}

struct CertificateCheck {
  RejectReason reason = RejectReason::none;
  std::string detail;

  bool accepted() const { return reason == RejectReason::none; }
};

/// Re-checks a certificate against the instance text. A FAIL certificate
/// costs one cell evaluation; a PASS certificate costs a full enumeration.
inline CertificateCheck check_certificate(const Certificate& cert, std::string_view instance_text) {
  auto reject = [](RejectReason r, std::string why) { return CertificateCheck{r, std::move(why)}; };

  if (canonical_digest(instance_text) != cert.digest)
    return reject(RejectReason::DigestMismatch, "certificate was issued for a different instance");
  if (cert.property != PropertyId::strategyproof)
    return reject(RejectReason::MalformedCertificate, "only strategyproof certificates are supported");
  if (cert.pass == cert.witness.has_value())
    return reject(RejectReason::MalformedCertificate, "verdict and witness disagree");

  ValidatedInstance inst;
  try {
    inst = load_instance(instance_text);
    validate_grid(cert.grid);
  } catch (const Error& e) {
    return reject(RejectReason::MalformedCertificate, e.what());
  }
  if (cert.mechanism != inst.config.mechanism)
    return reject(RejectReason::MalformedCertificate, "mechanism differs from the instance");
  if (cert.agents != inst.agent_count())
    return reject(RejectReason::MalformedCertificate, "agent count differs from the instance");

  std::uint64_t expected_cells = 0;
  try {
    expected_cells = strategyproof_cell_count(cert.agents, cert.grid);
  } catch (const Error&) {
    return reject(RejectReason::CellCountMismatch, "grid size overflows");
  }
  if (cert.cells != expected_cells)
    return reject(RejectReason::CellCountMismatch,
                  "declared " + std::to_string(cert.cells) + " cells, grid has " + std::to_string(expected_cells));

  GridDomain domain = make_grid_domain(inst, cert.agents);
  try {
    check_strategyproof_domain(domain);
  } catch (const Error& e) {
    return reject(RejectReason::MalformedCertificate, e.what());
  }

  if (!cert.pass) {
    const DeviationWitness& w = *cert.witness;
    bool in_domain = w.agent < cert.agents && w.others.size() + 1 == cert.agents && cert.grid.contains(w.valuation) &&
                     cert.grid.contains(w.deviation);
    for (Money o : w.others) in_domain = in_domain && cert.grid.contains(o);
    if (!in_domain) return reject(RejectReason::WitnessDoesNotReproduce, "witness lies outside the declared grid");
    auto [truthful, deviating] = evaluate_deviation(domain, w.agent, w.valuation, w.others, w.deviation);
    if (truthful != w.truthful_utility || deviating != w.deviating_utility || deviating <= truthful)
      return reject(RejectReason::WitnessDoesNotReproduce,
                    "re-evaluation gives u_truth=" + std::to_string(truthful) + " u_dev=" + std::to_string(deviating));
    return {};
  }

  Verdict v = check_strategyproof(inst, cert.agents, cert.grid, std::numeric_limits<std::uint64_t>::max());
  if (!v.holds())
    return reject(RejectReason::ViolationFoundDespitePass, "violation at " + format_witness(*v.witness));
  if (v.cells_checked != cert.cells)
    return reject(RejectReason::CellCountMismatch, "enumerated " + std::to_string(v.cells_checked) + " cells");
  return {};
}

inline CertificateCheck check_certificate(std::string_view cert_text, std::string_view instance_text) {
  Certificate cert;
  try {
    cert = parse_certificate(cert_text);
  } catch (const Error& e) {
    return {RejectReason::MalformedCertificate, e.what()};
  }
  return check_certificate(cert, instance_text);
}

}  // namespace mechcheck
