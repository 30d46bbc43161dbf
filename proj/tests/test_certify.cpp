#include <gtest/gtest.h>

#include "mechcheck/certify.hpp"
#include "oracles.hpp"

using namespace mechcheck;

namespace {

std::string english() { return oracle::slurp(oracle::corpus_path("auctions/english.auction")); }
std::string vickrey() { return oracle::slurp(oracle::corpus_path("auctions/vickrey.auction")); }

const Grid kGrid{0, 10, 1};

std::string replace_line(const std::string& cert, const std::string& prefix, const std::string& line) {
  auto at = cert.find(prefix);
  EXPECT_NE(at, std::string::npos) << prefix;
  auto end = cert.find('\n', at);
  return cert.substr(0, at) + line + cert.substr(end);
}

RejectReason reason(const std::string& cert, const std::string& inst) { return check_certificate(cert, inst).reason; }

}  // namespace

TEST(Digest, KnownValues) {
  EXPECT_EQ(to_hex64(fnv1a64("")), oracle::kFnvEmpty);
  EXPECT_EQ(to_hex64(fnv1a64("a")), oracle::kFnvA);
  EXPECT_EQ(to_hex64(fnv1a64("x y")), oracle::kFnvXSpaceY);
  EXPECT_EQ(canonical_digest("a\n"), oracle::kFnvA);
  EXPECT_EQ(canonical_digest("x \t  y  \r\n\n# note\n"), oracle::kFnvXSpaceY);
}

TEST(Digest, CanonicalForm) {
  EXPECT_EQ(canonicalize("a  b\t\tc   \r\n\r\n d # trailing\r# whole line\n"), "a b c\n d");
  EXPECT_EQ(canonicalize(""), "");
  EXPECT_EQ(canonicalize("\n\n# only comments\n   \n"), "");
  EXPECT_EQ(canonical_digest(english()), canonical_digest("# other comment\r\n" + english() + "\n\n"));
  EXPECT_NE(canonical_digest(english()), canonical_digest(vickrey()));
}

TEST(Certificate, VickreyPassIsAccepted) {
  Certificate c = emit_certificate(vickrey(), PropertyId::strategyproof, kGrid);
  EXPECT_TRUE(c.pass);
  EXPECT_EQ(c.agents, 3u);
  EXPECT_EQ(c.cells, 43923u);
  EXPECT_FALSE(c.witness);
  EXPECT_EQ(check_certificate(format_certificate(c), vickrey()).reason, RejectReason::none);
}

TEST(Certificate, EnglishFailCarriesFirstWitness) {
  Certificate c = emit_certificate(english(), PropertyId::strategyproof, kGrid);
  EXPECT_FALSE(c.pass);
  EXPECT_EQ(c.cells, 2u * 11 * 11 * 11);
  ASSERT_TRUE(c.witness);
  EXPECT_EQ(format_witness(*c.witness), "agent=0 v=1 others=0 dev=0 u_truth=0 u_dev=1");
  EXPECT_TRUE(check_certificate(format_certificate(c), english()).accepted());
}

TEST(Certificate, TextRoundTrip) {
  for (const auto& path : oracle::corpus_files("auctions", ".auction")) {
    SCOPED_TRACE(path);
    std::string text = oracle::slurp(path);
    Certificate c;
    try {
      c = emit_certificate(text, PropertyId::strategyproof, Grid{0, 4, 2});
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::UnsupportedDomain);
      continue;
    }
    std::string printed = format_certificate(c);
    EXPECT_EQ(parse_certificate(printed), c);
    EXPECT_EQ(format_certificate(parse_certificate(printed)), printed);
    EXPECT_TRUE(check_certificate(printed, text).accepted()) << check_certificate(printed, text).detail;
  }
}

TEST(Certificate, OnlyStrategyproofIsCertifiable) {
  try {
    emit_certificate(vickrey(), PropertyId::budget, kGrid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedProperty);
  }
}

TEST(Tamper, FieldEditsAreRejected) {
  const std::string pass = format_certificate(emit_certificate(vickrey(), PropertyId::strategyproof, kGrid));
  const std::string fail = format_certificate(emit_certificate(english(), PropertyId::strategyproof, kGrid));

  // Claiming PASS for the English auction.
  std::string flipped = replace_line(fail, "verdict", "verdict PASS");
  flipped = flipped.substr(0, flipped.find("witness"));
  EXPECT_EQ(reason(flipped, english()), RejectReason::ViolationFoundDespitePass);

  EXPECT_EQ(reason(replace_line(pass, "grid", "grid 0..11:1"), vickrey()), RejectReason::CellCountMismatch);
  EXPECT_EQ(reason(replace_line(pass, "cells", "cells 43924"), vickrey()), RejectReason::CellCountMismatch);
  EXPECT_EQ(reason(replace_line(fail, "grid", "grid 0..9:1"), english()), RejectReason::CellCountMismatch);
  EXPECT_EQ(reason(replace_line(fail, "witness", "witness agent=0 v=1 others=0 dev=0 u_truth=0 u_dev=2"), english()),
            RejectReason::WitnessDoesNotReproduce);
  EXPECT_EQ(reason(replace_line(fail, "witness", "witness agent=0 v=2 others=0 dev=0 u_truth=0 u_dev=1"), english()),
            RejectReason::WitnessDoesNotReproduce);
  EXPECT_EQ(reason(replace_line(fail, "witness", "witness agent=1 v=1 others=0 dev=0 u_truth=0 u_dev=1"), english()),
            RejectReason::WitnessDoesNotReproduce);
  EXPECT_EQ(reason(replace_line(fail, "witness", "witness agent=0 v=1 others=0 dev=11 u_truth=0 u_dev=1"), english()),
            RejectReason::WitnessDoesNotReproduce);
  EXPECT_EQ(reason(replace_line(pass, "mechanism", "mechanism english"), vickrey()),
            RejectReason::MalformedCertificate);
  EXPECT_EQ(reason(replace_line(pass, "agents", "agents 2"), vickrey()), RejectReason::MalformedCertificate);

  std::string digest = pass;
  digest[digest.find("digest ") + 7] ^= 1;
  EXPECT_EQ(reason(digest, vickrey()), RejectReason::DigestMismatch);
  EXPECT_EQ(reason(pass, english()), RejectReason::DigestMismatch);
}

TEST(Tamper, EveryCharacterEditIsRejected) {
  // Each byte of the FAIL certificate, replaced by a digit or letter it
  // does not already hold.
  const std::string fail = format_certificate(emit_certificate(english(), PropertyId::strategyproof, kGrid));
  const std::string inst = english();
  int edits = 0;
  for (std::size_t i = 0; i < fail.size(); ++i) {
    if (fail[i] == '\n') continue;
    for (char c : std::string("019aZ ")) {
      if (c == fail[i]) continue;
      std::string t = fail;
      t[i] = c;
      ASSERT_FALSE(check_certificate(t, inst).accepted()) << "offset " << i << " -> '" << c << "'\n" << t;
      ++edits;
    }
  }
  EXPECT_GT(edits, 500);
}

TEST(Tamper, WitnessFaultIsReported) {
  Certificate c = emit_certificate(english(), PropertyId::strategyproof, kGrid);
  c.witness->others = {5};
  CertificateCheck r = check_certificate(c, english());
  EXPECT_EQ(r.reason, RejectReason::WitnessDoesNotReproduce);
  EXPECT_FALSE(r.detail.empty());
}

TEST(Malformed, Text) {
  const std::string pass = format_certificate(emit_certificate(vickrey(), PropertyId::strategyproof, kGrid));
  std::vector<std::string> bad = {
      "",
      "MECHCERT 2\n" + pass.substr(pass.find('\n') + 1),
      pass + "extra\n",
      replace_line(pass, "digest", "digest B458CFA8A4FFF2D8"),
      replace_line(pass, "digest", "digest b458cfa8"),
      replace_line(pass, "property", "property efficient"),
      replace_line(pass, "property", "property fast"),
      replace_line(pass, "mechanism", "mechanism dutch"),
      replace_line(pass, "grid", "grid 10..0:1"),
      replace_line(pass, "grid", "grid 0..10:0"),
      replace_line(pass, "cells", "cells -1"),
      replace_line(pass, "verdict", "verdict MAYBE"),
      replace_line(pass, "verdict", "verdict FAIL"),
      pass + "witness agent=0 v=1 others=0 dev=0 u_truth=0 u_dev=1\n",
      replace_line(pass, "agents", "agents 3 "),
  };
  for (const auto& text : bad) EXPECT_EQ(reason(text, vickrey()), RejectReason::MalformedCertificate) << text;
}
