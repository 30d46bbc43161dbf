#include <gtest/gtest.h>

#include "mechcheck/instance_text.hpp"
#include "mechcheck/model.hpp"
#include "oracles.hpp"

using namespace mechcheck;

namespace {

AuctionInstance minimal(Mechanism m = Mechanism::vickrey) {
  AuctionInstance raw;
  raw.name = "t";
  raw.items = {"A"};
  raw.bids = {{"agent1", {"A"}, 5}};
  raw.config.mechanism = m;
  return raw;
}

ErrorCode code_of(const AuctionInstance& raw) {
  try {
    validate_instance(raw);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "validation unexpectedly succeeded";
  return ErrorCode::Io;
}

ErrorCode parse_code(std::string_view text) {
  try {
    load_instance(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parse unexpectedly succeeded";
  return ErrorCode::Io;
}

}  // namespace

TEST(Validate, MinimalVickreyInstance) {
  ValidatedInstance v = validate_instance(minimal());
  EXPECT_EQ(v.item_count(), 1u);
  EXPECT_EQ(v.agent_count(), 1u);
  ASSERT_EQ(v.bids.size(), 1u);
  EXPECT_EQ(v.bids[0].bundle, Bundle::single(0));
  EXPECT_EQ(v.bids[0].amount, 5);
}

TEST(Validate, RejectsUnknownItem) {
  auto raw = minimal();
  raw.bids[0].items = {"B"};
  EXPECT_EQ(code_of(raw), ErrorCode::UnknownItemInBundle);
}

TEST(Validate, SingleItemMechanismsNeedOneItem) {
  auto raw = minimal();
  raw.items = {"A", "B"};
  EXPECT_EQ(code_of(raw), ErrorCode::MechanismArityMismatch);
  raw.config.mechanism = Mechanism::english;
  EXPECT_EQ(code_of(raw), ErrorCode::MechanismArityMismatch);
  raw.config.mechanism = Mechanism::vcg;
  EXPECT_NO_THROW(validate_instance(raw));
}

TEST(Validate, RejectsBadBidsAndItems) {
  auto raw = minimal();
  raw.bids[0].amount = -1;
  EXPECT_EQ(code_of(raw), ErrorCode::NegativeAmount);

  raw = minimal();
  raw.bids[0].items.clear();
  EXPECT_EQ(code_of(raw), ErrorCode::EmptyBundle);

  raw = minimal(Mechanism::vcg);
  raw.items = {"A", "A"};
  EXPECT_EQ(code_of(raw), ErrorCode::DuplicateItem);

  raw = minimal();
  raw.items.clear();
  EXPECT_EQ(code_of(raw), ErrorCode::NoItems);

  raw = minimal();
  raw.bids.clear();
  EXPECT_EQ(code_of(raw), ErrorCode::NoBids);

  raw = minimal(Mechanism::vcg);
  raw.items.clear();
  for (int i = 0; i < 65; ++i) raw.items.push_back("i" + std::to_string(i));
  EXPECT_EQ(code_of(raw), ErrorCode::TooManyItems);

  raw = minimal();
  raw.config.reserve = -3;
  EXPECT_EQ(code_of(raw), ErrorCode::NegativeAmount);
}

TEST(Validate, ItemIdsAreCaseSensitive) {
  auto raw = minimal(Mechanism::vcg);
  raw.items = {"a", "A"};
  EXPECT_NO_THROW(validate_instance(raw));
}

TEST(Validate, AgentsIndexedByFirstAppearance) {
  AuctionInstance raw;
  raw.name = "order";
  raw.items = {"A", "B"};
  raw.config.mechanism = Mechanism::vcg;
  raw.bids = {{"zed", {"A"}, 1}, {"amy", {"B"}, 2}, {"zed", {"B"}, 3}};
  raw.valuations = {{"bo", {"A"}, 4}};
  ValidatedInstance v = validate_instance(raw);
  EXPECT_EQ(v.agents, (std::vector<std::string>{"zed", "amy", "bo"}));
  EXPECT_EQ(v.bids[2].agent, 0u);
  EXPECT_FALSE(v.valuations[1].has_value());
  EXPECT_TRUE(v.valuations[2].has_value());
}

TEST(Validate, Valuations) {
  auto raw = minimal(Mechanism::vcg);
  raw.valuations = {{"agent1", {"A"}, 5}, {"agent1", {"A"}, 6}};
  EXPECT_EQ(code_of(raw), ErrorCode::DuplicateValuation);

  raw.valuations = {{"agent1", {}, 1}};
  EXPECT_EQ(code_of(raw), ErrorCode::EmptyBundle);

  raw.valuations = {{"agent1", {"A"}, -2}};
  EXPECT_EQ(code_of(raw), ErrorCode::NegativeAmount);

  raw.valuations = {{"agent1", {"Q"}, 2}};
  EXPECT_EQ(code_of(raw), ErrorCode::UnknownItemInBundle);

  raw.valuations = {{"agent1", {"A"}, 7}};
  ValidatedInstance v = validate_instance(raw);
  EXPECT_EQ(v.valuation(0, Bundle::single(0)), std::optional<Money>(7));
  EXPECT_EQ(v.valuation(0, Bundle{}), std::optional<Money>(0));
}

TEST(Bundles, Disjointness) {
  constexpr Bundle a = Bundle::single(0), b = Bundle::single(1);
  static_assert(bundles_disjoint(a, b));
  static_assert(!bundles_disjoint(a | b, b));
  EXPECT_TRUE(bundles_disjoint(Bundle{}, Bundle::all(64)));
  EXPECT_EQ(Bundle::all(64).size(), 64u);
  EXPECT_EQ((a | b).items(), (std::vector<std::size_t>{0, 1}));
}

TEST(Bundles, DisjointIffNoCommonItem) {
  for (std::uint64_t x = 0; x < 32; ++x)
    for (std::uint64_t y = 0; y < 32; ++y) {
      bool common = false;
      for (int i = 0; i < 5; ++i) common = common || ((x >> i & 1) && (y >> i & 1));
      EXPECT_EQ(bundles_disjoint(Bundle(x), Bundle(y)), !common);
    }
}

TEST(InstanceText, ParsesCorpusE1) {
  ValidatedInstance v = load_instance(oracle::slurp(oracle::corpus_path("auctions/e1.auction")));
  EXPECT_EQ(v.name, "e1");
  EXPECT_EQ(v.items, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(v.config.mechanism, Mechanism::vcg);
  ASSERT_EQ(v.bids.size(), 3u);
  EXPECT_EQ(v.bids[2].bundle, Bundle::all(2));
  EXPECT_EQ(v.bids[2].amount, 7);
}

TEST(InstanceText, RoundTripsThroughFormat) {
  for (const auto& path : oracle::corpus_files("auctions", ".auction")) {
    SCOPED_TRACE(path);
    ValidatedInstance v = load_instance(oracle::slurp(path));
    ValidatedInstance again = load_instance(format_instance(v.to_raw()));
    EXPECT_EQ(v, again);
    EXPECT_EQ(validate_instance(v), v);
  }
}

TEST(InstanceText, BracesMayTouchWords) {
  ValidatedInstance v = load_instance("auction x\nitems A B\nmechanism vcg\nbid a {A B} 3\nend\n");
  EXPECT_EQ(v.bids[0].bundle, Bundle::all(2));
}

TEST(InstanceText, SyntaxErrors) {
  EXPECT_EQ(parse_code(""), ErrorCode::Syntax);
  EXPECT_EQ(parse_code("items A\nmechanism vcg\nbid a { A } 1\nend\n"), ErrorCode::Syntax);
  EXPECT_EQ(parse_code("auction x\nitems A\nbid a { A } 1\nend\n"), ErrorCode::Syntax);
  EXPECT_EQ(parse_code("auction x\nitems A\nmechanism vcg\nbid a { A } 1\n"), ErrorCode::Syntax);
  EXPECT_EQ(parse_code("auction x\nitems A\nmechanism vcg\nbid a { A 1\nend\n"), ErrorCode::Syntax);
  EXPECT_EQ(parse_code("auction x\nitems A\nmechanism vcg\nbid a { A } x\nend\n"), ErrorCode::Syntax);
  EXPECT_EQ(parse_code("auction x\nitems A\nmechanism dutch\nbid a { A } 1\nend\n"), ErrorCode::Syntax);
  EXPECT_EQ(parse_code("auction x\nitems A\nmechanism vcg\nbid a { A } 1\nend\nbid b { A } 2\n"),
            ErrorCode::Syntax);
  EXPECT_EQ(parse_code("auction x\nitems A\nmechanism vcg\nbid a { } 1\nend\n"), ErrorCode::EmptyBundle);
}

TEST(InstanceText, ErrorsNameTheLine) {
  try {
    load_instance("auction x\nitems A\nmechanism vcg\nbid a { A } 1\nfrobnicate\nend\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
}

TEST(InstanceText, MissingFileIsIoError) {
  try {
    read_text_file("/nonexistent/file.auction");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(Mechanism, NamesRoundTrip) {
  for (Mechanism m : {Mechanism::vcg, Mechanism::vickrey, Mechanism::english})
    EXPECT_EQ(parse_mechanism(to_string(m)), m);
  EXPECT_FALSE(parse_mechanism("VCG"));
}
