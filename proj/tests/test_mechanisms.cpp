#include <gtest/gtest.h>

#include "mechcheck/instance_text.hpp"
#include "mechcheck/mechanisms.hpp"
#include "oracles.hpp"

using namespace mechcheck;

namespace {

ValidatedInstance corpus(const std::string& name) {
  return load_instance(oracle::slurp(oracle::corpus_path("auctions/" + name)));
}

std::vector<Money> payments(const Outcome& o) {
  std::vector<Money> p;
  for (const auto& a : o.agents) p.push_back(a.payment);
  return p;
}

ValidatedInstance single_item(Mechanism m, std::vector<Money> bids, Money reserve = 0) {
  AuctionInstance raw;
  raw.name = "s";
  raw.items = {"lot"};
  raw.config.mechanism = m;
  raw.config.reserve = reserve;
  for (std::size_t i = 0; i < bids.size(); ++i) raw.bids.push_back({"a" + std::to_string(i), {"lot"}, bids[i]});
  return validate_instance(raw);
}

}  // namespace

TEST(Vcg, E1Payments) {
  Outcome o = vcg_outcome(corpus("e1.auction"));
  EXPECT_EQ(payments(o), (std::vector<Money>{3, 2, 0}));
  EXPECT_EQ(o.allocation.welfare, 9);
  EXPECT_EQ(o.agents[0].clarke_tax, 7);
  EXPECT_EQ(o.agents[2].clarke_tax, 9);
  EXPECT_EQ(o.revenue(), 5);
}

TEST(Vcg, MatchesOracleOnCorpus) {
  for (const auto& path : oracle::corpus_files("auctions", ".auction")) {
    auto inst = load_instance(oracle::slurp(path));
    if (inst.config.mechanism != Mechanism::vcg) continue;
    SCOPED_TRACE(path);
    std::vector<oracle::SimpleBid> sb;
    for (const Bid& b : inst.bids)
      sb.push_back({static_cast<int>(b.agent), static_cast<std::uint32_t>(b.bundle.bits()), b.amount});
    auto ref = oracle::vcg(sb, static_cast<int>(inst.agent_count()));
    Outcome o = vcg_outcome(inst);
    for (AgentIndex a = 0; a < inst.agent_count(); ++a) {
      EXPECT_EQ(o.agents[a].payment, ref.payments[a]);
      EXPECT_EQ(o.agents[a].clarke_tax, ref.clarke[a]);
    }
  }
}

TEST(Vickrey, PaysSecondHighestBid) {
  Outcome o = vickrey_outcome(single_item(Mechanism::vickrey, {7, 10, 3}));
  EXPECT_EQ(o.allocation.accepted, (std::vector<BidIndex>{1}));
  EXPECT_EQ(payments(o), (std::vector<Money>{0, 7, 0}));
  EXPECT_EQ(o.agents[0].clarke_tax, 10);
  EXPECT_EQ(o.agents[1].clarke_tax, 7);
}

TEST(Vickrey, TiesGoToTheFirstBid) {
  Outcome o = vickrey_outcome(single_item(Mechanism::vickrey, {5, 5}));
  EXPECT_EQ(o.allocation.accepted, (std::vector<BidIndex>{0}));
  EXPECT_EQ(o.agents[0].payment, 5);
}

TEST(Vickrey, LoneBidderPaysNothing) {
  EXPECT_EQ(vickrey_outcome(single_item(Mechanism::vickrey, {9})).agents[0].payment, 0);
}

TEST(Vickrey, SecondPriceIgnoresTheWinnersOtherBids) {
  auto inst = load_instance("auction v\nitems lot\nmechanism vickrey\nbid a { lot } 9\nbid a { lot } 8\nbid b { lot } 4\nend\n");
  Outcome o = vickrey_outcome(inst);
  EXPECT_EQ(o.agents[0].payment, 4);
}

TEST(English, WinnerPaysOwnBid) {
  Outcome o = english_outcome(single_item(Mechanism::english, {7, 10}));
  EXPECT_EQ(payments(o), (std::vector<Money>{0, 10}));
  EXPECT_EQ(o.agents[1].clarke_tax, 7);
}

TEST(Reserve, WithdrawsSaleBelowReserve) {
  Outcome o = compute_outcome(corpus("reserve.auction"));
  EXPECT_FALSE(o.sold);
  EXPECT_EQ(o.revenue(), 0);
  EXPECT_TRUE(o.allocation.accepted.empty());
  EXPECT_FALSE(o.agents[0].wins());
  EXPECT_EQ(o.agents[0].clarke_tax, 4);

  Outcome kept = compute_outcome(single_item(Mechanism::vickrey, {9, 6}, 6));
  EXPECT_TRUE(kept.sold);
  EXPECT_EQ(kept.revenue(), 6);
}

TEST(Utility, QuasiLinear) {
  static_assert(utility(10, 7) == 3);
  static_assert(utility(0, 0) == 0);
  Outcome o = run_mechanism(corpus("e1.auction"));
  EXPECT_EQ(o.agents[0].utility, std::optional<Money>(2));
  EXPECT_EQ(o.agents[1].utility, std::optional<Money>(2));
  EXPECT_EQ(o.agents[2].utility, std::optional<Money>(0));
}

TEST(Utility, AbsentWithoutValuations) {
  Outcome o = run_mechanism(corpus("vickrey.auction"));
  for (const auto& a : o.agents) EXPECT_FALSE(a.utility);
}

TEST(Utility, UnkeyedUnionIsNotGuessed) {
  // n only declares a value for {A B} but wins {C}.
  Outcome o = run_mechanism(load_instance(
      "auction u\nitems A B C\nmechanism vcg\nbid n { A B } 1\nbid n { C } 5\nbid s { A B } 9\n"
      "valuation n { A B } 1\nend\n"));
  EXPECT_TRUE(o.agents[0].wins());
  EXPECT_FALSE(o.agents[0].utility);
}

TEST(Report, E1IsStable) {
  auto inst = corpus("e1.auction");
  std::string expected =
      "agent agent1 wins {A} pays 3 clarke 7 utility 2\n"
      "agent agent2 wins {B} pays 2 clarke 7 utility 2\n"
      "agent agent3 wins {} pays 0 clarke 9 utility 0\n"
      "revenue 5 sold true\n";
  EXPECT_EQ(format_outcome(inst, run_mechanism(inst)), expected);
}

TEST(Report, MentionsUnsoldReserve) {
  auto inst = corpus("reserve.auction");
  std::string report = format_outcome(inst, run_mechanism(inst));
  EXPECT_NE(report.find("revenue 0 sold false"), std::string::npos);
  EXPECT_NE(report.find("agent alice wins {} pays 0 clarke 4 utility 0"), std::string::npos);
}
