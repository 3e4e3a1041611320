#include <gtest/gtest.h>

#include "sbba/audit.hpp"
#include "sbba/generate.hpp"
#include "sbba/mechanisms.hpp"
#include "sbba/sdm.hpp"

namespace sbba {
namespace {

SdmInstance line_of_three() {
  SdmInstance sdm;
  sdm.markets = {"1", "2", "3"};
  for (const auto& i : sdm.markets)
    for (const auto& j : sdm.markets)
      if (i != j) sdm.transit[{i, j}] = Money(10);
  sdm.transit[{"1", "2"}] = Money(2);
  sdm.transit[{"2", "3"}] = Money(3);
  sdm.traders = {seller("s", 0, "1"), buyer("b", 100, "3")};
  return sdm;
}

double trade_probability(const OutcomeDistribution& dist, const std::string& id) {
  Money p;
  for (const auto& br : dist.branches())
    if (br.outcome.buyer_fills.contains(id) || br.outcome.seller_fills.contains(id)) p += br.probability;
  return p.to_double();
}

TEST(FlowNetwork, MainExampleShape) {
  const auto net = build_flow_network(generate::sdm_main_example());
  EXPECT_EQ(net.node_count(), 3);
  EXPECT_EQ(net.edges.size(), 22u);
  std::size_t sellers = 0, buyers = 0, transit = 0;
  for (const auto& e : net.edges) {
    if (e.kind == flow::EdgeKind::kSeller) {
      ++sellers;
      EXPECT_EQ(e.from, 0);
      EXPECT_GE(e.cost, Money(0));
    } else if (e.kind == flow::EdgeKind::kBuyer) {
      ++buyers;
      EXPECT_EQ(e.to, 0);
      EXPECT_LE(e.cost, Money(0));
    } else {
      ++transit;
      EXPECT_EQ(e.cost, Money(4));
    }
  }
  EXPECT_EQ(sellers, 10u);
  EXPECT_EQ(buyers, 10u);
  EXPECT_EQ(transit, 2u);
}

TEST(FlowNetwork, SingleMarketShape) {
  SingleMarketInstance inst;
  inst.buyers = {buyer("b", 5)};
  inst.sellers = {seller("s", 2)};
  const auto net = build_flow_network(SdmInstance::from_single_market(inst));
  EXPECT_EQ(net.node_count(), 2);
  EXPECT_EQ(net.edges.size(), 2u);
}

TEST(Circulation, MainExampleCost) {
  const auto net = build_flow_network(generate::sdm_main_example());
  const auto circ = flow::min_cost_circulation(net);
  EXPECT_EQ(circ.total_cost, Money(-100));
  EXPECT_TRUE(flow::is_optimal(net, circ));
}

TEST(Circulation, ZeroWhenNothingProfitable) {
  SingleMarketInstance inst;
  inst.buyers = {buyer("b", 3)};
  inst.sellers = {seller("s", 5)};
  const auto net = build_flow_network(SdmInstance::from_single_market(inst));
  const auto circ = flow::min_cost_circulation(net);
  EXPECT_EQ(circ.total_cost, Money(0));
  for (long f : circ.flow) EXPECT_EQ(f, 0);
}

TEST(Circulation, NegativeCycleDetectedOnZeroFlow) {
  const auto net = build_flow_network(generate::sdm_main_example());
  const std::vector<long> zero(net.edges.size(), 0);
  EXPECT_TRUE(flow::find_negative_cycle(net, zero).has_value());
}

TEST(Components, DeltaAlongAPath) {
  const auto sdm = line_of_three();
  const auto net = build_flow_network(sdm);
  const auto circ = flow::min_cost_circulation(net);
  EXPECT_EQ(circ.total_cost, Money(-95));
  const auto part = components_and_deltas(net, circ);
  ASSERT_EQ(part.components.size(), 1u);
  EXPECT_EQ(part.delta_of("1", "3"), Money(5));
  EXPECT_EQ(part.delta_of("3", "1"), Money(-5));
  EXPECT_EQ(part.delta_of("1", "2"), Money(2));
}

TEST(Components, SeparateMarketsWithoutFlow) {
  SdmInstance sdm;
  sdm.markets = {"a", "b"};
  sdm.transit = {{{"a", "b"}, Money(50)}, {{"b", "a"}, Money(50)}};
  sdm.traders = {seller("as", 1, "a"), buyer("ab", 9, "a"), seller("bs", 3, "b"), buyer("bb", 4, "b")};
  const auto net = build_flow_network(sdm);
  const auto part = components_and_deltas(net, flow::min_cost_circulation(net));
  ASSERT_EQ(part.components.size(), 2u);
  EXPECT_NE(part.component_of("a"), part.component_of("b"));
  EXPECT_THROW(part.delta_of("a", "b"), NoDeltaError);
}

TEST(SbbaSdm, SingleMarketMatchesSbba) {
  generate::Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto inst = generate::random_single_market(rng, generate::uniform(rng, 1, 6), generate::uniform(rng, 1, 6), {0, 20});
    const auto res = sbba_sdm(SdmInstance::from_single_market(inst));
    EXPECT_EQ(res.distribution, sbba(inst));
  }
}

TEST(SbbaSdm, PathComponentPrices) {
  const auto res = sbba_sdm(line_of_three());
  // One deal only: k = 1, b_k sets the price and the lone seller sits out.
  ASSERT_EQ(res.components.size(), 1u);
  EXPECT_EQ(res.components[0].price_setter, PriceSetter::kBuyer);
  EXPECT_EQ(res.prices.prices.at("3") - res.prices.prices.at("1"), Money(5));
  EXPECT_TRUE(verify_prices(res.prices, res.partition).empty());
}

TEST(VerifyPrices, OffsetsMustMatch) {
  const auto res = sbba_sdm(generate::sdm_main_example());
  auto check = [&](long p1, long p2) {
    PriceVector pv;
    pv.prices = {{"1", Money(p1)}, {"2", Money(p2)}};
    return verify_prices(pv, res.partition).empty();
  };
  EXPECT_TRUE(check(17, 21));
  EXPECT_TRUE(check(16, 20));
  EXPECT_FALSE(check(17, 20));
  PriceVector negative;
  negative.prices = {{"1", Money(-4)}, {"2", Money(0)}};
  EXPECT_FALSE(verify_prices(negative, res.partition).empty());
}

// Buyers pay what sellers receive plus what shipping costs, in every branch.
TEST(SbbaSdm, MoneyConservationProperty) {
  generate::Rng rng(12);
  for (int i = 0; i < 150; ++i) {
    generate::SdmSpec spec;
    spec.markets = static_cast<std::size_t>(generate::uniform(rng, 1, 3));
    const auto sdm = generate::random_sdm(rng, spec);
    const auto res = sbba_sdm(sdm);
    EXPECT_TRUE(flow::is_optimal(res.network, res.circulation));
    EXPECT_TRUE(verify_prices(res.prices, res.partition).empty());
    EXPECT_TRUE(audit::ir_audit(res.distribution, sdm).empty());
    for (const auto& br : res.distribution.branches()) {
      const auto& o = br.outcome;
      EXPECT_EQ(o.buyer_payments(), o.seller_receipts() + o.transit_paid());
      EXPECT_EQ(o.broker_surplus(), Money(0));
      EXPECT_EQ(o.buyer_fills.size(), o.seller_fills.size());
    }
  }
}

// Raising a bid (or lowering an ask) never lowers the chance to trade.
TEST(SbbaSdm, MonotoneParticipationProperty) {
  generate::Rng rng(19);
  for (int i = 0; i < 60; ++i) {
    generate::SdmSpec spec;
    spec.markets = static_cast<std::size_t>(generate::uniform(rng, 1, 3));
    const auto sdm = generate::random_sdm(rng, spec);
    const auto base = sbba_sdm(sdm).distribution;
    for (std::size_t t = 0; t < sdm.traders.size(); ++t) {
      auto bumped = sdm;
      auto& o = bumped.traders[t];
      if (o.side == Side::kBuy)
        o.value += Money(5);
      else if (o.value >= Money(5))
        o.value -= Money(5);
      else
        continue;
      EXPECT_GE(trade_probability(sbba_sdm(bumped).distribution, o.id) + 1e-12, trade_probability(base, o.id))
          << o.id;
    }
  }
}

}  // namespace
}  // namespace sbba
