#include <bit>
#include <map>

#include <gtest/gtest.h>

#include "sbba/alternatives.hpp"
#include "sbba/audit.hpp"
#include "sbba/generate.hpp"
#include "sbba/mechanisms.hpp"

namespace sbba {
namespace {

SingleMarketInstance make(std::vector<long> bids, std::vector<long> asks) {
  std::vector<Money> b(bids.begin(), bids.end()), a(asks.begin(), asks.end());
  return SingleMarketInstance::from_values(b, a);
}

// Bids {10, 10, 9}, asks {0, 0, 1}.
SingleMarketInstance example1() { return generate::adversarial(3, Money(10), Money(1)); }

// Every price in the outcome, buyers and sellers alike.
std::set<Money> prices(const Outcome& o) {
  std::set<Money> out;
  for (const auto& [id, p] : o.buyer_fills) out.insert(p);
  for (const auto& [id, p] : o.seller_fills) out.insert(p);
  return out;
}

// Exhaustive optimum over equal-size subsets of buyers and sellers.
Money brute_force_gain(const SingleMarketInstance& inst) {
  const std::size_t nb = inst.buyers.size(), ns = inst.sellers.size();
  Money best;
  for (unsigned bm = 0; bm < (1u << nb); ++bm)
    for (unsigned sm = 0; sm < (1u << ns); ++sm) {
      if (std::popcount(bm) != std::popcount(sm)) continue;
      Money g;
      for (std::size_t i = 0; i < nb; ++i)
        if (bm >> i & 1) g += inst.buyers[i].value;
      for (std::size_t j = 0; j < ns; ++j)
        if (sm >> j & 1) g -= inst.sellers[j].value;
      best = max(best, g);
    }
  return best;
}

SingleMarketInstance without(SingleMarketInstance inst, const std::string& id) {
  std::erase_if(inst.buyers, [&](const Order& o) { return o.id == id; });
  std::erase_if(inst.sellers, [&](const Order& o) { return o.id == id; });
  return inst;
}

TEST(OptimalTrade, SmallCases) {
  const auto opt = optimal_trade(make({8, 7, 6, 4, 3, 2}, {1, 2, 3, 5, 6, 7}));
  EXPECT_EQ(opt.k, 3u);
  EXPECT_EQ(opt.gain, Money(15));
  EXPECT_EQ(optimal_trade(example1()).gain, Money(28));
  EXPECT_EQ(optimal_trade(make({3}, {5})).gain, Money(0));
}

TEST(OptimalTrade, MatchesExhaustiveSearch) {
  generate::Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    const auto inst = generate::random_single_market(rng, generate::uniform(rng, 1, 6), generate::uniform(rng, 1, 6), {0, 15});
    EXPECT_EQ(optimal_trade(inst).gain, brute_force_gain(inst));
  }
}

TEST(Sbba, NextSellerSetsPrice) {
  const auto dist = sbba(make({8, 7, 6, 4, 3, 2}, {1, 2, 3, 5, 6, 7}));
  ASSERT_EQ(dist.size(), 1u);
  EXPECT_EQ(dist.branches()[0].outcome.deals(), 3u);
  EXPECT_EQ(prices(dist.branches()[0].outcome), std::set<Money>{Money(5)});
}

TEST(Sbba, KthBuyerSetsPriceAndOneSellerSitsOut) {
  const auto dist = sbba(make({8, 7, 6, 4, 3, 2}, {1, 2, 3, 7, 8, 9}));
  ASSERT_EQ(dist.size(), 3u);
  std::set<std::string> excluded;
  for (const auto& br : dist.branches()) {
    EXPECT_EQ(br.probability, Money(1, 3));
    EXPECT_EQ(br.outcome.deals(), 2u);
    EXPECT_EQ(prices(br.outcome), std::set<Money>{Money(6)});
    EXPECT_FALSE(br.outcome.buyer_fills.contains("b3"));
    for (const char* s : {"s1", "s2", "s3"})
      if (!br.outcome.seller_fills.contains(s)) excluded.insert(s);
  }
  EXPECT_EQ(excluded.size(), 3u);
}

TEST(Sbba, BoundaryTieUsesNextSellerCase) {
  const auto dist = sbba(make({6, 5, 1}, {1, 2, 5}));
  ASSERT_EQ(dist.size(), 1u);
  EXPECT_EQ(dist.branches()[0].outcome.deals(), 2u);
  EXPECT_EQ(prices(dist.branches()[0].outcome), std::set<Money>{Money(5)});
}

TEST(Sbba, Example1) {
  const auto inst = example1();
  const auto dist = sbba(inst);
  ASSERT_EQ(dist.size(), 3u);
  for (const auto& br : dist.branches()) EXPECT_EQ(prices(br.outcome), std::set<Money>{Money(9)});
  EXPECT_EQ(expected_gft(dist, inst), Money(58, 3));
  EXPECT_EQ(total_gft(dist, inst), Money(58, 3));
}

TEST(Sbba, NoTradeWhenKIsZero) {
  const auto dist = sbba(make({3}, {5}));
  ASSERT_EQ(dist.size(), 1u);
  EXPECT_TRUE(dist.branches()[0].outcome.empty());
}

TEST(SbbaDual, PriceFromNextBuyer) {
  const auto dist = sbba_dual(make({8, 7, 6, 4, 3, 2}, {1, 2, 3, 5, 6, 7}));
  ASSERT_EQ(dist.size(), 1u);
  EXPECT_EQ(dist.branches()[0].outcome.deals(), 3u);
  EXPECT_EQ(prices(dist.branches()[0].outcome), std::set<Money>{Money(4)});
}

TEST(SbbaDual, Example1) {
  const auto dist = sbba_dual(example1());
  ASSERT_EQ(dist.size(), 3u);
  for (const auto& br : dist.branches()) {
    EXPECT_EQ(br.outcome.deals(), 2u);
    EXPECT_EQ(prices(br.outcome), std::set<Money>{Money(1)});
  }
}

// With strictly positive values, swapping sides and reflecting v -> C - v
// turns sbba_dual into sbba.
TEST(SbbaDual, MirrorOfSbbaProperty) {
  generate::Rng rng(8);
  const Money c(101);
  for (int i = 0; i < 400; ++i) {
    const auto inst = generate::random_single_market(rng, generate::uniform(rng, 1, 6), generate::uniform(rng, 1, 6), {1, 100});
    SingleMarketInstance mirror;
    for (const auto& s : inst.sellers) mirror.buyers.push_back(buyer(s.id, c - s.value));
    for (const auto& b : inst.buyers) mirror.sellers.push_back(seller(b.id, c - b.value));
    const auto dual = sbba_dual(inst);
    const auto primal = sbba(mirror);
    ASSERT_EQ(dual.size(), primal.size());
    for (std::size_t j = 0; j < dual.size(); ++j) {
      const auto& d = dual.branches()[j].outcome;
      const auto& p = primal.branches()[j].outcome;
      ASSERT_EQ(d.buyer_fills.size(), p.seller_fills.size());
      for (const auto& [id, price] : d.buyer_fills) EXPECT_EQ(c - price, p.seller_fills.at(id));
      for (const auto& [id, price] : d.seller_fills) EXPECT_EQ(c - price, p.buyer_fills.at(id));
    }
  }
}

TEST(McAfee, Example1CancelsTheLastDeal) {
  const auto inst = example1();
  const auto dist = mcafee(inst);
  ASSERT_EQ(dist.size(), 1u);
  const auto& o = dist.branches()[0].outcome;
  EXPECT_EQ(o.deals(), 2u);
  for (const auto& [id, p] : o.buyer_fills) EXPECT_EQ(p, Money(9));
  for (const auto& [id, p] : o.seller_fills) EXPECT_EQ(p, Money(1));
  EXPECT_EQ(o.broker_surplus(), Money(16));
  EXPECT_EQ(total_gft(dist, inst), Money(20));
  EXPECT_EQ(expected_gft(dist, inst), Money(4));
}

TEST(McAfee, MidpointPrice) {
  const auto dist = mcafee(make({9, 8, 7, 2}, {1, 2, 3, 8}));
  const auto& o = dist.branches()[0].outcome;
  EXPECT_EQ(o.deals(), 3u);
  EXPECT_EQ(prices(o), std::set<Money>{Money(5)});
  EXPECT_EQ(o.broker_surplus(), Money(0));
}

TEST(Vcg, Example1) {
  const auto inst = example1();
  const auto dist = vcg(inst);
  const auto& o = dist.branches()[0].outcome;
  for (const auto& [id, p] : o.buyer_fills) EXPECT_EQ(p, Money(1));
  for (const auto& [id, p] : o.seller_fills) EXPECT_EQ(p, Money(9));
  EXPECT_EQ(o.broker_surplus(), Money(-24));
}

TEST(Vcg, InteriorPrices) {
  const auto dist = vcg(make({9, 8, 7, 2}, {1, 2, 3, 8}));
  const auto& o = dist.branches()[0].outcome;
  for (const auto& [id, p] : o.buyer_fills) EXPECT_EQ(p, Money(3));
  for (const auto& [id, p] : o.seller_fills) EXPECT_EQ(p, Money(7));
  EXPECT_EQ(o.broker_surplus(), Money(-12));
}

// Each winner pays the externality it imposes on everyone else.
TEST(Vcg, PaymentsEqualExternalitiesProperty) {
  generate::Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    const auto inst = generate::random_single_market(rng, generate::uniform(rng, 1, 6), generate::uniform(rng, 1, 6), {0, 20});
    const Money opt = optimal_trade(inst).gain;
    const auto dist = vcg(inst);
    const auto& o = dist.branches()[0].outcome;
    for (const auto& [id, paid] : o.buyer_fills) {
      const auto& b = *std::find_if(inst.buyers.begin(), inst.buyers.end(), [&](const Order& x) { return x.id == id; });
      EXPECT_EQ(paid, optimal_trade(without(inst, id)).gain - (opt - b.value));
    }
    for (const auto& [id, got] : o.seller_fills) {
      const auto& s = *std::find_if(inst.sellers.begin(), inst.sellers.end(), [&](const Order& x) { return x.id == id; });
      EXPECT_EQ(got, opt - optimal_trade(without(inst, id)).gain + s.value);
    }
    EXPECT_EQ(total_gft(vcg(inst), inst), opt);
  }
}

TEST(WalrasianRange, Cases) {
  auto check = [](const SingleMarketInstance& inst, Money lo, Money hi) {
    const auto r = walrasian_range(inst);
    EXPECT_EQ(r.low, lo);
    EXPECT_EQ(r.high, hi);
  };
  check(make({8, 7, 6, 4, 3, 2}, {1, 2, 3, 5, 6, 7}), 4, 5);
  check(example1(), 1, 9);
  check(make({9, 8, 7, 2}, {1, 2, 3, 8}), 3, 7);
  EXPECT_THROW(walrasian_range(make({3}, {5})), NoEquilibriumRange);
}

TEST(Sample, FrequenciesMatchProbabilities) {
  const auto dist = sbba(example1());
  std::map<std::string, int> counts;
  const int n = 3000;
  for (int seed = 0; seed < n; ++seed) {
    generate::Rng rng(static_cast<std::uint64_t>(seed));
    const auto& o = sample(dist, rng);
    for (const char* s : {"s1", "s2", "s3"})
      if (!o.seller_fills.contains(s)) ++counts[s];
  }
  for (const char* s : {"s1", "s2", "s3"}) EXPECT_NEAR(counts[s] / double(n), 1.0 / 3.0, 0.05) << s;
}

TEST(Sample, DeterministicForAGivenSeed) {
  const auto dist = sbba(make({8, 7, 6, 4, 3, 2}, {1, 2, 3, 7, 8, 9}));
  generate::Rng a(1234), b(1234);
  EXPECT_EQ(sample(dist, a), sample(dist, b));
  const auto single = mcafee(example1());
  generate::Rng c(0);
  EXPECT_EQ(sample(single, c), single.branches()[0].outcome);
}

TEST(Alternatives, NextSellerPriceCanLoseEveryDeal) {
  const auto dist = alternatives::always_next_seller_price(make({6, 5}, {1, 2, 9}));
  EXPECT_EQ(dist.branches()[0].outcome.deals(), 0u);
  EXPECT_EQ(sbba(make({6, 5}, {1, 2, 9})).branches()[0].outcome.deals(), 1u);
}

TEST(Mechanisms, ParseNames) {
  for (auto kind : all_single_market_mechanisms()) EXPECT_EQ(parse_mechanism(to_string(kind)), kind);
  EXPECT_FALSE(parse_mechanism("posted").has_value());
}

// Invariants over random instances: budget class, IR and the SBBA bound.
TEST(Mechanisms, RandomInvariantsProperty) {
  generate::Rng rng(77);
  for (int i = 0; i < 500; ++i) {
    const auto inst = generate::random_single_market(rng, generate::uniform(rng, 1, 7), generate::uniform(rng, 1, 7), {0, 30});
    const auto opt = optimal_trade(inst);
    for (auto kind : all_single_market_mechanisms()) {
      const auto dist = run_mechanism(kind, inst);
      EXPECT_TRUE(audit::ir_audit(dist, inst).empty()) << to_string(kind);
      const auto cls = audit::budget_audit(dist);
      switch (kind) {
        case MechanismKind::kSbba:
        case MechanismKind::kSbbaDual:
          EXPECT_EQ(cls, audit::BudgetClass::kStrong);
          break;
        case MechanismKind::kMcAfee:
          EXPECT_NE(cls, audit::BudgetClass::kDeficit);
          EXPECT_NE(cls, audit::BudgetClass::kMixed);
          break;
        case MechanismKind::kVcg:
          EXPECT_NE(cls, audit::BudgetClass::kSurplus);
          EXPECT_NE(cls, audit::BudgetClass::kMixed);
          break;
      }
    }
    if (opt.k > 0) {
      const Money k(static_cast<std::int64_t>(opt.k));
      EXPECT_GE(expected_gft(sbba(inst), inst), (Money(1) - Money(1) / k) * opt.gain);
      EXPECT_GE(expected_gft(sbba_dual(inst), inst), (Money(1) - Money(1) / k) * opt.gain);
    }
  }
}

}  // namespace
}  // namespace sbba
