#ifndef SBBA_GENERATE_HPP_
#define SBBA_GENERATE_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/random/uniform_int_distribution.hpp>

#include "sbba/order.hpp"
#include "sbba/ranking.hpp"
#include "sbba/sdm.hpp"

namespace sbba::generate {

// mt19937_64 output is fixed by the standard; boost's distribution keeps the
// mapping to integers identical across standard libraries.
using Rng = std::mt19937_64;

inline long uniform(Rng& rng, long lo, long hi) {
  if (lo > hi) throw std::invalid_argument("uniform: empty range");
  return boost::random::uniform_int_distribution<long>(lo, hi)(rng);
}

struct ValueRange {
  long lo = 0;
  long hi = 100;
};

inline void check(const ValueRange& r) {
  if (r.lo < 0 || r.lo > r.hi) throw std::invalid_argument("invalid value bounds");
}

inline SingleMarketInstance random_single_market(Rng& rng, std::size_t buyers, std::size_t sellers,
                                                 ValueRange range = {}) {
  check(range);
  if (buyers == 0 || sellers == 0) throw std::invalid_argument("counts must be at least 1");
  std::vector<Money> bids, asks;
  for (std::size_t i = 0; i < buyers; ++i) bids.emplace_back(uniform(rng, range.lo, range.hi));
  for (std::size_t i = 0; i < sellers; ++i) asks.emplace_back(uniform(rng, range.lo, range.hi));
  return SingleMarketInstance::from_values(bids, asks);
}

/// Random instance whose breakeven index is exactly k, by rejection. Side
/// sizes are drawn from [k, 2k+2] so that k is a typical outcome.
inline SingleMarketInstance random_with_k(Rng& rng, std::size_t k, ValueRange range = {}) {
  check(range);
  if (k == 0) throw std::invalid_argument("random_with_k: k must be positive");
  const long top = static_cast<long>(2 * k + 2);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const auto nb = static_cast<std::size_t>(uniform(rng, static_cast<long>(k), top));
    const auto ns = static_cast<std::size_t>(uniform(rng, static_cast<long>(k), top));
    auto inst = random_single_market(rng, nb, ns, range);
    if (rank_orders(inst.buyers, inst.sellers).k == k) return inst;
  }
  throw std::runtime_error("random_with_k: could not hit k = " + std::to_string(k));
}

/// k-1 pairs (B, 0) plus one pair (B-eps, eps): McAfee cancels the only
/// deal that leaves traders any surplus.
inline SingleMarketInstance adversarial(std::size_t k, const Money& big, const Money& eps) {
  if (k < 2) throw std::invalid_argument("adversarial: k must be at least 2");
  if (!(eps > Money(0)) || !(big - eps > eps)) throw std::invalid_argument("adversarial: need 0 < eps < B - eps");
  std::vector<Money> bids(k - 1, big), asks(k - 1, Money(0));
  bids.push_back(big - eps);
  asks.push_back(eps);
  return SingleMarketInstance::from_values(bids, asks);
}

struct SdmSpec {
  std::size_t markets = 2;
  std::size_t max_traders_per_market = 4;
  ValueRange values{0, 30};
  ValueRange transit{1, 6};
};

inline std::string market_name(std::size_t i) { return std::to_string(i + 1); }

/// Each market gets 0..max traders with random sides.
inline SdmInstance random_sdm(Rng& rng, const SdmSpec& spec) {
  check(spec.values);
  if (spec.markets == 0 || spec.transit.lo < 1 || spec.transit.lo > spec.transit.hi)
    throw std::invalid_argument("random_sdm: invalid spec");
  SdmInstance sdm;
  for (std::size_t m = 0; m < spec.markets; ++m) sdm.markets.push_back(market_name(m));
  for (const auto& i : sdm.markets)
    for (const auto& j : sdm.markets)
      if (i != j) sdm.transit[{i, j}] = Money(uniform(rng, spec.transit.lo, spec.transit.hi));
  for (const auto& m : sdm.markets) {
    const long n = uniform(rng, 0, static_cast<long>(spec.max_traders_per_market));
    for (long t = 0; t < n; ++t) {
      const Side side = uniform(rng, 0, 1) == 0 ? Side::kBuy : Side::kSell;
      const std::string id = "m" + m + (side == Side::kBuy ? "b" : "s") + std::to_string(t + 1);
      sdm.traders.push_back(Order{id, side, Money(uniform(rng, spec.values.lo, spec.values.hi)), m});
    }
  }
  return sdm;
}

/// Two markets with symmetric transit cost, traders named m<market>-<b|s><value>.
inline SdmInstance two_market(const std::vector<long>& asks1, const std::vector<long>& bids1,
                              const std::vector<long>& asks2, const std::vector<long>& bids2, long transit) {
  SdmInstance sdm;
  sdm.markets = {"1", "2"};
  sdm.transit[{"1", "2"}] = Money(transit);
  sdm.transit[{"2", "1"}] = Money(transit);
  auto add = [&](const MarketId& m, const std::vector<long>& values, Side side) {
    for (long v : values)
      sdm.traders.push_back(
          Order{"m" + m + "-" + (side == Side::kBuy ? "b" : "s") + std::to_string(v), side, Money(v), m});
  };
  add("1", asks1, Side::kSell);
  add("1", bids1, Side::kBuy);
  add("2", asks2, Side::kSell);
  add("2", bids2, Side::kBuy);
  return sdm;
}

/// Running two-market example with transit 4 each way.
inline SdmInstance sdm_main_example() {
  return two_market({1, 5, 9, 13, 19}, {20, 18, 12, 8, 4}, {2, 19, 21, 27, 31}, {36, 32, 28, 23, 18}, 4);
}

/// Two-market example where the k-th buyer sets the price.
inline SdmInstance sdm_appendix_example() {
  return two_market({1, 5, 9, 13, 17}, {20, 16, 12, 8, 4}, {15, 19, 22, 27, 31}, {36, 32, 28, 23, 18}, 4);
}

}  // namespace sbba::generate

#endif  // SBBA_GENERATE_HPP_
