#ifndef SBBA_MECHANISMS_HPP_
#define SBBA_MECHANISMS_HPP_

#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/random/uniform_int_distribution.hpp>

#include "sbba/money.hpp"
#include "sbba/order.hpp"
#include "sbba/outcome.hpp"
#include "sbba/ranking.hpp"

namespace sbba {

struct OptimalTrade {
  std::size_t k = 0;
  Money gain;
};

/// All k efficient deals; the gain does not depend on the price.
inline OptimalTrade optimal_trade(const SingleMarketInstance& inst) {
  Ranking r = rank(inst);
  OptimalTrade out{r.k, Money()};
  for (std::size_t i = 0; i < r.k; ++i) out.gain += r.buyers_desc[i].value - r.sellers_asc[i].value;
  return out;
}

namespace detail {

/// Fills the given ranked buyers at buy_price and sellers at sell_price.
inline Outcome fill(const std::vector<const Order*>& buyers, const Money& buy_price,
                    const std::vector<const Order*>& sellers, const Money& sell_price) {
  Outcome o;
  for (const Order* b : buyers) o.buyer_fills.emplace(b->id, buy_price);
  for (const Order* s : sellers) o.seller_fills.emplace(s->id, sell_price);
  return o;
}

inline std::vector<const Order*> prefix(const std::vector<Order>& ranked, std::size_t n, std::size_t skip = SIZE_MAX) {
  std::vector<const Order*> out;
  for (std::size_t i = 0; i < n; ++i)
    if (i != skip) out.push_back(&ranked[i]);
  return out;
}

inline OutcomeDistribution no_trade() { return OutcomeDistribution::deterministic(Outcome{}); }

}  // namespace detail

/// Strongly-budget-balanced double auction at the single price
/// min(s_{k+1}, b_k). When b_k sets the price, b_k is dropped and one of the
/// k cheap sellers, chosen uniformly, sits out.
inline OutcomeDistribution sbba(const Ranking& r) {
  if (r.k == 0) return detail::no_trade();
  const Money& b_k = *r.b_k;
  if (r.s_next <= b_k) {
    const Money price = r.s_next.value();
    return OutcomeDistribution::deterministic(
        detail::fill(detail::prefix(r.buyers_desc, r.k), price, detail::prefix(r.sellers_asc, r.k), price));
  }
  std::vector<Outcome> lottery;
  const auto buyers = detail::prefix(r.buyers_desc, r.k - 1);
  for (std::size_t excluded = 0; excluded < r.k; ++excluded)
    lottery.push_back(detail::fill(buyers, b_k, detail::prefix(r.sellers_asc, r.k, excluded), b_k));
  return OutcomeDistribution::uniform(std::move(lottery));
}

inline OutcomeDistribution sbba(const SingleMarketInstance& inst) { return sbba(rank(inst)); }

/// Mirror image of sbba: price max(s_k, b_{k+1}); when s_k sets the price,
/// s_k is dropped and one of the k expensive buyers sits out.
inline OutcomeDistribution sbba_dual(const SingleMarketInstance& inst) {
  const Ranking r = rank(inst);
  if (r.k == 0) return detail::no_trade();
  const Money& s_k = *r.s_k;
  if (r.b_next >= s_k) {
    return OutcomeDistribution::deterministic(
        detail::fill(detail::prefix(r.buyers_desc, r.k), r.b_next, detail::prefix(r.sellers_asc, r.k), r.b_next));
  }
  std::vector<Outcome> lottery;
  const auto sellers = detail::prefix(r.sellers_asc, r.k - 1);
  for (std::size_t excluded = 0; excluded < r.k; ++excluded)
    lottery.push_back(detail::fill(detail::prefix(r.buyers_desc, r.k, excluded), s_k, sellers, s_k));
  return OutcomeDistribution::uniform(std::move(lottery));
}

/// McAfee's trade reduction. Uses (b_{k+1}+s_{k+1})/2 when both (k+1)-th
/// traders exist and that price lies in [s_k, b_k]; otherwise cancels the
/// k-th deal and charges b_k / pays s_k.
inline OutcomeDistribution mcafee(const SingleMarketInstance& inst) {
  const Ranking r = rank(inst);
  if (r.k == 0) return detail::no_trade();
  const Money& b_k = *r.b_k;
  const Money& s_k = *r.s_k;
  if (r.has_next_buyer() && r.has_next_seller()) {
    const Money candidate = (r.b_next + r.s_next.value()) / Money(2);
    if (s_k <= candidate && candidate <= b_k)
      return OutcomeDistribution::deterministic(detail::fill(detail::prefix(r.buyers_desc, r.k), candidate,
                                                             detail::prefix(r.sellers_asc, r.k), candidate));
  }
  return OutcomeDistribution::deterministic(
      detail::fill(detail::prefix(r.buyers_desc, r.k - 1), b_k, detail::prefix(r.sellers_asc, r.k - 1), s_k));
}

/// VCG: all k efficient deals; buyers pay max(s_k, b_{k+1}), sellers get
/// min(b_k, s_{k+1}). Runs a deficit.
inline OutcomeDistribution vcg(const SingleMarketInstance& inst) {
  const Ranking r = rank(inst);
  if (r.k == 0) return detail::no_trade();
  const Money buy_price = max(*r.s_k, r.b_next);
  const Money sell_price = min(*r.b_k, r.s_next);
  return OutcomeDistribution::deterministic(detail::fill(detail::prefix(r.buyers_desc, r.k), buy_price,
                                                         detail::prefix(r.sellers_asc, r.k), sell_price));
}

struct WalrasianRange {
  Money low;
  Money high;
};

class NoEquilibriumRange : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Closed range of single prices clearing exactly k deals.
inline WalrasianRange walrasian_range(const SingleMarketInstance& inst) {
  const Ranking r = rank(inst);
  if (r.k == 0) throw NoEquilibriumRange("walrasian_range: no profitable deal (k = 0)");
  return WalrasianRange{max(*r.s_k, r.b_next), min(*r.b_k, r.s_next)};
}

/// Draws one branch with its exact probability: a uniform integer in
/// [0, lcm of denominators) is located on the cumulative distribution.
template <class Urbg>
const Outcome& sample(const OutcomeDistribution& dist, Urbg& rng) {
  using Integer = Money::Integer;
  Integer scale = 1;
  for (const auto& br : dist.branches()) {
    Integer d = br.probability.denominator();
    scale = scale / boost::multiprecision::gcd(scale, d) * d;
  }
  if (scale > Integer(std::numeric_limits<std::uint64_t>::max()))
    throw std::overflow_error("sample: probability denominators too large");
  boost::random::uniform_int_distribution<std::uint64_t> draw(0, scale.convert_to<std::uint64_t>() - 1);
  const Integer u = draw(rng);
  Integer cumulative = 0;
  for (const auto& br : dist.branches()) {
    cumulative += br.probability.numerator() * (scale / br.probability.denominator());
    if (u < cumulative) return br.outcome;
  }
  return dist.branches().back().outcome;
}

enum class MechanismKind { kSbba, kSbbaDual, kMcAfee, kVcg };

inline const std::vector<MechanismKind>& all_single_market_mechanisms() {
  static const std::vector<MechanismKind> kAll{MechanismKind::kSbba, MechanismKind::kSbbaDual, MechanismKind::kMcAfee,
                                               MechanismKind::kVcg};
  return kAll;
}

inline std::string_view to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kSbba: return "sbba";
    case MechanismKind::kSbbaDual: return "sbba_dual";
    case MechanismKind::kMcAfee: return "mcafee";
    case MechanismKind::kVcg: return "vcg";
  }
  return "?";
}

inline std::optional<MechanismKind> parse_mechanism(std::string_view name) {
  for (auto kind : all_single_market_mechanisms())
    if (to_string(kind) == name) return kind;
  return std::nullopt;
}

inline OutcomeDistribution run_mechanism(MechanismKind kind, const SingleMarketInstance& inst) {
  switch (kind) {
    case MechanismKind::kSbba: return sbba(inst);
    case MechanismKind::kSbbaDual: return sbba_dual(inst);
    case MechanismKind::kMcAfee: return mcafee(inst);
    case MechanismKind::kVcg: return vcg(inst);
  }
  throw std::invalid_argument("run_mechanism: unknown mechanism");
}

}  // namespace sbba

#endif  // SBBA_MECHANISMS_HPP_
