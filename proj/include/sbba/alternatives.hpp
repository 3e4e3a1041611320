#ifndef SBBA_ALTERNATIVES_HPP_
#define SBBA_ALTERNATIVES_HPP_

// Plausible-looking SBBA variants that are known to be broken. They exist
// only as negative controls for the audit engine.

#include <vector>

#include "sbba/mechanisms.hpp"

namespace sbba::alternatives {

/// SBBA, except that when b_k sets the price the k-1 cheapest sellers trade
/// instead of a random k-1. Not truthful: s_k gains by under-reporting.
inline OutcomeDistribution sbba_deterministic_exclusion(const SingleMarketInstance& inst) {
  const Ranking r = rank(inst);
  if (r.k == 0 || r.s_next <= *r.b_k) return sbba(r);
  return OutcomeDistribution::deterministic(detail::fill(detail::prefix(r.buyers_desc, r.k - 1), *r.b_k,
                                                         detail::prefix(r.sellers_asc, r.k - 1), *r.b_k));
}

/// Always price at s_{k+1}; only buyers bidding at least that much trade.
/// Can lose every deal when s_{k+1} exceeds b_1.
inline OutcomeDistribution always_next_seller_price(const SingleMarketInstance& inst) {
  const Ranking r = rank(inst);
  if (r.k == 0 || r.s_next.is_infinite()) return detail::no_trade();
  const Money price = r.s_next.value();
  std::size_t willing = 0;
  while (willing < r.k && r.buyers_desc[willing].value >= price) ++willing;
  return OutcomeDistribution::deterministic(detail::fill(detail::prefix(r.buyers_desc, willing), price,
                                                         detail::prefix(r.sellers_asc, willing), price));
}

}  // namespace sbba::alternatives

#endif  // SBBA_ALTERNATIVES_HPP_
