#ifndef SBBA_RANKING_HPP_
#define SBBA_RANKING_HPP_

#include <algorithm>
#include <optional>
#include <vector>

#include "sbba/money.hpp"
#include "sbba/order.hpp"

namespace sbba {

/// Buyers by decreasing bid, sellers by increasing ask, ties by id. k is the
/// largest index with s_k <= b_k (1-based), so the first k of each side are
/// the expensive buyers and cheap sellers.
struct Ranking {
  std::vector<Order> buyers_desc;
  std::vector<Order> sellers_asc;
  std::size_t k = 0;
  BoundedMoney s_next = BoundedMoney::infinity();  // s_{k+1}, +inf when absent
  Money b_next;                                    // b_{k+1}, 0 when absent
  std::optional<Money> b_k;
  std::optional<Money> s_k;

  bool has_next_buyer() const { return buyers_desc.size() > k; }
  bool has_next_seller() const { return sellers_asc.size() > k; }
};

/// Ranks without validating. Values may be negative here, which happens
/// after translating traders between markets.
inline Ranking rank_orders(std::vector<Order> buyers, std::vector<Order> sellers) {
  std::sort(buyers.begin(), buyers.end(), [](const Order& a, const Order& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.id < b.id;
  });
  std::sort(sellers.begin(), sellers.end(), [](const Order& a, const Order& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.id < b.id;
  });

  Ranking r;
  const std::size_t n = std::min(buyers.size(), sellers.size());
  while (r.k < n && sellers[r.k].value <= buyers[r.k].value) ++r.k;
  if (r.k > 0) {
    r.b_k = buyers[r.k - 1].value;
    r.s_k = sellers[r.k - 1].value;
  }
  if (sellers.size() > r.k) r.s_next = sellers[r.k].value;
  if (buyers.size() > r.k) r.b_next = buyers[r.k].value;
  r.buyers_desc = std::move(buyers);
  r.sellers_asc = std::move(sellers);
  return r;
}

inline Ranking rank(const SingleMarketInstance& inst) {
  inst.validate();
  return rank_orders(inst.buyers, inst.sellers);
}

}  // namespace sbba

#endif  // SBBA_RANKING_HPP_
