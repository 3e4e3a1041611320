#ifndef SBBA_ORDER_HPP_
#define SBBA_ORDER_HPP_

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbba/money.hpp"

namespace sbba {

enum class Side { kBuy, kSell };

inline const char* to_string(Side side) { return side == Side::kBuy ? "buy" : "sell"; }

using MarketId = std::string;

/// Market identifier used by single-market instances.
inline const MarketId kDefaultMarket = "0";

/// One trader's declaration: a bid for buyers, an ask for sellers.
struct Order {
  std::string id;
  Side side = Side::kBuy;
  Money value;
  MarketId market = kDefaultMarket;

  friend bool operator==(const Order&, const Order&) = default;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Order buyer(std::string id, Money value, MarketId market = kDefaultMarket) {
  return Order{std::move(id), Side::kBuy, std::move(value), std::move(market)};
}

inline Order seller(std::string id, Money value, MarketId market = kDefaultMarket) {
  return Order{std::move(id), Side::kSell, std::move(value), std::move(market)};
}

struct SingleMarketInstance {
  std::vector<Order> buyers;
  std::vector<Order> sellers;

  friend bool operator==(const SingleMarketInstance&, const SingleMarketInstance&) = default;

  /// Throws ValidationError on duplicate ids, wrong sides or negative values.
  void validate() const {
    std::set<std::string> seen;
    auto check = [&](const Order& o, Side expected, const char* list) {
      if (o.side != expected)
        throw ValidationError(std::string("order '") + o.id + "' in " + list + " has side " + to_string(o.side));
      if (o.value < Money(0))
        throw ValidationError("order '" + o.id + "' has negative value " + o.value.to_string());
      if (!seen.insert(o.id).second) throw ValidationError("duplicate trader id '" + o.id + "'");
    };
    for (const auto& b : buyers) check(b, Side::kBuy, "buyers");
    for (const auto& s : sellers) check(s, Side::kSell, "sellers");
  }

  /// Builds an instance from plain value lists, naming traders b1.., s1...
  static SingleMarketInstance from_values(const std::vector<Money>& bids, const std::vector<Money>& asks) {
    SingleMarketInstance inst;
    for (std::size_t i = 0; i < bids.size(); ++i) inst.buyers.push_back(buyer("b" + std::to_string(i + 1), bids[i]));
    for (std::size_t i = 0; i < asks.size(); ++i) inst.sellers.push_back(seller("s" + std::to_string(i + 1), asks[i]));
    return inst;
  }
};

}  // namespace sbba

#endif  // SBBA_ORDER_HPP_
