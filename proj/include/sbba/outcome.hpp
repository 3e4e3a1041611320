#ifndef SBBA_OUTCOME_HPP_
#define SBBA_OUTCOME_HPP_

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sbba/money.hpp"
#include "sbba/order.hpp"

namespace sbba {

class AuditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Units carried between two markets in one outcome.
struct Shipment {
  MarketId from;
  MarketId to;
  long units = 0;
  Money unit_cost;

  friend bool operator==(const Shipment&, const Shipment&) = default;
};

/// One deterministic result: who trades and at what price. Traders absent
/// from both maps do not trade and have no transfer.
struct Outcome {
  std::map<std::string, Money> buyer_fills;   // buyer id -> price paid
  std::map<std::string, Money> seller_fills;  // seller id -> price received
  std::vector<Shipment> shipments;            // empty in single-market settings

  Money buyer_payments() const {
    Money sum;
    for (const auto& [id, price] : buyer_fills) sum += price;
    return sum;
  }
  Money seller_receipts() const {
    Money sum;
    for (const auto& [id, price] : seller_fills) sum += price;
    return sum;
  }
  Money transit_paid() const {
    Money sum;
    for (const auto& s : shipments) sum += s.unit_cost * Money(s.units);
    return sum;
  }
  /// What the operator keeps after paying sellers and carriers.
  Money broker_surplus() const { return buyer_payments() - seller_receipts() - transit_paid(); }

  std::size_t deals() const { return buyer_fills.size(); }
  bool empty() const { return buyer_fills.empty() && seller_fills.empty(); }

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct Branch {
  Money probability;
  Outcome outcome;

  friend bool operator==(const Branch&, const Branch&) = default;
};

/// Finite lottery over outcomes. Probabilities lie in (0, 1] and sum to
/// exactly one.
class OutcomeDistribution {
 public:
  explicit OutcomeDistribution(std::vector<Branch> branches) : branches_(std::move(branches)) {
    if (branches_.empty()) throw std::invalid_argument("OutcomeDistribution: no branches");
    Money total;
    for (const auto& b : branches_) {
      if (b.probability <= Money(0) || b.probability > Money(1))
        throw std::invalid_argument("OutcomeDistribution: probability " + b.probability.to_string() +
                                    " outside (0,1]");
      total += b.probability;
    }
    if (total != Money(1))
      throw std::invalid_argument("OutcomeDistribution: probabilities sum to " + total.to_string());
  }

  static OutcomeDistribution deterministic(Outcome outcome) {
    return OutcomeDistribution({Branch{Money(1), std::move(outcome)}});
  }

  /// Uniform lottery over the given outcomes.
  static OutcomeDistribution uniform(std::vector<Outcome> outcomes) {
    std::vector<Branch> branches;
    Money p(1, static_cast<std::int64_t>(outcomes.size()));
    for (auto& o : outcomes) branches.push_back(Branch{p, std::move(o)});
    return OutcomeDistribution(std::move(branches));
  }

  const std::vector<Branch>& branches() const { return branches_; }
  std::size_t size() const { return branches_.size(); }
  bool is_deterministic() const { return branches_.size() == 1; }

  friend bool operator==(const OutcomeDistribution&, const OutcomeDistribution&) = default;

 private:
  std::vector<Branch> branches_;
};

/// Declared side and value of every trader, keyed by id.
using ValueBook = std::map<std::string, std::pair<Side, Money>>;

inline ValueBook value_book(const SingleMarketInstance& inst) {
  ValueBook book;
  for (const auto& b : inst.buyers) book[b.id] = {Side::kBuy, b.value};
  for (const auto& s : inst.sellers) book[s.id] = {Side::kSell, s.value};
  return book;
}

namespace detail {

inline const Money& lookup(const ValueBook& book, const std::string& id, Side side) {
  auto it = book.find(id);
  if (it == book.end()) throw AuditError("fill references unknown trader '" + id + "'");
  if (it->second.first != side)
    throw AuditError("trader '" + id + "' filled on the " + to_string(side) + " side");
  return it->second.second;
}

inline Money traders_gain(const Outcome& o, const ValueBook& book) {
  Money gain;
  for (const auto& [id, price] : o.buyer_fills) gain += lookup(book, id, Side::kBuy) - price;
  for (const auto& [id, price] : o.seller_fills) gain += price - lookup(book, id, Side::kSell);
  return gain;
}

}  // namespace detail

/// Market gain-from-trade: gain enjoyed by the traders, in expectation.
template <class Instance>
Money expected_gft(const OutcomeDistribution& dist, const Instance& inst) {
  const ValueBook book = value_book(inst);
  Money total;
  for (const auto& br : dist.branches()) total += br.probability * detail::traders_gain(br.outcome, book);
  return total;
}

/// Total gain-from-trade: traders' gain plus whatever the operator keeps.
template <class Instance>
Money total_gft(const OutcomeDistribution& dist, const Instance& inst) {
  Money total = expected_gft(dist, inst);
  for (const auto& br : dist.branches()) total += br.probability * br.outcome.broker_surplus();
  return total;
}

}  // namespace sbba

#endif  // SBBA_OUTCOME_HPP_
