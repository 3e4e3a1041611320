#ifndef SBBA_AUDIT_HPP_
#define SBBA_AUDIT_HPP_

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbba/mechanisms.hpp"
#include "sbba/money.hpp"
#include "sbba/order.hpp"
#include "sbba/outcome.hpp"
#include "sbba/sdm.hpp"

namespace sbba::audit {

/// Expected net gain of one trader whose true value is true_value.
inline Money expected_utility(const OutcomeDistribution& dist, const std::string& id, const Money& true_value) {
  Money total;
  for (const auto& br : dist.branches()) {
    if (auto b = br.outcome.buyer_fills.find(id); b != br.outcome.buyer_fills.end())
      total += br.probability * (true_value - b->second);
    else if (auto s = br.outcome.seller_fills.find(id); s != br.outcome.seller_fills.end())
      total += br.probability * (s->second - true_value);
  }
  return total;
}

/// Every distinct breakpoint, the midpoints between consecutive ones, and
/// one point beyond each end. Points below zero are dropped since values
/// are non-negative.
inline std::vector<Money> deviation_points(const std::set<Money>& breakpoints) {
  std::vector<Money> out;
  if (breakpoints.empty()) return {Money(0), Money(1)};
  const Money below = *breakpoints.begin() - Money(1);
  if (below >= Money(0))
    out.push_back(below);
  else if (*breakpoints.begin() > Money(0))
    out.push_back(*breakpoints.begin() / Money(2));
  const Money* prev = nullptr;
  for (const auto& v : breakpoints) {
    if (prev) out.push_back((*prev + v) / Money(2));
    if (v >= Money(0)) out.push_back(v);
    prev = &v;
  }
  out.push_back(*breakpoints.rbegin() + Money(1));
  out.erase(std::remove_if(out.begin(), out.end(), [](const Money& m) { return m < Money(0); }), out.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Money> deviation_set(const SingleMarketInstance& inst, const std::string& id) {
  std::set<Money> others;
  bool found = false;
  for (const auto* list : {&inst.buyers, &inst.sellers})
    for (const auto& o : *list) {
      if (o.id == id) found = true;
      else others.insert(o.value);
    }
  if (!found) throw AuditError("deviation_set: unknown trader '" + id + "'");
  return deviation_points(others);
}

/// For SDM, other traders' values are also shifted by the transit costs
/// between their market and the deviator's, since that is where translated
/// values cross.
inline std::vector<Money> deviation_set(const SdmInstance& sdm, const std::string& id) {
  auto self = std::find_if(sdm.traders.begin(), sdm.traders.end(), [&](const Order& o) { return o.id == id; });
  if (self == sdm.traders.end()) throw AuditError("deviation_set: unknown trader '" + id + "'");
  std::set<Money> points;
  for (const auto& o : sdm.traders) {
    if (o.id == id) continue;
    points.insert(o.value);
    if (o.market == self->market) continue;
    points.insert(o.value + sdm.transit_cost(o.market, self->market));
    points.insert(o.value - sdm.transit_cost(self->market, o.market));
    for (const auto& via : sdm.markets) {
      if (via == o.market || via == self->market) continue;
      points.insert(o.value + sdm.transit_cost(o.market, via) + sdm.transit_cost(via, self->market));
      points.insert(o.value - sdm.transit_cost(self->market, via) - sdm.transit_cost(via, o.market));
    }
  }
  return deviation_points(points);
}

/// Adds every pairwise midpoint of the other traders' values. McAfee's
/// candidate price (b_{k+1}+s_{k+1})/2 is such a midpoint.
inline std::vector<Money> extended_deviation_set(const SingleMarketInstance& inst, const std::string& id) {
  std::set<Money> values;
  for (const auto* list : {&inst.buyers, &inst.sellers})
    for (const auto& o : *list)
      if (o.id != id) values.insert(o.value);
  std::set<Money> points(values.begin(), values.end());
  for (auto a = values.begin(); a != values.end(); ++a)
    for (auto b = std::next(a); b != values.end(); ++b) points.insert((*a + *b) / Money(2));
  auto base = deviation_set(inst, id);
  std::set<Money> all(base.begin(), base.end());
  for (const auto& p : deviation_points(points)) all.insert(p);
  return {all.begin(), all.end()};
}

struct DeviationReport {
  std::string trader_id;
  Money true_value;
  Money deviation_value;
  Money truthful_utility;
  Money deviating_utility;
  bool violation = false;
};

enum class DeviationGrid { kBreakpoints, kPairwiseMidpoints };

namespace detail {

inline SingleMarketInstance with_value(SingleMarketInstance inst, const std::string& id, const Money& v) {
  for (auto* list : {&inst.buyers, &inst.sellers})
    for (auto& o : *list)
      if (o.id == id) o.value = v;
  return inst;
}

inline SdmInstance with_value(SdmInstance inst, const std::string& id, const Money& v) {
  for (auto& o : inst.traders)
    if (o.id == id) o.value = v;
  return inst;
}

inline std::vector<Money> grid_points(const SingleMarketInstance& inst, const std::string& id, DeviationGrid grid) {
  return grid == DeviationGrid::kBreakpoints ? deviation_set(inst, id) : extended_deviation_set(inst, id);
}

inline std::vector<Money> grid_points(const SdmInstance& inst, const std::string& id, DeviationGrid) {
  return deviation_set(inst, id);
}

}  // namespace detail

/// Re-runs the mechanism for every trader and every candidate misreport,
/// comparing exact expected utilities at the trader's true value. Returns
/// one report per (trader, deviation).
template <class Instance, class Mechanism>
std::vector<DeviationReport> truthfulness_audit(Mechanism&& mechanism, const Instance& inst,
                                                DeviationGrid grid = DeviationGrid::kBreakpoints) {
  std::vector<DeviationReport> reports;
  const OutcomeDistribution truthful = mechanism(inst);
  for (const auto& [id, entry] : value_book(inst)) {
    const Money& true_value = entry.second;
    const Money honest = expected_utility(truthful, id, true_value);
    for (const Money& lie : detail::grid_points(inst, id, grid)) {
      if (lie == true_value) continue;
      const Money deviating = expected_utility(mechanism(detail::with_value(inst, id, lie)), id, true_value);
      reports.push_back(DeviationReport{id, true_value, lie, honest, deviating, deviating > honest});
    }
  }
  return reports;
}

inline std::vector<DeviationReport> violations(const std::vector<DeviationReport>& reports) {
  std::vector<DeviationReport> out;
  std::copy_if(reports.begin(), reports.end(), std::back_inserter(out), [](const auto& r) { return r.violation; });
  return out;
}

enum class BudgetClass { kStrong, kSurplus, kDeficit, kMixed };

inline const char* to_string(BudgetClass c) {
  switch (c) {
    case BudgetClass::kStrong: return "strong";
    case BudgetClass::kSurplus: return "surplus";
    case BudgetClass::kDeficit: return "deficit";
    case BudgetClass::kMixed: return "mixed";
  }
  return "?";
}

/// Combines classifications of several outcomes (or distributions).
inline BudgetClass combine(BudgetClass a, BudgetClass b) {
  if (a == b || b == BudgetClass::kStrong) return a;
  if (a == BudgetClass::kStrong) return b;
  return BudgetClass::kMixed;
}

inline BudgetClass budget_audit(const OutcomeDistribution& dist) {
  BudgetClass out = BudgetClass::kStrong;
  for (const auto& br : dist.branches()) {
    const Money s = br.outcome.broker_surplus();
    out = combine(out, s == Money(0) ? BudgetClass::kStrong : s > Money(0) ? BudgetClass::kSurplus : BudgetClass::kDeficit);
  }
  return out;
}

struct IrViolation {
  std::size_t branch = 0;
  std::string trader_id;
  std::string reason;
};

/// Per branch: buyers pay at most their bid, sellers get at least their ask,
/// and every fill names a trader on the right side.
template <class Instance>
std::vector<IrViolation> ir_audit(const OutcomeDistribution& dist, const Instance& inst) {
  const ValueBook book = value_book(inst);
  std::vector<IrViolation> out;
  for (std::size_t b = 0; b < dist.size(); ++b) {
    const Outcome& o = dist.branches()[b].outcome;
    auto check = [&](const std::map<std::string, Money>& fills, Side side) {
      for (const auto& [id, price] : fills) {
        auto it = book.find(id);
        if (it == book.end()) {
          out.push_back({b, id, "unknown trader"});
        } else if (it->second.first != side) {
          out.push_back({b, id, std::string("filled as ") + sbba::to_string(side)});
        } else if (side == Side::kBuy && price > it->second.second) {
          out.push_back({b, id, "pays " + price.to_string() + " above bid " + it->second.second.to_string()});
        } else if (side == Side::kSell && price < it->second.second) {
          out.push_back({b, id, "receives " + price.to_string() + " below ask " + it->second.second.to_string()});
        }
      }
    };
    check(o.buyer_fills, Side::kBuy);
    check(o.seller_fills, Side::kSell);
  }
  return out;
}

class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Exhaustive optimum of an SDM instance: every subset of sellers and
/// buyers per market with equal totals, and every integer shipment matrix
/// that balances each market. Independent of the circulation solver.
inline Money brute_force_sdm_optimum(const SdmInstance& sdm) {
  sdm.validate();
  const std::size_t m = sdm.markets.size();
  if (m > 3) throw SizeLimitError("brute_force_sdm_optimum: more than 3 markets");
  std::vector<std::vector<const Order*>> by_market(m);
  for (const auto& o : sdm.traders) {
    const auto idx = static_cast<std::size_t>(
        std::find(sdm.markets.begin(), sdm.markets.end(), o.market) - sdm.markets.begin());
    by_market[idx].push_back(&o);
  }
  for (const auto& list : by_market)
    if (list.size() > 4) throw SizeLimitError("brute_force_sdm_optimum: more than 4 traders in a market");

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) pairs.emplace_back(i, j);

  // Cheapest shipment matrix for a net-supply vector, by enumeration.
  std::map<std::vector<long>, std::optional<Money>> memo;
  auto transport = [&](const std::vector<long>& net) -> std::optional<Money> {
    if (auto it = memo.find(net); it != memo.end()) return it->second;
    long bound = 0;
    for (long d : net) bound += std::max(0L, d);
    std::optional<Money> best;
    std::vector<long> x(pairs.size(), 0);
    while (true) {
      std::vector<long> balance(m, 0);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        balance[pairs[p].first] += x[p];
        balance[pairs[p].second] -= x[p];
      }
      if (balance == net) {
        Money cost;
        for (std::size_t p = 0; p < pairs.size(); ++p)
          cost += Money(x[p]) * sdm.transit_cost(sdm.markets[pairs[p].first], sdm.markets[pairs[p].second]);
        if (!best || cost < *best) best = cost;
      }
      std::size_t p = 0;
      while (p < x.size() && x[p] == bound) x[p++] = 0;
      if (p == x.size()) break;
      ++x[p];
    }
    memo[net] = best;
    return best;
  };

  Money best;
  std::vector<std::uint32_t> mask(m, 0);
  while (true) {
    long sellers = 0, buyers = 0;
    Money value;
    std::vector<long> net(m, 0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t t = 0; t < by_market[i].size(); ++t)
        if (mask[i] & (1u << t)) {
          const Order& o = *by_market[i][t];
          if (o.side == Side::kSell) {
            ++sellers;
            ++net[i];
            value -= o.value;
          } else {
            ++buyers;
            --net[i];
            value += o.value;
          }
        }
    if (sellers == buyers && sellers > 0) {
      if (auto cost = transport(net); cost && value - *cost > best) best = value - *cost;
    }
    std::size_t i = 0;
    while (i < m && mask[i] + 1 == (1u << by_market[i].size())) mask[i++] = 0;
    if (i == m) break;
    ++mask[i];
  }
  return best;
}

}  // namespace sbba::audit

#endif  // SBBA_AUDIT_HPP_
