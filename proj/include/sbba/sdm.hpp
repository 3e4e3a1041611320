#ifndef SBBA_SDM_HPP_
#define SBBA_SDM_HPP_

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sbba/flow.hpp"
#include "sbba/mechanisms.hpp"
#include "sbba/money.hpp"
#include "sbba/order.hpp"
#include "sbba/outcome.hpp"
#include "sbba/ranking.hpp"

namespace sbba {

using MarketPair = std::pair<MarketId, MarketId>;

/// Several markets with a positive transit cost for every ordered pair.
struct SdmInstance {
  std::vector<MarketId> markets;
  std::map<MarketPair, Money> transit;
  std::vector<Order> traders;

  friend bool operator==(const SdmInstance&, const SdmInstance&) = default;

  const Money& transit_cost(const MarketId& from, const MarketId& to) const {
    auto it = transit.find({from, to});
    if (it == transit.end()) throw ValidationError("no transit cost for " + from + "->" + to);
    return it->second;
  }

  std::size_t seller_count() const {
    return static_cast<std::size_t>(
        std::count_if(traders.begin(), traders.end(), [](const Order& o) { return o.side == Side::kSell; }));
  }

  void validate() const {
    std::set<MarketId> known;
    for (const auto& m : markets) {
      if (m.empty()) throw ValidationError("empty market id");
      if (!known.insert(m).second) throw ValidationError("duplicate market id '" + m + "'");
    }
    for (const auto& [pair, cost] : transit) {
      if (!known.count(pair.first) || !known.count(pair.second) || pair.first == pair.second)
        throw ValidationError("transit entry " + pair.first + "->" + pair.second + " does not name two markets");
      if (cost <= Money(0))
        throw ValidationError("transit cost " + pair.first + "->" + pair.second + " must be positive, got " +
                              cost.to_string());
    }
    for (const auto& i : markets)
      for (const auto& j : markets)
        if (i != j && !transit.count({i, j})) throw ValidationError("missing transit cost " + i + "->" + j);
    std::set<std::string> ids;
    for (const auto& o : traders) {
      if (!known.count(o.market))
        throw ValidationError("trader '" + o.id + "' references unknown market '" + o.market + "'");
      if (o.value < Money(0)) throw ValidationError("trader '" + o.id + "' has negative value");
      if (!ids.insert(o.id).second) throw ValidationError("duplicate trader id '" + o.id + "'");
    }
  }

  /// Wraps a single-market instance as a one-market SDM instance.
  static SdmInstance from_single_market(const SingleMarketInstance& inst) {
    SdmInstance sdm;
    sdm.markets = {kDefaultMarket};
    sdm.traders = inst.buyers;
    sdm.traders.insert(sdm.traders.end(), inst.sellers.begin(), inst.sellers.end());
    for (auto& o : sdm.traders) o.market = kDefaultMarket;
    return sdm;
  }
};

inline ValueBook value_book(const SdmInstance& inst) {
  ValueBook book;
  for (const auto& o : inst.traders) book[o.id] = {o.side, o.value};
  return book;
}

/// Agents node 0, then one node per market in instance order. Trader edges
/// come first in trader order, then one transit edge per ordered pair.
inline flow::FlowNetwork build_flow_network(const SdmInstance& sdm) {
  sdm.validate();
  flow::FlowNetwork net;
  const int agents = net.add_node("Agents");
  std::map<MarketId, int> node;
  for (const auto& m : sdm.markets) node[m] = net.add_node(m);
  for (const auto& o : sdm.traders) {
    if (o.side == Side::kSell)
      net.add_edge({agents, node[o.market], 1, o.value, flow::EdgeKind::kSeller, o.id});
    else
      net.add_edge({node[o.market], agents, 1, -o.value, flow::EdgeKind::kBuyer, o.id});
  }
  // No transit edge can carry more units than there are sellers; one spare
  // unit keeps the forward residual arc alive when every seller ships.
  const long unbounded = static_cast<long>(sdm.seller_count()) + 1;
  for (const auto& i : sdm.markets)
    for (const auto& j : sdm.markets)
      if (i != j) net.add_edge({node[i], node[j], unbounded, sdm.transit_cost(i, j), flow::EdgeKind::kTransit, ""});
  return net;
}

class NoDeltaError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Markets grouped by positive inter-market flow, with the fixed price
/// offsets Δ(i,j) = p_j - p_i inside each group.
struct ComponentPartition {
  std::vector<std::vector<MarketId>> components;  // each sorted; ordered by first id
  std::map<MarketPair, Money> delta;

  std::size_t component_of(const MarketId& m) const {
    for (std::size_t c = 0; c < components.size(); ++c)
      if (std::find(components[c].begin(), components[c].end(), m) != components[c].end()) return c;
    throw std::out_of_range("unknown market '" + m + "'");
  }

  const Money& delta_of(const MarketId& i, const MarketId& j) const {
    auto it = delta.find({i, j});
    if (it == delta.end()) throw NoDeltaError("markets " + i + " and " + j + " are in different components");
    return it->second;
  }
};

/// Components from transit edges with positive flow; Δ(i,j) is the
/// cheapest path from i to j over residual transit arcs.
inline ComponentPartition components_and_deltas(const flow::FlowNetwork& net, const flow::Circulation& circ) {
  // Market nodes are 1..n-1.
  const int n = net.node_count() - 1;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  std::vector<std::vector<std::optional<Money>>> dist(n, std::vector<std::optional<Money>>(n));
  for (int i = 0; i < n; ++i) dist[i][i] = Money(0);
  auto relax = [&](int u, int v, const Money& cost) {
    if (!dist[u][v] || cost < *dist[u][v]) dist[u][v] = cost;
  };
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto& edge = net.edges[e];
    if (edge.kind != flow::EdgeKind::kTransit) continue;
    const int u = edge.from - 1;
    const int v = edge.to - 1;
    if (circ.flow[e] < edge.capacity) relax(u, v, edge.cost);
    if (circ.flow[e] > 0) {
      relax(v, u, -edge.cost);
      parent[find(u)] = find(v);
    }
  }
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i) {
      if (!dist[i][m]) continue;
      for (int j = 0; j < n; ++j)
        if (dist[m][j]) relax(i, j, *dist[i][m] + *dist[m][j]);
    }

  std::map<int, std::vector<MarketId>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(net.node_names[i + 1]);
  ComponentPartition out;
  for (auto& [root, members] : groups) {
    std::sort(members.begin(), members.end());
    out.components.push_back(members);
  }
  std::sort(out.components.begin(), out.components.end());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (find(i) == find(j)) {
        if (!dist[i][j]) throw std::logic_error("components_and_deltas: unreachable market inside a component");
        out.delta[{net.node_names[i + 1], net.node_names[j + 1]}] = *dist[i][j];
      }
  return out;
}

struct PriceVector {
  std::map<MarketId, Money> prices;  // markets whose component trades nothing are absent

  friend bool operator==(const PriceVector&, const PriceVector&) = default;
};

enum class PriceSetter { kNone, kSeller, kBuyer };

/// Per-component trace of the pricing step.
struct ComponentResult {
  std::vector<MarketId> markets;
  MarketId anchor;
  Ranking ranking;  // traders translated into the anchor market
  PriceSetter price_setter = PriceSetter::kNone;
  std::optional<Money> anchor_price;
};

struct SdmResult {
  flow::FlowNetwork network;
  flow::Circulation circulation;
  ComponentPartition partition;
  std::vector<ComponentResult> components;
  PriceVector prices;
  OutcomeDistribution distribution = OutcomeDistribution::deterministic(Outcome{});
};

/// Cheapest way to carry goods between markets so that each market's
/// winning sellers cover its winning buyers. Uses the circulation solver
/// with a reward large enough that every unit is moved.
inline std::vector<Shipment> plan_shipments(const SdmInstance& sdm, const std::vector<MarketId>& markets,
                                            const std::map<MarketId, long>& supply,
                                            const std::map<MarketId, long>& demand) {
  flow::FlowNetwork net;
  const int agents = net.add_node("Agents");
  std::map<MarketId, int> node;
  for (const auto& m : markets) node[m] = net.add_node(m);
  long units = 0;
  Money reward(1);
  for (const auto& i : markets)
    for (const auto& j : markets)
      if (i != j) reward += sdm.transit_cost(i, j);
  for (const auto& [m, n] : supply) units += n;
  reward *= Money(units);
  reward += Money(1);
  for (const auto& m : markets) {
    auto s = supply.find(m);
    auto d = demand.find(m);
    if (s != supply.end() && s->second > 0) net.add_edge({agents, node[m], s->second, -reward});
    if (d != demand.end() && d->second > 0) net.add_edge({node[m], agents, d->second, -reward});
  }
  std::vector<std::pair<MarketPair, int>> transit_edges;
  for (const auto& i : markets)
    for (const auto& j : markets)
      if (i != j)
        transit_edges.push_back(
            {{i, j}, net.add_edge({node[i], node[j], units, sdm.transit_cost(i, j), flow::EdgeKind::kTransit})});
  const auto circ = flow::min_cost_circulation(net);
  long moved = 0;
  for (std::size_t e = 0; e < net.edges.size(); ++e)
    if (net.edges[e].from == agents) moved += circ.flow[e];
  if (moved != units) throw std::logic_error("plan_shipments: supply and demand do not balance");
  std::vector<Shipment> out;
  for (const auto& [pair, e] : transit_edges)
    if (circ.flow[e] > 0) out.push_back(Shipment{pair.first, pair.second, circ.flow[e], net.edges[e].cost});
  return out;
}

namespace detail {

inline Outcome merge(Outcome a, const Outcome& b) {
  a.buyer_fills.insert(b.buyer_fills.begin(), b.buyer_fills.end());
  a.seller_fills.insert(b.seller_fills.begin(), b.seller_fills.end());
  a.shipments.insert(a.shipments.end(), b.shipments.begin(), b.shipments.end());
  return a;
}

inline Outcome component_outcome(const SdmInstance& sdm, const ComponentResult& comp, const PriceVector& prices,
                                 const std::vector<const Order*>& buyers, const std::vector<const Order*>& sellers,
                                 const std::map<std::string, MarketId>& home) {
  Outcome o;
  std::map<MarketId, long> supply, demand;
  for (const Order* b : buyers) {
    const MarketId& m = home.at(b->id);
    o.buyer_fills.emplace(b->id, prices.prices.at(m));
    ++demand[m];
  }
  for (const Order* s : sellers) {
    const MarketId& m = home.at(s->id);
    o.seller_fills.emplace(s->id, prices.prices.at(m));
    ++supply[m];
  }
  if (comp.markets.size() > 1) o.shipments = plan_shipments(sdm, comp.markets, supply, demand);
  return o;
}

}  // namespace detail

/// Runs the strongly-budget-balanced mechanism on a spatially distributed
/// market: optimal circulation, components and offsets, then a single-market
/// SBBA per component after moving every trader into the component's anchor
/// market (the smallest market id).
inline SdmResult sbba_sdm(const SdmInstance& sdm) {
  SdmResult result;
  result.network = build_flow_network(sdm);
  result.circulation = flow::min_cost_circulation(result.network);
  result.partition = components_and_deltas(result.network, result.circulation);

  std::map<std::string, MarketId> home;
  for (const auto& o : sdm.traders) home[o.id] = o.market;

  std::vector<std::vector<Branch>> per_component;
  for (const auto& markets : result.partition.components) {
    ComponentResult comp;
    comp.markets = markets;
    comp.anchor = markets.front();
    std::vector<Order> buyers, sellers;
    for (const auto& o : sdm.traders) {
      if (std::find(markets.begin(), markets.end(), o.market) == markets.end()) continue;
      Order moved = o;
      moved.value -= result.partition.delta_of(comp.anchor, o.market);
      moved.market = comp.anchor;
      (o.side == Side::kBuy ? buyers : sellers).push_back(std::move(moved));
    }
    comp.ranking = rank_orders(std::move(buyers), std::move(sellers));
    const Ranking& r = comp.ranking;

    std::vector<Branch> branches;
    if (r.k == 0) {
      branches.push_back(Branch{Money(1), Outcome{}});
    } else {
      const Money& b_k = *r.b_k;
      const bool seller_sets = r.s_next <= b_k;
      comp.price_setter = seller_sets ? PriceSetter::kSeller : PriceSetter::kBuyer;
      comp.anchor_price = seller_sets ? r.s_next.value() : b_k;
      for (const auto& m : markets)
        result.prices.prices[m] = *comp.anchor_price + result.partition.delta_of(comp.anchor, m);
      if (seller_sets) {
        branches.push_back(Branch{Money(1), detail::component_outcome(sdm, comp, result.prices,
                                                                      detail::prefix(r.buyers_desc, r.k),
                                                                      detail::prefix(r.sellers_asc, r.k), home)});
      } else {
        const auto trading_buyers = detail::prefix(r.buyers_desc, r.k - 1);
        const Money p(1, static_cast<std::int64_t>(r.k));
        for (std::size_t excluded = 0; excluded < r.k; ++excluded)
          branches.push_back(Branch{p, detail::component_outcome(sdm, comp, result.prices, trading_buyers,
                                                                 detail::prefix(r.sellers_asc, r.k, excluded), home)});
      }
    }
    per_component.push_back(std::move(branches));
    result.components.push_back(std::move(comp));
  }

  // Independent lotteries per component: take the product.
  std::vector<Branch> combined{Branch{Money(1), Outcome{}}};
  for (const auto& branches : per_component) {
    std::vector<Branch> next;
    for (const auto& acc : combined)
      for (const auto& br : branches)
        next.push_back(Branch{acc.probability * br.probability, detail::merge(acc.outcome, br.outcome)});
    combined = std::move(next);
  }
  result.distribution = OutcomeDistribution(std::move(combined));
  return result;
}

struct PriceViolation {
  MarketId market;
  Money price;
  std::string reason;
};

/// Non-negative prices and p_j = p_i + Δ(i,j) inside every component.
inline std::vector<PriceViolation> verify_prices(const PriceVector& pv, const ComponentPartition& partition) {
  std::vector<PriceViolation> out;
  for (const auto& [m, p] : pv.prices)
    if (p < Money(0)) out.push_back({m, p, "negative price"});
  for (const auto& [pair, delta] : partition.delta) {
    auto pi = pv.prices.find(pair.first);
    auto pj = pv.prices.find(pair.second);
    if (pi == pv.prices.end() && pj == pv.prices.end()) continue;
    if (pi == pv.prices.end() || pj == pv.prices.end()) {
      out.push_back({pi == pv.prices.end() ? pair.first : pair.second, Money(), "unpriced market in priced component"});
      continue;
    }
    if (pj->second != pi->second + delta)
      out.push_back({pair.second, pj->second,
                     "expected " + (pi->second + delta).to_string() + " = p(" + pair.first + ") + delta " +
                         delta.to_string()});
  }
  return out;
}

}  // namespace sbba

#endif  // SBBA_SDM_HPP_
