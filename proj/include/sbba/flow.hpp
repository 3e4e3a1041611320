#ifndef SBBA_FLOW_HPP_
#define SBBA_FLOW_HPP_

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbba/money.hpp"

namespace sbba::flow {

enum class EdgeKind { kSeller, kBuyer, kTransit, kOther };

struct Edge {
  int from = 0;
  int to = 0;
  long capacity = 0;
  Money cost;
  EdgeKind kind = EdgeKind::kOther;
  std::string label;  // trader id for trader edges
};

/// Directed graph with integral capacities and rational costs.
struct FlowNetwork {
  std::vector<std::string> node_names;
  std::vector<Edge> edges;

  int add_node(std::string name) {
    node_names.push_back(std::move(name));
    return static_cast<int>(node_names.size()) - 1;
  }
  int add_edge(Edge e) {
    if (e.capacity < 0) throw std::invalid_argument("FlowNetwork: negative capacity");
    edges.push_back(std::move(e));
    return static_cast<int>(edges.size()) - 1;
  }
  int node_count() const { return static_cast<int>(node_names.size()); }
};

struct Circulation {
  std::vector<long> flow;  // per edge, integral
  Money total_cost;
};

/// Arc of the residual graph: edge index plus direction.
struct ResidualArc {
  int edge = 0;
  bool forward = true;
};

namespace detail {

inline std::vector<ResidualArc> residual_arcs(const FlowNetwork& net, const std::vector<long>& flow) {
  std::vector<ResidualArc> arcs;
  for (int e = 0; e < static_cast<int>(net.edges.size()); ++e) {
    if (flow[e] < net.edges[e].capacity) arcs.push_back({e, true});
    if (flow[e] > 0) arcs.push_back({e, false});
  }
  return arcs;
}

inline int arc_tail(const FlowNetwork& net, const ResidualArc& a) {
  return a.forward ? net.edges[a.edge].from : net.edges[a.edge].to;
}
inline int arc_head(const FlowNetwork& net, const ResidualArc& a) {
  return a.forward ? net.edges[a.edge].to : net.edges[a.edge].from;
}
inline Money arc_cost(const FlowNetwork& net, const ResidualArc& a) {
  return a.forward ? net.edges[a.edge].cost : -net.edges[a.edge].cost;
}

}  // namespace detail

/// Bellman-Ford from a virtual source attached to every node. Returns the
/// arcs of one negative-cost residual cycle, or nothing.
inline std::optional<std::vector<ResidualArc>> find_negative_cycle(const FlowNetwork& net,
                                                                  const std::vector<long>& flow) {
  const int n = net.node_count();
  if (n == 0) return std::nullopt;
  const auto arcs = detail::residual_arcs(net, flow);
  std::vector<Money> dist(n);
  std::vector<int> pred(n, -1);  // index into arcs
  int last = -1;
  for (int round = 0; round < n; ++round) {
    last = -1;
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
      const int u = detail::arc_tail(net, arcs[i]);
      const int v = detail::arc_head(net, arcs[i]);
      Money candidate = dist[u] + detail::arc_cost(net, arcs[i]);
      if (candidate < dist[v]) {
        dist[v] = std::move(candidate);
        pred[v] = i;
        last = v;
      }
    }
    if (last == -1) return std::nullopt;
  }
  // Still relaxing after n rounds: walk back n steps to land on the cycle.
  int v = last;
  for (int i = 0; i < n; ++i) v = detail::arc_tail(net, arcs[pred[v]]);
  std::vector<ResidualArc> cycle;
  int u = v;
  do {
    cycle.push_back(arcs[pred[u]]);
    u = detail::arc_tail(net, arcs[pred[u]]);
  } while (u != v);
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

inline Money circulation_cost(const FlowNetwork& net, const std::vector<long>& flow) {
  Money total;
  for (std::size_t e = 0; e < net.edges.size(); ++e)
    if (flow[e] != 0) total += net.edges[e].cost * Money(flow[e]);
  return total;
}

/// Minimum-cost circulation by negative-cycle canceling from the zero flow.
/// Integral capacities keep every intermediate flow integral.
inline Circulation min_cost_circulation(const FlowNetwork& net) {
  std::vector<long> flow(net.edges.size(), 0);
  while (auto cycle = find_negative_cycle(net, flow)) {
    long push = std::numeric_limits<long>::max();
    for (const auto& a : *cycle) {
      const long residual = a.forward ? net.edges[a.edge].capacity - flow[a.edge] : flow[a.edge];
      push = std::min(push, residual);
    }
    for (const auto& a : *cycle) flow[a.edge] += a.forward ? push : -push;
  }
  Circulation c{std::move(flow), Money()};
  c.total_cost = circulation_cost(net, c.flow);
  return c;
}

/// Conservation, capacity bounds and cost bookkeeping.
inline bool is_feasible(const FlowNetwork& net, const Circulation& c) {
  if (c.flow.size() != net.edges.size()) return false;
  std::vector<long> balance(net.node_count(), 0);
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    if (c.flow[e] < 0 || c.flow[e] > net.edges[e].capacity) return false;
    balance[net.edges[e].from] -= c.flow[e];
    balance[net.edges[e].to] += c.flow[e];
  }
  return std::all_of(balance.begin(), balance.end(), [](long b) { return b == 0; }) &&
         c.total_cost == circulation_cost(net, c.flow);
}

/// Optimality certificate: no negative cycle remains in the residual graph.
inline bool is_optimal(const FlowNetwork& net, const Circulation& c) {
  return is_feasible(net, c) && !find_negative_cycle(net, c.flow).has_value();
}

}  // namespace sbba::flow

#endif  // SBBA_FLOW_HPP_
