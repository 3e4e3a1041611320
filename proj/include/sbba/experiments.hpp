#ifndef SBBA_EXPERIMENTS_HPP_
#define SBBA_EXPERIMENTS_HPP_

#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sbba/audit.hpp"
#include "sbba/generate.hpp"
#include "sbba/mechanisms.hpp"
#include "sbba/sdm.hpp"

namespace sbba::experiments {

// ---------------------------------------------------------------------------
// compare

enum class Family { kRandom, kAdversarial };

struct CompareConfig {
  std::vector<MechanismKind> mechanisms = all_single_market_mechanisms();
  std::size_t k_min = 5;
  std::size_t k_max = 5;
  std::size_t instances = 500;  // per k
  generate::ValueRange values{0, 100};
  std::uint64_t seed = 42;
  Family family = Family::kRandom;
  Money big{1000};
  Money eps{1};
};

struct CompareRow {
  std::string mechanism;
  std::size_t k = 0;
  std::size_t n_instances = 0;
  audit::BudgetClass budget = audit::BudgetClass::kStrong;
  Money mean_tgft_ratio;
  Money mean_mgft_ratio;
  Money min_mgft_ratio;
  Money bound;
  bool bound_satisfied = true;
};

/// Ratio the mechanism guarantees: traders' gain for the budget-balanced
/// ones, total gain for McAfee and VCG.
inline bool guarantees_market_gain(MechanismKind kind) {
  return kind == MechanismKind::kSbba || kind == MechanismKind::kSbbaDual;
}

inline std::vector<SingleMarketInstance> instances_for_k(const CompareConfig& cfg, std::size_t k,
                                                         generate::Rng& rng) {
  std::vector<SingleMarketInstance> out;
  if (cfg.family == Family::kAdversarial) {
    out.push_back(generate::adversarial(k, cfg.big, cfg.eps));
    return out;
  }
  for (std::size_t i = 0; i < cfg.instances; ++i) out.push_back(generate::random_with_k(rng, k, cfg.values));
  return out;
}

/// Rows sorted by mechanism name, then k. Instances with zero optimal gain
/// have no ratio and are skipped.
inline std::vector<CompareRow> compare(const CompareConfig& cfg) {
  generate::Rng rng(cfg.seed);
  std::map<std::pair<std::string, std::size_t>, CompareRow> rows;
  for (std::size_t k = cfg.k_min; k <= cfg.k_max; ++k) {
    const Money bound = Money(1) - Money(1, static_cast<std::int64_t>(k));
    for (const auto& inst : instances_for_k(cfg, k, rng)) {
      const Money opt = optimal_trade(inst).gain;
      if (opt == Money(0)) continue;
      for (auto kind : cfg.mechanisms) {
        const auto dist = run_mechanism(kind, inst);
        const Money tgft = total_gft(dist, inst) / opt;
        const Money mgft = expected_gft(dist, inst) / opt;
        auto key = std::make_pair(std::string(to_string(kind)), k);
        auto [it, fresh] = rows.try_emplace(key);
        CompareRow& row = it->second;
        if (fresh) {
          row.mechanism = key.first;
          row.k = k;
          row.bound = bound;
          row.min_mgft_ratio = mgft;
          row.budget = audit::budget_audit(dist);
        } else {
          row.budget = audit::combine(row.budget, audit::budget_audit(dist));
          row.min_mgft_ratio = min(row.min_mgft_ratio, mgft);
        }
        ++row.n_instances;
        row.mean_tgft_ratio += tgft;
        row.mean_mgft_ratio += mgft;
        if ((guarantees_market_gain(kind) ? mgft : tgft) < bound) row.bound_satisfied = false;
      }
    }
  }
  std::vector<CompareRow> out;
  for (auto& [key, row] : rows) {
    row.mean_tgft_ratio /= Money(static_cast<std::int64_t>(row.n_instances));
    row.mean_mgft_ratio /= Money(static_cast<std::int64_t>(row.n_instances));
    out.push_back(row);
  }
  return out;
}

inline std::string fixed6(const Money& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", m.to_double());
  return buf;
}

inline const char* kCompareCsvHeader =
    "mechanism,k,n_instances,budget_class,mean_tgft_ratio,mean_mgft_ratio,min_mgft_ratio,"
    "bound_1_minus_1_over_k,bound_satisfied";

inline std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << kCompareCsvHeader << "\n";
  for (const auto& r : rows)
    os << r.mechanism << ',' << r.k << ',' << r.n_instances << ',' << audit::to_string(r.budget) << ','
       << fixed6(r.mean_tgft_ratio) << ',' << fixed6(r.mean_mgft_ratio) << ',' << fixed6(r.min_mgft_ratio) << ','
       << fixed6(r.bound) << ',' << (r.bound_satisfied ? "true" : "false") << "\n";
  return os.str();
}

inline std::string compare_table(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %4s %6s %-8s %10s %10s %10s %8s %s\n", "mechanism", "k", "n", "budget",
                "TGFT/opt", "MGFT/opt", "min MGFT", "1-1/k", "bound");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-10s %4zu %6zu %-8s %10s %10s %10s %8s %s\n", r.mechanism.c_str(), r.k,
                  r.n_instances, audit::to_string(r.budget), fixed6(r.mean_tgft_ratio).c_str(),
                  fixed6(r.mean_mgft_ratio).c_str(), fixed6(r.min_mgft_ratio).c_str(), fixed6(r.bound).c_str(),
                  r.bound_satisfied ? "ok" : "VIOLATED");
    os << line;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// reproduce

struct Check {
  std::string label;
  std::string expected;
  std::string actual;
  bool ok = false;
};

struct Report {
  std::string name;
  std::vector<Check> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.ok) return false;
    return true;
  }

  template <class T, class U>
  void expect(std::string label, const T& expected, const U& actual) {
    std::ostringstream e, a;
    e << expected;
    a << actual;
    checks.push_back(Check{std::move(label), e.str(), a.str(), e.str() == a.str()});
  }

  void expect_true(std::string label, bool value) { expect(std::move(label), "true", value ? "true" : "false"); }

  std::string render() const {
    std::ostringstream os;
    os << "== " << name << "\n";
    for (const auto& c : checks)
      os << (c.ok ? "  ok    " : "  FAIL  ") << c.label << ": expected " << c.expected << ", got " << c.actual << "\n";
    os << (ok() ? "all checks passed\n" : "MISMATCH\n");
    return os.str();
  }
};

/// k-1 pairs (B, 0) and one pair (B-eps, eps).
inline Report reproduce_example1(std::size_t k, const Money& big, const Money& eps) {
  Report rep;
  rep.name = "example1 k=" + std::to_string(k) + " B=" + big.to_string() + " eps=" + eps.to_string();
  const auto inst = generate::adversarial(k, big, eps);
  const Money km1(static_cast<std::int64_t>(k - 1));
  const Money kk(static_cast<std::int64_t>(k));

  const auto opt = optimal_trade(inst);
  rep.expect("k", k, opt.k);
  rep.expect("optimal gain k*B - 2*eps", kk * big - Money(2) * eps, opt.gain);

  const auto mc = mcafee(inst);
  rep.expect("mcafee deals", k - 1, mc.branches().front().outcome.deals());
  rep.expect("mcafee TGFT (k-1)*B", km1 * big, total_gft(mc, inst));
  rep.expect("mcafee MGFT (k-1)*2*eps", km1 * Money(2) * eps, expected_gft(mc, inst));
  rep.expect("mcafee surplus (k-1)*(B-2*eps)", km1 * (big - Money(2) * eps), mc.branches().front().outcome.broker_surplus());

  // Price B-eps; each seller sits out with probability 1/k.
  const auto sb = sbba(inst);
  const Money sbba_closed = km1 * eps + km1 / kk * (kk * big - (kk + Money(1)) * eps);
  rep.expect("sbba branches", k, sb.size());
  rep.expect("sbba expected MGFT", sbba_closed, expected_gft(sb, inst));
  rep.expect("sbba TGFT = MGFT", expected_gft(sb, inst), total_gft(sb, inst));
  rep.expect("sbba budget", "strong", audit::to_string(audit::budget_audit(sb)));
  rep.expect_true("sbba MGFT >= (1-1/k)*opt", expected_gft(sb, inst) >= (Money(1) - Money(1) / kk) * opt.gain);

  const auto v = vcg(inst);
  rep.expect("vcg TGFT = opt", opt.gain, total_gft(v, inst));
  rep.expect("vcg budget", "deficit", audit::to_string(audit::budget_audit(v)));
  return rep;
}

namespace detail {

inline std::set<std::string> active_traders(const SdmResult& res, Side side, const MarketId& market,
                                            const SdmInstance& sdm) {
  std::map<std::string, MarketId> home;
  for (const auto& o : sdm.traders) home[o.id] = o.market;
  std::set<std::string> out;
  for (std::size_t e = 0; e < res.network.edges.size(); ++e) {
    const auto& edge = res.network.edges[e];
    const auto kind = side == Side::kBuy ? flow::EdgeKind::kBuyer : flow::EdgeKind::kSeller;
    if (edge.kind == kind && res.circulation.flow[e] > 0 && home[edge.label] == market) out.insert(edge.label);
  }
  return out;
}

inline std::string join(const std::set<std::string>& s) {
  std::string out = "{";
  for (const auto& x : s) out += (out.size() > 1 ? "," : "") + x;
  return out + "}";
}

inline long shipped(const SdmResult& res, const MarketId& from, const MarketId& to) {
  for (std::size_t e = 0; e < res.network.edges.size(); ++e) {
    const auto& edge = res.network.edges[e];
    if (edge.kind == flow::EdgeKind::kTransit && res.network.node_names[edge.from] == from &&
        res.network.node_names[edge.to] == to)
      return res.circulation.flow[e];
  }
  return 0;
}

inline void common_sdm_checks(Report& rep, const SdmInstance& sdm, const SdmResult& res) {
  rep.expect_true("circulation optimal (no negative residual cycle)", flow::is_optimal(res.network, res.circulation));
  rep.expect("verify_prices violations", 0, verify_prices(res.prices, res.partition).size());
  rep.expect("ir violations", 0, audit::ir_audit(res.distribution, sdm).size());
  rep.expect("budget", "strong", audit::to_string(audit::budget_audit(res.distribution)));
}

}  // namespace detail

inline Report reproduce_sdm_main() {
  Report rep;
  rep.name = "sdm-main";
  const auto sdm = generate::sdm_main_example();
  const auto res = sbba_sdm(sdm);
  rep.expect("circulation cost", -100, res.circulation.total_cost);
  rep.expect("market 1 active sellers", "{m1-s1,m1-s13,m1-s5,m1-s9}",
             detail::join(detail::active_traders(res, Side::kSell, "1", sdm)));
  rep.expect("market 1 active buyers", "{m1-b18,m1-b20}", detail::join(detail::active_traders(res, Side::kBuy, "1", sdm)));
  rep.expect("market 2 active sellers", "{m2-s19,m2-s2}", detail::join(detail::active_traders(res, Side::kSell, "2", sdm)));
  rep.expect("market 2 active buyers", "{m2-b23,m2-b28,m2-b32,m2-b36}",
             detail::join(detail::active_traders(res, Side::kBuy, "2", sdm)));
  rep.expect("units shipped 1->2", 2, detail::shipped(res, "1", "2"));
  rep.expect("components", 1, res.partition.components.size());
  rep.expect("delta(1,2)", 4, res.partition.delta_of("1", "2"));
  const auto& comp = res.components.front();
  rep.expect("k", 6, comp.ranking.k);
  rep.expect("b_k", 18, *comp.ranking.b_k);
  rep.expect("s_{k+1}", 17, comp.ranking.s_next);
  rep.expect("price setter", "seller", comp.price_setter == PriceSetter::kSeller ? "seller" : "buyer");
  rep.expect("p1", 17, res.prices.prices.at("1"));
  rep.expect("p2", 21, res.prices.prices.at("2"));
  rep.expect("branches", 1, res.distribution.size());
  rep.expect("deals", 6, res.distribution.branches().front().outcome.deals());
  rep.expect("GFT", 100, expected_gft(res.distribution, sdm));
  detail::common_sdm_checks(rep, sdm, res);
  return rep;
}

inline Report reproduce_sdm_appendix() {
  Report rep;
  rep.name = "sdm-appendix";
  const auto sdm = generate::sdm_appendix_example();
  const auto res = sbba_sdm(sdm);
  std::size_t efficient = 0;
  for (const auto& m : sdm.markets) efficient += detail::active_traders(res, Side::kBuy, m, sdm).size();
  rep.expect("efficient deals", 6, efficient);
  rep.expect("units shipped 1->2", 2, detail::shipped(res, "1", "2"));
  rep.expect("components", 1, res.partition.components.size());
  rep.expect("delta(1,2)", 4, res.partition.delta_of("1", "2"));
  const auto& comp = res.components.front();
  rep.expect("k", 6, comp.ranking.k);
  rep.expect("b_k", 16, *comp.ranking.b_k);
  rep.expect("s_{k+1}", 17, comp.ranking.s_next);
  rep.expect("price setter", "buyer", comp.price_setter == PriceSetter::kBuyer ? "buyer" : "seller");
  rep.expect("p1", 16, res.prices.prices.at("1"));
  rep.expect("p2", 20, res.prices.prices.at("2"));
  rep.expect("branches", 6, res.distribution.size());
  std::set<std::string> excluded_sellers;
  bool all_equiprobable = true, buyer16_out = true, five_deals = true;
  for (const auto& br : res.distribution.branches()) {
    all_equiprobable &= br.probability == Money(1, 6);
    buyer16_out &= br.outcome.buyer_fills.count("m1-b16") == 0;
    five_deals &= br.outcome.deals() == 5 && br.outcome.seller_fills.size() == 5;
    for (std::size_t i = 0; i < comp.ranking.k; ++i)
      if (!br.outcome.seller_fills.count(comp.ranking.sellers_asc[i].id))
        excluded_sellers.insert(comp.ranking.sellers_asc[i].id);
  }
  rep.expect_true("every branch has probability 1/6", all_equiprobable);
  rep.expect_true("buyer m1-b16 excluded in every branch", buyer16_out);
  rep.expect_true("5 deals in every branch", five_deals);
  rep.expect("distinct excluded cheap sellers", 6, excluded_sellers.size());
  detail::common_sdm_checks(rep, sdm, res);
  return rep;
}

}  // namespace sbba::experiments

#endif  // SBBA_EXPERIMENTS_HPP_
