// Command-line front end: run mechanisms on instance files, audit them,
// compare them on generated instances, generate instances and reproduce
// the worked examples.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "sbba/alternatives.hpp"
#include "sbba/audit.hpp"
#include "sbba/experiments.hpp"
#include "sbba/generate.hpp"
#include "sbba/io.hpp"
#include "sbba/mechanisms.hpp"
#include "sbba/sdm.hpp"

namespace {

using namespace sbba;

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << text;
}

std::string describe(const OutcomeDistribution& dist) {
  std::ostringstream os;
  std::size_t i = 0;
  for (const auto& br : dist.branches()) {
    os << "branch " << ++i << "  p=" << br.probability << "  deals=" << br.outcome.deals()
       << "  broker=" << br.outcome.broker_surplus() << "\n";
    for (const auto& [id, p] : br.outcome.buyer_fills) os << "  buy   " << id << " pays " << p << "\n";
    for (const auto& [id, p] : br.outcome.seller_fills) os << "  sell  " << id << " gets " << p << "\n";
    for (const auto& s : br.outcome.shipments)
      os << "  ship  " << s.from << "->" << s.to << " x" << s.units << " @" << s.unit_cost << "\n";
  }
  return os.str();
}

MechanismKind mechanism_or_throw(const std::string& name) {
  if (auto kind = parse_mechanism(name)) return *kind;
  throw CLI::ValidationError("--mechanism", "unknown mechanism '" + name + "'");
}

struct AuditTally {
  std::size_t instances = 0;
  std::size_t deviations = 0;
  std::size_t truth_violations = 0;
  std::size_t ir_violations = 0;
  std::size_t budget_failures = 0;
  std::string first_failure;

  void note(const std::string& what) {
    if (first_failure.empty()) first_failure = what;
  }
};

// Budget class each mechanism must produce: SBB for the SBBA family, weak
// BB for McAfee, deficit-or-balanced for VCG.
bool budget_ok(const std::string& mechanism, audit::BudgetClass c) {
  using audit::BudgetClass;
  if (mechanism == "mcafee") return c == BudgetClass::kStrong || c == BudgetClass::kSurplus;
  if (mechanism == "vcg") return c == BudgetClass::kStrong || c == BudgetClass::kDeficit;
  return c == BudgetClass::kStrong;
}

template <class Instance, class Mechanism>
void audit_one(const std::string& name, Mechanism&& mech, const Instance& inst, AuditTally& tally) {
  ++tally.instances;
  const auto reports = audit::truthfulness_audit(mech, inst);
  tally.deviations += reports.size();
  for (const auto& r : audit::violations(reports)) {
    ++tally.truth_violations;
    tally.note(name + ": " + r.trader_id + " gains by reporting " + r.deviation_value.to_string() + " instead of " +
               r.true_value.to_string());
  }
  const auto dist = mech(inst);
  for (const auto& v : audit::ir_audit(dist, inst)) {
    ++tally.ir_violations;
    tally.note(name + ": IR " + v.trader_id + " " + v.reason);
  }
  if (!budget_ok(name, audit::budget_audit(dist))) {
    ++tally.budget_failures;
    tally.note(name + ": budget " + audit::to_string(audit::budget_audit(dist)));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-auction mechanisms with an exact audit engine"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run a mechanism on an instance file");
  std::string run_in, run_mech = "sbba", run_format = "table", run_out;
  std::uint64_t run_seed = 0;
  bool run_sample = false;
  run->add_option("instance", run_in, "Instance JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--mechanism", run_mech, "sbba | sbba_dual | mcafee | vcg (SDM files always use sbba_sdm)");
  run->add_option("--format", run_format, "table | json")->check(CLI::IsMember({"table", "json"}));
  run->add_option("--out", run_out, "Write output here instead of stdout");
  run->add_flag("--sample", run_sample, "Draw one branch instead of printing the distribution");
  run->add_option("--seed", run_seed, "Seed for --sample");

  // audit
  auto* aud = app.add_subcommand("audit", "Truthfulness, IR and budget audits");
  std::string aud_in, aud_format = "table", aud_out;
  std::vector<std::string> aud_mechs;
  std::size_t aud_instances = 200;
  std::uint64_t aud_seed = 1;
  long aud_max = 20;
  bool aud_sdm = false, aud_negative = false;
  aud->add_option("instance", aud_in, "Instance JSON file (omit to audit a generated suite)")->check(CLI::ExistingFile);
  aud->add_option("--mechanism", aud_mechs, "Mechanisms to audit (default: all)");
  aud->add_option("--instances", aud_instances, "Generated suite size");
  aud->add_option("--seed", aud_seed, "Generator seed");
  aud->add_option("--max-value", aud_max, "Generated values are integers in [0, max]");
  aud->add_flag("--sdm", aud_sdm, "Audit sbba_sdm on generated spatial instances (<= 3 markets)");
  aud->add_flag("--negative-control", aud_negative, "Also audit the deterministic-exclusion variant (expected to fail)");
  aud->add_option("--format", aud_format, "table | json")->check(CLI::IsMember({"table", "json"}));
  aud->add_option("--out", aud_out, "Write output here instead of stdout");

  // compare
  auto* cmp = app.add_subcommand("compare", "Compare mechanisms on generated instances");
  experiments::CompareConfig cfg;
  std::vector<std::string> cmp_mechs;
  std::string cmp_format = "table", cmp_out, cmp_family = "random", cmp_big = "1000", cmp_eps = "1";
  cmp->add_option("--mechanism", cmp_mechs, "Mechanisms (default: all)");
  cmp->add_option("--k-min", cfg.k_min, "Smallest k")->check(CLI::PositiveNumber);
  cmp->add_option("--k-max", cfg.k_max, "Largest k")->check(CLI::PositiveNumber);
  cmp->add_option("--instances", cfg.instances, "Instances per k");
  cmp->add_option("--seed", cfg.seed, "Generator seed");
  cmp->add_option("--min-value", cfg.values.lo, "Smallest generated value");
  cmp->add_option("--max-value", cfg.values.hi, "Largest generated value");
  cmp->add_option("--family", cmp_family, "random | adversarial")->check(CLI::IsMember({"random", "adversarial"}));
  cmp->add_option("--B", cmp_big, "Adversarial family: large value");
  cmp->add_option("--eps", cmp_eps, "Adversarial family: small value");
  cmp->add_option("--format", cmp_format, "table | csv | json")->check(CLI::IsMember({"table", "csv", "json"}));
  cmp->add_option("--out", cmp_out, "Write output here instead of stdout");

  // generate
  auto* gen = app.add_subcommand("generate", "Write a generated instance file");
  std::size_t gen_buyers = 5, gen_sellers = 5, gen_k = 4, gen_markets = 2, gen_max_traders = 4;
  long gen_lo = 0, gen_hi = 100, gen_transit = 0;
  std::uint64_t gen_seed = 42;
  std::string gen_out, gen_big = "1000", gen_eps = "1";
  bool gen_adv = false, gen_sdm = false;
  gen->add_option("--buyers", gen_buyers, "Number of buyers")->check(CLI::PositiveNumber);
  gen->add_option("--sellers", gen_sellers, "Number of sellers")->check(CLI::PositiveNumber);
  gen->add_option("--min-value", gen_lo, "Smallest value");
  gen->add_option("--max-value", gen_hi, "Largest value");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_flag("--adversarial", gen_adv, "k-1 pairs (B, 0) plus (B-eps, eps)");
  gen->add_option("--k", gen_k, "Adversarial family: k");
  gen->add_option("--B", gen_big, "Adversarial family: B");
  gen->add_option("--eps", gen_eps, "Adversarial family: eps");
  gen->add_flag("--sdm", gen_sdm, "Spatially distributed instance");
  gen->add_option("--markets", gen_markets, "SDM: number of markets")->check(CLI::PositiveNumber);
  gen->add_option("--transit", gen_transit, "SDM: fixed transit cost (default: random in [1,6])");
  gen->add_option("--max-traders", gen_max_traders, "SDM: traders per market, at most");
  gen->add_option("--out", gen_out, "Write output here instead of stdout");

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "Recompute the worked examples and assert exact equality");
  std::string rep_which, rep_big = "10", rep_eps = "1";
  std::size_t rep_k = 3;
  rep->add_option("example", rep_which, "example1 | sdm-main | sdm-appendix")
      ->required()
      ->check(CLI::IsMember({"example1", "sdm-main", "sdm-appendix"}));
  rep->add_option("--k", rep_k, "example1: k (>= 2)");
  rep->add_option("--B", rep_big, "example1: B");
  rep->add_option("--eps", rep_eps, "example1: eps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto inst = io::parse_instance_file(run_in);
      OutcomeDistribution dist = OutcomeDistribution::deterministic(Outcome{});
      std::string header;
      if (const auto* sdm = std::get_if<SdmInstance>(&inst)) {
        const auto res = sbba_sdm(*sdm);
        dist = res.distribution;
        std::ostringstream os;
        os << "mechanism sbba_sdm, circulation cost " << res.circulation.total_cost << "\n";
        for (const auto& [m, p] : res.prices.prices) os << "price " << m << " = " << p << "\n";
        header = os.str();
      } else {
        dist = run_mechanism(mechanism_or_throw(run_mech), std::get<SingleMarketInstance>(inst));
        header = "mechanism " + run_mech + "\n";
      }
      if (run_sample) {
        generate::Rng rng(run_seed);
        dist = OutcomeDistribution::deterministic(sample(dist, rng));
      }
      if (run_format == "json")
        emit(io::to_json(dist).dump(2) + "\n", run_out);
      else
        emit(header + describe(dist), run_out);
      return 0;
    }

    if (*aud) {
      std::vector<std::string> names = aud_mechs;
      if (names.empty())
        for (auto k : all_single_market_mechanisms()) names.emplace_back(to_string(k));
      std::map<std::string, AuditTally> tallies;
      auto audit_single = [&](const SingleMarketInstance& inst) {
        for (const auto& name : names) {
          const auto kind = mechanism_or_throw(name);
          audit_one(name, [kind](const SingleMarketInstance& x) { return run_mechanism(kind, x); }, inst,
                    tallies[name]);
        }
        if (aud_negative) {
          auto& t = tallies["negative_control"];
          ++t.instances;
          const auto reports = audit::truthfulness_audit(alternatives::sbba_deterministic_exclusion, inst);
          t.deviations += reports.size();
          t.truth_violations += audit::violations(reports).size();
        }
      };
      auto audit_sdm = [&](const SdmInstance& sdm) {
        auto mech = [](const SdmInstance& x) { return sbba_sdm(x).distribution; };
        audit_one("sbba_sdm", mech, sdm, tallies["sbba_sdm"]);
        const auto res = sbba_sdm(sdm);
        for (const auto& v : verify_prices(res.prices, res.partition)) {
          ++tallies["sbba_sdm"].budget_failures;
          tallies["sbba_sdm"].note("price " + v.market + ": " + v.reason);
        }
      };
      if (!aud_in.empty()) {
        const auto inst = io::parse_instance_file(aud_in);
        if (const auto* sdm = std::get_if<SdmInstance>(&inst))
          audit_sdm(*sdm);
        else
          audit_single(std::get<SingleMarketInstance>(inst));
      } else {
        generate::Rng rng(aud_seed);
        for (std::size_t i = 0; i < aud_instances; ++i) {
          if (aud_sdm) {
            generate::SdmSpec spec;
            spec.markets = static_cast<std::size_t>(generate::uniform(rng, 1, 3));
            spec.values = {0, aud_max};
            audit_sdm(generate::random_sdm(rng, spec));
          } else {
            const auto nb = static_cast<std::size_t>(generate::uniform(rng, 1, 6));
            const auto ns = static_cast<std::size_t>(generate::uniform(rng, 1, 6));
            audit_single(generate::random_single_market(rng, nb, ns, {0, aud_max}));
          }
        }
      }
      bool failed = false;
      std::ostringstream os;
      io::Json js = io::Json::array();
      for (const auto& [name, t] : tallies) {
        const bool control = name == "negative_control";
        const bool ok = control ? t.truth_violations > 0
                                : t.truth_violations == 0 && t.ir_violations == 0 && t.budget_failures == 0;
        failed |= !ok;
        os << name << ": instances=" << t.instances << " deviations=" << t.deviations
           << " truth_violations=" << t.truth_violations << " ir_violations=" << t.ir_violations
           << " budget_failures=" << t.budget_failures << (ok ? "  PASS" : "  FAIL") << "\n";
        if (!t.first_failure.empty() && !control) os << "  first failure: " << t.first_failure << "\n";
        js.push_back(io::Json{{"mechanism", name},
                              {"instances", t.instances},
                              {"deviations", t.deviations},
                              {"truth_violations", t.truth_violations},
                              {"ir_violations", t.ir_violations},
                              {"budget_failures", t.budget_failures},
                              {"pass", ok}});
      }
      emit(aud_format == "json" ? js.dump(2) + "\n" : os.str(), aud_out);
      return failed ? 1 : 0;
    }

    if (*cmp) {
      if (cfg.k_min > cfg.k_max) throw CLI::ValidationError("--k-min", "must not exceed --k-max");
      if (!cmp_mechs.empty()) {
        cfg.mechanisms.clear();
        for (const auto& m : cmp_mechs) cfg.mechanisms.push_back(mechanism_or_throw(m));
      }
      cfg.family = cmp_family == "adversarial" ? experiments::Family::kAdversarial : experiments::Family::kRandom;
      cfg.big = Money::parse(cmp_big);
      cfg.eps = Money::parse(cmp_eps);
      if (cfg.family == experiments::Family::kAdversarial && cfg.k_min < 2)
        throw CLI::ValidationError("--k-min", "adversarial family needs k >= 2");
      const auto rows = experiments::compare(cfg);
      if (cmp_format == "csv") {
        emit(experiments::compare_csv(rows), cmp_out);
      } else if (cmp_format == "json") {
        io::Json js = io::Json::array();
        for (const auto& r : rows)
          js.push_back(io::Json{{"mechanism", r.mechanism},
                                {"k", r.k},
                                {"n_instances", r.n_instances},
                                {"budget_class", audit::to_string(r.budget)},
                                {"mean_tgft_ratio", r.mean_tgft_ratio.to_string()},
                                {"mean_mgft_ratio", r.mean_mgft_ratio.to_string()},
                                {"min_mgft_ratio", r.min_mgft_ratio.to_string()},
                                {"bound_1_minus_1_over_k", r.bound.to_string()},
                                {"bound_satisfied", r.bound_satisfied}});
        emit(js.dump(2) + "\n", cmp_out);
      } else {
        emit(experiments::compare_table(rows), cmp_out);
      }
      return 0;
    }

    if (*gen) {
      io::Instance inst;
      if (gen_sdm) {
        generate::Rng rng(gen_seed);
        generate::SdmSpec spec;
        spec.markets = gen_markets;
        spec.max_traders_per_market = gen_max_traders;
        spec.values = {gen_lo, gen_hi};
        if (gen_transit > 0) spec.transit = {gen_transit, gen_transit};
        inst = generate::random_sdm(rng, spec);
      } else if (gen_adv) {
        inst = generate::adversarial(gen_k, Money::parse(gen_big), Money::parse(gen_eps));
      } else {
        generate::Rng rng(gen_seed);
        inst = generate::random_single_market(rng, gen_buyers, gen_sellers, {gen_lo, gen_hi});
      }
      emit(io::serialize(inst), gen_out);
      return 0;
    }

    if (*rep) {
      experiments::Report report;
      if (rep_which == "example1") {
        if (rep_k < 2) throw CLI::ValidationError("--k", "example1 needs k >= 2");
        report = experiments::reproduce_example1(rep_k, Money::parse(rep_big), Money::parse(rep_eps));
      } else if (rep_which == "sdm-main") {
        report = experiments::reproduce_sdm_main();
      } else {
        report = experiments::reproduce_sdm_appendix();
      }
      std::cout << report.render();
      return report.ok() ? 0 : 1;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
