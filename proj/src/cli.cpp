#include "bgt/cli.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "bgt/continuous.hpp"
#include "bgt/io.hpp"
#include "bgt/offline_general.hpp"
#include "bgt/online.hpp"
#include "bgt/oracle.hpp"
#include "bgt/pinwheel.hpp"

namespace bgt {

namespace {

Rational option_rational(const std::string& text, const std::string& name) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw InputError("option " + name + ": " + e.what());
  }
}

std::string approx_decimal(const Rational& v) {
  std::ostringstream os;
  os << std::setprecision(6) << to_double(v);
  return os.str();
}

void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

std::size_t budget_or_default(std::size_t budget) {
  return budget == 0 ? default_state_budget() : budget;
}

Instance load_instance(const std::string& path) {
  if (path.empty()) throw InputError("an instance file is required");
  return instance_from_json(read_json_file(path));
}

const MetricInstance& require_metric(const Instance& inst) {
  if (!inst.metric) throw InputError("field 'travel' is required for continuous instances");
  return *inst.metric;
}

Json certification(const SimulationReport& rep, const Rational& bound, const Rational& H,
                   const std::optional<Rational>& opt) {
  Json doc = report_to_json(rep);
  doc["bound"] = rational_json(bound);
  doc["bound_satisfied"] = rep.global_max <= bound;
  doc["ratio_vs_H"] = rational_json(rep.global_max / H);
  if (opt) {
    doc["oracle_opt"] = rational_json(*opt);
    doc["ratio_vs_oracle"] = rational_json(rep.global_max / *opt);
  }
  return doc;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string family;
  std::size_t n = 0;
  std::string head = "1/4";
  std::uint64_t seed = 1;
  std::uint64_t k = 5;
  std::string x = "3/2";
  std::string eps = "1/16";
  std::string name = "715";
  std::string out;
};

RateVector named_instance(const std::string& name) {
  if (name == "715") {
    return RateVector({make_rational(7, 15), make_rational(1, 3), make_rational(1, 5)});
  }
  if (name == "half") return RateVector({make_rational(1, 2), make_rational(1, 4), make_rational(1, 4)});
  throw InputError("option --name: unknown instance '" + name + "' (use 715 or half)");
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  RateVector rates;
  if (a.family == "uniform") {
    if (a.n == 0) throw InputError("option --n must be positive");
    rates = RateVector(std::vector<Rational>(a.n, make_rational(1, static_cast<std::int64_t>(a.n))));
  } else if (a.family == "random") {
    Rational head = option_rational(a.head, "--head");
    std::size_t n = a.n == 0 ? planted_min_n(head) : a.n;
    rates = random_planted_rates(a.seed, n, head);
  } else if (a.family == "rm127") {
    rates = gen_reduce_max_12_7_family(a.k);
  } else if (a.family == "rf") {
    rates = gen_reduce_fastest_lb(option_rational(a.x, "--x"), option_rational(a.eps, "--eps"));
  } else if (a.family == "example") {
    rates = named_instance(a.name);
  } else {
    throw InputError("unknown family '" + a.family + "'");
  }
  emit(out, a.out, instance_to_json(rates).dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- simulate / run

struct StrategyArgs {
  std::string strategy;
  std::string x = "1";
  std::string threshold_base;
  std::string family;
  std::uint64_t k = 5;
  std::string eps = "1/16";
  std::string instance;
  std::uint64_t horizon = 0;
  std::string trace;
};

struct StrategyOutcome {
  RateVector rates;
  StrategyRun run;
  std::uint64_t horizon = 0;
};

StrategyOutcome run_strategy(const StrategyArgs& a) {
  StrategyOutcome o;
  std::optional<Rational> base;
  if (!a.family.empty()) {
    if (a.family == "rm127") {
      o.rates = gen_reduce_max_12_7_family(a.k);
    } else if (a.family == "rf") {
      o.rates = gen_reduce_fastest_lb(option_rational(a.x, "--x"), option_rational(a.eps, "--eps"));
      base = Rational(1);
    } else {
      throw InputError("option --family: unknown family '" + a.family + "'");
    }
  } else {
    o.rates = load_instance(a.instance).rates;
  }
  if (!a.threshold_base.empty()) {
    base = a.threshold_base == "H" ? std::optional<Rational>() : option_rational(a.threshold_base, "--threshold-base");
  }
  o.horizon = a.horizon;
  if (o.horizon == 0) {
    o.horizon = a.family == "rm127" ? 4 * (7 * a.k + 3) : 1000;
  }
  if (a.strategy == "reduce-max") {
    o.run = reduce_max(o.rates, o.horizon);
  } else if (a.strategy == "reduce-fastest") {
    o.run = reduce_fastest(o.rates, option_rational(a.x, "--x"), o.horizon, base);
  } else {
    throw InputError("option --strategy must be reduce-max or reduce-fastest");
  }
  return o;
}

std::string trace_csv(const StrategyRun& run) {
  std::ostringstream os;
  os << "round,cut_index,max_height_num,max_height_den\n";
  for (std::size_t r = 0; r < run.schedule.size(); ++r) {
    const Rational& m = run.max_before_cut[r];
    os << r + 1 << ',' << run.schedule[r] << ',' << m.get_num().get_str() << ','
       << m.get_den().get_str() << '\n';
  }
  return os.str();
}

int cmd_simulate(const StrategyArgs& a, std::ostream& out) {
  StrategyOutcome o = run_strategy(a);
  if (!a.trace.empty()) write_text_file(a.trace, trace_csv(o.run));
  SimulationReport steady = simulate_discrete(o.rates, o.run.schedule, DiscreteOptions{false});
  Json doc;
  doc["strategy"] = a.strategy;
  doc["n"] = o.rates.size();
  doc["H"] = rational_json(o.rates.total());
  doc["horizon"] = o.horizon;
  doc["b1_max"] = rational_json(steady.per_bamboo_max[0]);
  doc["max_without_tail"] = rational_json(steady.global_max);
  doc["diverged"] = o.run.diverged;
  doc["report"] = report_to_json(o.run.report);
  out << doc.dump(2) << "\n";
  return kExitOk;
}

int cmd_run(const StrategyArgs& a, std::ostream& out) {
  StrategyOutcome o = run_strategy(a);
  emit(out, a.trace, trace_csv(o.run));
  return kExitOk;
}

// ---------------------------------------------------------------- approx

struct ApproxArgs {
  std::string algorithm;
  std::string instance;
  bool verify = false;
  std::string out;
  std::string m;
  std::uint64_t prefix = 64;
  bool oracle_compare = false;
  std::size_t oracle_limit = 8;
  std::size_t budget = 0;
};

int cmd_approx(const ApproxArgs& a, std::ostream& out) {
  Instance inst = load_instance(a.instance);
  RateVector rates = inst.rates;
  const Rational H = rates.total();
  std::optional<Rational> opt;
  if (a.oracle_compare) {
    if (rates.size() > a.oracle_limit) {
      throw InputError("--oracle-compare is limited to n <= " + std::to_string(a.oracle_limit));
    }
    opt = optimal_height(rates, budget_or_default(a.budget)).height;
  }
  Json doc;
  doc["algorithm"] = a.algorithm;
  bool ok = true;
  if (a.algorithm == "main" || a.algorithm == "two") {
    CyclicSchedule sched;
    Rational bound;
    Json diag;
    if (a.algorithm == "main") {
      MainResult mr = main_algorithm(rates);
      sched = mr.schedule;
      bound = mr.diagnostics.bound;
      const auto& d = mr.diagnostics;
      diag["delta"] = rational_json(d.delta);
      diag["min_layer"] = d.min_layer;
      diag["max_layer"] = d.max_layer;
      diag["C"] = d.C;
      diag["K"] = d.K;
      diag["density_after_rounding"] = rational_json(d.density_after_rounding);
      diag["final_density"] = rational_json(d.final_density);
      diag["obs1_merges"] = d.obs1_merges;
      diag["obs2_merges"] = d.obs2_merges;
      diag["pushes"] = d.pushes;
    } else {
      TwoApproxResult tr = two_approx(rates);
      sched = tr.schedule;
      bound = 2 * H;
      diag["delta"] = "1";
      diag["final_density"] = rational_json(density(tr.frequencies));
    }
    SimulationReport rep = evaluate_cyclic(rates, sched);
    diag["bound"] = rational_json(bound);
    diag["realized_max"] = rational_json(rep.global_max);
    doc["schedule"] = schedule_to_json(sched);
    doc["diagnostics"] = diag;
    doc["report"] = certification(rep, bound, H, opt);
    ok = rep.global_max <= bound;
    if (!a.out.empty()) write_text_file(a.out, schedule_to_json(sched).dump() + "\n");
  } else if (a.algorithm == "d34") {
    Density34 d = density_34_frequencies(rates);
    doc["delta"] = rational_json(d.delta);
    doc["frequencies"] = d.frequencies;
    doc["density"] = rational_json(d.density);
    doc["bound"] = rational_json((1 + d.delta) * H);
    ok = d.density < make_rational(3, 4);
    doc["bound_satisfied"] = ok;
  } else if (a.algorithm == "eightfifths") {
    const bool normalized = H != 1;
    if (normalized) rates = rates.normalized();
    std::optional<Rational> m;
    if (!a.m.empty()) m = option_rational(a.m, "--m");
    EightFifthsResult res = eight_fifths(rates, m, budget_or_default(a.budget));
    SimulationReport rep = res.schedule.evaluate(rates);
    doc["normalized"] = normalized;
    doc["case"] = res.case_id;
    doc["m"] = rational_json(res.plan.m);
    doc["pattern"] = res.schedule.pattern_string();
    Json subs = Json::array();
    for (const auto& sub : res.schedule.subs()) {
      Json js;
      js["name"] = sub.name;
      Json members = Json::array();
      for (std::size_t g : sub.members) members.push_back(g + 1);
      js["members"] = members;
      js["schedule"] = schedule_to_json(sub.schedule);
      subs.push_back(js);
    }
    doc["subs"] = subs;
    doc["prefix"] = res.schedule.prefix(a.prefix);
    Json cert = Json::array();
    for (std::size_t i = 0; i < rates.size(); ++i) {
      bool good = rep.per_bamboo_max[i] <= res.bound[i];
      ok = ok && good;
      cert.push_back({{"bamboo", i + 1},
                      {"rule", res.rule[i]},
                      {"bound", rational_json(res.bound[i])},
                      {"realized", rational_json(rep.per_bamboo_max[i])},
                      {"ok", good}});
    }
    doc["certificate"] = cert;
    doc["slack"] = rational_json(res.slack);
    doc["l_optimal"] = res.l_optimal;
    Json report = report_to_json(rep);
    report["bound_satisfied"] = ok;
    report["ratio_vs_H"] = rational_json(rep.global_max);
    if (a.oracle_compare) {
      Rational nopt = *opt / H;
      Rational target = make_rational(8, 5) * nopt + res.slack;
      report["oracle_opt"] = rational_json(nopt);
      report["ratio_vs_oracle"] = rational_json(rep.global_max / nopt);
      report["eight_fifths_target"] = rational_json(target);
      bool good = rep.global_max <= target;
      report["eight_fifths_satisfied"] = good;
      ok = ok && good;
    }
    doc["report"] = report;
  } else {
    throw InputError("unknown approximation '" + a.algorithm + "' (main, two, d34, eightfifths)");
  }
  out << doc.dump(2) << "\n";
  return a.verify && !ok ? kExitCertification : kExitOk;
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  std::string mode;
  std::vector<std::string> rest;
  std::string witness;
  std::size_t budget = 0;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  const std::size_t budget = budget_or_default(a.budget);
  if (a.mode == "opt") {
    if (a.rest.size() != 1) throw InputError("oracle opt takes one instance file");
    Instance inst = load_instance(a.rest[0]);
    OptimalResult r = optimal_height(inst.rates, budget);
    out << to_string(r.height) << "\n";
    if (!a.witness.empty()) write_text_file(a.witness, schedule_to_json(r.witness).dump() + "\n");
    return kExitOk;
  }
  if (a.mode == "pinwheel") {
    if (a.rest.empty()) throw InputError("oracle pinwheel needs frequencies");
    std::vector<std::uint64_t> freqs;
    for (const auto& s : a.rest) {
      Rational v = option_rational(s, "frequency");
      if (v.get_den() != 1 || sgn(v) <= 0) throw InputError("frequency '" + s + "' must be a positive integer");
      freqs.push_back(to_u64(v.get_num()));
    }
    out << (pinwheel_feasible(freqs, budget) ? "feasible" : "infeasible") << "\n";
    return kExitOk;
  }
  throw InputError("oracle mode must be opt or pinwheel");
}

// ---------------------------------------------------------------- continuous

struct ContinuousArgs {
  std::string action;
  std::vector<std::string> rest;
  int algo = 3;
  std::string horizon;
  std::string walk;
  bool verify = false;
  std::uint64_t n = 64;
  std::string D = "1";
  std::uint64_t rounds = 1000;
  std::string out;
};

Rational default_horizon(const MetricInstance& inst) {
  Rational h = 0;
  for (int algo : {1, 2, 3}) h = std::max(h, cover_horizon(inst, algo));
  return h;
}

Json lower_bounds_json(const MetricInstance& inst) {
  Json doc;
  doc["diameter"] = rational_json(inst.diameter());
  doc["diameter_bound"] = rational_json(lower_bound_diameter(inst));
  MstBound mb = lower_bound_mst(inst);
  doc["mst_bound"] = rational_json(mb.value);
  Json subset = Json::array();
  for (std::size_t p : mb.subset) subset.push_back(p + 1);
  doc["mst_subset"] = subset;
  return doc;
}

int cmd_continuous(const ContinuousArgs& a, std::ostream& out) {
  if (a.action == "gen") {
    if (a.rest.size() != 1) throw InputError("continuous gen takes spiral or clusters");
    Json doc;
    if (a.rest[0] == "spiral") {
      doc = instance_to_json(gen_spiral(a.n).instance);
    } else if (a.rest[0] == "clusters") {
      doc = instance_to_json(gen_two_cluster(a.n, option_rational(a.D, "--D")).instance);
    } else {
      throw InputError("unknown generator '" + a.rest[0] + "'");
    }
    emit(out, a.out, doc.dump() + "\n");
    return kExitOk;
  }
  if (a.action == "sweep") {
    TwoCluster tc = gen_two_cluster(a.n, option_rational(a.D, "--D"));
    Rational horizon = a.horizon.empty() ? Rational(8 * option_rational(a.D, "--D") + 8)
                                         : option_rational(a.horizon, "--horizon");
    TickWalk walk = two_cluster_sweep(tc, horizon);
    if (!a.walk.empty()) {
      std::ofstream f(a.walk);
      write_walk_csv(f, tc.instance, walk);
    }
    Json doc;
    doc["report"] = report_to_json(simulate_ticks(tc.instance, walk, false));
    out << doc.dump(2) << "\n";
    return kExitOk;
  }
  if (a.rest.size() != 1) throw InputError("continuous " + a.action + " takes one instance file");
  Instance inst = load_instance(a.rest[0]);
  const MetricInstance& metric = require_metric(inst);
  if (a.action == "lb") {
    out << lower_bounds_json(metric).dump(2) << "\n";
    return kExitOk;
  }
  if (a.action == "discrete") {
    DiscreteAsContinuous dc = discrete_as_continuous(metric, a.rounds);
    bool ok = true;
    Json bounds = Json::array();
    for (std::size_t i = 0; i < metric.size(); ++i) {
      ok = ok && dc.report.per_bamboo_max[i] <= dc.bound[i];
      bounds.push_back(rational_json(dc.bound[i]));
    }
    Json doc;
    doc["report"] = report_to_json(dc.report);
    doc["bound"] = bounds;
    doc["bound_satisfied"] = ok;
    doc["ratio_bound"] = rational_json(dc.ratio_bound);
    out << doc.dump(2) << "\n";
    return a.verify && !ok ? kExitCertification : kExitOk;
  }
  if (a.action == "run") {
    Rational horizon = a.horizon.empty() ? default_horizon(metric) : option_rational(a.horizon, "--horizon");
    ContinuousRun run;
    switch (a.algo) {
      case 1: run = algorithm1(metric, horizon); break;
      case 2: run = algorithm2(metric, horizon); break;
      case 3: run = algorithm3(metric, horizon); break;
      default: throw InputError("option --algo must be 1, 2 or 3");
    }
    if (!a.walk.empty()) {
      std::ofstream f(a.walk);
      write_walk_csv(f, metric, run.walk);
    }
    bool ok = true;
    Json bounds = Json::array();
    for (std::size_t i = 0; i < metric.size(); ++i) {
      ok = ok && run.report.per_bamboo_max[i] <= run.bound[i];
      bounds.push_back(rational_json(run.bound[i]));
    }
    Json doc;
    doc["algorithm"] = a.algo;
    doc["horizon"] = rational_json(horizon);
    doc["steps"] = run.walk.size();
    doc["report"] = report_to_json(run.report);
    doc["bound"] = bounds;
    doc["bound_satisfied"] = ok;
    doc["lower_bounds"] = lower_bounds_json(metric);
    Rational lb = std::max(lower_bound_diameter(metric), lower_bound_mst(metric).value);
    doc["ratio_vs_lower_bound"] = rational_json(run.report.global_max / lb);
    out << doc.dump(2) << "\n";
    return a.verify && !ok ? kExitCertification : kExitOk;
  }
  throw InputError("continuous action must be run, lb, gen, sweep or discrete");
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string instance;
  std::string schedule;
  std::string expect;
  std::string bound;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  Instance inst = load_instance(a.instance);
  CyclicSchedule sched = schedule_from_json(read_json_file(a.schedule), inst.rates.size());
  SimulationReport rep = evaluate_cyclic(inst.rates, sched);
  Json doc = report_to_json(rep);
  bool ok = true;
  if (!a.expect.empty()) {
    bool same = rep.global_max == option_rational(a.expect, "--expect");
    doc["expect_matches"] = same;
    ok = ok && same;
  }
  if (!a.bound.empty()) {
    Rational b = option_rational(a.bound, "--bound");
    doc["bound"] = rational_json(b);
    doc["bound_satisfied"] = rep.global_max <= b;
    ok = ok && rep.global_max <= b;
  }
  out << doc.dump(2) << "\n";
  return ok ? kExitOk : kExitCertification;
}

}  // namespace

// ---------------------------------------------------------------- bench

namespace {

struct Row {
  std::string family, algorithm;
  std::size_t n = 0;
  Rational h1_over_H, H, scale, realized, bound;
  bool bound_ok = true;
  std::optional<Rational> opt;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32)};
  std::uint32_t parts[2];
  seq.generate(parts, parts + 2);
  return (static_cast<std::uint64_t>(parts[0]) << 32) | parts[1];
}

Row bench_row(const BenchConfig& c, std::uint64_t id) {
  const std::uint64_t seed = derive_seed(c.seed, id);
  std::mt19937_64 rng(seed);
  const std::size_t budget = budget_or_default(c.oracle_budget);
  Row row;
  row.family = c.family;
  if (c.family == "main" || c.family == "two") {
    static const Rational heads[] = {make_rational(1, 4), make_rational(1, 16), make_rational(1, 64)};
    const Rational& head = heads[id % 3];
    std::size_t lo = planted_min_n(head);
    std::size_t hi = std::max(lo, c.max_n);
    std::size_t n = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    RateVector rates = random_planted_rates(rng(), n, head);
    row.n = n;
    row.H = rates.total();
    row.h1_over_H = rates.max() / row.H;
    row.scale = row.H;
    if (c.family == "main") {
      MainResult mr = main_algorithm(rates);
      row.algorithm = "main";
      row.realized = evaluate_cyclic(rates, mr.schedule).global_max;
      row.bound = mr.diagnostics.bound;
    } else {
      row.algorithm = "two";
      row.realized = evaluate_cyclic(rates, two_approx(rates).schedule).global_max;
      row.bound = 2 * row.H;
    }
    row.bound_ok = row.realized <= row.bound;
    if (n <= c.oracle_limit) row.opt = optimal_height(rates, budget).height;
    return row;
  }
  if (c.family == "rf") {
    static const Rational xs[] = {make_rational(1, 2), make_rational(3, 2), Rational(2)};
    const Rational& x = xs[id % 3];
    Rational eps = pow2(-static_cast<long>(4 + id / 3));
    RateVector rates = gen_reduce_fastest_lb(x, eps);
    std::uint64_t horizon = to_u64(ceil(64 / eps));
    StrategyRun run = reduce_fastest(rates, x, horizon, Rational(1));
    row.algorithm = "reduce-fastest(" + to_string(x) + ")";
    row.n = rates.size();
    row.H = rates.total();
    row.h1_over_H = rates.max() / row.H;
    row.opt = optimal_height(rates, budget).height;
    row.scale = *row.opt;
    row.realized = simulate_discrete(rates, run.schedule, DiscreteOptions{false}).global_max;
    if (x < 1) {
      row.bound = 4 * row.H;
      row.bound_ok = run.diverged;
    } else {
      row.bound = (make_rational(3, 2) - eps) * *row.opt;
      row.bound_ok = row.realized >= row.bound;
    }
    return row;
  }
  if (c.family == "eightfifths") {
    std::size_t n = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
    std::vector<std::int64_t> w(n);
    std::int64_t total = 0;
    for (auto& v : w) {
      v = std::uniform_int_distribution<std::int64_t>(1, 20)(rng);
      total += v;
    }
    std::sort(w.begin(), w.end(), std::greater<>());
    std::vector<Rational> rv;
    for (auto v : w) rv.push_back(make_rational(v, total));
    RateVector rates(std::move(rv));
    EightFifthsResult res = eight_fifths(rates, std::nullopt, budget);
    SimulationReport rep = res.schedule.evaluate(rates);
    row.algorithm = "eightfifths/case" + std::to_string(res.case_id);
    row.n = n;
    row.H = 1;
    row.h1_over_H = rates.max();
    row.opt = optimal_height(rates, budget).height;
    row.scale = 1;
    row.realized = rep.global_max;
    row.bound = make_rational(8, 5) * *row.opt + res.slack;
    row.bound_ok = row.realized <= row.bound;
    for (std::size_t i = 0; i < n; ++i) row.bound_ok = row.bound_ok && rep.per_bamboo_max[i] <= res.bound[i];
    return row;
  }
  if (c.family == "continuous") {
    std::size_t n = std::uniform_int_distribution<std::size_t>(2, std::max<std::size_t>(2, c.max_n))(rng);
    MetricInstance inst = random_metric_instance(rng(), n, 1000, 100);
    int algo = static_cast<int>(id % 3) + 1;
    Rational horizon = default_horizon(inst);
    ContinuousRun run = algo == 1 ? algorithm1(inst, horizon)
                        : algo == 2 ? algorithm2(inst, horizon) : algorithm3(inst, horizon);
    row.algorithm = "algorithm" + std::to_string(algo);
    row.n = n;
    row.H = inst.rates().total();
    row.h1_over_H = inst.rates().max() / row.H;
    row.scale = std::max(lower_bound_diameter(inst), lower_bound_mst(inst).value);
    row.realized = run.report.global_max;
    row.bound = 0;
    for (std::size_t i = 0; i < n; ++i) {
      row.bound = std::max(row.bound, run.bound[i]);
      row.bound_ok = row.bound_ok && run.report.per_bamboo_max[i] <= run.bound[i];
    }
    return row;
  }
  if (c.family == "spiral") {
    std::uint64_t n = c.sizes.at(id);
    Spiral sp = gen_spiral(n);
    ContinuousRun run = algorithm3(sp.instance, cover_horizon(sp.instance, 3));
    SimulationReport rep = simulate_ticks(sp.instance, run.walk, false);
    row.algorithm = "algorithm3";
    row.n = n;
    row.H = 1;
    row.h1_over_H = sp.instance.rates().max();
    row.scale = sp.d1;
    row.realized = rep.global_max;
    row.bound = 20 * sp.d1;
    row.bound_ok = rep.global_max >= sp.d1 / 2 && rep.global_max <= row.bound;
    return row;
  }
  throw InputError("unknown bench family '" + c.family + "'");
}

}  // namespace

std::string bench_suite(const BenchConfig& config) {
  BenchConfig c = config;
  if (c.family == "spiral") {
    if (c.sizes.empty()) c.sizes = {64, 512};
    c.count = c.sizes.size();
  }
  std::vector<std::optional<Row>> rows(c.count);
  std::vector<std::string> errors(c.count);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (std::uint64_t id = next++; id < c.count; id = next++) {
      try {
        rows[id] = bench_row(c, id);
      } catch (const std::exception& e) {
        errors[id] = e.what();
      }
    }
  };
  // Validate the family up front so malformed configs fail before threads start.
  if (c.count > 0) {
    static const char* known[] = {"main", "two", "rf", "eightfifths", "continuous", "spiral"};
    if (std::find(std::begin(known), std::end(known), c.family) == std::end(known)) {
      throw InputError("unknown bench family '" + c.family + "'");
    }
  }
  std::vector<std::thread> pool;
  const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(c.threads, c.count));
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream os;
  os << "id,family,n,h1_over_H,algorithm,H,scale,realized_max,bound,bound_ok,oracle_opt,"
        "ratio_vs_scale,ratio_vs_oracle,ratio_approx,error\n";
  for (std::uint64_t id = 0; id < c.count; ++id) {
    if (!rows[id]) {
      os << id << ',' << c.family << ",,,,,,,,false,,,,," << '"' << errors[id] << '"' << '\n';
      continue;
    }
    const Row& r = *rows[id];
    Rational ratio = r.realized / r.scale;
    os << id << ',' << r.family << ',' << r.n << ',' << to_string(r.h1_over_H) << ',' << r.algorithm << ','
       << to_string(r.H) << ',' << to_string(r.scale) << ',' << to_string(r.realized) << ','
       << to_string(r.bound) << ',' << (r.bound_ok ? "true" : "false") << ','
       << (r.opt ? to_string(*r.opt) : "") << ',' << to_string(ratio) << ','
       << (r.opt ? to_string(r.realized / *r.opt) : "") << ',' << approx_decimal(ratio) << ",\n";
  }
  return os.str();
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bamboo garden trimming: schedules, bounds and experiments", "bgt"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate an instance file");
  g->add_option("family", gen.family, "uniform | random | rm127 | rf | example")->required();
  g->add_option("--n", gen.n, "Number of bamboos");
  g->add_option("--head", gen.head, "Planted h_1/H for random instances");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--k", gen.k, "Parameter of the 12/7 family");
  g->add_option("--x", gen.x, "Reduce-Fastest threshold");
  g->add_option("--eps", gen.eps, "Epsilon of the Reduce-Fastest family");
  g->add_option("--name", gen.name, "Named example: 715 | half");
  g->add_option("--out", gen.out, "Output file (default stdout)");

  StrategyArgs sim;
  auto add_strategy_options = [](CLI::App* sub, StrategyArgs& s) {
    sub->add_option("--strategy", s.strategy, "reduce-max | reduce-fastest")->required();
    sub->add_option("--x", s.x, "Reduce-Fastest threshold factor");
    sub->add_option("--threshold-base", s.threshold_base, "H or a fraction");
    sub->add_option("--family", s.family, "rm127 | rf");
    sub->add_option("--k", s.k, "Parameter of the 12/7 family");
    sub->add_option("--eps", s.eps, "Epsilon of the Reduce-Fastest family");
    sub->add_option("--instance", s.instance, "Instance file");
    sub->add_option("--horizon", s.horizon, "Rounds to simulate");
    sub->add_option("--trace", s.trace, "Trace CSV output");
  };
  auto* s = app.add_subcommand("simulate", "Run an online strategy and report heights");
  add_strategy_options(s, sim);
  StrategyArgs runargs;
  auto* r = app.add_subcommand("run", "Run an online strategy and print the trace CSV");
  add_strategy_options(r, runargs);

  ApproxArgs ap;
  auto* a = app.add_subcommand("approx", "Offline approximation algorithms");
  a->add_option("algorithm", ap.algorithm, "main | two | d34 | eightfifths")->required();
  a->add_option("instance", ap.instance, "Instance file")->required();
  a->add_flag("--verify", ap.verify, "Exit 1 unless every certificate holds");
  a->add_option("--out", ap.out, "Write the schedule JSON here");
  a->add_option("--m", ap.m, "Threshold m for eightfifths");
  a->add_option("--prefix", ap.prefix, "Rounds of schedule prefix to print");
  a->add_flag("--oracle-compare", ap.oracle_compare, "Compare with the exact optimum");
  a->add_option("--oracle-limit", ap.oracle_limit, "Largest n for --oracle-compare");
  a->add_option("--budget", ap.budget, "Oracle state budget");

  OracleArgs orc;
  auto* o = app.add_subcommand("oracle", "Exact solvers for tiny instances");
  o->add_option("mode", orc.mode, "opt | pinwheel")->required();
  o->add_option("args", orc.rest, "Instance file or frequencies");
  o->add_option("--witness", orc.witness, "Write the optimal schedule here");
  o->add_option("--budget", orc.budget, "State budget");

  ContinuousArgs ct;
  auto* c = app.add_subcommand("continuous", "Continuous (metric) variant");
  c->add_option("action", ct.action, "run | lb | gen | sweep | discrete")->required();
  c->add_option("args", ct.rest, "Instance file or generator name");
  c->add_option("--algo", ct.algo, "1 | 2 | 3");
  c->add_option("--horizon", ct.horizon, "Time horizon");
  c->add_option("--walk", ct.walk, "Walk CSV output");
  c->add_flag("--verify", ct.verify, "Exit 1 unless every bound holds");
  c->add_option("--n", ct.n, "Generator size");
  c->add_option("--D", ct.D, "Cluster distance");
  c->add_option("--rounds", ct.rounds, "Rounds for discrete");
  c->add_option("--out", ct.out, "Output file for gen");

  VerifyArgs vf;
  auto* v = app.add_subcommand("verify", "Re-evaluate a schedule file");
  v->add_option("--instance", vf.instance, "Instance file")->required();
  v->add_option("--schedule", vf.schedule, "Schedule file")->required();
  v->add_option("--expect", vf.expect, "Expected global maximum");
  v->add_option("--bound", vf.bound, "Upper bound to certify");

  BenchConfig bc;
  std::string bench_out;
  auto* b = app.add_subcommand("bench", "Experiment suite as CSV");
  b->add_option("--family", bc.family, "main | two | rf | eightfifths | continuous | spiral")->required();
  b->add_option("--count", bc.count, "Instances");
  b->add_option("--seed", bc.seed, "Seed")->required();
  b->add_option("--threads", bc.threads, "Worker threads");
  b->add_option("--max-n", bc.max_n, "Largest n");
  b->add_option("--sizes", bc.sizes, "Spiral sizes")->delimiter(',');
  b->add_option("--oracle-limit", bc.oracle_limit, "Largest n compared with the oracle");
  b->add_option("--budget", bc.oracle_budget, "Oracle state budget");
  b->add_option("--out", bench_out, "Output CSV file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformed;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, out);
    if (s->parsed()) return cmd_simulate(sim, out);
    if (r->parsed()) return cmd_run(runargs, out);
    if (a->parsed()) return cmd_approx(ap, out);
    if (o->parsed()) return cmd_oracle(orc, out);
    if (c->parsed()) return cmd_continuous(ct, out);
    if (v->parsed()) return cmd_verify(vf, out);
    if (b->parsed()) {
      emit(out, bench_out, bench_suite(bc));
      return kExitOk;
    }
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitCertification;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCertification;
  }
  return kExitMalformed;
}

}  // namespace bgt
