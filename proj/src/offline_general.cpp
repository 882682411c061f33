#include "bgt/offline_general.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bgt {

Rational default_threshold_m(std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  auto lg = [](double x) { return std::max(std::log2(x), 1.0); };
  const double log_n = lg(static_cast<double>(n));
  return from_double(log_n / (4.0 * lg(log_n)));
}

namespace {

void require_normalized(const RateVector& rates) {
  if (rates.total() != 1) {
    throw std::invalid_argument("rates must be normalized to H = 1 (got H = " +
                                to_string(rates.total()) + ")");
  }
}

}  // namespace

SplitPlan split(const RateVector& rates, const Rational& m) {
  require_normalized(rates);
  if (sgn(m) <= 0) throw std::invalid_argument("m must be positive");
  SplitPlan plan;
  plan.m = m;
  const Rational threshold = 1 / m;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] >= threshold) {
      plan.L.push_back(i);
      plan.sum_L += rates[i];
    } else {
      plan.S.push_back(i);
      plan.sum_S += rates[i];
    }
  }
  return plan;
}

SplitPlan rebalance(const RateVector& rates, const SplitPlan& plan, const Rational& target) {
  if (sgn(target) <= 0) throw std::invalid_argument("rebalance target must be positive");
  if (plan.sum_S < target) {
    throw std::invalid_argument("S sums to " + to_string(plan.sum_S) + ", below the target " +
                                to_string(target));
  }
  SplitPlan out;
  out.m = plan.m;
  out.L = plan.L;
  out.sum_L = plan.sum_L;
  Rational remaining = plan.sum_S;
  // S is stored by index, hence by non-increasing rate.
  for (std::size_t i : plan.S) {
    if (remaining - rates[i] >= target) {
      remaining -= rates[i];
      out.L.push_back(i);
      out.sum_L += rates[i];
    } else {
      out.S.push_back(i);
    }
  }
  out.sum_S = remaining;
  std::sort(out.L.begin(), out.L.end());
  return out;
}

MergedSchedule::MergedSchedule(std::size_t n, std::vector<SubSchedule> subs,
                               std::vector<std::size_t> pattern)
    : n_(n) {
  std::vector<std::size_t> remap(subs.size(), static_cast<std::size_t>(-1));
  for (std::size_t s = 0; s < subs.size(); ++s) {
    if (subs[s].members.empty()) continue;
    if (subs[s].schedule.size() != subs[s].members.size()) {
      throw std::invalid_argument("sub-schedule " + subs[s].name + " does not match its members");
    }
    remap[s] = subs_.size();
    subs_.push_back(std::move(subs[s]));
  }
  for (std::size_t token : pattern) {
    if (token >= remap.size()) throw std::invalid_argument("pattern names an unknown sub-schedule");
    if (remap[token] != static_cast<std::size_t>(-1)) pattern_.push_back(remap[token]);
  }
  if (pattern_.empty()) throw std::invalid_argument("merge pattern is empty");

  std::vector<char> owned(n_, 0);
  for (const auto& sub : subs_) {
    for (std::size_t g : sub.members) {
      if (g >= n_ || owned[g]) throw std::invalid_argument("bamboo assigned to two sub-schedules");
      owned[g] = 1;
    }
  }
  if (std::find(owned.begin(), owned.end(), 0) != owned.end()) {
    throw std::invalid_argument("some bamboo belongs to no sub-schedule");
  }
  slots_.assign(subs_.size(), {});
  for (std::size_t r = 0; r < pattern_.size(); ++r) slots_[pattern_[r]].push_back(r + 1);
  for (std::size_t s = 0; s < subs_.size(); ++s) {
    if (slots_[s].empty()) {
      throw std::invalid_argument("sub-schedule " + subs_[s].name + " never appears in the pattern");
    }
  }
}

std::string MergedSchedule::pattern_string() const {
  std::string out = "(";
  for (std::size_t r = 0; r < pattern_.size(); ++r) {
    if (r > 0) out += ",";
    out += subs_[pattern_[r]].name;
  }
  return out + ")";
}

std::uint64_t MergedSchedule::position(std::size_t s, std::uint64_t k) const {
  const auto& slot = slots_.at(s);
  const std::uint64_t c = slot.size();
  return pattern_.size() * ((k - 1) / c) + slot[(k - 1) % c];
}

SimulationReport MergedSchedule::evaluate(const RateVector& rates) const {
  if (rates.size() != n_) throw std::invalid_argument("rate vector does not match the schedule");
  std::vector<std::uint64_t> max_gap(n_, 0), max_end(n_, 0), steady_gap(n_, 0);
  auto note = [&](std::size_t g, std::uint64_t gap, std::uint64_t end, bool steady) {
    if (gap > max_gap[g]) {
      max_gap[g] = gap;
      max_end[g] = end;
    }
    if (steady) steady_gap[g] = std::max(steady_gap[g], gap);
  };

  for (std::size_t s = 0; s < subs_.size(); ++s) {
    const auto& sub = subs_[s];
    sub.schedule.validate();
    const std::uint64_t c = slots_[s].size();
    if (sub.schedule.is_residue()) {
      const auto& es = sub.schedule.residue().entries;
      for (std::size_t j = 0; j < es.size(); ++j) {
        const std::size_t g = sub.members[j];
        const auto [p, q] = es[j];
        std::uint64_t prev = position(s, p);
        note(g, prev, prev, false);
        // Merged gaps repeat with period c in the cut count.
        for (std::uint64_t t = 1; t <= c; ++t) {
          std::uint64_t cur = position(s, p + t * q);
          note(g, cur - prev, cur, true);
          prev = cur;
        }
      }
      continue;
    }
    const auto& form = sub.schedule.list();
    const std::uint64_t a = form.preamble.size();
    const std::uint64_t len = form.period.size();
    std::vector<std::uint64_t> last(sub.members.size(), 0);
    std::vector<char> seen(sub.members.size(), 0);
    for (std::uint64_t k = 1; k <= a + 2 * len * c; ++k) {
      std::size_t id = k <= a ? form.preamble[k - 1] : form.period[(k - a - 1) % len];
      if (id == 0) continue;
      const std::size_t j = id - 1;
      const std::uint64_t at = position(s, k);
      note(sub.members[j], at - last[j], at, seen[j] != 0);
      last[j] = at;
      seen[j] = 1;
    }
  }

  SimulationReport rep;
  rep.per_bamboo_max.resize(n_);
  rep.global_max = 0;
  rep.steady_state_max = 0;
  BigInt hyper = pattern_.size();
  for (std::size_t i = 0; i < n_; ++i) {
    rep.per_bamboo_max[i] = rates[i] * max_gap[i];
    if (rep.argmax_bamboo == 0 || rep.per_bamboo_max[i] > rep.global_max) {
      rep.global_max = rep.per_bamboo_max[i];
      rep.argmax_bamboo = i + 1;
      rep.argmax_time = max_end[i];
    }
    Rational steady = rates[i] * steady_gap[i];
    if (steady > rep.steady_state_max) rep.steady_state_max = steady;
  }
  rep.horizon = Rational(hyper);
  return rep;
}

std::vector<std::size_t> MergedSchedule::prefix(std::uint64_t rounds) const {
  MergedStream stream(*this);
  std::vector<std::size_t> out;
  out.reserve(rounds);
  for (std::uint64_t r = 0; r < rounds; ++r) out.push_back(stream.next());
  return out;
}

struct MergedStream::Impl {
  struct Cursor {
    const SubSchedule* sub = nullptr;
    std::optional<NextCutsStream> residue;
    std::uint64_t k = 0;

    std::size_t next() {
      if (residue) return residue->next();
      const auto& form = sub->schedule.list();
      ++k;
      if (k <= form.preamble.size()) return form.preamble[k - 1];
      return form.period[(k - form.preamble.size() - 1) % form.period.size()];
    }
  };

  const MergedSchedule* schedule = nullptr;
  std::vector<Cursor> cursors;
  std::uint64_t round = 0;
};

MergedStream::MergedStream(const MergedSchedule& schedule) : impl_(std::make_unique<Impl>()) {
  impl_->schedule = &schedule;
  for (const auto& sub : schedule.subs()) {
    Impl::Cursor cur;
    cur.sub = &sub;
    if (sub.schedule.is_residue()) cur.residue.emplace(sub.schedule.residue());
    impl_->cursors.push_back(std::move(cur));
  }
}

MergedStream::~MergedStream() = default;
MergedStream::MergedStream(MergedStream&&) noexcept = default;

std::size_t MergedStream::next() {
  const auto& pattern = impl_->schedule->pattern();
  const std::size_t s = pattern[impl_->round % pattern.size()];
  ++impl_->round;
  auto& cur = impl_->cursors[s];
  std::size_t local = cur.next();
  return local == 0 ? 0 : cur.sub->members[local - 1] + 1;
}

namespace {

struct Part {
  SubSchedule sub;
  RateVector rates;
};

RateVector rates_of(const RateVector& rates, const std::vector<std::size_t>& members) {
  return rates.subset(members);
}

// Largest gap, in sub-rounds, of each member in a sub-schedule.
std::vector<BigInt> sub_gaps(const RateVector& sub_rates, const CyclicSchedule& sched) {
  SimulationReport rep = evaluate_cyclic(sub_rates, sched);
  std::vector<BigInt> out;
  for (std::size_t j = 0; j < sub_rates.size(); ++j) {
    Rational f = rep.per_bamboo_max[j] / sub_rates[j];
    out.push_back(f.get_num());
  }
  return out;
}

}  // namespace

EightFifthsResult eight_fifths(const RateVector& rates, std::optional<Rational> m_override,
                               std::size_t state_budget) {
  require_normalized(rates);
  const std::size_t n = rates.size();
  EightFifthsResult res;
  res.plan = split(rates, m_override.value_or(default_threshold_m(n)));
  const SplitPlan& plan = res.plan;
  res.bound.assign(n, Rational(0));
  res.rule.assign(n, "");
  res.slack = plan.S.empty() ? Rational(0) : Rational(4 * rates[plan.S.front()]);

  const Rational h1 = rates[0];
  const Rational& sbar = plan.sum_S;
  const std::size_t nl = plan.L.size();

  auto make_s = [&](const std::vector<std::size_t>& members, const std::string& name) {
    SubSchedule sub{name, members, CyclicSchedule()};
    if (members.empty()) return sub;
    MainResult mr = main_algorithm(rates_of(rates, members));
    sub.schedule = mr.schedule;
    res.s_delta = mr.diagnostics.delta;
    res.s_bound = mr.diagnostics.bound;
    return sub;
  };
  auto make_two = [&](const std::vector<std::size_t>& members, const std::string& name) {
    SubSchedule sub{name, members, CyclicSchedule()};
    if (!members.empty()) sub.schedule = two_approx(rates_of(rates, members)).schedule;
    return sub;
  };
  auto make_l_opt = [&](const std::vector<std::size_t>& members) {
    SubSchedule sub{"L", members, CyclicSchedule()};
    RateVector lr = rates_of(rates, members);
    try {
      OptimalResult opt = optimal_height(lr, state_budget);
      sub.schedule = opt.witness;
      res.l_opt = opt.height;
      res.l_optimal = true;
    } catch (const BudgetExceeded&) {
      sub.schedule = two_approx(lr).schedule;
      res.l_optimal = false;
    }
    return sub;
  };
  auto set_bound = [&](const std::vector<std::size_t>& members, const Rational& b,
                       const std::string& rule) {
    for (std::size_t g : members) {
      res.bound[g] = b;
      res.rule[g] = rule;
    }
  };
  // (f + ceil(f / d)) h per bamboo, f its largest gap in the sub-schedule.
  auto set_stretch_bound = [&](const SubSchedule& sub, unsigned long d, const std::string& rule) {
    if (sub.members.empty()) return;
    RateVector sr = rates_of(rates, sub.members);
    auto gaps = sub_gaps(sr, sub.schedule);
    for (std::size_t j = 0; j < sub.members.size(); ++j) {
      BigInt f = gaps[j];
      BigInt stretched = f + ceil(make_rational(f, BigInt(d)));
      res.bound[sub.members[j]] = sr[j] * stretched;
      res.rule[sub.members[j]] = rule;
    }
  };

  std::vector<SubSchedule> subs;
  std::vector<std::size_t> pattern;
  const std::vector<std::size_t> only_b{0};
  auto b_sub = [&]() { return SubSchedule{"B", only_b, CyclicSchedule(1, ResidueForm{{Residue{1, 1}}})}; };

  if (nl == 0) {
    res.case_id = 0;
    subs.push_back(make_s(plan.S, "S"));
    pattern = {0};
    set_bound(plan.S, res.s_bound, "(1+delta)H");
  } else if (nl >= 2 && sbar <= make_rational(2, 5)) {
    res.case_id = 1;
    subs.push_back(make_l_opt(plan.L));
    subs.push_back(make_s(plan.S, "S"));
    pattern = {0, 0, 0, 1};
    set_stretch_bound(subs[0], 3, "(f+ceil(f/3))h");
    set_bound(plan.S, 4 * res.s_bound, "4(1+delta_S)S");
  } else if (nl >= 2 && sbar <= make_rational(8, 15) && h1 <= make_rational(8, 25)) {
    res.case_id = 2;
    subs.push_back(make_l_opt(plan.L));
    subs.push_back(make_s(plan.S, "S"));
    pattern = {0, 0, 1};
    set_stretch_bound(subs[0], 2, "(f+ceil(f/2))h");
    set_bound(plan.S, 3 * res.s_bound, "3(1+delta_S)S");
  } else if (nl >= 2 && sbar <= make_rational(8, 15)) {
    res.case_id = 3;
    SplitPlan rb = rebalance(rates, plan, make_rational(2, 5));
    std::vector<std::size_t> lp;
    for (std::size_t i : rb.L) {
      if (i != 0) lp.push_back(i);
    }
    rb.sum_L -= h1;
    res.rebalanced = rb;
    subs.push_back(make_two(lp, "L'"));
    subs.push_back(make_s(rb.S, "S'"));
    subs.push_back(b_sub());
    set_bound(rb.S, 4 * res.s_bound, "4(1+delta_S')S'");
    if (h1 <= make_rational(2, 5)) {
      pattern = {0, 2, 0, 1};
      set_bound(lp, 4 * rb.sum_L, "4L'");
      set_bound(only_b, 4 * h1, "4h1");
    } else {
      pattern = {2, 0, 2, 1};
      set_bound(lp, 8 * rb.sum_L, "8L'");
      set_bound(only_b, 2 * h1, "2h1");
    }
  } else if (nl >= 2 && sbar <= make_rational(3, 5)) {
    res.case_id = 4;
    SplitPlan rb = rebalance(rates, plan, make_rational(8, 15));
    res.rebalanced = rb;
    subs.push_back(make_two(rb.L, "L'"));
    subs.push_back(make_s(rb.S, "S'"));
    pattern = {0, 0, 1};
    set_stretch_bound(subs[0], 2, "(f+ceil(f/2))h");
    set_bound(rb.S, 3 * res.s_bound, "3(1+delta_S')S'");
  } else if (sbar > make_rational(3, 5)) {
    res.case_id = 5;
    SplitPlan rb = rebalance(rates, plan, make_rational(3, 5));
    res.rebalanced = rb;
    subs.push_back(make_two(rb.L, "L'"));
    subs.push_back(make_s(rb.S, "S'"));
    pattern = {0, 1};
    set_bound(rb.L, 4 * rb.sum_L, "4L'");
    set_bound(rb.S, 2 * res.s_bound, "2(1+delta_S')S'");
  } else {
    res.case_id = 6;
    subs.push_back(b_sub());
    subs.push_back(make_s(plan.S, "S"));
    pattern = {0, 1};
    set_bound(only_b, 2 * h1, "2h1");
    set_bound(plan.S, 2 * res.s_bound, "2(1+delta_S)S");
  }
  res.schedule = MergedSchedule(n, std::move(subs), std::move(pattern));
  return res;
}

}  // namespace bgt
