#include "bgt/core.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace bgt {

RateVector::RateVector(std::vector<Rational> rates) : rates_(std::move(rates)) {
  if (rates_.empty()) throw std::invalid_argument("rate vector must be nonempty");
  total_ = 0;
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    if (sgn(rates_[i]) <= 0) {
      throw std::invalid_argument("rate " + std::to_string(i + 1) + " is not positive");
    }
    if (i > 0 && rates_[i] > rates_[i - 1]) {
      throw std::invalid_argument("rates must be non-increasing (rate " + std::to_string(i + 1) +
                                  " exceeds its predecessor)");
    }
    total_ += rates_[i];
  }
}

RateVector RateVector::sorted(std::vector<Rational> rates) {
  std::stable_sort(rates.begin(), rates.end(),
                   [](const Rational& a, const Rational& b) { return a > b; });
  return RateVector(std::move(rates));
}

RateVector RateVector::scaled(const Rational& factor) const {
  if (sgn(factor) <= 0) throw std::invalid_argument("scale factor must be positive");
  std::vector<Rational> out;
  out.reserve(rates_.size());
  for (const auto& r : rates_) out.push_back(r * factor);
  return RateVector(std::move(out));
}

RateVector RateVector::subset(std::span<const std::size_t> positions) const {
  std::vector<Rational> out;
  out.reserve(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (positions[k] >= rates_.size() || (k > 0 && positions[k] <= positions[k - 1])) {
      throw std::invalid_argument("subset positions must be increasing and in range");
    }
    out.push_back(rates_[positions[k]]);
  }
  return RateVector(std::move(out));
}

namespace {

// lcm of all periods, or 0 if it exceeds `limit`.
std::uint64_t bounded_lcm(const ResidueForm& form, std::uint64_t limit) {
  std::uint64_t l = 1;
  for (const auto& e : form.entries) {
    std::uint64_t g = std::gcd(l, e.period);
    unsigned __int128 next = static_cast<unsigned __int128>(l / g) * e.period;
    if (next > limit) return 0;
    l = static_cast<std::uint64_t>(next);
  }
  return l;
}

void check_entries(const ResidueForm& form) {
  for (std::size_t i = 0; i < form.entries.size(); ++i) {
    if (form.entries[i].offset == 0 || form.entries[i].period == 0) {
      throw InvalidSchedule("bamboo " + std::to_string(i + 1) +
                            ": offset and period must be positive");
    }
  }
}

}  // namespace

std::optional<std::pair<std::size_t, std::size_t>> find_collision(const ResidueForm& form,
                                                                  std::uint64_t hyperperiod_cap) {
  check_entries(form);
  const auto& es = form.entries;
  if (std::uint64_t l = bounded_lcm(form, hyperperiod_cap); l != 0) {
    constexpr std::size_t kFree = static_cast<std::size_t>(-1);
    std::vector<std::size_t> owner(l, kFree);
    for (std::size_t i = 0; i < es.size(); ++i) {
      for (std::uint64_t r = (es[i].offset - 1) % es[i].period; r < l; r += es[i].period) {
        if (owner[r] != kFree) return std::make_pair(owner[r], i);
        owner[r] = i;
      }
    }
    return std::nullopt;
  }

  // Classes p mod q and p' mod q' meet iff p = p' (mod gcd(q, q')).
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_period;
  for (std::size_t i = 0; i < es.size(); ++i) by_period[es[i].period].push_back(i);
  std::vector<std::uint64_t> periods;
  for (const auto& [q, members] : by_period) periods.push_back(q);
  std::sort(periods.begin(), periods.end());

  for (std::uint64_t q : periods) {
    std::unordered_map<std::uint64_t, std::size_t> seen;
    for (std::size_t i : by_period[q]) {
      auto [it, fresh] = seen.emplace(es[i].offset % q, i);
      if (!fresh) return std::make_pair(it->second, i);
    }
  }
  for (std::size_t a = 0; a < periods.size(); ++a) {
    for (std::size_t b = a + 1; b < periods.size(); ++b) {
      std::uint64_t g = std::gcd(periods[a], periods[b]);
      std::unordered_map<std::uint64_t, std::size_t> seen;
      for (std::size_t i : by_period[periods[a]]) seen.emplace(es[i].offset % g, i);
      for (std::size_t j : by_period[periods[b]]) {
        if (auto it = seen.find(es[j].offset % g); it != seen.end()) {
          return std::make_pair(std::min(it->second, j), std::max(it->second, j));
        }
      }
    }
  }
  return std::nullopt;
}

void CyclicSchedule::validate(std::uint64_t hyperperiod_cap) const {
  if (n_ == 0) throw InvalidSchedule("schedule has no bamboos");
  if (is_residue()) {
    const auto& form = residue();
    if (form.entries.size() != n_) {
      throw InvalidSchedule("residue schedule has " + std::to_string(form.entries.size()) +
                            " entries for " + std::to_string(n_) + " bamboos");
    }
    if (auto hit = find_collision(form, hyperperiod_cap)) {
      throw InvalidSchedule("bamboos " + std::to_string(hit->first + 1) + " and " +
                            std::to_string(hit->second + 1) + " share a round");
    }
    return;
  }
  const auto& form = list();
  if (form.period.empty()) throw InvalidSchedule("period must be nonempty");
  std::vector<char> present(n_ + 1, 0);
  for (std::size_t id : form.preamble) {
    if (id > n_) throw InvalidSchedule("preamble index " + std::to_string(id) + " out of range");
  }
  for (std::size_t id : form.period) {
    if (id > n_) throw InvalidSchedule("period index " + std::to_string(id) + " out of range");
    present[id] = 1;
  }
  for (std::size_t i = 1; i <= n_; ++i) {
    if (!present[i]) throw InvalidSchedule("bamboo " + std::to_string(i) + " missing from period");
  }
}

std::vector<std::size_t> CyclicSchedule::expand(std::uint64_t rounds) const {
  std::vector<std::size_t> out(rounds, 0);
  if (is_residue()) {
    const auto& es = residue().entries;
    for (std::size_t i = 0; i < es.size(); ++i) {
      for (std::uint64_t t = es[i].offset; t <= rounds; t += es[i].period) out[t - 1] = i + 1;
    }
    return out;
  }
  const auto& form = list();
  for (std::uint64_t t = 0; t < rounds; ++t) {
    out[t] = t < form.preamble.size() ? form.preamble[t]
                                      : form.period[(t - form.preamble.size()) % form.period.size()];
  }
  return out;
}

namespace {

struct GapStats {
  std::uint64_t max_gap = 0;
  std::uint64_t max_gap_end = 0;  // round at which max_gap is completed
  std::uint64_t steady_gap = 0;
};

void fill_report(SimulationReport& rep, const RateVector& rates, const std::vector<GapStats>& stats) {
  rep.per_bamboo_max.resize(rates.size());
  rep.global_max = 0;
  rep.steady_state_max = 0;
  rep.argmax_bamboo = 0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    rep.per_bamboo_max[i] = rates[i] * stats[i].max_gap;
    if (rep.argmax_bamboo == 0 || rep.per_bamboo_max[i] > rep.global_max) {
      rep.global_max = rep.per_bamboo_max[i];
      rep.argmax_bamboo = i + 1;
      rep.argmax_time = stats[i].max_gap_end;
    }
    Rational steady = rates[i] * stats[i].steady_gap;
    if (steady > rep.steady_state_max) rep.steady_state_max = steady;
  }
}

void record(GapStats& s, std::uint64_t gap, std::uint64_t end, bool steady) {
  if (gap > s.max_gap) {
    s.max_gap = gap;
    s.max_gap_end = end;
  }
  if (steady && gap > s.steady_gap) s.steady_gap = gap;
}

}  // namespace

SimulationReport simulate_discrete(const RateVector& rates, std::span<const std::size_t> schedule,
                                   DiscreteOptions options) {
  if (schedule.empty()) throw std::invalid_argument("schedule must be nonempty");
  const std::size_t n = rates.size();
  std::vector<std::uint64_t> last(n, 0);
  std::vector<char> cut(n, 0);
  std::vector<GapStats> stats(n);
  for (std::uint64_t t = 1; t <= schedule.size(); ++t) {
    std::size_t id = schedule[t - 1];
    if (id == 0) continue;
    if (id > n) {
      throw std::out_of_range("schedule index " + std::to_string(id) + " at round " +
                              std::to_string(t) + " exceeds n = " + std::to_string(n));
    }
    std::size_t i = id - 1;
    record(stats[i], t - last[i], t, cut[i] != 0);
    last[i] = t;
    cut[i] = 1;
  }
  const std::uint64_t horizon = schedule.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (options.include_tail || !cut[i]) record(stats[i], horizon - last[i], horizon, false);
  }
  SimulationReport rep;
  fill_report(rep, rates, stats);
  rep.horizon = horizon;
  return rep;
}

SimulationReport evaluate_cyclic(const RateVector& rates, const CyclicSchedule& schedule,
                                 std::uint64_t hyperperiod_cap) {
  if (schedule.size() != rates.size()) {
    throw InvalidSchedule("schedule covers " + std::to_string(schedule.size()) +
                          " bamboos but the instance has " + std::to_string(rates.size()));
  }
  schedule.validate(hyperperiod_cap);
  const std::size_t n = rates.size();
  std::vector<GapStats> stats(n);
  SimulationReport rep;

  if (schedule.is_residue()) {
    const auto& es = schedule.residue().entries;
    BigInt hyper = 1;
    for (std::size_t i = 0; i < n; ++i) {
      const auto [p, q] = es[i];
      // First gap is p, later gaps are all q.
      record(stats[i], p, p, false);
      record(stats[i], q, p + q, true);
      mpz_lcm_ui(hyper.get_mpz_t(), hyper.get_mpz_t(), q);
    }
    fill_report(rep, rates, stats);
    rep.horizon = Rational(hyper);
    return rep;
  }

  const auto& form = schedule.list();
  const std::uint64_t a = form.preamble.size();
  const std::uint64_t len = form.period.size();
  std::vector<std::uint64_t> last(n, 0);
  std::vector<std::uint64_t> first_in_period(n, 0);
  for (std::uint64_t t = 1; t <= a; ++t) {
    std::size_t i = form.preamble[t - 1];
    if (i == 0) continue;
    --i;
    record(stats[i], t - last[i], t, false);
    last[i] = t;
  }
  // One pass over the period handles the preamble boundary, a second pass
  // closes every cyclic gap including the wrap-around.
  for (std::uint64_t t = a + 1; t <= a + 2 * len; ++t) {
    std::size_t i = form.period[(t - a - 1) % len];
    if (i == 0) continue;
    --i;
    bool in_cycle = first_in_period[i] != 0;
    if (!in_cycle) first_in_period[i] = t;
    record(stats[i], t - last[i], t, in_cycle);
    last[i] = t;
  }
  fill_report(rep, rates, stats);
  rep.horizon = a + len;
  return rep;
}

MetricInstance::MetricInstance(RateVector rates, std::vector<std::vector<Rational>> travel,
                               std::size_t start)
    : rates_(std::move(rates)), start_(start) {
  const std::size_t n = rates_.size();
  if (travel.size() != n) {
    throw std::invalid_argument("travel matrix has " + std::to_string(travel.size()) +
                                " rows for " + std::to_string(n) + " points");
  }
  BigInt den = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (travel[i].size() != n) {
      throw std::invalid_argument("travel row " + std::to_string(i + 1) + " has wrong length");
    }
    for (const auto& v : travel[i]) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.get_den_mpz_t());
  }
  denominator_ = to_i64(den);
  ticks_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Rational scaled = travel[i][j] * den;
      ticks_[i * n + j] = to_i64(scaled.get_num());
    }
  }
  check_shape();
  validate_metric();
}

MetricInstance::MetricInstance(RateVector rates, std::vector<std::int64_t> ticks,
                               std::int64_t denominator, std::size_t start)
    : MetricInstance(Trusted{}, std::move(rates), std::move(ticks), denominator, start) {
  validate_metric();
}

MetricInstance::MetricInstance(Trusted, RateVector rates, std::vector<std::int64_t> ticks,
                               std::int64_t denominator, std::size_t start)
    : rates_(std::move(rates)), ticks_(std::move(ticks)), denominator_(denominator), start_(start) {
  check_shape();
}

void MetricInstance::check_shape() {
  const std::size_t n = rates_.size();
  if (ticks_.size() != n * n) throw std::invalid_argument("travel matrix is not n x n");
  if (denominator_ <= 0) throw std::invalid_argument("travel denominator must be positive");
  if (start_ >= n) throw std::invalid_argument("start point out of range");
  constexpr std::int64_t kLimit = std::int64_t{1} << 61;
  diameter_ = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::int64_t t = ticks_[i * n + j];
      if (i == j && t != 0) {
        throw std::invalid_argument("travel[" + std::to_string(i + 1) + "][" +
                                    std::to_string(i + 1) + "] must be 0");
      }
      if (i != j && t <= 0) {
        throw std::invalid_argument("travel[" + std::to_string(i + 1) + "][" +
                                    std::to_string(j + 1) + "] must be positive");
      }
      if (t > kLimit) throw std::invalid_argument("travel time too large");
      if (t != ticks_[j * n + i]) throw std::invalid_argument("travel matrix is not symmetric");
      diameter_ = std::max(diameter_, t);
    }
  }
}

void MetricInstance::validate_metric() const {
  const std::size_t n = rates_.size();
  for (std::size_t j = 0; j < n; ++j) {
    const std::int64_t* row_j = &ticks_[j * n];
    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t tij = ticks_[i * n + j];
      const std::int64_t* row_i = &ticks_[i * n];
      for (std::size_t k = 0; k < n; ++k) {
        if (row_i[k] > tij + row_j[k]) {
          throw InvalidSchedule("triangle inequality fails for points " + std::to_string(i + 1) +
                                ", " + std::to_string(j + 1) + ", " + std::to_string(k + 1));
        }
      }
    }
  }
}

SimulationReport simulate_walk(const MetricInstance& instance, const Walk& walk,
                               WalkOptions options) {
  const std::size_t n = instance.size();
  const auto& rates = instance.rates();
  std::vector<Rational> last(n, Rational(0));
  std::vector<Rational> max_gap(n, Rational(0));
  std::vector<Rational> max_gap_end(n, Rational(0));
  std::vector<Rational> steady_gap(n, Rational(0));
  std::vector<char> visited(n, 0);
  visited[instance.start()] = 1;

  auto note = [&](std::size_t i, const Rational& now, bool steady) {
    Rational gap = now - last[i];
    if (gap > max_gap[i]) {
      max_gap[i] = gap;
      max_gap_end[i] = now;
    }
    if (steady && gap > steady_gap[i]) steady_gap[i] = gap;
  };

  std::size_t pos = instance.start();
  Rational now = 0;
  for (std::size_t s = 0; s < walk.size(); ++s) {
    const auto& step = walk[s];
    if (step.point == 0 || step.point > n) {
      throw std::out_of_range("walk step " + std::to_string(s + 1) + " names point " +
                              std::to_string(step.point));
    }
    if (step.time <= now) {
      throw InvalidSchedule("walk times must be strictly increasing (step " +
                            std::to_string(s + 1) + ")");
    }
    std::size_t next = step.point - 1;
    Rational need = instance.travel(pos, next);
    Rational took = step.time - now;
    if (took < need || (options.strict && took != need)) {
      throw InvalidSchedule("step " + std::to_string(s + 1) + " takes " + to_string(took) +
                            " but travel needs " + to_string(need));
    }
    now = step.time;
    note(next, now, visited[next] != 0);
    visited[next] = 1;
    last[next] = now;
    pos = next;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (options.include_tail || !visited[i]) note(i, now, false);
  }

  SimulationReport rep;
  rep.per_bamboo_max.resize(n);
  rep.global_max = 0;
  rep.steady_state_max = 0;
  for (std::size_t i = 0; i < n; ++i) {
    rep.per_bamboo_max[i] = rates[i] * max_gap[i];
    if (rep.argmax_bamboo == 0 || rep.per_bamboo_max[i] > rep.global_max) {
      rep.global_max = rep.per_bamboo_max[i];
      rep.argmax_bamboo = i + 1;
      rep.argmax_time = max_gap_end[i];
    }
    Rational steady = rates[i] * steady_gap[i];
    if (steady > rep.steady_state_max) rep.steady_state_max = steady;
  }
  rep.horizon = now;
  return rep;
}

Rational lower_bound_H(const RateVector& rates) { return rates.total(); }

std::uint64_t total_height_horizon(const RateVector& rates, const Rational& height) {
  if (sgn(height) < 0 || height >= rates.total()) {
    throw std::invalid_argument("height must lie in [0, H)");
  }
  Rational bound = Rational(rates.size()) * height / (rates.total() - height);
  return to_u64(floor(bound)) + 1;
}

std::optional<std::uint64_t> first_round_exceeding(const RateVector& rates,
                                                   std::span<const std::size_t> schedule,
                                                   const Rational& height) {
  const std::size_t n = rates.size();
  std::vector<std::uint64_t> last(n, 0);
  for (std::uint64_t t = 1; t <= schedule.size(); ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rates[i] * (t - last[i]) > height) return t;
    }
    std::size_t id = schedule[t - 1];
    if (id > n) throw std::out_of_range("schedule index out of range");
    if (id != 0) last[id - 1] = t;
  }
  return std::nullopt;
}

}  // namespace bgt
