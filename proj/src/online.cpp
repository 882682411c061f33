#include "bgt/online.hpp"

#include <stdexcept>

namespace bgt {

namespace {

// Rates as integers over a common denominator, so heights compare as
// age * numerator.
std::vector<BigInt> common_numerators(const RateVector& rates) {
  BigInt den = 1;
  for (const auto& r : rates.rates()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), r.get_den_mpz_t());
  std::vector<BigInt> out;
  out.reserve(rates.size());
  for (const auto& r : rates.rates()) out.push_back(BigInt(r.get_num() * (den / r.get_den())));
  return out;
}

void finish(StrategyRun& run, const RateVector& rates, const std::vector<std::uint64_t>& last) {
  run.report = simulate_discrete(rates, run.schedule);
  const std::uint64_t horizon = run.schedule.size();
  const Rational limit = 4 * rates.total();
  for (std::size_t i = 0; i < rates.size(); ++i) {
    bool idle_late = 2 * last[i] <= horizon;
    if (idle_late && rates[i] * (horizon - last[i]) > limit) run.diverged = true;
  }
}

}  // namespace

StrategyRun reduce_max(const RateVector& rates, std::uint64_t horizon) {
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  const std::size_t n = rates.size();
  const auto num = common_numerators(rates);
  std::vector<std::uint64_t> last(n, 0);
  StrategyRun run;
  run.schedule.reserve(horizon);
  run.max_before_cut.reserve(horizon);
  BigInt best, h;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    std::size_t pick = 0;
    best = num[0] * (t - last[0]);
    for (std::size_t i = 1; i < n; ++i) {
      h = num[i] * (t - last[i]);
      // Rates are non-increasing, so the first maximum also has the largest rate.
      if (h > best) {
        best = h;
        pick = i;
      }
    }
    run.max_before_cut.push_back(rates[pick] * (t - last[pick]));
    run.schedule.push_back(pick + 1);
    last[pick] = t;
  }
  finish(run, rates, last);
  return run;
}

StrategyRun reduce_fastest(const RateVector& rates, const Rational& x, std::uint64_t horizon,
                           std::optional<Rational> threshold_base) {
  if (sgn(x) <= 0) throw std::invalid_argument("x must be positive");
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  const std::size_t n = rates.size();
  const Rational threshold = x * threshold_base.value_or(rates.total());
  std::vector<std::uint64_t> last(n, 0);
  StrategyRun run;
  run.schedule.reserve(horizon);
  run.max_before_cut.reserve(horizon);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    std::size_t pick = 0;
    Rational tallest = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Rational h = rates[i] * (t - last[i]);
      if (h > tallest) tallest = h;
      if (pick == 0 && h >= threshold) pick = i + 1;
    }
    run.max_before_cut.push_back(tallest);
    run.schedule.push_back(pick);
    if (pick != 0) last[pick - 1] = t;
  }
  finish(run, rates, last);
  return run;
}

RateVector gen_reduce_max_12_7_family(std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const auto i = static_cast<std::int64_t>(7 * k + 3);
  std::vector<Rational> rates;
  rates.reserve(static_cast<std::size_t>(i) + 1);
  rates.push_back(make_rational(static_cast<std::int64_t>(3 * k), i));
  for (std::int64_t c = 0; c < i; ++c) rates.push_back(make_rational(1, 2 * i));
  return RateVector(std::move(rates));
}

RateVector gen_reduce_fastest_lb(const Rational& x, const Rational& eps) {
  if (sgn(x) <= 0) throw std::invalid_argument("x must be positive");
  if (sgn(eps) <= 0) throw std::invalid_argument("eps must be positive");
  if (x < 1) {
    if (eps >= x || eps >= 1 - x) throw std::invalid_argument("need eps < min(x, 1 - x)");
    return RateVector::sorted({x, eps});
  }
  if (x < 2) {
    if (eps >= x / 2) throw std::invalid_argument("need eps < x/2");
    return RateVector::sorted({x / 2 - eps, eps});
  }
  if (eps >= make_rational(1, 2)) throw std::invalid_argument("need eps < 1/2");
  return RateVector::sorted({1 - eps, eps});
}

}  // namespace bgt
