#include "bgt/oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <string>
#include <unordered_map>

namespace bgt {

BudgetExceeded::BudgetExceeded(std::size_t budget)
    : std::runtime_error("configuration graph exceeds the state budget of " +
                         std::to_string(budget)),
      budget_(budget) {}

std::size_t default_state_budget() {
  if (const char* env = std::getenv("BGT_ORACLE_BUDGET")) {
    try {
      std::size_t pos = 0;
      unsigned long long v = std::stoull(env, &pos);
      if (pos == std::string(env).size() && v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string("BGT_ORACLE_BUDGET is not a positive integer: ") + env);
  }
  return 1'000'000;
}

namespace {

constexpr std::int32_t kNone = -1;

// Reachable configuration graph. A state is the age vector right after a cut.
class ConfigGraph {
 public:
  ConfigGraph(std::span<const std::uint64_t> limits, std::size_t budget)
      : n_(limits.size()), limits_(limits.begin(), limits.end()), budget_(budget) {}

  void build() {
    std::u32string zero(n_, 0);
    intern(zero);
    for (std::size_t s = 0; s < ages_.size(); ++s) {
      std::u32string cur = ages_[s];
      bool can_advance = true;
      for (std::size_t j = 0; j < n_; ++j) {
        if (cur[j] + 1 > limits_[j]) {
          can_advance = false;
          break;
        }
      }
      if (!can_advance) continue;
      std::u32string next = cur;
      for (std::size_t j = 0; j < n_; ++j) next[j] = cur[j] + 1;
      for (std::size_t i = 0; i < n_; ++i) {
        char32_t saved = next[i];
        next[i] = 0;
        std::int32_t id = intern(next);
        succ_[s * n_ + i] = id;
        next[i] = saved;
      }
    }
  }

  // Removes states that cannot continue forever; returns whether the
  // initial state survives.
  bool prune() {
    const std::size_t m = ages_.size();
    alive_.assign(m, 1);
    std::vector<std::uint32_t> out_degree(m, 0);
    std::vector<std::uint32_t> pred_count(m + 1, 0);
    for (std::size_t s = 0; s < m; ++s) {
      for (std::size_t i = 0; i < n_; ++i) {
        std::int32_t t = succ_[s * n_ + i];
        if (t == kNone) continue;
        ++out_degree[s];
        ++pred_count[static_cast<std::size_t>(t) + 1];
      }
    }
    for (std::size_t s = 0; s < m; ++s) pred_count[s + 1] += pred_count[s];
    std::vector<std::uint32_t> preds(pred_count[m]);
    std::vector<std::uint32_t> fill(pred_count.begin(), pred_count.end() - 1);
    for (std::size_t s = 0; s < m; ++s) {
      for (std::size_t i = 0; i < n_; ++i) {
        std::int32_t t = succ_[s * n_ + i];
        if (t != kNone) preds[fill[static_cast<std::size_t>(t)]++] = static_cast<std::uint32_t>(s);
      }
    }
    std::deque<std::uint32_t> dead;
    for (std::size_t s = 0; s < m; ++s) {
      if (out_degree[s] == 0) dead.push_back(static_cast<std::uint32_t>(s));
    }
    while (!dead.empty()) {
      std::uint32_t s = dead.front();
      dead.pop_front();
      alive_[s] = 0;
      for (std::uint32_t k = pred_count[s]; k < pred_count[s + 1]; ++k) {
        std::uint32_t p = preds[k];
        if (alive_[p] && --out_degree[p] == 0) dead.push_back(p);
      }
    }
    return alive_[0] != 0;
  }

  // Greedy walk through surviving states, lowest cut index first, until a
  // state repeats.
  CyclicSchedule witness() const {
    std::unordered_map<std::int32_t, std::size_t> seen;
    std::vector<std::size_t> cuts;
    std::int32_t s = 0;
    while (!seen.count(s)) {
      seen.emplace(s, cuts.size());
      std::int32_t next = kNone;
      for (std::size_t i = 0; i < n_; ++i) {
        std::int32_t t = succ_[static_cast<std::size_t>(s) * n_ + i];
        if (t != kNone && alive_[static_cast<std::size_t>(t)]) {
          next = t;
          cuts.push_back(i + 1);
          break;
        }
      }
      s = next;
    }
    std::size_t start = seen.at(s);
    ListForm form;
    form.preamble.assign(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(start));
    form.period.assign(cuts.begin() + static_cast<std::ptrdiff_t>(start), cuts.end());
    return CyclicSchedule(n_, std::move(form));
  }

 private:
  std::int32_t intern(const std::u32string& state) {
    auto [it, fresh] = index_.emplace(state, static_cast<std::int32_t>(ages_.size()));
    if (fresh) {
      if (ages_.size() >= budget_) throw BudgetExceeded(budget_);
      ages_.push_back(state);
      succ_.resize(succ_.size() + n_, kNone);
    }
    return it->second;
  }

  std::size_t n_;
  std::vector<std::uint64_t> limits_;
  std::size_t budget_;
  std::vector<std::u32string> ages_;
  std::unordered_map<std::u32string, std::int32_t> index_;
  std::vector<std::int32_t> succ_;
  std::vector<char> alive_;
};

std::vector<std::uint64_t> limits_for_cap(const RateVector& rates, const Rational& cap) {
  std::vector<std::uint64_t> limits(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    BigInt a = floor(cap / rates[i]);
    // Ages beyond the state budget can never be reached anyway.
    limits[i] = a.fits_ulong_p() ? std::min<std::uint64_t>(a.get_ui(), 0xFFFFFFFFu) : 0xFFFFFFFFu;
  }
  return limits;
}

}  // namespace

std::optional<CyclicSchedule> schedule_with_limits(std::span<const std::uint64_t> limits,
                                                   std::size_t state_budget) {
  if (limits.empty()) throw std::invalid_argument("need at least one bamboo");
  Rational density = 0;
  for (std::uint64_t a : limits) {
    if (a == 0) return std::nullopt;
    density += make_rational(BigInt(1), BigInt(static_cast<unsigned long>(a)));
  }
  if (density > 1) return std::nullopt;
  ConfigGraph g(limits, state_budget);
  g.build();
  if (!g.prune()) return std::nullopt;
  return g.witness();
}

std::optional<CyclicSchedule> schedule_under_cap(const RateVector& rates, const Rational& cap,
                                                 std::size_t state_budget) {
  auto limits = limits_for_cap(rates, cap);
  return schedule_with_limits(limits, state_budget);
}

bool feasible_under_cap(const RateVector& rates, const Rational& cap, std::size_t state_budget) {
  return schedule_under_cap(rates, cap, state_budget).has_value();
}

std::vector<Rational> candidate_heights(const RateVector& rates) {
  const Rational& H = rates.total();
  std::vector<Rational> out;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (i > 0 && rates[i] == rates[i - 1]) continue;
    BigInt kmin = ceil(H / rates[i]);
    BigInt kmax = floor(2 * H / rates[i]);
    for (BigInt k = kmin; k <= kmax; ++k) out.push_back(rates[i] * k);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

OptimalResult optimal_height(const RateVector& rates, std::size_t state_budget) {
  std::vector<Rational> cands = candidate_heights(rates);
  // The answer lies in [H, 2H], so the largest candidate is always feasible
  // and is only searched if nothing smaller works.
  std::size_t lo = 0;
  std::size_t hi = cands.size() - 1;
  std::optional<CyclicSchedule> best;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (auto w = schedule_under_cap(rates, cands[mid], state_budget)) {
      hi = mid;
      best = std::move(w);
    } else {
      lo = mid + 1;
    }
  }
  if (!best) best = schedule_under_cap(rates, cands[hi], state_budget);
  if (!best) throw std::logic_error("no schedule of height 2H found; oracle is inconsistent");
  return OptimalResult{cands[hi], std::move(*best)};
}

bool pinwheel_feasible(std::span<const std::uint64_t> freqs, std::size_t state_budget) {
  for (std::uint64_t f : freqs) {
    if (f == 0) throw std::invalid_argument("pinwheel frequencies must be positive");
  }
  return schedule_with_limits(freqs, state_budget).has_value();
}

}  // namespace bgt
