#ifndef BGT_TESTS_SUPPORT_HPP
#define BGT_TESTS_SUPPORT_HPP

// Naive reference implementations used as independent oracles in tests.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "bgt/core.hpp"

namespace bgt::test {

inline Rational q(std::int64_t n, std::int64_t d = 1) { return make_rational(n, d); }

inline RateVector rv(std::initializer_list<Rational> xs) { return RateVector(std::vector<Rational>(xs)); }

/// Heights round by round: every bamboo grows, then the chosen one drops to 0.
/// Returns the largest height each bamboo shows after growth in any round.
inline std::vector<Rational> naive_heights(const RateVector& rates, const std::vector<std::size_t>& seq) {
  std::vector<Rational> h(rates.size(), Rational(0)), best(rates.size(), Rational(0));
  for (std::size_t id : seq) {
    for (std::size_t i = 0; i < rates.size(); ++i) {
      h[i] += rates[i];
      best[i] = std::max(best[i], h[i]);
    }
    if (id != 0) h[id - 1] = 0;
  }
  return best;
}

inline Rational naive_max(const RateVector& rates, const std::vector<std::size_t>& seq) {
  auto b = naive_heights(rates, seq);
  return *std::max_element(b.begin(), b.end());
}

/// Largest cyclic height of a periodic word in which every bamboo appears.
inline Rational cyclic_word_max(const RateVector& rates, const std::vector<std::size_t>& word) {
  std::vector<std::size_t> three;
  for (int r = 0; r < 3; ++r) three.insert(three.end(), word.begin(), word.end());
  // Gaps inside the middle copy are the cyclic gaps.
  std::vector<std::int64_t> last(rates.size(), -1);
  std::vector<std::int64_t> gap(rates.size(), 0);
  for (std::size_t t = 0; t < three.size(); ++t) {
    std::size_t i = three[t] - 1;
    if (last[i] >= 0 && t >= word.size()) gap[i] = std::max<std::int64_t>(gap[i], static_cast<std::int64_t>(t) - last[i]);
    last[i] = static_cast<std::int64_t>(t);
  }
  Rational m = 0;
  for (std::size_t i = 0; i < rates.size(); ++i) m = std::max(m, Rational(rates[i] * gap[i]));
  return m;
}

/// Minimum of cyclic_word_max over all words of length <= max_len that use
/// every bamboo; an upper bound on OPT that is exact when some optimal
/// schedule has a short period.
inline Rational brute_short_cycle_opt(const RateVector& rates, std::size_t max_len) {
  const std::size_t n = rates.size();
  std::optional<Rational> best;
  std::vector<std::size_t> word;
  std::function<void()> rec = [&]() {
    if (!word.empty()) {
      std::vector<char> seen(n, 0);
      for (auto id : word) seen[id - 1] = 1;
      if (std::count(seen.begin(), seen.end(), 1) == static_cast<long>(n)) {
        Rational m = cyclic_word_max(rates, word);
        if (!best || m < *best) best = m;
      }
    }
    if (word.size() == max_len) return;
    for (std::size_t id = 1; id <= n; ++id) {
      word.push_back(id);
      rec();
      word.pop_back();
    }
  };
  rec();
  return *best;
}

/// Pinwheel feasibility by exhausting cyclic words up to max_len.
inline bool brute_pinwheel_short(const std::vector<std::uint64_t>& f, std::size_t max_len) {
  std::vector<Rational> r;
  for (auto x : f) r.push_back(make_rational(1, static_cast<std::int64_t>(x)));
  std::sort(r.begin(), r.end(), std::greater<>());
  std::vector<std::uint64_t> sorted = f;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = f.size();
  std::vector<std::size_t> word;
  std::function<bool()> rec = [&]() -> bool {
    if (!word.empty()) {
      std::vector<std::size_t> three;
      for (int k = 0; k < 3; ++k) three.insert(three.end(), word.begin(), word.end());
      bool ok = true;
      for (std::size_t i = 1; i <= n && ok; ++i) {
        std::int64_t last = -1;
        bool any = false;
        for (std::size_t t = 0; t < three.size(); ++t) {
          if (three[t] != i) continue;
          any = true;
          if (last >= 0 && static_cast<std::uint64_t>(static_cast<std::int64_t>(t) - last) > sorted[i - 1]) ok = false;
          last = static_cast<std::int64_t>(t);
        }
        ok = ok && any;
      }
      if (ok) return true;
    }
    if (word.size() == max_len) return false;
    for (std::size_t id = 1; id <= n; ++id) {
      word.push_back(id);
      if (rec()) return true;
      word.pop_back();
    }
    return false;
  };
  return rec();
}

/// Random non-increasing rates from integer weights in [1, w], not normalized.
inline RateVector random_rates(std::mt19937_64& rng, std::size_t n, std::int64_t w, bool normalize) {
  std::uniform_int_distribution<std::int64_t> d(1, w);
  std::vector<std::int64_t> ws(n);
  std::int64_t total = 0;
  for (auto& x : ws) {
    x = d(rng);
    total += x;
  }
  std::sort(ws.begin(), ws.end(), std::greater<>());
  std::vector<Rational> r;
  for (auto x : ws) r.push_back(normalize ? make_rational(x, total) : make_rational(x, w));
  return RateVector(std::move(r));
}

/// Exact residue schedule check by expanding lcm(periods) rounds.
inline bool residue_disjoint_naive(const ResidueForm& form) {
  std::uint64_t l = 1;
  for (const auto& e : form.entries) l = std::lcm(l, e.period);
  std::vector<int> used(l, 0);
  for (const auto& e : form.entries) {
    for (std::uint64_t k = 0; k < l / e.period; ++k) {
      if (used[(e.offset - 1 + k * e.period) % l]++) return false;
    }
  }
  return true;
}

}  // namespace bgt::test

#endif  // BGT_TESTS_SUPPORT_HPP
