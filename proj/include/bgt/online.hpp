#ifndef BGT_ONLINE_HPP
#define BGT_ONLINE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bgt/core.hpp"

namespace bgt {

struct StrategyRun {
  std::vector<std::size_t> schedule;    // 1-based ids, 0 = idle
  std::vector<Rational> max_before_cut;  // tallest height each round, after growth
  SimulationReport report;
  /// Some bamboo ended above 4H and was not cut during the second half of
  /// the horizon.
  bool diverged = false;
};

/// Cut the tallest bamboo each round; ties go to the larger rate, then the
/// lower index.
StrategyRun reduce_max(const RateVector& rates, std::uint64_t horizon);

/// Among bamboos of height >= x * base (base defaults to H), cut the one with
/// the largest rate (ties: lower index); idle if there is none.
StrategyRun reduce_fastest(const RateVector& rates, const Rational& x, std::uint64_t horizon,
                           std::optional<Rational> threshold_base = std::nullopt);

/// h_1 = 3k/(7k+3) followed by 7k+3 copies of 1/(2(7k+3)); not normalized.
RateVector gen_reduce_max_12_7_family(std::uint64_t k);

/// (x, eps) for x < 1, (x/2 - eps, eps) for 1 <= x < 2, (1 - eps, eps) for
/// x >= 2. Throws std::invalid_argument when eps is outside the range the
/// construction needs.
RateVector gen_reduce_fastest_lb(const Rational& x, const Rational& eps);

}  // namespace bgt

#endif  // BGT_ONLINE_HPP
