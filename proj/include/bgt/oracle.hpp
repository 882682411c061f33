#ifndef BGT_ORACLE_HPP
#define BGT_ORACLE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bgt/core.hpp"

namespace bgt {

/// The configuration graph grew past the caller's state budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(std::size_t budget);
  std::size_t budget() const { return budget_; }

 private:
  std::size_t budget_;
};

/// 10^6, or the value of the BGT_ORACLE_BUDGET environment variable.
std::size_t default_state_budget();

/// Ages after a cut must stay below limits[i]: bamboo i is cut at least once
/// in every window of limits[i] rounds. Returns a periodic witness (ListForm)
/// if an infinite schedule exists, nullopt otherwise.
std::optional<CyclicSchedule> schedule_with_limits(std::span<const std::uint64_t> limits,
                                                   std::size_t state_budget);

/// Whether some schedule keeps every height <= cap forever.
bool feasible_under_cap(const RateVector& rates, const Rational& cap,
                        std::size_t state_budget = default_state_budget());
std::optional<CyclicSchedule> schedule_under_cap(const RateVector& rates, const Rational& cap,
                                                 std::size_t state_budget = default_state_budget());

/// Heights k * h_i that can be the optimum: those inside [H, 2H], sorted.
std::vector<Rational> candidate_heights(const RateVector& rates);

struct OptimalResult {
  Rational height;
  CyclicSchedule witness;
};

OptimalResult optimal_height(const RateVector& rates,
                             std::size_t state_budget = default_state_budget());

bool pinwheel_feasible(std::span<const std::uint64_t> freqs,
                       std::size_t state_budget = default_state_budget());

}  // namespace bgt

#endif  // BGT_ORACLE_HPP
