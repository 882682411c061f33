#ifndef BGT_CORE_HPP
#define BGT_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "bgt/rational.hpp"

// Index conventions used throughout the library:
//  * vectors indexed by bamboo (rates, per-bamboo maxima, residue entries,
//    travel matrices) are 0-based;
//  * cut sequences (schedules, walks, traces) name bamboos 1-based, with 0
//    meaning "no cut this round". This matches the on-disk formats.

namespace bgt {

/// Thrown when a schedule or instance violates its structural invariants.
class InvalidSchedule : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Growth rates h_1 >= h_2 >= ... >= h_n > 0 together with their exact sum.
class RateVector {
 public:
  RateVector() = default;

  /// Throws std::invalid_argument unless rates is nonempty, positive and
  /// non-increasing.
  explicit RateVector(std::vector<Rational> rates);

  /// Sorts into non-increasing order first.
  static RateVector sorted(std::vector<Rational> rates);

  std::size_t size() const { return rates_.size(); }
  const Rational& operator[](std::size_t i) const { return rates_[i]; }
  const Rational& total() const { return total_; }
  const Rational& max() const { return rates_.front(); }
  const Rational& min() const { return rates_.back(); }
  std::span<const Rational> rates() const { return rates_; }

  RateVector scaled(const Rational& factor) const;
  RateVector normalized() const { return scaled(1 / total_); }

  /// Rates at the given 0-based positions, which must be strictly increasing.
  RateVector subset(std::span<const std::size_t> positions) const;

 private:
  std::vector<Rational> rates_;
  Rational total_;
};

/// Cut schedule "bamboo i at rounds offset + k * period, k >= 0".
struct Residue {
  std::uint64_t offset = 1;
  std::uint64_t period = 1;

  friend bool operator==(const Residue&, const Residue&) = default;
};

struct ResidueForm {
  std::vector<Residue> entries;  // entries[i] is bamboo i+1
};

struct ListForm {
  std::vector<std::size_t> preamble;  // 1-based bamboo ids
  std::vector<std::size_t> period;    // 1-based bamboo ids, nonempty
};

/// Rounds expanded when proving a ResidueForm collision-free by enumeration.
inline constexpr std::uint64_t kDefaultHyperperiodCap = std::uint64_t{1} << 20;

class CyclicSchedule {
 public:
  CyclicSchedule() = default;
  CyclicSchedule(std::size_t n, ResidueForm form) : n_(n), rep_(std::move(form)) {}
  CyclicSchedule(std::size_t n, ListForm form) : n_(n), rep_(std::move(form)) {}

  std::size_t size() const { return n_; }
  bool is_residue() const { return std::holds_alternative<ResidueForm>(rep_); }
  const ResidueForm& residue() const { return std::get<ResidueForm>(rep_); }
  const ListForm& list() const { return std::get<ListForm>(rep_); }

  /// Throws InvalidSchedule on a collision (ResidueForm) or a bamboo missing
  /// from the period (ListForm).
  void validate(std::uint64_t hyperperiod_cap = kDefaultHyperperiodCap) const;

  /// Explicit cut sequence of the first `rounds` rounds.
  std::vector<std::size_t> expand(std::uint64_t rounds) const;

 private:
  std::size_t n_ = 0;
  std::variant<ResidueForm, ListForm> rep_;
};

/// Pair of bamboos (0-based) whose residue classes intersect, if any.
/// Enumerates one hyperperiod when lcm(periods) <= cap, otherwise compares
/// residues modulo gcd(q_i, q_j) group by group.
std::optional<std::pair<std::size_t, std::size_t>> find_collision(
    const ResidueForm& form, std::uint64_t hyperperiod_cap = kDefaultHyperperiodCap);

struct SimulationReport {
  std::vector<Rational> per_bamboo_max;
  Rational global_max;
  std::size_t argmax_bamboo = 0;  // 1-based
  Rational argmax_time;           // round or time at which global_max is reached
  Rational steady_state_max;
  Rational horizon;
};

struct DiscreteOptions {
  /// Count the growth from the last cut to the horizon as a gap.
  bool include_tail = true;
};

/// Exact heights of a finite cut sequence (1-based ids, 0 = idle round).
/// Steady-state maximum covers gaps between two cuts of the same bamboo.
SimulationReport simulate_discrete(const RateVector& rates, std::span<const std::size_t> schedule,
                                   DiscreteOptions options = {});

/// Supremum of heights over the infinite schedule, without simulating it.
SimulationReport evaluate_cyclic(const RateVector& rates, const CyclicSchedule& schedule,
                                 std::uint64_t hyperperiod_cap = kDefaultHyperperiodCap);

/// Points with symmetric travel times obeying the triangle inequality.
/// Travel times share one positive denominator and are stored as integer
/// numerators ("ticks") so large instances stay compact.
class MetricInstance {
 public:
  struct Trusted {};

  MetricInstance() = default;

  /// Validates shape, symmetry, zero diagonal, positivity and the triangle
  /// inequality. start is 0-based.
  MetricInstance(RateVector rates, std::vector<std::vector<Rational>> travel,
                 std::size_t start = 0);

  /// Same layout, ticks row-major. Validates unless Trusted is passed.
  MetricInstance(RateVector rates, std::vector<std::int64_t> ticks, std::int64_t denominator,
                 std::size_t start = 0);
  MetricInstance(Trusted, RateVector rates, std::vector<std::int64_t> ticks,
                 std::int64_t denominator, std::size_t start = 0);

  std::size_t size() const { return rates_.size(); }
  const RateVector& rates() const { return rates_; }
  std::size_t start() const { return start_; }
  std::int64_t denominator() const { return denominator_; }
  std::int64_t ticks(std::size_t i, std::size_t j) const { return ticks_[i * rates_.size() + j]; }
  Rational travel(std::size_t i, std::size_t j) const {
    return make_rational(ticks(i, j), denominator_);
  }
  Rational ticks_to_time(std::int64_t t) const { return make_rational(t, denominator_); }

  std::int64_t diameter_ticks() const { return diameter_; }
  Rational diameter() const { return ticks_to_time(diameter_); }

  /// Full O(n^3) triangle inequality check; throws InvalidSchedule.
  void validate_metric() const;

 private:
  void check_shape();

  RateVector rates_;
  std::vector<std::int64_t> ticks_;
  std::int64_t denominator_ = 1;
  std::size_t start_ = 0;
  std::int64_t diameter_ = 0;
};

struct WalkStep {
  std::size_t point = 0;  // 1-based
  Rational time;          // arrival time
};

using Walk = std::vector<WalkStep>;

struct WalkOptions {
  bool include_tail = true;
  /// Require each arrival to take exactly the direct travel time.
  bool strict = false;
};

/// Exact heights along a walk; the robot starts at instance.start() at time 0.
/// Throws InvalidSchedule on non-increasing times or impossible travel.
SimulationReport simulate_walk(const MetricInstance& instance, const Walk& walk,
                               WalkOptions options = {});

/// The trivial lower bound OPT >= H.
Rational lower_bound_H(const RateVector& rates);

/// Number of rounds within which every schedule pushes some bamboo above
/// `height` (< H): floor(n * height / (H - height)) + 1.
std::uint64_t total_height_horizon(const RateVector& rates, const Rational& height);

/// Replays the total-height potential on a cut sequence: returns the first
/// round in which some bamboo exceeds `height`, or nullopt if none does.
std::optional<std::uint64_t> first_round_exceeding(const RateVector& rates,
                                                   std::span<const std::size_t> schedule,
                                                   const Rational& height);

}  // namespace bgt

#endif  // BGT_CORE_HPP
