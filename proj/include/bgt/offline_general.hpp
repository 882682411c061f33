#ifndef BGT_OFFLINE_GENERAL_HPP
#define BGT_OFFLINE_GENERAL_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bgt/core.hpp"
#include "bgt/oracle.hpp"
#include "bgt/pinwheel.hpp"

namespace bgt {

struct SplitPlan {
  Rational m;
  std::vector<std::size_t> L;  // 0-based, increasing
  std::vector<std::size_t> S;
  Rational sum_L;
  Rational sum_S;
};

/// log2(n) / (4 log2 log2 n), with each logarithm clamped below at 1.
Rational default_threshold_m(std::size_t n);

/// L = {i : h_i >= 1/m}. Throws std::invalid_argument unless H == 1.
SplitPlan split(const RateVector& rates, const Rational& m);

/// Moves members of S to L, largest rates first, skipping any whose move
/// would take the S-sum below target. The resulting S-sum lies in
/// [target, target + largest S-rate).
SplitPlan rebalance(const RateVector& rates, const SplitPlan& plan, const Rational& target);

/// A schedule over a subset of the bamboos; members map local ids to global
/// 0-based indices.
struct SubSchedule {
  std::string name;
  std::vector<std::size_t> members;
  CyclicSchedule schedule;
};

/// Round-robin over a pattern of sub-schedules: the r-th round takes the next
/// cut of sub-schedule pattern[(r - 1) mod |pattern|].
class MergedSchedule {
 public:
  MergedSchedule() = default;

  /// Sub-schedules without members are dropped together with their tokens.
  MergedSchedule(std::size_t n, std::vector<SubSchedule> subs, std::vector<std::size_t> pattern);

  std::size_t size() const { return n_; }
  const std::vector<SubSchedule>& subs() const { return subs_; }
  const std::vector<std::size_t>& pattern() const { return pattern_; }
  std::string pattern_string() const;

  /// Merged round of the k-th (1-based) round of sub-schedule s.
  std::uint64_t position(std::size_t s, std::uint64_t k) const;

  /// Exact supremum per bamboo, computed from the sub-schedules' structure.
  SimulationReport evaluate(const RateVector& rates) const;

  std::vector<std::size_t> prefix(std::uint64_t rounds) const;

 private:
  std::size_t n_ = 0;
  std::vector<SubSchedule> subs_;
  std::vector<std::size_t> pattern_;
  std::vector<std::vector<std::uint64_t>> slots_;  // 1-based pattern positions per sub
};

/// Round-by-round output of a MergedSchedule; 0 marks an idle round.
class MergedStream {
 public:
  explicit MergedStream(const MergedSchedule& schedule);
  ~MergedStream();
  MergedStream(MergedStream&&) noexcept;

  std::size_t next();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct EightFifthsResult {
  int case_id = 0;  // 0 when L is empty
  SplitPlan plan;
  std::optional<SplitPlan> rebalanced;
  MergedSchedule schedule;
  std::vector<Rational> bound;  // certified height per bamboo
  std::vector<std::string> rule;
  Rational slack;               // 4 * largest S-rate
  std::optional<Rational> l_opt;
  bool l_optimal = false;       // L scheduled by the exact oracle
  Rational s_delta;             // delta used for the S part
  Rational s_bound;             // (1 + s_delta) * sum of the S part
};

EightFifthsResult eight_fifths(const RateVector& rates,
                               std::optional<Rational> m_override = std::nullopt,
                               std::size_t state_budget = default_state_budget());

}  // namespace bgt

#endif  // BGT_OFFLINE_GENERAL_HPP
