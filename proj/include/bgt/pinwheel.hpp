#ifndef BGT_PINWHEEL_HPP
#define BGT_PINWHEEL_HPP

#include <cstddef>
#include <cstdint>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "bgt/core.hpp"

namespace bgt {

/// Sum of 1/f over the frequencies.
Rational density(std::span<const std::uint64_t> freqs);

bool is_power_of_two(std::uint64_t v);

/// Residue classes for power-of-two frequencies with density <= 1: the
/// frequencies are laid out as consecutive dyadic intervals of [0, 1) in
/// increasing order and each interval is mapped to a residue class by
/// bit reversal. Entry i has period freqs[i].
ResidueForm schedule_powers_of_two(std::span<const std::uint64_t> freqs);

/// Frequencies merged by the two density-preserving rules: a Pair replaces two
/// equal frequencies 2f by f, a Combine replaces m equal frequencies m*f by f.
/// A node's frequency may later be lowered ("pushed down"); its children are
/// then served at 2x or m x the lowered value, which is never slower.
class FrequencyForest {
 public:
  enum class Kind { Leaf, Pair, Combine };

  struct Node {
    Kind kind = Kind::Leaf;
    std::uint64_t freq = 0;
    std::size_t bamboo = 0;  // Leaf only, 0-based
    std::vector<std::uint32_t> children;
  };

  std::uint32_t add_leaf(std::size_t bamboo, std::uint64_t freq);

  /// Throws std::invalid_argument unless both nodes have the same even frequency.
  std::uint32_t pair(std::uint32_t a, std::uint32_t b);

  /// Throws std::invalid_argument unless all nodes share a frequency divisible
  /// by their count.
  std::uint32_t combine(std::span<const std::uint32_t> nodes);

  /// Lowers a node's frequency; throws if new_freq is not smaller or is zero.
  void push_down(std::uint32_t node, std::uint64_t new_freq);

  const Node& node(std::uint32_t id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t leaf_count() const { return leaves_; }

  std::size_t pair_count() const { return pairs_; }
  std::size_t combine_count() const { return combines_; }
  std::size_t push_count() const { return pushes_; }

  /// Gives root r the class (p, q) and derives every descendant's class.
  /// Returns one Residue per leaf, indexed by bamboo.
  ResidueForm expand(std::span<const std::uint32_t> roots, std::span<const Residue> classes) const;

 private:
  std::vector<Node> nodes_;
  std::size_t leaves_ = 0;
  std::size_t pairs_ = 0;
  std::size_t combines_ = 0;
  std::size_t pushes_ = 0;
};

struct MainDiagnostics {
  Rational delta;  // rational upper bound on 3 sqrt(h_1/H)
  long min_layer = 0;
  long max_layer = 0;
  std::uint64_t C = 1;
  std::uint64_t K = 1;  // 2^min / C^2
  Rational density_after_rounding;
  Rational rounding_bound;  // (1 + 1/C) / (1 + delta)
  Rational final_density;
  Rational bound;  // (1 + delta) H
  std::size_t obs1_merges = 0;
  std::size_t obs2_merges = 0;
  std::size_t pushes = 0;
  std::size_t density_checks = 0;
};

struct MainResult {
  CyclicSchedule schedule;
  MainDiagnostics diagnostics;
  std::vector<std::uint64_t> frequencies;  // rounded frequency per bamboo
};

/// Cyclic schedule with every h_i * q_i <= (1 + delta) H, delta = 3 sqrt(h_1/H).
MainResult main_algorithm(const RateVector& rates);

struct TwoApproxResult {
  CyclicSchedule schedule;
  std::vector<std::uint64_t> frequencies;
};

/// Largest power of two <= 2H/h_i per bamboo; heights stay <= 2H.
TwoApproxResult two_approx(const RateVector& rates);

struct Density34 {
  Rational delta;  // 1/3 + h_1/H
  std::vector<std::uint64_t> frequencies;
  Rational density;
};

/// floor((1 + delta) H / h_i) with delta = 1/3 + h_1/H. Throws
/// std::invalid_argument if some value drops below 2 and std::logic_error if
/// the density is not below 3/4.
Density34 density_34_frequencies(const RateVector& rates);

/// Random rates with h_1 = head exactly and H = 1. The other n - 1 rates are
/// random integer weights in [W, 2W] scaled to 1 - head; requires
/// n - 1 >= 2 (1 - head) / head so that no rate exceeds head.
RateVector random_planted_rates(std::uint64_t seed, std::size_t n, const Rational& head);

/// Smallest n accepted by random_planted_rates for this head.
std::size_t planted_min_n(const Rational& head);

/// Random pinwheel frequencies, sorted, with smallest frequency f1 and
/// density at most target.
std::vector<std::uint64_t> random_pinwheel_instance(std::uint64_t seed, std::uint64_t f1,
                                                    const Rational& target, std::size_t max_n);

/// Replays a residue schedule round by round; 0 marks an idle round.
class NextCutsStream {
 public:
  explicit NextCutsStream(const ResidueForm& form);

  std::size_t next();
  std::uint64_t round() const { return round_; }

 private:
  using Event = std::pair<std::uint64_t, std::uint32_t>;
  std::vector<std::uint64_t> periods_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
  std::uint64_t round_ = 0;
};

}  // namespace bgt

#endif  // BGT_PINWHEEL_HPP
