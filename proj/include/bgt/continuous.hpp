#ifndef BGT_CONTINUOUS_HPP
#define BGT_CONTINUOUS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bgt/core.hpp"

namespace bgt {

struct TreeEdge {
  std::size_t u = 0;  // 0-based points
  std::size_t v = 0;
  std::int64_t ticks = 0;
};

struct SpanningTree {
  std::vector<std::size_t> points;
  std::vector<TreeEdge> edges;
  std::int64_t weight_ticks = 0;
};

/// Dense Prim over the given points; ties go to the lighter edge with the
/// lexicographically smaller endpoint pair.
SpanningTree mst(const MetricInstance& instance, std::span<const std::size_t> points);
SpanningTree mst(const MetricInstance& instance);

/// Closed Euler traversal of a spanning tree from root, children in
/// increasing index order. The final return to root is implicit, so the
/// result has 2(k - 1) entries for k >= 2 points and {root} for one point.
std::vector<std::size_t> euler_tour(const SpanningTree& tree, std::size_t root);

/// Total travel of the closed tour.
std::int64_t tour_length_ticks(const MetricInstance& instance, std::span<const std::size_t> tour);

/// D * h_max.
Rational lower_bound_diameter(const MetricInstance& instance);

struct MstBound {
  Rational value;
  std::vector<std::size_t> subset;  // all points with rate >= the threshold
};

/// max over thresholds r of r * MST({i : h_i >= r}).
MstBound lower_bound_mst(const MetricInstance& instance);

/// Walk in integer ticks of the instance's denominator; points are 0-based.
struct TickWalk {
  std::vector<std::uint32_t> points;
  std::vector<std::int64_t> ticks;

  std::size_t size() const { return points.size(); }
  Walk to_walk(const MetricInstance& instance) const;
};

/// Same semantics as simulate_walk, on a tick walk.
SimulationReport simulate_ticks(const MetricInstance& instance, const TickWalk& walk,
                                bool include_tail = true);

struct ContinuousRun {
  TickWalk walk;
  SimulationReport report;
  std::vector<Rational> bound;     // certified height per point
  std::vector<std::size_t> group;  // class per point (0 = V_0 in Algorithm 3)
  std::size_t s = 1;
  std::vector<Rational> class_mst;  // indexed by class
};

/// Repeated Euler tour of the global MST; bound 2 MST h_i.
ContinuousRun algorithm1(const MetricInstance& instance, const Rational& horizon);

/// Rate classes [2^(i-1) h_min, 2^i h_min); bound 3s(D + 2 MST(V_i)) h_max(V_i).
ContinuousRun algorithm2(const MetricInstance& instance, const Rational& horizon);

/// Classes (2^(i-1), 2^i] / n^2 relative to H plus the slow set V_0 visited
/// one point per iteration.
ContinuousRun algorithm3(const MetricInstance& instance, const Rational& horizon);

struct WalkPeriod {
  std::uint64_t preamble_iterations = 0;
  std::uint64_t cycle_iterations = 0;
  Rational preamble_end;  // time at which the first cycle starts
  Rational cycle_time;    // duration of one cycle
};

/// Detects when the tour cursors (and the V_0 counter) repeat at the start of
/// an outer iteration. algo is 2 or 3.
std::optional<WalkPeriod> walk_period(const MetricInstance& instance, int algo,
                                      std::uint64_t max_iterations);

/// A horizon long enough for the walk of the given algorithm (1, 2 or 3) to
/// pass over every class tour, and over V_0, at least `wraps` times.
Rational cover_horizon(const MetricInstance& instance, int algo, std::uint64_t wraps = 3);

struct Spiral {
  MetricInstance instance;
  std::vector<std::size_t> group_sizes;  // G_1 .. G_g, then G'
  Rational d1;
  Rational d2;
  Rational eps;
};

/// Points evenly spaced (chord d1 = n^(-2/3)) along an Archimedean spiral
/// starting at radius 1/2 with ring separation d2 = n^(-1/3). Requires n to be
/// a power of 8 with n >= 8.
Spiral gen_spiral(std::uint64_t n);

struct TwoCluster {
  MetricInstance instance;
  std::size_t cluster_size = 0;
  Rational padding_rate;
  std::vector<std::size_t> cluster_of;  // 0 or 1 per point
};

/// Two clusters of n/2 points on lines with spacing D/n^2, at distance D
/// from each other. Rates 1/4 .. 1/n in each cluster, padded so H = 1.
TwoCluster gen_two_cluster(std::uint64_t n, const Rational& D);

/// Sweep one cluster, jump, sweep the other, jump back.
TickWalk two_cluster_sweep(const TwoCluster& tc, const Rational& horizon);

struct DiscreteAsContinuous {
  TickWalk walk;
  SimulationReport report;
  std::vector<Rational> bound;  // h_i * D * f_i
  Rational ratio_bound;         // 2 / h_max
};

/// Follows the powers-of-two discrete schedule, spending exactly D per round.
DiscreteAsContinuous discrete_as_continuous(const MetricInstance& instance,
                                            std::uint64_t rounds);

/// Random instance: L1 distances between distinct points of a grid, random
/// integer rates normalized to H = 1.
MetricInstance random_metric_instance(std::uint64_t seed, std::size_t n, std::int64_t grid,
                                      std::uint64_t max_rate_weight);

}  // namespace bgt

#endif  // BGT_CONTINUOUS_HPP
