#include <doctest.h>

#include <numeric>
#include <random>

#include "bgt/continuous.hpp"
#include "support.hpp"

using namespace bgt;
using bgt::test::q;
using bgt::test::rv;

namespace {

// Kruskal with a tiny union-find, independent of the Prim implementation.
std::int64_t kruskal_weight(const MetricInstance& m, const std::vector<std::size_t>& pts) {
  struct E {
    std::int64_t w;
    std::size_t a, b;
  };
  std::vector<E> edges;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) edges.push_back({m.ticks(pts[i], pts[j]), i, j});
  }
  std::sort(edges.begin(), edges.end(), [](const E& x, const E& y) { return x.w < y.w; });
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::int64_t total = 0;
  for (const auto& e : edges) {
    std::size_t a = find(e.a), b = find(e.b);
    if (a != b) {
      parent[a] = b;
      total += e.w;
    }
  }
  return total;
}

MetricInstance path_instance(std::size_t n) {
  std::vector<std::int64_t> ticks(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) ticks[i * n + j] = i > j ? static_cast<std::int64_t>(i - j) : static_cast<std::int64_t>(j - i);
  }
  return MetricInstance(RateVector(std::vector<Rational>(n, q(1, static_cast<std::int64_t>(n)))), ticks, 1);
}

void check_run(const MetricInstance& inst, const ContinuousRun& run) {
  for (std::size_t i = 0; i < inst.size(); ++i) {
    INFO("point " << i + 1 << " class " << run.group[i]);
    CHECK(run.report.per_bamboo_max[i] <= run.bound[i]);
  }
  // The tick simulator agrees with the exact rational walk simulator.
  auto exact = simulate_walk(inst, run.walk.to_walk(inst));
  CHECK(exact.global_max == run.report.global_max);
}

}  // namespace

TEST_CASE("mst weights") {
  MetricInstance two(rv({q(1, 2), q(1, 2)}), {{q(0), q(3, 2)}, {q(3, 2), q(0)}});
  CHECK(two.ticks_to_time(mst(two).weight_ticks) == q(3, 2));
  MetricInstance tri(rv({q(1, 3), q(1, 3), q(1, 3)}), {{q(0), q(1), q(2)}, {q(1), q(0), q(2)}, {q(2), q(2), q(0)}});
  CHECK(mst(tri).weight_ticks == 3);
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = random_metric_instance(rng(), 2 + rng() % 30, 50, 9);
    std::vector<std::size_t> all(inst.size());
    std::iota(all.begin(), all.end(), 0);
    auto tree = mst(inst);
    CHECK(tree.weight_ticks == kruskal_weight(inst, all));
    CHECK(tree.edges.size() == inst.size() - 1);
    auto tour = euler_tour(tree, 0);
    CHECK(tour.size() == 2 * (inst.size() - 1));
    CHECK(tour_length_ticks(inst, tour) == 2 * tree.weight_ticks);
    std::vector<char> seen(inst.size(), 0);
    for (auto p : tour) seen[p] = 1;
    CHECK(std::count(seen.begin(), seen.end(), 1) == static_cast<long>(inst.size()));
  }
}

TEST_CASE("lower bounds") {
  MetricInstance two(rv({q(1, 2), q(1, 2)}), {{q(0), q(1)}, {q(1), q(0)}});
  CHECK(lower_bound_diameter(two) == q(1, 2));
  auto path = path_instance(6);
  CHECK(lower_bound_mst(path).value == q(5, 6));
  // Doubling travel doubles the diameter bound.
  MetricInstance dbl(rv({q(1, 2), q(1, 2)}), {{q(0), q(2)}, {q(2), q(0)}});
  CHECK(lower_bound_diameter(dbl) == 2 * lower_bound_diameter(two));
}

TEST_CASE("algorithm 1 on two points alternates") {
  MetricInstance two(rv({q(1, 2), q(1, 2)}), {{q(0), q(1)}, {q(1), q(0)}});
  auto run = algorithm1(two, q(20));
  CHECK(run.report.global_max == 1);
  check_run(two, run);
}

TEST_CASE("algorithm 2 with two single-point classes") {
  MetricInstance two(rv({q(2, 3), q(1, 3)}), {{q(0), q(1)}, {q(1), q(0)}});
  auto run = algorithm2(two, q(40));
  CHECK(run.s == 2);
  CHECK(run.report.per_bamboo_max[0] == q(4, 3));
  CHECK(run.report.per_bamboo_max[1] == q(2, 3));
  check_run(two, run);
}

TEST_CASE("algorithm 3 with everything in V_0 is round robin") {
  // n = 3 with rates 1/3: h n^2 / H = 3 > 1, so use many slow points instead.
  const std::size_t n = 20;
  std::vector<Rational> rates(n, q(1, 400));
  rates[0] = 1 - q(19, 400);
  // Only the first point is outside V_0.
  std::vector<std::int64_t> ticks(n * n, 1);
  for (std::size_t i = 0; i < n; ++i) ticks[i * n + i] = 0;
  MetricInstance inst(RateVector(rates), ticks, 1);
  auto run = algorithm3(inst, q(400));
  for (std::size_t i = 1; i < n; ++i) CHECK(run.group[i] == 0);
  check_run(inst, run);
}

TEST_CASE("continuous algorithms meet their bounds on random instances") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = random_metric_instance(rng(), 2 + rng() % 40, 200, 50);
    Rational horizon = 4 * inst.ticks_to_time(mst(inst).weight_ticks) * 40 + 40 * inst.diameter();
    auto r1 = algorithm1(inst, horizon);
    check_run(inst, r1);
    CHECK(r1.report.global_max <= 2 * inst.ticks_to_time(mst(inst).weight_ticks) * inst.rates().max());
    check_run(inst, algorithm2(inst, horizon));
    check_run(inst, algorithm3(inst, horizon));
  }
}

TEST_CASE("walk period detection") {
  auto inst = random_metric_instance(5, 12, 100, 20);
  auto wp = walk_period(inst, 3, 100000);
  REQUIRE(wp);
  CHECK(wp->cycle_iterations >= 1);
  CHECK(sgn(wp->cycle_time) > 0);
}

TEST_CASE("spiral construction") {
  Spiral sp = gen_spiral(512);
  CHECK(sp.group_sizes == std::vector<std::size_t>{256, 128, 64, 64});
  CHECK(sp.d1 == q(1, 64));
  CHECK(sp.d2 == q(1, 8));
  CHECK(sp.eps == q(3, 64));
  CHECK(sp.instance.rates().total() == 1);
  CHECK(sp.instance.rates().min() == q(1, 4096));
  // MST weight is about n d_1.
  double w = to_double(sp.instance.ticks_to_time(mst(sp.instance).weight_ticks));
  CHECK(w == doctest::Approx(512.0 / 64.0).epsilon(0.05));
  double D = to_double(sp.instance.diameter());
  CHECK(D >= 1.0);
  CHECK(D <= 2.0);
  CHECK_THROWS_AS(gen_spiral(100), std::invalid_argument);
  Spiral small = gen_spiral(8);
  CHECK(small.group_sizes == std::vector<std::size_t>{4, 4});
}

TEST_CASE("spiral lower bound d1/2 holds numerically") {
  // If every height stays <= d1/2, bamboo i must be visited every d1/(2 h_i)
  // time units; visits of distinct points take >= d1 apart on the spiral, so
  // the required visit rate sum_i 2 h_i / d1 times d1 must stay <= 1.
  Spiral sp = gen_spiral(512);
  Rational need = 0;
  for (auto h : sp.instance.rates().rates()) need += 2 * h;
  CHECK(need > 1);
}

TEST_CASE("two-cluster construction and sweep") {
  TwoCluster tc = gen_two_cluster(16, q(1));
  CHECK(tc.cluster_size == 8);
  CHECK(tc.instance.rates()[0] == q(1, 4));
  CHECK(tc.instance.rates()[2] == q(1, 8));
  CHECK(tc.instance.rates()[4] == q(1, 16));
  CHECK(tc.instance.rates().total() == 1);
  CHECK(tc.instance.diameter() == 1);
  auto walk = two_cluster_sweep(tc, q(40));
  auto rep = simulate_ticks(tc.instance, walk, false);
  CHECK(rep.global_max <= 2 * tc.instance.diameter() * tc.instance.rates().max() + q(1, 2));
  auto a3 = algorithm3(tc.instance, q(400));
  check_run(tc.instance, a3);
}

TEST_CASE("discrete schedule replayed in continuous time") {
  TwoCluster tc = gen_two_cluster(16, q(1));
  auto dc = discrete_as_continuous(tc.instance, 500);
  CHECK(dc.ratio_bound == 8);
  for (std::size_t i = 0; i < tc.instance.size(); ++i) CHECK(dc.report.per_bamboo_max[i] <= dc.bound[i]);
  CHECK(dc.report.global_max <= 2 * tc.instance.diameter());
  MetricInstance two(rv({q(1, 2), q(1, 2)}), {{q(0), q(1)}, {q(1), q(0)}});
  CHECK(discrete_as_continuous(two, 50).ratio_bound == 4);
  auto path = path_instance(5);
  CHECK(discrete_as_continuous(path, 100).ratio_bound == 10);
}

TEST_CASE("tick walks reject impossible steps") {
  MetricInstance two(rv({q(1, 2), q(1, 2)}), {{q(0), q(1)}, {q(1), q(0)}});
  TickWalk w;
  w.points = {1};
  w.ticks = {0};
  CHECK_THROWS_AS(simulate_ticks(two, w), InvalidSchedule);
}

TEST_CASE("cover horizon visits every point repeatedly") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_metric_instance(rng(), 2 + rng() % 60, 300, 1 + rng() % 200);
    for (int algo : {1, 2, 3}) {
      Rational h = cover_horizon(inst, algo, 3);
      ContinuousRun run = algo == 1 ? algorithm1(inst, h) : algo == 2 ? algorithm2(inst, h) : algorithm3(inst, h);
      std::vector<std::size_t> visits(inst.size(), 0);
      for (auto p : run.walk.points) ++visits[p];
      INFO("algorithm " << algo << " n " << inst.size());
      CHECK(*std::min_element(visits.begin(), visits.end()) >= 3);
    }
  }
  CHECK_THROWS_AS(cover_horizon(random_metric_instance(1, 4, 10, 3), 4), std::invalid_argument);
}
