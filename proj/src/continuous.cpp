#include "bgt/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "bgt/pinwheel.hpp"

namespace bgt {

SpanningTree mst(const MetricInstance& instance, std::span<const std::size_t> points) {
  if (points.empty()) throw std::invalid_argument("mst of an empty point set");
  SpanningTree tree;
  tree.points.assign(points.begin(), points.end());
  std::sort(tree.points.begin(), tree.points.end());
  const std::size_t k = tree.points.size();
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> key(k, kInf);
  std::vector<std::size_t> parent(k, 0);
  std::vector<char> in_tree(k, 0);
  key[0] = 0;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = k;
    for (std::size_t v = 0; v < k; ++v) {
      if (in_tree[v]) continue;
      if (best == k) {
        best = v;
        continue;
      }
      // Lighter edge first, then the smaller endpoint pair.
      auto pair_of = [&](std::size_t x) {
        std::size_t a = tree.points[parent[x]], b = tree.points[x];
        return std::make_pair(std::min(a, b), std::max(a, b));
      };
      if (key[v] < key[best] || (key[v] == key[best] && step > 0 && pair_of(v) < pair_of(best))) {
        best = v;
      }
    }
    in_tree[best] = 1;
    if (step > 0) {
      tree.edges.push_back({tree.points[parent[best]], tree.points[best], key[best]});
      tree.weight_ticks += key[best];
    }
    for (std::size_t v = 0; v < k; ++v) {
      if (in_tree[v]) continue;
      std::int64_t w = instance.ticks(tree.points[best], tree.points[v]);
      if (w < key[v]) {
        key[v] = w;
        parent[v] = best;
      }
    }
  }
  return tree;
}

SpanningTree mst(const MetricInstance& instance) {
  std::vector<std::size_t> all(instance.size());
  std::iota(all.begin(), all.end(), 0);
  return mst(instance, all);
}

std::vector<std::size_t> euler_tour(const SpanningTree& tree, std::size_t root) {
  if (std::find(tree.points.begin(), tree.points.end(), root) == tree.points.end()) {
    throw std::invalid_argument("tour root is not a tree vertex");
  }
  std::map<std::size_t, std::vector<std::size_t>> adj;
  for (const auto& e : tree.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& [v, list] : adj) std::sort(list.begin(), list.end());

  std::vector<std::size_t> tour{root};
  struct Frame {
    std::size_t node;
    std::size_t parent;
    std::size_t next = 0;
  };
  std::vector<Frame> stack{{root, root, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& kids = adj[f.node];
    if (f.next < kids.size()) {
      std::size_t c = kids[f.next++];
      if (c == f.parent && f.node != root) continue;
      if (c == f.parent && f.node == root && stack.size() > 1) continue;
      tour.push_back(c);
      stack.push_back({c, f.node, 0});
      continue;
    }
    stack.pop_back();
    if (!stack.empty()) tour.push_back(stack.back().node);
  }
  tour.pop_back();  // the closing return to root is implicit
  if (tour.empty()) tour.push_back(root);
  return tour;
}

std::int64_t tour_length_ticks(const MetricInstance& instance, std::span<const std::size_t> tour) {
  std::int64_t total = 0;
  for (std::size_t t = 0; t < tour.size(); ++t) {
    total += instance.ticks(tour[t], tour[(t + 1) % tour.size()]);
  }
  return total;
}

Rational lower_bound_diameter(const MetricInstance& instance) {
  if (instance.size() < 2) throw std::invalid_argument("need at least two points");
  return instance.diameter() * instance.rates().max();
}

MstBound lower_bound_mst(const MetricInstance& instance) {
  const auto& rates = instance.rates();
  MstBound best;
  best.value = -1;
  std::vector<std::size_t> prefix;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    prefix.push_back(i);
    if (i + 1 < rates.size() && rates[i + 1] == rates[i]) continue;  // include all tied points
    Rational v = rates[i] * instance.ticks_to_time(mst(instance, prefix).weight_ticks);
    if (v > best.value) {
      best.value = v;
      best.subset = prefix;
    }
  }
  return best;
}

Walk TickWalk::to_walk(const MetricInstance& instance) const {
  Walk out;
  out.reserve(points.size());
  for (std::size_t s = 0; s < points.size(); ++s) {
    out.push_back({static_cast<std::size_t>(points[s]) + 1, instance.ticks_to_time(ticks[s])});
  }
  return out;
}

SimulationReport simulate_ticks(const MetricInstance& instance, const TickWalk& walk,
                                bool include_tail) {
  const std::size_t n = instance.size();
  if (walk.points.size() != walk.ticks.size()) throw std::invalid_argument("malformed tick walk");
  std::vector<std::int64_t> last(n, 0), max_gap(n, 0), max_end(n, 0), steady(n, 0);
  std::vector<char> visited(n, 0);
  visited[instance.start()] = 1;
  auto note = [&](std::size_t i, std::int64_t now, bool is_steady) {
    std::int64_t gap = now - last[i];
    if (gap > max_gap[i]) {
      max_gap[i] = gap;
      max_end[i] = now;
    }
    if (is_steady && gap > steady[i]) steady[i] = gap;
  };
  std::size_t pos = instance.start();
  std::int64_t now = 0;
  for (std::size_t s = 0; s < walk.size(); ++s) {
    std::size_t p = walk.points[s];
    std::int64_t t = walk.ticks[s];
    if (p >= n) throw std::out_of_range("walk names point " + std::to_string(p + 1));
    if (t <= now) throw InvalidSchedule("walk times must be strictly increasing");
    if (t - now < instance.ticks(pos, p)) {
      throw InvalidSchedule("walk step " + std::to_string(s + 1) + " is faster than travel allows");
    }
    now = t;
    note(p, now, visited[p] != 0);
    visited[p] = 1;
    last[p] = now;
    pos = p;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (include_tail || !visited[i]) note(i, now, false);
  }
  const auto& rates = instance.rates();
  SimulationReport rep;
  rep.per_bamboo_max.resize(n);
  rep.global_max = 0;
  rep.steady_state_max = 0;
  for (std::size_t i = 0; i < n; ++i) {
    rep.per_bamboo_max[i] = rates[i] * instance.ticks_to_time(max_gap[i]);
    if (rep.argmax_bamboo == 0 || rep.per_bamboo_max[i] > rep.global_max) {
      rep.global_max = rep.per_bamboo_max[i];
      rep.argmax_bamboo = i + 1;
      rep.argmax_time = instance.ticks_to_time(max_end[i]);
    }
    Rational st = rates[i] * instance.ticks_to_time(steady[i]);
    if (st > rep.steady_state_max) rep.steady_state_max = st;
  }
  rep.horizon = instance.ticks_to_time(now);
  return rep;
}

namespace {

std::int64_t horizon_ticks(const MetricInstance& instance, const Rational& horizon) {
  if (sgn(horizon) <= 0) throw std::invalid_argument("horizon must be positive");
  return to_i64(ceil(horizon * instance.denominator()));
}

class WalkBuilder {
 public:
  explicit WalkBuilder(const MetricInstance& instance)
      : inst_(instance), pos_(instance.start()) {}

  void go(std::size_t p) {
    if (p == pos_) return;
    now_ += inst_.ticks(pos_, p);
    walk_.points.push_back(static_cast<std::uint32_t>(p));
    walk_.ticks.push_back(now_);
    pos_ = p;
  }
  std::int64_t now() const { return now_; }
  std::size_t pos() const { return pos_; }
  TickWalk take() { return std::move(walk_); }

 private:
  const MetricInstance& inst_;
  std::size_t pos_;
  std::int64_t now_ = 0;
  TickWalk walk_;
};

struct ClassTour {
  std::size_t id = 0;  // class number i
  std::vector<std::size_t> members;
  std::vector<std::size_t> tour;
  std::int64_t mst_ticks = 0;
  std::size_t cursor = 0;
};

struct ClassPlan {
  std::size_t s = 1;
  std::vector<std::size_t> group;  // per point
  std::vector<ClassTour> classes;  // nonempty, increasing id
  std::vector<std::size_t> v0;
};

std::size_t nearest_to(const MetricInstance& instance, const std::vector<std::size_t>& pts,
                       std::size_t from) {
  std::size_t best = pts.front();
  for (std::size_t p : pts) {
    if (instance.ticks(from, p) < instance.ticks(from, best)) best = p;
  }
  return best;
}

void build_tours(const MetricInstance& instance, ClassPlan& plan) {
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t p = 0; p < instance.size(); ++p) {
    if (plan.group[p] == 0) {
      plan.v0.push_back(p);
    } else {
      members[plan.group[p]].push_back(p);
    }
  }
  for (auto& [id, pts] : members) {
    ClassTour ct;
    ct.id = id;
    ct.members = pts;
    SpanningTree tree = mst(instance, pts);
    ct.mst_ticks = tree.weight_ticks;
    ct.tour = euler_tour(tree, nearest_to(instance, pts, instance.start()));
    plan.classes.push_back(std::move(ct));
  }
}

ClassPlan plan_algorithm2(const MetricInstance& instance) {
  const auto& rates = instance.rates();
  ClassPlan plan;
  plan.s = static_cast<std::size_t>(floor_log2(rates.max() / rates.min())) + 1;
  plan.group.resize(instance.size());
  for (std::size_t p = 0; p < instance.size(); ++p) {
    plan.group[p] = static_cast<std::size_t>(floor_log2(rates[p] / rates.min())) + 1;
  }
  build_tours(instance, plan);
  return plan;
}

long ceil_log2(const Rational& x) {
  long k = floor_log2(x);
  return x == pow2(k) ? k : k + 1;
}

ClassPlan plan_algorithm3(const MetricInstance& instance) {
  const auto& rates = instance.rates();
  const std::size_t n = instance.size();
  const Rational n2 = Rational(static_cast<unsigned long>(n)) * static_cast<unsigned long>(n);
  ClassPlan plan;
  plan.s = static_cast<std::size_t>(ceil_log2(n2));
  plan.group.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    Rational x = rates[p] * n2 / rates.total();
    plan.group[p] = x <= 1 ? 0 : static_cast<std::size_t>(ceil_log2(x));
  }
  build_tours(instance, plan);
  return plan;
}

// One pass of the outer loop: every class tour, then one V_0 point.
void run_iteration(const MetricInstance& instance, ClassPlan& plan, std::size_t& v0_next,
                   WalkBuilder& wb) {
  const std::int64_t D = instance.diameter_ticks();
  for (auto& ct : plan.classes) {
    wb.go(ct.tour[ct.cursor]);
    if (ct.members.size() < 2) continue;
    std::int64_t covered = 0;
    const std::size_t len = ct.tour.size();
    while (covered < D) {
      std::size_t nxt = (ct.cursor + 1) % len;
      covered += instance.ticks(ct.tour[ct.cursor], ct.tour[nxt]);
      ct.cursor = nxt;
      wb.go(ct.tour[ct.cursor]);
    }
  }
  if (!plan.v0.empty()) {
    wb.go(plan.v0[v0_next]);
    v0_next = (v0_next + 1) % plan.v0.size();
  }
}

ContinuousRun run_classes(const MetricInstance& instance, ClassPlan plan, const Rational& horizon,
                          int algo) {
  if (instance.size() < 2) throw std::invalid_argument("continuous algorithms need n >= 2");
  const std::int64_t limit = horizon_ticks(instance, horizon);
  WalkBuilder wb(instance);
  std::size_t v0_next = 0;
  ClassPlan work = plan;
  while (wb.now() < limit) {
    std::int64_t before = wb.now();
    run_iteration(instance, work, v0_next, wb);
    if (wb.now() == before) break;  // nothing left to move to
  }
  ContinuousRun run;
  run.walk = wb.take();
  run.report = simulate_ticks(instance, run.walk);
  run.group = plan.group;
  run.s = plan.s;

  const auto& rates = instance.rates();
  const Rational D = instance.diameter();
  const Rational s = static_cast<unsigned long>(plan.s);
  run.bound.assign(instance.size(), Rational(0));
  run.class_mst.assign(plan.s + 1, Rational(0));
  const Rational factor = algo == 2 ? Rational(3 * s) : Rational(3 * s + 1);
  for (const auto& ct : plan.classes) {
    Rational m = instance.ticks_to_time(ct.mst_ticks);
    run.class_mst[ct.id] = m;
    Rational hmax = rates[ct.members.front()];
    Rational b = factor * (D + 2 * m) * hmax;
    for (std::size_t p : ct.members) run.bound[p] = b;
  }
  if (!plan.v0.empty()) {
    Rational hmax = rates[plan.v0.front()];
    Rational b = (3 * D * s + D) * static_cast<unsigned long>(plan.v0.size()) * hmax;
    for (std::size_t p : plan.v0) run.bound[p] = b;
  }
  return run;
}

}  // namespace

ContinuousRun algorithm1(const MetricInstance& instance, const Rational& horizon) {
  if (instance.size() < 2) throw std::invalid_argument("continuous algorithms need n >= 2");
  const std::int64_t limit = horizon_ticks(instance, horizon);
  SpanningTree tree = mst(instance);
  std::vector<std::size_t> tour = euler_tour(tree, instance.start());
  WalkBuilder wb(instance);
  for (std::size_t t = 1; wb.now() < limit; ++t) wb.go(tour[t % tour.size()]);
  ContinuousRun run;
  run.walk = wb.take();
  run.report = simulate_ticks(instance, run.walk);
  run.group.assign(instance.size(), 1);
  run.class_mst = {Rational(0), instance.ticks_to_time(tree.weight_ticks)};
  run.bound.resize(instance.size());
  for (std::size_t p = 0; p < instance.size(); ++p) {
    run.bound[p] = 2 * run.class_mst[1] * instance.rates()[p];
  }
  return run;
}

ContinuousRun algorithm2(const MetricInstance& instance, const Rational& horizon) {
  return run_classes(instance, plan_algorithm2(instance), horizon, 2);
}

ContinuousRun algorithm3(const MetricInstance& instance, const Rational& horizon) {
  return run_classes(instance, plan_algorithm3(instance), horizon, 3);
}

std::optional<WalkPeriod> walk_period(const MetricInstance& instance, int algo,
                                      std::uint64_t max_iterations) {
  if (algo != 2 && algo != 3) throw std::invalid_argument("walk_period supports algorithms 2 and 3");
  ClassPlan plan = algo == 2 ? plan_algorithm2(instance) : plan_algorithm3(instance);
  WalkBuilder wb(instance);
  std::size_t v0_next = 0;
  std::map<std::vector<std::size_t>, std::pair<std::uint64_t, std::int64_t>> seen;
  for (std::uint64_t it = 0; it <= max_iterations; ++it) {
    std::vector<std::size_t> state{wb.pos(), v0_next};
    for (const auto& ct : plan.classes) state.push_back(ct.cursor);
    auto [where, fresh] = seen.emplace(state, std::make_pair(it, wb.now()));
    if (!fresh) {
      WalkPeriod wp;
      wp.preamble_iterations = where->second.first;
      wp.cycle_iterations = it - where->second.first;
      wp.preamble_end = instance.ticks_to_time(where->second.second);
      wp.cycle_time = instance.ticks_to_time(wb.now() - where->second.second);
      return wp;
    }
    run_iteration(instance, plan, v0_next, wb);
  }
  return std::nullopt;
}

Rational cover_horizon(const MetricInstance& instance, int algo, std::uint64_t wraps) {
  const Rational D = instance.diameter();
  if (algo == 1) {
    return (wraps + 1) * 2 * instance.ticks_to_time(mst(instance).weight_ticks) + 2 * D;
  }
  if (algo != 2 && algo != 3) throw std::invalid_argument("cover_horizon supports algorithms 1, 2 and 3");
  ClassPlan plan = algo == 2 ? plan_algorithm2(instance) : plan_algorithm3(instance);
  // An iteration lasts at most 3D per class plus 2D for the V_0 visit, and
  // advances every class tour by at least D.
  BigInt need = std::max<std::size_t>(1, plan.v0.size());
  for (const auto& ct : plan.classes) {
    need = std::max(need, BigInt(ceil(2 * instance.ticks_to_time(ct.mst_ticks) / D) + 2));
  }
  const auto per_iteration = static_cast<unsigned long>(3 * plan.classes.size() + 2);
  return Rational(need) * static_cast<unsigned long>(wraps) * per_iteration * D;
}

Spiral gen_spiral(std::uint64_t n) {
  unsigned a = 0;
  std::uint64_t v = n;
  while (v >= 8 && v % 8 == 0) {
    v /= 8;
    ++a;
  }
  if (v != 1 || a == 0) throw std::invalid_argument("spiral size must be a power of 8, at least 8");
  const std::uint64_t cube_root = std::uint64_t{1} << a;
  Spiral sp;
  sp.d1 = make_rational(1, static_cast<std::int64_t>(cube_root * cube_root));
  sp.d2 = make_rational(1, static_cast<std::int64_t>(cube_root));
  sp.eps = 3 * sp.d1;

  // Place points along r(theta) = 1/2 + d2 theta / (2 pi) at chord distance d1.
  const double d1 = to_double(sp.d1);
  const double d2 = to_double(sp.d2);
  const double two_pi = 2.0 * std::acos(-1.0);
  auto at = [&](double th) {
    double r = 0.5 + d2 * th / two_pi;
    return std::make_pair(r * std::cos(th), r * std::sin(th));
  };
  std::vector<std::pair<double, double>> xy;
  double theta = 0.0;
  xy.push_back(at(theta));
  for (std::uint64_t k = 1; k < n; ++k) {
    auto [x0, y0] = xy.back();
    double lo = theta;
    double hi = theta + 4.0 * d1 / (0.5 + d2 * theta / two_pi);
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      auto [x, y] = at(mid);
      if (std::hypot(x - x0, y - y0) < d1) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    theta = hi;
    xy.push_back(at(theta));
  }

  // Group sizes along the spiral: n/2, n/4, ..., then the remainder G'.
  std::vector<std::uint64_t> sizes;
  std::uint64_t used = 0;
  for (unsigned i = 1; i <= a; ++i) {
    sizes.push_back(n >> i);
    used += n >> i;
  }
  sizes.push_back(n - used);
  const Rational log_n = static_cast<unsigned long>(3 * a);
  std::vector<Rational> group_rate;
  for (unsigned i = 1; i <= a; ++i) {
    group_rate.push_back((3 - sp.eps) * pow2(i) / (Rational(static_cast<unsigned long>(n)) * log_n));
  }
  group_rate.push_back(sp.d1 * sp.d1);  // n^(-4/3)

  // Relabel by non-increasing rate: G_a first, G' last, spiral order inside.
  std::vector<std::size_t> spiral_start(sizes.size(), 0);
  for (std::size_t g = 1; g < sizes.size(); ++g) spiral_start[g] = spiral_start[g - 1] + sizes[g - 1];
  std::vector<std::size_t> order;  // order[label] = spiral position
  std::vector<Rational> rates;
  for (std::size_t gi = 0; gi < sizes.size(); ++gi) {
    std::size_t g = gi < a ? a - 1 - gi : a;
    for (std::uint64_t k = 0; k < sizes[g]; ++k) {
      order.push_back(spiral_start[g] + k);
      rates.push_back(group_rate[g]);
    }
  }
  for (std::size_t g = 0; g < sizes.size(); ++g) sp.group_sizes.push_back(sizes[g]);

  constexpr std::int64_t kDen = std::int64_t{1} << 40;
  std::vector<std::int64_t> ticks(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto [xi, yi] = xy[order[i]];
      auto [xj, yj] = xy[order[j]];
      double d = std::hypot(xi - xj, yi - yj);
      // Floating error is far below one tick, so three spare ticks per edge keep
      // the triangle inequality after rounding up.
      auto t = static_cast<std::int64_t>(std::ceil(std::ldexp(d, 40))) + 3;
      ticks[i * n + j] = ticks[j * n + i] = t;
    }
  }
  RateVector rv(std::move(rates));
  if (rv.total() != 1) throw std::logic_error("spiral rates do not sum to 1");
  if (n <= 512) {
    sp.instance = MetricInstance(std::move(rv), std::move(ticks), kDen, 0);
  } else {
    // The cubic metric check is too slow here; the snap margin covers it.
    sp.instance = MetricInstance(MetricInstance::Trusted{}, std::move(rv), std::move(ticks), kDen, 0);
  }
  return sp;
}

TwoCluster gen_two_cluster(std::uint64_t n, const Rational& D) {
  if (n < 4 || !is_power_of_two(n)) throw std::invalid_argument("n must be a power of two >= 4");
  if (sgn(D) <= 0) throw std::invalid_argument("D must be positive");
  const std::uint64_t half = n / 2;
  const unsigned L = static_cast<unsigned>(63 - __builtin_clzll(n));
  const std::uint64_t named = L - 1;  // rates 1/4 .. 1/n
  if (named > half) throw std::invalid_argument("n too small for the rate list");
  const std::uint64_t pad = half - named;
  TwoCluster tc;
  tc.cluster_size = half;
  tc.padding_rate = pad == 0 ? Rational(0)
                             : make_rational(1, static_cast<std::int64_t>(n * pad));

  // Labels in rate order, alternating clusters; pos = place on the cluster's line.
  std::vector<Rational> rates;
  std::vector<std::uint64_t> pos;
  for (std::uint64_t k = 0; k < half; ++k) {
    Rational r = k < named ? pow2(-static_cast<long>(k + 2)) : tc.padding_rate;
    for (std::size_t c = 0; c < 2; ++c) {
      rates.push_back(r);
      pos.push_back(k);
      tc.cluster_of.push_back(c);
    }
  }
  const BigInt& a = D.get_num();
  const BigInt& b = D.get_den();
  const std::int64_t num = to_i64(a);
  const std::int64_t den = to_i64(BigInt(b * static_cast<unsigned long>(n * n)));
  std::vector<std::int64_t> ticks(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (tc.cluster_of[i] != tc.cluster_of[j]) {
        ticks[i * n + j] = num * static_cast<std::int64_t>(n * n);
      } else {
        auto gap = static_cast<std::int64_t>(pos[i] > pos[j] ? pos[i] - pos[j] : pos[j] - pos[i]);
        ticks[i * n + j] = num * gap;
      }
    }
  }
  RateVector rv(std::move(rates));
  if (rv.total() != 1) throw std::logic_error("two-cluster rates do not sum to 1");
  tc.instance = MetricInstance(std::move(rv), std::move(ticks), den, 0);
  return tc;
}

TickWalk two_cluster_sweep(const TwoCluster& tc, const Rational& horizon) {
  const auto& inst = tc.instance;
  const std::int64_t limit = horizon_ticks(inst, horizon);
  // Labels 2k and 2k+1 sit at position k of clusters 0 and 1.
  std::vector<std::size_t> cycle;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t k = 0; k < tc.cluster_size; ++k) cycle.push_back(2 * k + c);
  }
  WalkBuilder wb(inst);
  for (std::size_t t = 1; wb.now() < limit; ++t) wb.go(cycle[t % cycle.size()]);
  return wb.take();
}

DiscreteAsContinuous discrete_as_continuous(const MetricInstance& instance, std::uint64_t rounds) {
  const auto& rates = instance.rates();
  TwoApproxResult ta = two_approx(rates);
  DiscreteAsContinuous out;
  const std::int64_t D = instance.diameter_ticks();
  NextCutsStream stream(ta.schedule.residue());
  for (std::uint64_t r = 1; r <= rounds; ++r) {
    std::size_t id = stream.next();
    if (id == 0) continue;
    out.walk.points.push_back(static_cast<std::uint32_t>(id - 1));
    out.walk.ticks.push_back(static_cast<std::int64_t>(r) * D);
  }
  out.report = simulate_ticks(instance, out.walk);
  const Rational Dt = instance.diameter();
  out.bound.resize(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    out.bound[i] = rates[i] * Dt * static_cast<unsigned long>(ta.frequencies[i]);
  }
  out.ratio_bound = 2 / rates.max();
  return out;
}

MetricInstance random_metric_instance(std::uint64_t seed, std::size_t n, std::int64_t grid,
                                      std::uint64_t max_rate_weight) {
  if (n < 2) throw std::invalid_argument("need at least two points");
  if (static_cast<double>(grid + 1) * static_cast<double>(grid + 1) < static_cast<double>(n)) {
    throw std::invalid_argument("grid too small for n distinct points");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> coord(0, grid);
  std::uniform_int_distribution<std::uint64_t> weight(1, max_rate_weight);
  std::set<std::pair<std::int64_t, std::int64_t>> taken;
  std::vector<std::pair<std::int64_t, std::int64_t>> pts;
  while (pts.size() < n) {
    std::pair<std::int64_t, std::int64_t> p{coord(rng), coord(rng)};
    if (taken.insert(p).second) pts.push_back(p);
  }
  std::vector<std::uint64_t> w(n);
  std::uint64_t total = 0;
  for (auto& x : w) {
    x = weight(rng);
    total += x;
  }
  std::sort(w.begin(), w.end(), std::greater<>());
  std::vector<Rational> rates;
  for (std::uint64_t x : w) {
    rates.push_back(make_rational(static_cast<std::int64_t>(x), static_cast<std::int64_t>(total)));
  }
  std::vector<std::int64_t> ticks(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ticks[i * n + j] = std::llabs(pts[i].first - pts[j].first) +
                         std::llabs(pts[i].second - pts[j].second);
    }
  }
  return MetricInstance(RateVector(std::move(rates)), std::move(ticks), 1, 0);
}

}  // namespace bgt
