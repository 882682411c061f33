#include "bgt/pinwheel.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace bgt {

Rational density(std::span<const std::uint64_t> freqs) {
  std::map<std::uint64_t, std::uint64_t> counts;
  for (std::uint64_t f : freqs) {
    if (f == 0) throw std::invalid_argument("frequencies must be positive");
    ++counts[f];
  }
  Rational d = 0;
  for (const auto& [f, c] : counts) {
    d += make_rational(BigInt(static_cast<unsigned long>(c)), BigInt(static_cast<unsigned long>(f)));
  }
  return d;
}

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

namespace {

unsigned log2_exact(std::uint64_t v) { return static_cast<unsigned>(63 - __builtin_clzll(v)); }

std::uint64_t reverse_bits(std::uint64_t v, unsigned bits) {
  std::uint64_t r = 0;
  for (unsigned b = 0; b < bits; ++b) {
    r = (r << 1) | (v & 1);
    v >>= 1;
  }
  return r;
}

}  // namespace

ResidueForm schedule_powers_of_two(std::span<const std::uint64_t> freqs) {
  if (freqs.empty()) throw std::invalid_argument("need at least one frequency");
  std::uint64_t top = 0;
  for (std::uint64_t f : freqs) {
    if (!is_power_of_two(f)) {
      throw std::invalid_argument("frequency " + std::to_string(f) + " is not a power of two");
    }
    top = std::max(top, f);
  }
  if (density(freqs) > 1) throw std::invalid_argument("density exceeds 1");

  std::vector<std::size_t> order(freqs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return freqs[a] < freqs[b]; });

  ResidueForm form;
  form.entries.resize(freqs.size());
  std::uint64_t used = 0;  // covered part of [0, 1), in units of 1/top
  for (std::size_t i : order) {
    const std::uint64_t f = freqs[i];
    const std::uint64_t width = top / f;
    const std::uint64_t slot = used / width;  // used is a multiple of width
    form.entries[i] = Residue{reverse_bits(slot, log2_exact(f)) + 1, f};
    used += width;
  }
  return form;
}

std::uint32_t FrequencyForest::add_leaf(std::size_t bamboo, std::uint64_t freq) {
  if (freq == 0) throw std::invalid_argument("leaf frequency must be positive");
  Node node;
  node.kind = Kind::Leaf;
  node.freq = freq;
  node.bamboo = bamboo;
  nodes_.push_back(std::move(node));
  ++leaves_;
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

namespace {

void check_density_preserved(std::span<const std::uint64_t> child_freqs, std::uint64_t parent) {
  Rational before = 0;
  for (std::uint64_t f : child_freqs) before += make_rational(BigInt(1), BigInt(static_cast<unsigned long>(f)));
  if (before != make_rational(BigInt(1), BigInt(static_cast<unsigned long>(parent)))) {
    throw std::logic_error("merge changed the density");
  }
}

}  // namespace

std::uint32_t FrequencyForest::pair(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t f = nodes_.at(a).freq;
  if (a == b || f != nodes_.at(b).freq || f % 2 != 0) {
    throw std::invalid_argument("pairing needs two distinct nodes of equal even frequency");
  }
  const std::uint64_t kids[2] = {f, f};
  check_density_preserved(kids, f / 2);
  Node node;
  node.kind = Kind::Pair;
  node.freq = f / 2;
  node.children = {a, b};
  nodes_.push_back(std::move(node));
  ++pairs_;
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t FrequencyForest::combine(std::span<const std::uint32_t> ids) {
  if (ids.size() < 2) throw std::invalid_argument("combining needs at least two nodes");
  const std::uint64_t f = nodes_.at(ids[0]).freq;
  std::vector<std::uint64_t> kids;
  for (std::uint32_t id : ids) {
    if (nodes_.at(id).freq != f) throw std::invalid_argument("combined nodes differ in frequency");
    kids.push_back(f);
  }
  if (f % ids.size() != 0) throw std::invalid_argument("frequency not divisible by group size");
  check_density_preserved(kids, f / ids.size());
  Node node;
  node.kind = Kind::Combine;
  node.freq = f / ids.size();
  node.children.assign(ids.begin(), ids.end());
  nodes_.push_back(std::move(node));
  ++combines_;
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

void FrequencyForest::push_down(std::uint32_t id, std::uint64_t new_freq) {
  Node& node = nodes_.at(id);
  if (new_freq == 0 || new_freq >= node.freq) {
    throw std::invalid_argument("push_down must lower the frequency");
  }
  node.freq = new_freq;
  ++pushes_;
}

ResidueForm FrequencyForest::expand(std::span<const std::uint32_t> roots,
                                    std::span<const Residue> classes) const {
  if (roots.size() != classes.size()) throw std::invalid_argument("one class per root required");
  ResidueForm out;
  out.entries.resize(leaves_);
  std::vector<char> filled(leaves_, 0);
  std::vector<std::pair<std::uint32_t, Residue>> stack;
  for (std::size_t r = 0; r < roots.size(); ++r) stack.emplace_back(roots[r], classes[r]);
  while (!stack.empty()) {
    auto [id, cls] = stack.back();
    stack.pop_back();
    const Node& node = nodes_.at(id);
    if (node.kind == Kind::Leaf) {
      if (node.bamboo >= leaves_ || filled[node.bamboo]) {
        throw std::logic_error("leaf bamboo indices must be a permutation");
      }
      out.entries[node.bamboo] = cls;
      filled[node.bamboo] = 1;
      continue;
    }
    const std::uint64_t m = node.children.size();
    for (std::uint64_t t = 0; t < m; ++t) {
      stack.emplace_back(node.children[t], Residue{cls.offset + t * cls.period, m * cls.period});
    }
  }
  for (std::size_t i = 0; i < leaves_; ++i) {
    if (!filled[i]) throw std::logic_error("some leaf is not reachable from the roots");
  }
  return out;
}

namespace {

constexpr long kMaxLayer = 61;

class GroupTable {
 public:
  GroupTable(long min_layer, long max_layer, std::uint64_t c, long q)
      : min_(min_layer), c_(c), q_(q),
        groups_(static_cast<std::size_t>(max_layer - min_layer + 1) * c) {}

  std::vector<std::uint32_t>& at(long k, std::uint64_t j) {
    return groups_[static_cast<std::size_t>(k - min_) * c_ + j];
  }
  std::uint64_t value(long k, std::uint64_t j) const { return (c_ + j) << (k - q_); }

 private:
  long min_;
  std::uint64_t c_;
  long q_;
  std::vector<std::vector<std::uint32_t>> groups_;
};

}  // namespace

MainResult main_algorithm(const RateVector& rates) {
  const std::size_t n = rates.size();
  const Rational& H = rates.total();
  MainResult result;
  MainDiagnostics& diag = result.diagnostics;

  diag.delta = sqrt_upper(9 * rates.max() / H);
  if (diag.delta > 3) diag.delta = 3;
  const Rational factor = (1 + diag.delta) * H;
  diag.bound = factor;

  const Rational top = factor / rates[0];
  diag.min_layer = floor_log2(top);
  diag.max_layer = floor_log2(factor / rates[n - 1]);
  const long q = diag.min_layer / 2;
  diag.C = std::uint64_t{1} << q;
  diag.K = std::uint64_t{1} << (diag.min_layer - 2 * q);
  diag.rounding_bound = (1 + make_rational(1, static_cast<std::int64_t>(diag.C))) / (1 + diag.delta);

  if (n == 1) {
    result.schedule = CyclicSchedule(1, ResidueForm{{Residue{1, 1}}});
    result.frequencies = {1};
    diag.density_after_rounding = 1;
    diag.final_density = 1;
    return result;
  }
  if (diag.max_layer > kMaxLayer) {
    throw std::overflow_error("rate spread too large: frequencies exceed 2^" +
                              std::to_string(kMaxLayer + 1));
  }

  const long lo = diag.min_layer;
  const long hi = diag.max_layer;
  const std::uint64_t C = diag.C;
  GroupTable groups(lo, hi, C, q);
  FrequencyForest forest;

  // Step 2: round every f''_i down onto the grid 2^k (1 + j/C).
  result.frequencies.resize(n);
  long k = 0;
  std::uint64_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || rates[i] != rates[i - 1]) {
      const Rational f = factor / rates[i];
      k = floor_log2(f);
      j = floor((f / pow2(k) - 1) * static_cast<unsigned long>(C)).get_ui();
    }
    const std::uint64_t v = groups.value(k, j);
    result.frequencies[i] = v;
    groups.at(k, j).push_back(forest.add_leaf(i, v));
  }
  diag.density_after_rounding = density(result.frequencies);
  if (diag.density_after_rounding > diag.rounding_bound) {
    throw std::logic_error("density after rounding exceeds (1 + 1/C) / (1 + delta)");
  }

  std::vector<std::uint32_t> roots;
  auto pair_off = [&](long layer, std::uint64_t g) {
    auto& bucket = groups.at(layer, g);
    while (bucket.size() >= 2) {
      std::uint32_t b = bucket.back();
      bucket.pop_back();
      std::uint32_t a = bucket.back();
      bucket.pop_back();
      std::uint32_t id = forest.pair(a, b);
      if (forest.node(id).freq != groups.value(layer - 1, g)) {
        throw std::logic_error("paired frequency left the grid");
      }
      groups.at(layer - 1, g).push_back(id);
    }
  };
  auto combine_off = [&](std::uint64_t g) {
    auto& bucket = groups.at(lo, g);
    const std::size_t m = C + g;
    while (bucket.size() >= m) {
      std::vector<std::uint32_t> batch(bucket.end() - static_cast<std::ptrdiff_t>(m), bucket.end());
      bucket.resize(bucket.size() - m);
      std::reverse(batch.begin(), batch.end());
      roots.push_back(forest.combine(batch));
    }
  };

  // Step 3: pair equal frequencies above layer min.
  for (long layer = hi; layer > lo; --layer) {
    for (std::uint64_t g = 1; g < C; ++g) pair_off(layer, g);
  }
  // Step 4: bundle C + j equal frequencies of layer min into 2^(min - q).
  for (std::uint64_t g = 1; g < C; ++g) combine_off(g);

  // Step 5: push leftovers one group down, merging whenever possible.
  for (long layer = hi; layer >= lo; --layer) {
    for (std::uint64_t g = C - 1; g >= 1; --g) {
      auto& from = groups.at(layer, g);
      auto& to = groups.at(layer, g - 1);
      const std::uint64_t v = groups.value(layer, g - 1);
      for (std::uint32_t id : from) {
        forest.push_down(id, v);
        to.push_back(id);
      }
      from.clear();
      if (g - 1 >= 1) {
        if (layer > lo) {
          pair_off(layer, g - 1);
        } else {
          combine_off(g - 1);
        }
      }
    }
  }

  // Every remaining node sits in some group j = 0, i.e. on a power of two.
  for (long layer = lo; layer <= hi; ++layer) {
    for (std::uint32_t id : groups.at(layer, 0)) roots.push_back(id);
    for (std::uint64_t g = 1; g < C; ++g) {
      if (!groups.at(layer, g).empty()) throw std::logic_error("non-power-of-two group left over");
    }
  }
  std::vector<std::uint64_t> root_freqs;
  root_freqs.reserve(roots.size());
  for (std::uint32_t id : roots) root_freqs.push_back(forest.node(id).freq);
  diag.final_density = density(root_freqs);
  if (diag.final_density > 1) throw std::logic_error("final power-of-two density exceeds 1");

  diag.obs1_merges = forest.pair_count();
  diag.obs2_merges = forest.combine_count();
  diag.pushes = forest.push_count();
  diag.density_checks = diag.obs1_merges + diag.obs2_merges;

  // Step 6.
  ResidueForm root_classes = schedule_powers_of_two(root_freqs);
  result.schedule = CyclicSchedule(n, forest.expand(roots, root_classes.entries));
  return result;
}

TwoApproxResult two_approx(const RateVector& rates) {
  TwoApproxResult out;
  out.frequencies.resize(rates.size());
  const Rational twice = 2 * rates.total();
  for (std::size_t i = 0; i < rates.size(); ++i) {
    long k = floor_log2(twice / rates[i]);
    if (k > 62) throw std::overflow_error("frequency exceeds 2^62");
    out.frequencies[i] = std::uint64_t{1} << k;
  }
  out.schedule = CyclicSchedule(rates.size(), schedule_powers_of_two(out.frequencies));
  return out;
}

Density34 density_34_frequencies(const RateVector& rates) {
  Density34 out;
  const Rational& H = rates.total();
  out.delta = make_rational(1, 3) + rates.max() / H;
  const Rational factor = (1 + out.delta) * H;
  out.frequencies.resize(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    BigInt f = floor(factor / rates[i]);
    if (f < 2) {
      throw std::invalid_argument("frequency of bamboo " + std::to_string(i + 1) +
                                  " would drop below 2");
    }
    out.frequencies[i] = to_u64(f);
  }
  out.density = density(out.frequencies);
  if (out.density >= make_rational(3, 4)) throw std::logic_error("density is not below 3/4");
  return out;
}

NextCutsStream::NextCutsStream(const ResidueForm& form) {
  periods_.reserve(form.entries.size());
  for (std::size_t i = 0; i < form.entries.size(); ++i) {
    const auto& e = form.entries[i];
    if (e.offset == 0 || e.period == 0) throw InvalidSchedule("offsets and periods must be positive");
    periods_.push_back(e.period);
    queue_.emplace(e.offset, static_cast<std::uint32_t>(i));
  }
}

std::size_t NextCutsStream::next() {
  ++round_;
  if (queue_.empty() || queue_.top().first != round_) return 0;
  auto [t, i] = queue_.top();
  queue_.pop();
  queue_.emplace(t + periods_[i], i);
  if (!queue_.empty() && queue_.top().first == round_) {
    throw InvalidSchedule("two bamboos are due in round " + std::to_string(round_));
  }
  return static_cast<std::size_t>(i) + 1;
}

std::size_t planted_min_n(const Rational& head) {
  if (sgn(head) <= 0 || head > 1) throw std::invalid_argument("head must lie in (0, 1]");
  if (head == 1) return 1;
  return to_u64(ceil(2 * (1 - head) / head)) + 1;
}

RateVector random_planted_rates(std::uint64_t seed, std::size_t n, const Rational& head) {
  if (n < planted_min_n(head)) {
    throw std::invalid_argument("n = " + std::to_string(n) + " is too small for head " + to_string(head));
  }
  constexpr std::uint64_t W = 1000;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> weight(W, 2 * W);
  std::vector<std::uint64_t> w(n - 1);
  std::uint64_t total = 0;
  for (auto& x : w) {
    x = weight(rng);
    total += x;
  }
  std::sort(w.begin(), w.end(), std::greater<>());
  std::vector<Rational> rates{head};
  for (std::uint64_t x : w) {
    rates.push_back((1 - head) * make_rational(static_cast<std::int64_t>(x), static_cast<std::int64_t>(total)));
  }
  return RateVector(std::move(rates));
}

std::vector<std::uint64_t> random_pinwheel_instance(std::uint64_t seed, std::uint64_t f1,
                                                    const Rational& target, std::size_t max_n) {
  if (f1 < 1) throw std::invalid_argument("f1 must be positive");
  Rational d = make_rational(1, static_cast<std::int64_t>(f1));
  if (d > target) throw std::invalid_argument("1/f1 already exceeds the target density");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> freq(f1, 8 * f1);
  std::vector<std::uint64_t> out{f1};
  std::size_t misses = 0;
  while (out.size() < max_n && misses < 64) {
    std::uint64_t f = freq(rng);
    Rational nd = d + make_rational(1, static_cast<std::int64_t>(f));
    if (nd > target) {
      ++misses;
      continue;
    }
    d = nd;
    out.push_back(f);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bgt
