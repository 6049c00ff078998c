#include "rombit/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rombit/rng.hpp"

namespace rombit {

std::string_view to_string(ExtractionMode m) {
  switch (m) {
    case ExtractionMode::process1: return "process1";
    case ExtractionMode::distinct_unbiased: return "distinct_unbiased";
    case ExtractionMode::combine: return "combine";
  }
  return "?";
}

ExtractionMode parse_mode(std::string_view tag) {
  if (tag == "p1" || tag == "process1") return ExtractionMode::process1;
  if (tag == "p2" || tag == "distinct_unbiased") return ExtractionMode::distinct_unbiased;
  if (tag == "combine") return ExtractionMode::combine;
  throw InputError("unknown extraction mode '" + std::string(tag) + "'");
}

int distinct_unbiased(const ItemKey& first, const ItemKey& second) {
  const auto cmp = lex_compare(first, second);
  if (cmp == 0) throw PreconditionError("distinct extractor needs two different keys");
  return cmp < 0 ? 1 : 0;
}

std::vector<int> pairwise_bits(std::span<const ItemKey> items) {
  if (items.size() % 2 != 0) throw InputError("pairwise extraction needs an even number of items");
  std::vector<int> bits;
  bits.reserve(items.size() / 2);
  for (std::size_t k = 0; k + 1 < items.size(); k += 2) bits.push_back(distinct_unbiased(items[k], items[k + 1]));
  return bits;
}

std::optional<int> extract(std::span<const ItemKey> keys, ExtractionMode mode) {
  Extractor ex(mode);
  for (const auto& k : keys)
    if (auto b = ex.feed(k)) return b;
  return std::nullopt;
}

std::vector<int> rank_keys(std::span<const ItemKey> keys) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (const auto& k : keys)
    if (k.dimension() != keys.front().dimension()) throw InputError("key dimension mismatch");
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::vector<int> rank(keys.size());
  int r = -1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || !(keys[order[i - 1]] == keys[order[i]])) ++r;
    rank[order[i]] = r;
  }
  return rank;
}

namespace {

struct ExactCounts {
  std::uint64_t ones = 0, zeros = 0, none = 0;
  std::uint64_t distinct_start = 0, distinct_start_ones = 0;
};

// Outcome of one arrival order over integer ranks: -1 = no bit.
template <class Next>
int run_ranks(ExtractionMode mode, std::size_t n, Next&& next) {
  BasicExtractor<int> ex(mode);
  for (std::size_t i = 0; i < n; ++i) {
    const int key = next(i);
    if (mode == ExtractionMode::distinct_unbiased && i == 1 && key == *ex.first_type()) return -1;
    if (auto b = ex.feed(key)) return *b;
  }
  return -1;
}

}  // namespace

BiasReport exact_bias(std::span<const ItemKey> keys, ExtractionMode mode, Execution exec) {
  const std::vector<int> rank = rank_keys(keys);
  const std::size_t n = rank.size();
  if (n > kMaxEnumeration) throw CapacityError("exact_bias limited to n <= 10");
  if (n == 0) throw InputError("exact_bias needs at least one item");
  const auto counts = reduce_permutations(
      n, ExactCounts{},
      [&](ExactCounts& acc, const Permutation& perm) {
        const int bit = run_ranks(mode, n, [&](std::size_t i) { return rank[perm[i]]; });
        if (bit == 1) ++acc.ones;
        else if (bit == 0) ++acc.zeros;
        else ++acc.none;
        if (n >= 2 && rank[perm[0]] != rank[perm[1]]) {
          ++acc.distinct_start;
          if (bit == 1) ++acc.distinct_start_ones;
        }
      },
      [](ExactCounts& acc, const ExactCounts& o) {
        acc.ones += o.ones;
        acc.zeros += o.zeros;
        acc.none += o.none;
        acc.distinct_start += o.distinct_start;
        acc.distinct_start_ones += o.distinct_start_ones;
      },
      exec);
  const auto total = static_cast<std::int64_t>(factorial(n));
  BiasReport rep;
  rep.mode = mode;
  rep.n_items = n;
  rep.trials = static_cast<std::uint64_t>(total);
  rep.exact = true;
  rep.exact_prob_one = Rational(static_cast<std::int64_t>(counts.ones), total);
  rep.exact_no_bit_mass = Rational(static_cast<std::int64_t>(counts.none), total);
  if (counts.distinct_start > 0)
    rep.exact_prob_one_given_distinct_start = Rational(static_cast<std::int64_t>(counts.distinct_start_ones),
                                                       static_cast<std::int64_t>(counts.distinct_start));
  rep.prob_one = to_double(*rep.exact_prob_one);
  rep.no_bit_mass = to_double(*rep.exact_no_bit_mass);
  return rep;
}

BiasReport empirical_bias(std::span<const ItemKey> keys, ExtractionMode mode, std::uint64_t trials,
                          std::uint64_t seed, const EmpiricalOptions& options, Execution exec) {
  if (trials == 0) throw InputError("trials must be >= 1");
  if (keys.empty()) throw InputError("empirical_bias needs at least one item");
  const std::vector<int> rank = rank_keys(keys);
  const std::size_t n = rank.size();
  std::vector<std::uint32_t> first_pool;
  if (options.first_key) {
    for (std::size_t i = 0; i < n; ++i)
      if (keys[i] == *options.first_key) first_pool.push_back(static_cast<std::uint32_t>(i));
    if (first_pool.empty()) throw InputError("conditioning key does not occur in the instance");
  }

  struct Counts {
    std::uint64_t ones = 0, zeros = 0, none = 0;
  };
  const auto counts = reduce_trials(
      trials, Counts{},
      [&](Counts& acc, std::uint64_t t) {
        // Partial Fisher-Yates: draw only the prefix the extractor consumes, then undo.
        thread_local std::vector<std::uint32_t> idx;
        thread_local std::vector<std::pair<std::size_t, std::size_t>> swaps;
        if (idx.size() != n) {
          idx.resize(n);
          std::iota(idx.begin(), idx.end(), 0u);
        }
        swaps.clear();
        Rng rng(derive_seed(seed, t));
        const int bit = run_ranks(mode, n, [&](std::size_t i) {
          std::size_t j;
          if (i == 0 && !first_pool.empty()) {
            // idx is the identity at the start of every trial
            j = first_pool[rng.below(first_pool.size())];
          } else {
            j = i + rng.below(n - i);
          }
          std::swap(idx[i], idx[j]);
          swaps.emplace_back(i, j);
          return rank[idx[i]];
        });
        for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) std::swap(idx[it->first], idx[it->second]);
        if (bit == 1) ++acc.ones;
        else if (bit == 0) ++acc.zeros;
        else ++acc.none;
      },
      [](Counts& acc, const Counts& o) {
        acc.ones += o.ones;
        acc.zeros += o.zeros;
        acc.none += o.none;
      },
      exec);
  BiasReport rep;
  rep.mode = mode;
  rep.n_items = n;
  rep.trials = trials;
  rep.seed = seed;
  rep.prob_one = static_cast<double>(counts.ones) / static_cast<double>(trials);
  rep.no_bit_mass = static_cast<double>(counts.none) / static_cast<double>(trials);
  rep.stderr_ = std::sqrt(rep.prob_one * (1 - rep.prob_one) / static_cast<double>(trials));
  return rep;
}

double process1_prediction(double alpha) {
  return (2 * alpha * alpha - 2 * alpha - 1) / ((alpha + 1) * (alpha - 2));
}

double combine_prediction(double r) { return 0.5 * (1 - r) + r / (1 + r); }

std::vector<ItemKey> two_type_keys(std::size_t n, double fraction) {
  const auto a = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  std::vector<ItemKey> keys;
  keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) keys.push_back(ItemKey{Rational(i < a ? 0 : 1)});
  return keys;
}

std::vector<ItemKey> centered_type_keys(std::size_t n, double fraction) {
  const auto a = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  std::vector<ItemKey> keys;
  keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    keys.push_back(ItemKey{Rational(i < a ? 0 : ((i - a) % 2 == 0 ? -1 : 1))});
  return keys;
}

std::vector<ItemKey> distinct_keys(std::size_t n) {
  std::vector<ItemKey> keys;
  keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) keys.push_back(ItemKey{Rational(static_cast<std::int64_t>(i))});
  return keys;
}

std::vector<BiasCurvePoint> bias_curve(ExtractionMode mode, std::span<const double> grid, std::size_t n,
                                       std::uint64_t trials, std::uint64_t seed, Execution exec) {
  std::vector<BiasCurvePoint> out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double x = grid[g];
    if (!(x > 0 && x < 1)) throw InputError("bias_curve parameters must lie strictly inside (0,1)");
    BiasCurvePoint pt;
    pt.parameter = x;
    const std::uint64_t point_seed = derive_seed(seed, g);
    BiasReport rep;
    switch (mode) {
      case ExtractionMode::process1: {
        pt.predicted = process1_prediction(x);
        rep = empirical_bias(two_type_keys(n, x), mode, trials, point_seed, {}, exec);
        break;
      }
      case ExtractionMode::combine: {
        pt.predicted = combine_prediction(x);
        EmpiricalOptions opt;
        opt.first_key = ItemKey{Rational(0)};
        rep = empirical_bias(centered_type_keys(n, x), mode, trials, point_seed, opt, exec);
        break;
      }
      case ExtractionMode::distinct_unbiased:
        pt.predicted = 0.5;
        rep = empirical_bias(distinct_keys(n), mode, trials, point_seed, {}, exec);
        break;
    }
    pt.empirical = rep.prob_one;
    pt.stderr_ = *rep.stderr_;
    out.push_back(pt);
  }
  return out;
}

}  // namespace rombit
