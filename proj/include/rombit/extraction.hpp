#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rombit/core.hpp"
#include "rombit/parallel.hpp"

namespace rombit {

enum class ExtractionMode { process1, distinct_unbiased, combine };

std::string_view to_string(ExtractionMode m);
/// Accepts p1 | p2 | combine as well as the full names.
ExtractionMode parse_mode(std::string_view tag);

namespace detail {
inline std::strong_ordering compare_keys(const ItemKey& a, const ItemKey& b) { return lex_compare(a, b); }
template <class T>
std::strong_ordering compare_keys(const T& a, const T& b) {
  return a <=> b;
}
}  // namespace detail

/// Incremental one-bit extractor over a stream of keys.
///
/// process1:          the first key fixes a type; the first key of another
///                    type at (1-based) index i emits 1 - (i mod 2).
/// distinct_unbiased: emits 1 iff the first key is smaller than the second;
///                    equal keys violate the precondition.
/// combine:           if the first two keys differ, emits 1 iff the second is
///                    smaller; otherwise emits 1 iff the first key of another
///                    type arrives at an odd index (>= 3).
template <class Key>
class BasicExtractor {
 public:
  explicit BasicExtractor(ExtractionMode mode) : mode_(mode) {}

  std::optional<int> feed(const Key& key) {
    if (emitted_) throw StateError("extractor already emitted its bit");
    ++counter_;
    if (counter_ == 1) {
      first_ = key;
      return std::nullopt;
    }
    const auto cmp = detail::compare_keys(key, first_);
    switch (mode_) {
      case ExtractionMode::process1:
        if (cmp != 0) emitted_ = 1 - static_cast<int>(counter_ % 2);
        break;
      case ExtractionMode::distinct_unbiased:
        if (cmp == 0) throw PreconditionError("distinct extractor fed two equal keys");
        emitted_ = cmp > 0 ? 1 : 0;
        break;
      case ExtractionMode::combine:
        if (cmp != 0) {
          if (counter_ == 2)
            emitted_ = cmp < 0 ? 1 : 0;
          else
            emitted_ = counter_ % 2 == 1 ? 1 : 0;
        }
        break;
    }
    return emitted_;
  }

  ExtractionMode mode() const { return mode_; }
  std::size_t counter() const { return counter_; }
  std::optional<Key> first_type() const { return counter_ ? std::optional<Key>(first_) : std::nullopt; }
  std::optional<int> emitted() const { return emitted_; }
  bool done() const { return emitted_.has_value(); }

 private:
  ExtractionMode mode_;
  std::size_t counter_ = 0;
  Key first_{};
  std::optional<int> emitted_;
};

using Extractor = BasicExtractor<ItemKey>;

inline std::optional<int> process1_feed(Extractor& state, const ItemKey& item) { return state.feed(item); }
inline std::optional<int> combine_feed(Extractor& state, const ItemKey& item) { return state.feed(item); }

/// 1 iff first < second; throws PreconditionError on equal keys.
int distinct_unbiased(const ItemKey& first, const ItemKey& second);

/// Bit k compares items 2k and 2k+1. Needs an even count and distinct pairs.
std::vector<int> pairwise_bits(std::span<const ItemKey> items);

/// Runs a fresh extractor over `keys` in order; nullopt if no bit was emitted.
std::optional<int> extract(std::span<const ItemKey> keys, ExtractionMode mode);

/// Dense ranks preserving lexicographic order (equal keys share a rank).
std::vector<int> rank_keys(std::span<const ItemKey> keys);

struct BiasReport {
  ExtractionMode mode = ExtractionMode::combine;
  std::size_t n_items = 0;
  std::uint64_t trials = 0;  // n! for exact reports
  std::uint64_t seed = 0;
  bool exact = false;
  double prob_one = 0;                    // Pr(b = 1), no-bit outcomes count as "not 1"
  std::optional<double> stderr_;          // Monte Carlo only
  double no_bit_mass = 0;
  // Exact reports carry rationals.
  std::optional<Rational> exact_prob_one;
  std::optional<Rational> exact_no_bit_mass;
  /// Pr(b = 1 | first two arrivals differ); nullopt when that event is empty.
  std::optional<Rational> exact_prob_one_given_distinct_start;
};

/// Enumerates all labeled orders (n <= 10). The distinct mode reports equal
/// leading keys as no-bit outcomes.
BiasReport exact_bias(std::span<const ItemKey> keys, ExtractionMode mode,
                      Execution exec = Execution::parallel);

struct EmpiricalOptions {
  /// Condition every trial on the first arrival having this key.
  std::optional<ItemKey> first_key;
};

/// Monte Carlo over `trials` uniform orders; only the prefix a trial needs is drawn.
BiasReport empirical_bias(std::span<const ItemKey> keys, ExtractionMode mode, std::uint64_t trials,
                          std::uint64_t seed, const EmpiricalOptions& options = {},
                          Execution exec = Execution::parallel);

/// Infinite-population Pr(b=1) of process 1 with type fractions alpha, 1-alpha.
double process1_prediction(double alpha);
/// Infinite-population Pr(b=1) of combine when the first type has frequency r.
double combine_prediction(double r);

/// Two types: floor(fraction * n) copies of key (0), the rest key (1).
std::vector<ItemKey> two_type_keys(std::size_t n, double fraction);
/// floor(fraction * n) copies of key (0); the rest alternate between (-1) and (1),
/// so a key other than (0) is equally likely to be smaller or larger.
std::vector<ItemKey> centered_type_keys(std::size_t n, double fraction);
/// n distinct one-dimensional keys 0..n-1.
std::vector<ItemKey> distinct_keys(std::size_t n);

struct BiasCurvePoint {
  double parameter = 0;
  double predicted = 0;
  double empirical = 0;
  double stderr_ = 0;
};

/// process1: parameter is alpha. combine: parameter is the first type's
/// frequency r over centered_type_keys, trials conditioned on key (0) arriving first.
/// distinct_unbiased: parameter ignored, all-distinct keys. Parameters must lie in (0,1).
std::vector<BiasCurvePoint> bias_curve(ExtractionMode mode, std::span<const double> grid, std::size_t n,
                                       std::uint64_t trials, std::uint64_t seed,
                                       Execution exec = Execution::parallel);

}  // namespace rombit
