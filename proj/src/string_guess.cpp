#include "rombit/string_guess.hpp"

#include <cmath>
#include <utility>

#include "rombit/extraction.hpp"
#include "rombit/rng.hpp"

namespace rombit {

GuessTrace guess_run(std::span<const int> truth) {
  GuessTrace trace;
  trace.truth.assign(truth.begin(), truth.end());
  BasicExtractor<int> combine(ExtractionMode::combine);
  std::optional<int> confirmed;
  std::optional<int> extracted;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int bit = truth[i];
    if (bit != 0 && bit != 1) throw InputError("string guessing needs bits in {0,1}");
    int guess = 0;
    if (extracted) guess = *extracted;
    else if (confirmed) guess = *confirmed;
    trace.guesses.push_back(guess);
    if (guess == bit) ++trace.correct;
    if (!confirmed) confirmed = bit;
    if (!extracted) {
      if (auto r = combine.feed(bit)) {
        extracted = *r;
        trace.switch_index = i + 1;
      }
    }
  }
  return trace;
}

GuessTrace guess_run(const ArrivalSequence& sequence) {
  std::vector<int> bits;
  bits.reserve(sequence.items.size());
  for (const auto& item : sequence.items) {
    const Rational& b = item.payload.at("bit");
    if (b != 0 && b != 1) throw InputError("string guessing needs bits in {0,1}");
    bits.push_back(static_cast<int>(b.numerator()));
  }
  return guess_run(bits);
}

Rational exact_expected_correct(std::span<const int> bits, Execution exec) {
  const std::size_t n = bits.size();
  const std::uint64_t total = reduce_permutations(
      n, std::uint64_t{0},
      [&](std::uint64_t& acc, const Permutation& perm) {
        std::vector<int> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = bits[perm[i]];
        acc += guess_run(t).correct;
      },
      [](std::uint64_t& acc, std::uint64_t o) { acc += o; }, exec);
  return Rational(static_cast<std::int64_t>(total), static_cast<std::int64_t>(factorial(n)));
}

GuessEstimate empirical_expected_correct(std::span<const int> bits, std::uint64_t trials, std::uint64_t seed,
                                         Execution exec) {
  using Sums = std::pair<double, double>;
  const Sums sums = reduce_trials(
      trials, Sums{0, 0},
      [&](Sums& acc, std::uint64_t t) {
        thread_local std::vector<int> order;
        order.assign(bits.begin(), bits.end());
        Rng rng(derive_seed(seed, t));
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        const double c = static_cast<double>(guess_run(order).correct);
        acc.first += c;
        acc.second += c * c;
      },
      [](Sums& a, const Sums& b) {
        a.first += b.first;
        a.second += b.second;
      },
      exec);
  GuessEstimate est;
  est.trials = trials;
  if (trials == 0) return est;
  const double n = static_cast<double>(trials);
  est.mean_correct = sums.first / n;
  const double var = std::max(0.0, sums.second / n - est.mean_correct * est.mean_correct);
  est.stderr_ = trials > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  return est;
}

std::vector<int> bernoulli_bits(std::size_t n, double p_one, std::uint64_t seed) {
  if (!(p_one >= 0 && p_one <= 1)) throw InputError("p-one must lie in [0,1]");
  Rng rng(seed);
  std::vector<int> out(n);
  for (auto& b : out) b = rng.uniform() < p_one ? 1 : 0;
  return out;
}

}  // namespace rombit
