#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rombit/core.hpp"
#include "rombit/parallel.hpp"

namespace rombit {

struct GuessTrace {
  std::vector<int> guesses;
  std::vector<int> truth;
  std::size_t correct = 0;
  /// 0-based position from which the extracted bit is guessed.
  std::optional<std::size_t> switch_index;
};

/// Guess 0 first, then repeat the first revealed bit until the combine
/// extractor (fed the revealed bits) emits r; guess r from then on.
GuessTrace guess_run(std::span<const int> truth);
GuessTrace guess_run(const ArrivalSequence& sequence);

/// Exact E[correct] over all labeled orders of `bits` (n <= 10).
Rational exact_expected_correct(std::span<const int> bits, Execution exec = Execution::parallel);

struct GuessEstimate {
  std::uint64_t trials = 0;
  double mean_correct = 0;
  double stderr_ = 0;
};

/// Monte Carlo E[correct] over uniform orders of `bits`.
GuessEstimate empirical_expected_correct(std::span<const int> bits, std::uint64_t trials, std::uint64_t seed,
                                         Execution exec = Execution::parallel);

/// n i.i.d. bits with Pr(1) = p_one.
std::vector<int> bernoulli_bits(std::size_t n, double p_one, std::uint64_t seed);

}  // namespace rombit
