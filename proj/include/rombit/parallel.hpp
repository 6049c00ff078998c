#pragma once

// Data-parallel drivers over permutation ranks and Monte Carlo trial indices.
// Each has a serial reference path; the OpenMP path splits the index space into
// a fixed number of chunks (independent of thread count) and merges the chunk
// accumulators in chunk order, so results do not depend on scheduling.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <vector>

#include <omp.h>

#include "rombit/core.hpp"

namespace rombit {

enum class Execution { serial, parallel };

/// Applies ROMBIT_THREADS (if set) to the OpenMP runtime. Idempotent.
void configure_threads_from_env();

inline constexpr std::uint64_t kChunks = 256;

namespace detail {
/// Exceptions cannot leave an OpenMP region; keep the first and rethrow after it.
class FirstError {
 public:
  void capture() {
#pragma omp critical(rombit_first_error)
    if (!error_) error_ = std::current_exception();
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};
}  // namespace detail

/// visit(acc, perm) for every permutation of n labels; merge(acc, other) folds chunks.
template <class Acc, class Visit, class Merge>
Acc reduce_permutations(std::size_t n, Acc init, Visit&& visit, Merge&& merge,
                        Execution exec = Execution::parallel) {
  PermutationEnumerator guard(n);  // enforces the size limit
  const std::uint64_t total = factorial(n);
  if (exec == Execution::serial) {
    Acc acc = init;
    do {
      visit(acc, guard.current());
    } while (guard.next());
    return acc;
  }
  const std::uint64_t chunks = std::min<std::uint64_t>(kChunks, total);
  std::vector<Acc> partial(chunks, init);
  detail::FirstError errors;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    const std::uint64_t lo = total * static_cast<std::uint64_t>(c) / chunks;
    const std::uint64_t hi = total * static_cast<std::uint64_t>(c + 1) / chunks;
    try {
      Permutation perm = unrank_permutation(n, lo);
      for (std::uint64_t r = lo; r < hi; ++r) {
        visit(partial[c], perm);
        std::next_permutation(perm.begin(), perm.end());
      }
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();
  Acc acc = init;
  for (auto& p : partial) merge(acc, p);
  return acc;
}

/// visit(acc, trial_index) for trial_index in [0, trials).
template <class Acc, class Visit, class Merge>
Acc reduce_trials(std::uint64_t trials, Acc init, Visit&& visit, Merge&& merge,
                  Execution exec = Execution::parallel) {
  if (exec == Execution::serial) {
    Acc acc = init;
    for (std::uint64_t t = 0; t < trials; ++t) visit(acc, t);
    return acc;
  }
  const std::uint64_t chunks = std::max<std::uint64_t>(1, std::min<std::uint64_t>(kChunks, trials));
  std::vector<Acc> partial(chunks, init);
  detail::FirstError errors;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    const std::uint64_t lo = trials * static_cast<std::uint64_t>(c) / chunks;
    const std::uint64_t hi = trials * static_cast<std::uint64_t>(c + 1) / chunks;
    try {
      for (std::uint64_t t = lo; t < hi; ++t) visit(partial[c], t);
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();
  Acc acc = init;
  for (auto& p : partial) merge(acc, p);
  return acc;
}

}  // namespace rombit
