#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rombit/core.hpp"
#include "rombit/parallel.hpp"

namespace rombit::knapsack {

/// Unit-capacity knapsack item. `label` is the arrival position within a run
/// and drives every tie-break.
struct Item {
  Rational weight;
  Rational value;
  std::size_t label = 0;

  ItemKey key() const { return ItemKey{value, weight}; }
  friend bool operator==(const Item&, const Item&) = default;
};

/// Items of `instance` in the order given by `perm` (labels = positions).
std::vector<Item> arrange(const Instance& instance, const Permutation& perm);
std::vector<Item> items_of(const ArrivalSequence& sequence);

enum class WeightClass { S, M1, M2, M3, M4, L };

/// S <= 3/10 < M1 <= 2/5 < M2 <= 1/2 < M3 < 3/5 <= M4 < 7/10 <= L.
WeightClass classify(const Rational& weight);
std::string_view to_string(WeightClass c);

struct Revocation {
  std::size_t step = 0;
  Item item;
};

struct State {
  std::vector<Item> contents;
  std::vector<Revocation> revocations;
  bool frozen = false;
  bool m4_seen = false;
  std::size_t step = 0;

  Rational total_weight() const;
  Rational total_value() const;
};

Rational total_weight(std::span<const Item> items);
Rational total_value(std::span<const Item> items);

/// A1: keep the smallest M3 item (smallest M4 once one has been seen), evict
/// the smallest other items until the load fits; a large item evicts
/// everything and freezes.
void a1_step(State& state, const Item& item);
/// A2: freeze on the heaviest feasible subset of Q once it reaches 9/10 (8/10
/// after an M4 item); otherwise keep the smallest M2 and M1 items, evict other
/// medium items largest first, then small items smallest first.
void a2_step(State& state, const Item& item);

State subroutine_a1(State state, const Item& item);
State subroutine_a2(State state, const Item& item);

State run_a1(std::span<const Item> sequence);
State run_a2(std::span<const Item> sequence);

/// Heaviest subset of `items` with weight <= 1 (branch and bound, weight
/// descending). Ties keep the first subset found.
std::vector<Item> heaviest_feasible_subset(std::span<const Item> items);

struct ProportionalRun {
  State final;
  std::optional<int> bit;
  /// Arrival index of the first item that differs from the first one.
  std::optional<std::size_t> switch_index;
  Rational value;
};

/// Greedy identical prefix, combine bit, then A1 (b=1) or A2 (b=0).
ProportionalRun rom_proportional(std::span<const Item> sequence);

struct TwoBinRun {
  std::vector<Item> contents;
  std::size_t revocations = 0;
  std::optional<int> bit;
  bool early_exit = false;
  std::size_t prefix_accepted = 0;
  Rational value;
};

/// Greedy identical prefix, then bin 1 (b=1) or bin 2 (b=0) of the two-bin
/// algorithm. `forced_bit` overrides the extracted bit.
TwoBinRun rom_proportional_tworbin(std::span<const Item> sequence, std::optional<int> forced_bit = {});

struct GeneralRun {
  std::vector<Item> contents;
  std::optional<int> bit;
  Rational value;
};

/// GREEDY by value density with revoking (least dense evicted first).
std::vector<Item> run_greedy(std::span<const Item> sequence);
/// MAX keeps the single highest-value item seen.
std::vector<Item> run_max(std::span<const Item> sequence);

/// GREEDY on the identical prefix; then GREEDY (b=1) or MAX (b=0).
GeneralRun rom_general(std::span<const Item> sequence);

inline constexpr std::size_t kMaxOfflineItems = 24;

/// Exact optimum value subject to weight <= 1. Items heavier than 1 are ignored.
Rational offline_opt(std::span<const Item> items);

struct RevocationResult {
  std::size_t n = 0;
  double alpha = 0;
  std::size_t threshold = 0;  // ceil(alpha * n)
  std::uint64_t trials = 0;
  double probability = 0;     // Pr(k >= threshold)
  double stderr_ = 0;
  double bound = 0;           // 1 - alpha - 1/n
};

/// n-1 copies of weight eps/n and one unit item.
Instance revocation_instance(std::size_t n, const Rational& eps);

/// Monte Carlo: k = copies revoked by the b = 0 branch of the two-bin algorithm.
RevocationResult revocation_experiment(std::size_t n, const Rational& eps, double alpha,
                                       std::uint64_t trials, std::uint64_t seed,
                                       Execution exec = Execution::parallel);

struct ExactRevocation {
  Rational unconditional;        // Pr(k >= m) with the unit item uniform over n positions
  Rational given_not_first;      // the same, conditioned on the unit item not arriving first
};

/// Enumerates the n positions of the unit item.
ExactRevocation exact_revocation(std::size_t n, const Rational& eps, double alpha);

}  // namespace rombit::knapsack
