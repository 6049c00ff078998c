#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rombit/errors.hpp"
#include "rombit/rational.hpp"

namespace rombit {

/// Point in R^d used to order distinct items.
struct ItemKey {
  std::vector<Rational> coords;

  ItemKey() = default;
  ItemKey(std::initializer_list<Rational> c) : coords(c) {}
  explicit ItemKey(std::vector<Rational> c) : coords(std::move(c)) {}

  std::size_t dimension() const { return coords.size(); }

  // Same-dimension comparisons only; lex_compare is the checked entry point.
  friend bool operator==(const ItemKey& a, const ItemKey& b) { return a.coords == b.coords; }
  friend bool operator<(const ItemKey& a, const ItemKey& b) {
    return std::lexicographical_compare(a.coords.begin(), a.coords.end(), b.coords.begin(),
                                        b.coords.end());
  }
};

/// Lexicographic order; throws InputError when dimensions differ.
std::strong_ordering lex_compare(const ItemKey& a, const ItemKey& b);

enum class Problem { string_guess, knapsack_general, knapsack_proportional, interval, throughput };

std::string_view to_string(Problem p);
/// Throws InputError naming the tag when unknown.
Problem parse_problem(std::string_view tag);
/// Problems whose items carry a `release` payload field.
bool is_realtime(Problem p);

using Payload = std::map<std::string, Rational, std::less<>>;

struct Item {
  ItemKey key;
  Payload payload;

  friend bool operator==(const Item&, const Item&) = default;
};

struct Instance {
  std::string id;
  Problem problem = Problem::knapsack_general;
  std::map<std::string, Rational, std::less<>> meta;
  std::vector<Item> items;
  /// Tabulated (length, weight) points of a C-benevolent weight function; optional.
  std::vector<std::pair<Rational, Rational>> weight_fn;

  std::size_t size() const { return items.size(); }
  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Ordering key an application uses for its payload (see README for the schemas).
ItemKey derive_key(Problem problem, const Payload& payload, const std::map<std::string, Rational, std::less<>>& meta);

/// Checks schema and invariants; throws InputError.
void validate(const Instance& instance);

/// Builds a validated instance, deriving every key from its payload.
Instance make_instance(Problem problem, std::vector<Payload> payloads,
                       std::map<std::string, Rational, std::less<>> meta = {}, std::string id = {});

enum class ArrivalModel { adversarial, rom, realtime_rom };

std::string_view to_string(ArrivalModel m);
ArrivalModel parse_model(std::string_view tag);

using Permutation = std::vector<std::size_t>;

struct ArrivalSequence {
  ArrivalModel model = ArrivalModel::adversarial;
  Permutation permutation;
  std::uint64_t seed = 0;
  /// Items in arrival order, with keys re-derived for realtime_rom.
  std::vector<Item> items;
};

/// Uniform permutation of {0..n-1} (Fisher-Yates on the seeded generator).
Permutation random_permutation(std::size_t n, std::uint64_t seed);

/// Releases sorted ascending (stable); the reference order for realtime_rom.
std::vector<Item> release_sorted(const Instance& instance);

/// Applies an explicit permutation under `model`.
ArrivalSequence arrange(const Instance& instance, ArrivalModel model, const Permutation& perm,
                        std::uint64_t seed = 0);

/// Deterministic function of (instance, model, seed).
ArrivalSequence permute(const Instance& instance, ArrivalModel model, std::uint64_t seed);

inline constexpr std::size_t kMaxEnumeration = 10;

std::uint64_t factorial(std::size_t n);

/// Permutation with lexicographic rank `rank` among all permutations of n labels.
Permutation unrank_permutation(std::size_t n, std::uint64_t rank);

/// Iterates all n! label permutations in lexicographic order.
class PermutationEnumerator {
 public:
  /// Throws CapacityError above kMaxEnumeration.
  explicit PermutationEnumerator(std::size_t n);

  const Permutation& current() const { return perm_; }
  /// Advances; false once every permutation has been visited.
  bool next();
  std::uint64_t count() const { return factorial(perm_.size()); }

 private:
  Permutation perm_;
};

void for_each_permutation(std::size_t n, const std::function<void(const Permutation&)>& fn);

}  // namespace rombit
