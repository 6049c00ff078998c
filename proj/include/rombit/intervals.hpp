#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rombit/core.hpp"

namespace rombit::intervals {

struct Interval {
  Rational release;
  Rational length;
  Rational weight;
  std::size_t label = 0;

  Rational deadline() const { return release + length; }
  ItemKey key() const { return ItemKey{weight, length}; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Half-open overlap of [r, d).
bool overlaps(const Interval& a, const Interval& b);
bool feasible(std::span<const Interval> set);
Rational total_weight(std::span<const Interval> set);

std::vector<Interval> items_of(const ArrivalSequence& sequence);
std::vector<Interval> items_of(const Instance& instance);

enum class Variant { single, monotone, c_benevolent };
std::string_view to_string(Variant v);
/// single | monotone | cben
Variant parse_variant(std::string_view tag);

/// Throws InputError when the intervals break the variant's constraint:
/// equal lengths (single), r_i < r_j => d_i <= d_j (monotone), or weights
/// given by a convex increasing function of length through the origin
/// (c_benevolent; checked against `weight_fn` when supplied).
void validate_variant(std::span<const Interval> set, Variant variant,
                      std::span<const std::pair<Rational, Rational>> weight_fn = {});

struct Selection {
  std::vector<Interval> accepted;
  std::vector<Interval> revoked;
  std::optional<int> bit;
  /// Arrival index of the last interval taken by the greedy prefix.
  std::optional<std::size_t> prefix_end;
  /// Arrival index of the first distinct interval.
  std::optional<std::size_t> switch_index;
  Rational value{0};
};

/// Fixed slots [origin + (j-1)p, origin + jp); bit 1 keeps the heaviest
/// interval released in each odd slot, bit 0 in each even slot. Intervals
/// released before `origin` are ignored.
Selection fung_single_length(std::span<const Interval> sequence, int bit, const Rational& origin);

/// Greedy earliest-deadline prefix over intervals equal to the first, then the
/// combine bit and fixed slots anchored at the last greedily accepted release.
Selection rom_single_length(std::span<const Interval> sequence, std::optional<int> forced_bit = {});

struct AdaptiveTrace {
  std::vector<Interval> a;
  std::vector<Interval> b;
  std::vector<Interval> revoked_a;
  std::vector<Interval> revoked_b;
  /// Slot boundaries per phase: phase p owns slots [bounds[p][k-1], bounds[p][k]).
  std::vector<std::vector<Rational>> bounds;
  /// Slot index (within its phase) of every accepted interval, aligned with a / b.
  std::vector<std::size_t> slot_a;
  std::vector<std::size_t> slot_b;
};

/// Runs the two chained algorithms. B takes the opening interval of each phase;
/// the owner of slot k (A for odd k, B for even k) keeps the best interval
/// released in it, where best means longest with a deadline past the slot end
/// (c_benevolent) or heaviest (monotone). A phase ends at the first slot with
/// no candidate. `anchor` pre-seeds the first phase's opening interval.
AdaptiveTrace adaptive_slots_trace(std::span<const Interval> sequence, Variant variant,
                                   std::optional<Interval> anchor = {});

/// bit 1 returns A's intervals, bit 0 returns B's.
Selection adaptive_slots_run(std::span<const Interval> sequence, int bit, Variant variant);

/// Greedy prefix, combine bit, then the adaptive engine anchored at the last
/// greedily accepted interval.
Selection rom_adaptive(std::span<const Interval> sequence, Variant variant, std::optional<int> forced_bit = {});

/// Dispatches on the variant.
Selection rom_intervals(std::span<const Interval> sequence, Variant variant, std::optional<int> forced_bit = {});

/// Weighted interval scheduling optimum (deadline-sorted DP with binary search).
Rational offline_opt_intervals(std::span<const Interval> set);

/// Inequality audits for one arrival order; returns violation descriptions.
std::vector<std::string> audit(std::span<const Interval> sequence, Variant variant);

}  // namespace rombit::intervals
