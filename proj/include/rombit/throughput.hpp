#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rombit/core.hpp"

namespace rombit::throughput {

struct Job {
  Rational release;
  Rational slack;
  std::size_t label = 0;

  Rational expiration() const { return release + slack; }
  ItemKey key(const Rational& p) const { return ItemKey{p, slack}; }
  friend bool operator==(const Job&, const Job&) = default;
};

/// Jobs sharing processing time p.
struct JobSet {
  Rational p{1};
  std::vector<Job> jobs;

  Rational deadline(std::size_t j) const { return jobs[j].expiration() + p; }
};

JobSet jobs_of(const ArrivalSequence& sequence, const Instance& instance);
JobSet jobs_of(const Instance& instance);

struct Entry {
  std::size_t job = 0;  // index into JobSet::jobs
  Rational start;
  bool flexible = false;

  friend bool operator==(const Entry&, const Entry&) = default;
};

struct Schedule {
  std::vector<Entry> entries;  // completed jobs, by start time
  std::size_t size() const { return entries.size(); }
};

enum class Status { infeasible, urgent, flexible };
std::string_view to_string(Status s);

/// Indices of jobs admissible at t (r <= t <= x) and not in `done`, in ED order.
std::vector<std::size_t> pending(const JobSet& set, const Rational& t, const std::vector<char>& done);

/// ED order back-to-back from t: feasible iff every start <= expiration;
/// flexible iff every start shifted by p stays strictly before its expiration.
Status classify(const JobSet& set, std::span<const std::size_t> ed_order, const Rational& t);

/// Earliest instant at which the set stops being flexible.
Rational urgency_instant(const JobSet& set, std::span<const std::size_t> ed_order);

enum class Action { idle, run_urgent, acquire_and_run };
std::string_view to_string(Action a);

/// The three-branch process rule for an idle process.
Action process_step(Status status, bool nonempty, bool lock_free);

struct DualRun {
  Schedule x;
  Schedule y;
};

/// Two processes sharing one lock from time `start`; X wins lock ties.
DualRun chrobak_dual(const JobSet& set, const Rational& start = Rational{0});

struct RomRun {
  Schedule x;
  Schedule y;
  std::optional<int> bit;
  /// Breakpoint; absent when no distinct job arrives.
  std::optional<Rational> breakpoint;
  /// Release of the first distinct job.
  std::optional<Rational> switch_time;
  bool preempted = false;
  /// Phase-1 entries started before the breakpoint.
  Schedule greedy;

  const Schedule& chosen() const { return bit.value_or(1) == 1 ? x : y; }
};

/// Jobs must be in release order (the arrival order).
RomRun rom_simulation(const JobSet& set, std::optional<int> forced_bit = {});

struct NormalCheck {
  bool normal = true;
  std::string violation;
};

/// Replays a schedule; throws InputError when it is inconsistent with the jobs.
NormalCheck is_normal(const Schedule& schedule, const JobSet& set);

inline constexpr std::size_t kMaxOfflineJobs = 16;

/// Maximum number of jobs a single machine can complete (subset DP on the
/// earliest completion time).
std::size_t offline_opt_throughput(const JobSet& set);

/// Subinstance from the breakpoint: unfinished phase-1 jobs re-released at B
/// (dropped once expired) plus every job released at or after B.
JobSet subinstance_after(const JobSet& set, const RomRun& run);

struct ThroughputAudit {
  /// Charging and factor-2 bounds on the outputs under b = 1 and b = 0; normality.
  std::vector<std::string> violations;
  /// Prefix-extension mismatches, and mismatches between the chosen schedule
  /// after the breakpoint and a fresh dual run on the subinstance.
  std::vector<std::string> diagnostics;
};

ThroughputAudit audit(const JobSet& set);

}  // namespace rombit::throughput
