#include "rombit/throughput.hpp"

#include <algorithm>
#include <array>

#include "rombit/extraction.hpp"

namespace rombit::throughput {

namespace {

Rational meta_p(const Instance& instance) {
  auto it = instance.meta.find("p");
  if (it == instance.meta.end()) throw InputError("throughput instance needs meta.p");
  return it->second;
}

JobSet from_items(const std::vector<Item>& items, const Rational& p) {
  JobSet set;
  set.p = p;
  for (std::size_t k = 0; k < items.size(); ++k)
    set.jobs.push_back(Job{items[k].payload.at("release"), items[k].payload.at("slack"), k});
  return set;
}

}  // namespace

JobSet jobs_of(const ArrivalSequence& sequence, const Instance& instance) {
  return from_items(sequence.items, meta_p(instance));
}

JobSet jobs_of(const Instance& instance) { return from_items(release_sorted(instance), meta_p(instance)); }

std::string_view to_string(Status s) {
  switch (s) {
    case Status::infeasible: return "infeasible";
    case Status::urgent: return "urgent";
    case Status::flexible: return "flexible";
  }
  return "?";
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::idle: return "idle";
    case Action::run_urgent: return "run-urgent";
    case Action::acquire_and_run: return "acquire-and-run";
  }
  return "?";
}

std::vector<std::size_t> pending(const JobSet& set, const Rational& t, const std::vector<char>& done) {
  std::vector<std::size_t> q;
  for (std::size_t j = 0; j < set.jobs.size(); ++j)
    if (!done[j] && set.jobs[j].release <= t && t <= set.jobs[j].expiration()) q.push_back(j);
  std::sort(q.begin(), q.end(), [&](std::size_t a, std::size_t b) {
    const Rational xa = set.jobs[a].expiration(), xb = set.jobs[b].expiration();
    if (xa != xb) return xa < xb;
    return set.jobs[a].label < set.jobs[b].label;
  });
  return q;
}

Status classify(const JobSet& set, std::span<const std::size_t> ed_order, const Rational& t) {
  bool feasible = true, flexible = true;
  Rational start = t;
  for (std::size_t j : ed_order) {
    const Rational x = set.jobs[j].expiration();
    if (start > x) feasible = false;
    if (start + set.p >= x) flexible = false;
    start += set.p;
  }
  if (!feasible) return Status::infeasible;
  return flexible ? Status::flexible : Status::urgent;
}

Rational urgency_instant(const JobSet& set, std::span<const std::size_t> ed_order) {
  std::optional<Rational> best;
  std::int64_t k = 1;
  for (std::size_t j : ed_order) {
    const Rational v = set.jobs[j].expiration() - set.p * k;
    if (!best || v < *best) best = v;
    ++k;
  }
  if (!best) throw std::logic_error("urgency instant of an empty set");
  return *best;
}

Action process_step(Status status, bool nonempty, bool lock_free) {
  if (!nonempty) return Action::idle;
  if (status != Status::flexible) return Action::run_urgent;
  return lock_free ? Action::acquire_and_run : Action::idle;
}

namespace {

struct Proc {
  std::vector<char> done;
  std::optional<std::size_t> running;
  Rational run_start;
  bool run_flexible = false;
  Schedule schedule;
};

void start_job(Proc& p, std::size_t job, const Rational& t, bool flexible) {
  p.running = job;
  p.run_start = t;
  p.run_flexible = flexible;
}

void complete_at(Proc& p, const Rational& t, const Rational& len, std::optional<int>& lock, int id) {
  if (!p.running || p.run_start + len != t) return;
  p.done[*p.running] = 1;
  p.schedule.entries.push_back({*p.running, p.run_start, p.run_flexible});
  if (p.run_flexible && lock == id) lock.reset();
  p.running.reset();
}

// Next decision instant strictly after t, if any.
std::optional<Rational> next_instant(const JobSet& set, const Rational& t, std::span<const Proc> procs) {
  std::optional<Rational> next;
  auto offer = [&](const Rational& v) {
    if (v > t && (!next || v < *next)) next = v;
  };
  for (const auto& j : set.jobs) offer(j.release);
  for (const auto& p : procs) {
    if (p.running) {
      offer(p.run_start + set.p);
      continue;
    }
    const auto q = pending(set, t, p.done);
    if (q.empty()) continue;
    offer(urgency_instant(set, q));
    for (std::size_t j : q) offer(set.jobs[j].expiration());
  }
  return next;
}

// Runs the lock-synchronized processes from instant t onwards.
void run_dual(const JobSet& set, std::array<Proc, 2>& procs, std::optional<int>& lock, Rational t) {
  while (true) {
    for (int id = 0; id < 2; ++id) complete_at(procs[id], t, set.p, lock, id);
    for (int id = 0; id < 2; ++id) {
      Proc& p = procs[id];
      if (p.running) continue;
      const auto q = pending(set, t, p.done);
      const Status s = q.empty() ? Status::flexible : classify(set, q, t);
      switch (process_step(s, !q.empty(), !lock.has_value())) {
        case Action::run_urgent: start_job(p, q.front(), t, false); break;
        case Action::acquire_and_run:
          lock = id;
          start_job(p, q.front(), t, true);
          break;
        case Action::idle: break;
      }
    }
    auto next = next_instant(set, t, procs);
    if (!next) break;
    t = *next;
  }
}

// Greedy single-process ED packing on instants strictly before `until`.
void run_greedy(const JobSet& set, Proc& s, std::optional<Rational> until) {
  if (set.jobs.empty()) return;
  Rational t = set.jobs.front().release;
  for (const auto& j : set.jobs) t = std::min(t, j.release);
  std::optional<int> no_lock;
  while (!until || t < *until) {
    complete_at(s, t, set.p, no_lock, 0);
    if (!s.running) {
      const auto q = pending(set, t, s.done);
      if (!q.empty()) start_job(s, q.front(), t, classify(set, q, t) == Status::flexible);
    }
    auto next = next_instant(set, t, std::span<const Proc>(&s, 1));
    if (!next) return;
    t = *next;
  }
}

void check_release_order(const JobSet& set) {
  for (std::size_t k = 1; k < set.jobs.size(); ++k)
    if (set.jobs[k].release < set.jobs[k - 1].release)
      throw InputError("throughput simulation needs jobs in release order");
}

}  // namespace

DualRun chrobak_dual(const JobSet& set, const Rational& start) {
  std::array<Proc, 2> procs;
  for (auto& p : procs) p.done.assign(set.jobs.size(), 0);
  std::optional<int> lock;
  run_dual(set, procs, lock, start);
  return {procs[0].schedule, procs[1].schedule};
}

RomRun rom_simulation(const JobSet& set, std::optional<int> forced_bit) {
  check_release_order(set);
  RomRun run;
  Proc s;
  s.done.assign(set.jobs.size(), 0);

  Extractor combine(ExtractionMode::combine);
  std::optional<std::size_t> first_distinct;
  for (std::size_t k = 0; k < set.jobs.size(); ++k) {
    if (auto b = combine.feed(set.jobs[k].key(set.p))) {
      run.bit = forced_bit ? *forced_bit : *b;
      first_distinct = k;
      break;
    }
  }
  if (!first_distinct) {
    run_greedy(set, s, std::nullopt);
    run.x = run.y = run.greedy = s.schedule;
    return run;
  }

  const Rational r = set.jobs[*first_distinct].release;
  run.switch_time = r;
  run_greedy(set, s, r);
  std::optional<int> lock;
  complete_at(s, r, set.p, lock, 0);

  std::array<Proc, 2> procs{s, s};
  run.breakpoint = s.running ? s.run_start : r;
  const Rational B = *run.breakpoint;
  run.greedy = s.schedule;
  if (s.running) {
    const auto q_b = pending(set, B, s.done);
    if (classify(set, q_b, B) == Status::flexible) {
      lock = 0;
      if (*run.bit == 0) {
        // Y stays idle on [B, r) only if its pending set would remain flexible there.
        std::vector<char> seen(set.jobs.size(), 0);
        std::vector<std::size_t> q(q_b.begin(), q_b.end());
        for (std::size_t j : q) seen[j] = 1;
        for (std::size_t j = 0; j < set.jobs.size(); ++j)
          if (!seen[j] && !s.done[j] && set.jobs[j].release > B && set.jobs[j].release < r) q.push_back(j);
        std::sort(q.begin(), q.end(), [&](std::size_t a, std::size_t b) {
          const Rational xa = set.jobs[a].expiration(), xb = set.jobs[b].expiration();
          if (xa != xb) return xa < xb;
          return set.jobs[a].label < set.jobs[b].label;
        });
        if (urgency_instant(set, q) >= r) {
          procs[1].running.reset();
          run.preempted = true;
        }
      }
    }
  }
  run_dual(set, procs, lock, r);
  run.x = procs[0].schedule;
  run.y = procs[1].schedule;
  return run;
}

NormalCheck is_normal(const Schedule& schedule, const JobSet& set) {
  const auto& e = schedule.entries;
  std::vector<char> used(set.jobs.size(), 0);
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k].job >= set.jobs.size()) throw InputError("schedule names an unknown job");
    if (used[e[k].job]) throw InputError("schedule runs a job twice");
    used[e[k].job] = 1;
    const Job& j = set.jobs[e[k].job];
    if (e[k].start < j.release || e[k].start > j.expiration())
      throw InputError("schedule starts a job outside its admissible window");
    if (k > 0 && e[k - 1].start + set.p > e[k].start) throw InputError("schedule entries overlap");
  }
  auto done_before = [&](const Rational& t) {
    std::vector<char> d(set.jobs.size(), 0);
    for (const auto& x : e)
      if (x.start + set.p <= t) d[x.job] = 1;
    return d;
  };
  auto fmt = [](const Rational& t) { return rombit::to_string(t); };

  for (const auto& x : e) {
    const auto q = pending(set, x.start, done_before(x.start));
    if (q.empty() || q.front() != x.job)
      return {false, "start at " + fmt(x.start) + " is not the earliest-deadline pending job"};
    if ((classify(set, q, x.start) == Status::flexible) != x.flexible)
      return {false, "start at " + fmt(x.start) + " carries the wrong flexible flag"};
  }

  if (set.jobs.empty()) return {};
  Rational origin = set.jobs.front().release;
  for (const auto& j : set.jobs) origin = std::min(origin, j.release);
  std::vector<std::pair<Rational, std::optional<Rational>>> idle;
  Rational cursor = origin;
  for (const auto& x : e) {
    if (x.start > cursor) idle.emplace_back(cursor, x.start);
    cursor = std::max(cursor, x.start + set.p);
  }
  idle.emplace_back(cursor, std::nullopt);

  for (const auto& [a, b] : idle) {
    std::vector<Rational> cuts{a};
    for (const auto& j : set.jobs)
      if (j.release > a && (!b || j.release < *b)) cuts.push_back(j.release);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t c = 0; c < cuts.size(); ++c) {
      const Rational& u = cuts[c];
      std::optional<Rational> v = c + 1 < cuts.size() ? std::optional<Rational>(cuts[c + 1]) : b;
      const auto q = pending(set, u, done_before(u));
      if (q.empty()) continue;
      const Rational ts = std::max(u, urgency_instant(set, q));
      if (!v || ts < *v) return {false, "idle at " + fmt(ts) + " while the pending set is urgent"};
    }
  }
  return {};
}

std::size_t offline_opt_throughput(const JobSet& set) {
  const std::size_t n = set.jobs.size();
  if (n > kMaxOfflineJobs)
    throw CapacityError("offline throughput optimum limited to " + std::to_string(kMaxOfflineJobs) + " jobs");
  const std::size_t full = std::size_t{1} << n;
  std::vector<std::optional<Rational>> finish(full);
  finish[0] = Rational{0};
  std::size_t best = 0;
  for (std::size_t mask = 0; mask < full; ++mask) {
    if (!finish[mask]) continue;
    best = std::max<std::size_t>(best, static_cast<std::size_t>(__builtin_popcountll(mask)));
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (std::size_t{1} << j)) continue;
      const Rational start = mask == 0 ? set.jobs[j].release : std::max(*finish[mask], set.jobs[j].release);
      if (start > set.jobs[j].expiration()) continue;
      auto& slot = finish[mask | (std::size_t{1} << j)];
      const Rational end = start + set.p;
      if (!slot || end < *slot) slot = end;
    }
  }
  return best;
}

JobSet subinstance_after(const JobSet& set, const RomRun& run) {
  JobSet sub;
  sub.p = set.p;
  if (!run.breakpoint) return sub;
  const Rational B = *run.breakpoint;
  std::vector<char> in_g(set.jobs.size(), 0);
  for (const auto& e : run.greedy.entries)
    if (e.start < B) in_g[e.job] = 1;
  for (std::size_t j = 0; j < set.jobs.size(); ++j) {
    const Job& job = set.jobs[j];
    if (in_g[j]) continue;
    if (job.release >= B) {
      sub.jobs.push_back(job);
    } else if (job.expiration() >= B) {
      sub.jobs.push_back(Job{B, job.expiration() - B, job.label});
    }
  }
  std::stable_sort(sub.jobs.begin(), sub.jobs.end(),
                   [](const Job& a, const Job& b) { return a.release < b.release; });
  return sub;
}

namespace {

using Stamp = std::pair<std::size_t, Rational>;  // (label, start)

std::vector<Stamp> stamps(const Schedule& s, const JobSet& set, std::optional<Rational> from) {
  std::vector<Stamp> out;
  for (const auto& e : s.entries)
    if (!from || e.start >= *from) out.emplace_back(set.jobs[e.job].label, e.start);
  return out;
}

}  // namespace

ThroughputAudit audit(const JobSet& set) {
  ThroughputAudit out;
  const RomRun run = rom_simulation(set);
  const std::size_t opt = offline_opt_throughput(set);
  // X and Y are the schedules the algorithm outputs under b = 1 and b = 0.
  const Schedule x = rom_simulation(set, 1).chosen();
  const Schedule y = rom_simulation(set, 0).chosen();
  const std::size_t nx = x.size(), ny = y.size();

  if (6 * opt > 5 * (nx + ny)) out.violations.push_back("charging bound |OPT| <= 5/6 (|X|+|Y|) fails");
  const bool ratio_ok = (nx == 0 || ny == 0) ? std::max(nx, ny) <= 1 : (nx <= 2 * ny && ny <= 2 * nx);
  if (!ratio_ok) out.violations.push_back("factor-2 bound between |X| and |Y| fails");
  if (auto c = is_normal(x, set); !c.normal) out.violations.push_back("X not normal: " + c.violation);
  if (auto c = is_normal(y, set); !c.normal) out.violations.push_back("Y not normal: " + c.violation);
  for (const Schedule* s : {&run.x, &run.y})
    if (auto c = is_normal(*s, set); !c.normal) out.violations.push_back("process not normal: " + c.violation);

  if (run.breakpoint) {
    const JobSet sub = subinstance_after(set, run);
    const DualRun fresh = chrobak_dual(sub, *run.breakpoint);
    const bool x_chosen = run.bit.value_or(1) == 1;
    const Schedule& fresh_chosen = x_chosen ? fresh.x : fresh.y;
    if (stamps(run.chosen(), set, run.breakpoint) != stamps(fresh_chosen, sub, std::nullopt))
      out.diagnostics.push_back(std::string(x_chosen ? "X" : "Y") + " differs from the fresh dual run on the subinstance");
    std::size_t g = 0;
    for (const auto& e : run.greedy.entries)
      if (e.start < *run.breakpoint) ++g;
    if (g + offline_opt_throughput(sub) != opt)
      out.diagnostics.push_back("greedy prefix does not extend to an optimal schedule");
  }
  return out;
}

}  // namespace rombit::throughput
