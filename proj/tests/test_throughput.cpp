#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "rombit/rng.hpp"
#include "rombit/throughput.hpp"

namespace rombit::throughput {
namespace {

JobSet jobs(Rational p, std::vector<std::pair<Rational, Rational>> release_slack) {
  JobSet set;
  set.p = p;
  for (std::size_t i = 0; i < release_slack.size(); ++i)
    set.jobs.push_back(Job{release_slack[i].first, release_slack[i].second, i});
  return set;
}

std::vector<std::size_t> all(const JobSet& set) {
  std::vector<std::size_t> v(set.jobs.size());
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// Largest subset that some job order completes, starting each job as early as possible.
std::size_t brute_opt(const JobSet& set) {
  const std::size_t n = set.jobs.size();
  std::size_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) order.push_back(i);
    if (order.size() <= best) continue;
    bool any = false;
    do {
      Rational t{0};
      bool ok = true;
      for (std::size_t j : order) {
        const Rational start = std::max(t, set.jobs[j].release);
        if (start > set.jobs[j].expiration()) {
          ok = false;
          break;
        }
        t = start + set.p;
      }
      any = ok;
    } while (!any && std::next_permutation(order.begin(), order.end()));
    if (any) best = order.size();
  }
  return best;
}

Instance random_instance(Rng& rng, std::size_t n) {
  std::vector<Payload> pls;
  for (std::size_t i = 0; i < n; ++i)
    pls.push_back(Payload{{"release", Rational(static_cast<std::int64_t>(rng.below(9)), 4)},
                          {"slack", Rational(static_cast<std::int64_t>(rng.below(9)), 4)}});
  return make_instance(Problem::throughput, std::move(pls), {{"p", 1}});
}

}  // namespace

TEST_CASE("classification of pending sets") {
  const JobSet empty = jobs(1, {});
  CHECK(classify(empty, {}, 0) == Status::flexible);

  const JobSet tight = jobs(1, {{0, 0}, {0, 0}});
  CHECK(classify(tight, all(tight), 0) == Status::infeasible);

  const JobSet q = jobs(1, {{0, Rational(1, 10)}, {0, Rational(11, 10)}});
  CHECK(classify(q, all(q), 0) == Status::urgent);
  CHECK(urgency_instant(q, all(q)) == Rational(-9, 10));

  const JobSet loose = jobs(1, {{0, 3}});
  CHECK(urgency_instant(loose, all(loose)) == 2);
  CHECK(classify(loose, all(loose), Rational(19, 10)) == Status::flexible);
  CHECK(classify(loose, all(loose), 2) == Status::urgent);
  CHECK(classify(loose, all(loose), 3) == Status::urgent);
  CHECK(classify(loose, all(loose), Rational(31, 10)) == Status::infeasible);
}

TEST_CASE("pending jobs come in earliest-deadline order") {
  const JobSet set = jobs(1, {{0, 5}, {0, 1}, {2, 0}});
  std::vector<char> done(3, 0);
  CHECK(pending(set, 0, done) == std::vector<std::size_t>{1, 0});
  CHECK(pending(set, 2, done) == std::vector<std::size_t>{2, 0});
  done[0] = 1;
  CHECK(pending(set, Rational(3, 2), done) == std::vector<std::size_t>{});
}

TEST_CASE("process rule") {
  CHECK(process_step(Status::urgent, true, false) == Action::run_urgent);
  CHECK(process_step(Status::infeasible, true, false) == Action::run_urgent);
  CHECK(process_step(Status::flexible, true, true) == Action::acquire_and_run);
  CHECK(process_step(Status::flexible, true, false) == Action::idle);
  CHECK(process_step(Status::flexible, false, true) == Action::idle);
}

TEST_CASE("dual process examples") {
  for (Rational slack : {Rational(0), Rational(5)}) {
    const auto run = chrobak_dual(jobs(1, {{0, slack}}));
    CHECK(run.x.size() == 1);
    CHECK(run.y.size() == 1);
  }
  const JobSet twin = jobs(1, {{0, 0}, {0, 0}});
  const auto run = chrobak_dual(twin);
  CHECK(run.x.size() == 1);
  CHECK(run.y.size() == 1);
  CHECK(offline_opt_throughput(twin) == 1);

  // With a loose job the lock keeps Y waiting until X releases it.
  const auto loose = chrobak_dual(jobs(1, {{0, 10}, {0, 10}}));
  REQUIRE(loose.x.size() == 2);
  CHECK(loose.x.entries[0].start == 0);
  CHECK(loose.x.entries[0].flexible);
}

TEST_CASE("ROM simulation examples") {
  const JobSet set = jobs(1, {{0, Rational(1, 5)}, {0, Rational(1, 5)}, {Rational(1, 2), 2}});
  const auto run = rom_simulation(set);
  CHECK(run.x.size() == 2);
  CHECK(run.y.size() == 2);
  CHECK(offline_opt_throughput(set) == 2);
  REQUIRE(run.breakpoint);
  CHECK(*run.breakpoint == 0);
  CHECK(run.switch_time == Rational(1, 2));

  const JobSet same = jobs(1, {{0, 1}, {0, 1}, {1, 1}, {Rational(5, 2), 1}});
  const auto one = rom_simulation(same);
  CHECK(!one.bit);
  CHECK(one.chosen().size() == offline_opt_throughput(same));
  CHECK(is_normal(one.chosen(), same).normal);
}

TEST_CASE("normality check") {
  const JobSet set = jobs(1, {{0, 0}});
  const auto idle = is_normal(Schedule{}, set);
  CHECK(!idle.normal);
  CHECK(!idle.violation.empty());
  Schedule ok;
  ok.entries.push_back(Entry{0, 0, false});
  CHECK(is_normal(ok, set).normal);
  Schedule early;
  early.entries.push_back(Entry{0, -1, false});
  CHECK_THROWS_AS(is_normal(early, set), InputError);
}

TEST_CASE("offline optimum") {
  CHECK(offline_opt_throughput(jobs(1, {{0, 0}, {2, 0}, {4, 0}})) == 3);
  CHECK(offline_opt_throughput(jobs(1, {{0, 0}, {0, 0}})) == 1);
  Rng rng(12);
  for (int t = 0; t < 60; ++t) {
    const auto set = jobs_of(random_instance(rng, 1 + rng.below(7)));
    REQUIRE(offline_opt_throughput(set) == brute_opt(set));
  }
  CHECK_THROWS_AS(offline_opt_throughput(jobs(1, std::vector<std::pair<Rational, Rational>>(kMaxOfflineJobs + 1, {0, 1}))),
                  CapacityError);
}

TEST_CASE("audits hold on every release-grid order of small instances") {
  Rng rng(99);
  std::size_t orders = 0;
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = 3 + static_cast<std::size_t>(k % 4);
    const Instance inst = random_instance(rng, n);
    for_each_permutation(n, [&](const Permutation& p) {
      const JobSet set = jobs_of(arrange(inst, ArrivalModel::realtime_rom, p), inst);
      const auto run = rom_simulation(set);
      REQUIRE(is_normal(run.x, set).normal);
      REQUIRE(is_normal(run.y, set).normal);
      const std::size_t opt = offline_opt_throughput(set);
      const std::size_t x = rom_simulation(set, 1).chosen().size(), y = rom_simulation(set, 0).chosen().size();
      REQUIRE(6 * opt <= 5 * (x + y));
      REQUIRE(run.chosen().size() <= opt);
      if (run.preempted) REQUIRE(run.bit == 0);
      const auto a = audit(set);
      if (!a.violations.empty()) FAIL_CHECK(a.violations.front());
      for (int b : {0, 1}) REQUIRE(rom_simulation(set, b).bit == b);
      ++orders;
    });
  }
  CHECK(orders > 1000);
}

TEST_CASE("charging uses the outputs of both bits, not one run's processes") {
  // Without preemption under b = 1 both processes keep the loose job and lose the tight ones.
  const JobSet set = jobs(1, {{0, Rational(3, 2)}, {Rational(1, 4), Rational(1, 2)}, {Rational(1, 2), 0}});
  const auto one = rom_simulation(set, 1);
  CHECK(one.x.size() + one.y.size() == 2);
  CHECK(offline_opt_throughput(set) == 2);
  CHECK(rom_simulation(set, 0).chosen().size() == 2);
  CHECK(audit(set).violations.empty());
}

TEST_CASE("subinstance after the breakpoint") {
  const JobSet set = jobs(1, {{0, 1}, {0, 1}, {Rational(1, 2), 3}, {2, 0}});
  const auto run = rom_simulation(set);
  REQUIRE(run.breakpoint);
  const JobSet sub = subinstance_after(set, run);
  for (const auto& j : sub.jobs) CHECK(j.release >= *run.breakpoint);
  CHECK(sub.p == set.p);
}

}  // namespace rombit::throughput
