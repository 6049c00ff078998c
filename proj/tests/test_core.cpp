#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rombit/core.hpp"
#include "rombit/parallel.hpp"
#include "rombit/rng.hpp"

using namespace rombit;

namespace {

Payload pl(std::initializer_list<std::pair<const std::string, Rational>> fields) { return Payload(fields); }

}  // namespace

TEST_CASE("lex_compare orders coordinates left to right") {
  CHECK(lex_compare(ItemKey{1, 5}, ItemKey{2, 0}) == std::strong_ordering::less);
  CHECK(lex_compare(ItemKey{2, 1}, ItemKey{2, 0}) == std::strong_ordering::greater);
  CHECK(lex_compare(ItemKey{Rational(1, 3)}, ItemKey{Rational(2, 6)}) == std::strong_ordering::equal);
  CHECK_THROWS_AS(lex_compare(ItemKey{1}, ItemKey{1, 2}), InputError);
}

TEST_CASE("rational helpers") {
  CHECK(approximate(0.25) == Rational(1, 4));
  CHECK(approximate(-1.5) == Rational(-3, 2));
  const Rational s = approximate(std::sqrt(2.0) - 1.0);
  CHECK(std::fabs(to_double(s) - (std::sqrt(2.0) - 1.0)) < 1e-10);
  CHECK(to_string(Rational(6, 4)) == "3/2");
  CHECK(to_string(Rational(-4, 2)) == "-2");
  CHECK(parse_rational("3/9") == Rational(1, 3));
  CHECK(parse_rational("7") == Rational(7));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK_THROWS_AS(parse_rational("1/0"), InputError);
  CHECK_THROWS_AS(parse_rational("abc"), InputError);
  CHECK_THROWS_AS(parse_rational("2x"), InputError);
}

TEST_CASE("problem and model tags round-trip") {
  for (Problem p : {Problem::string_guess, Problem::knapsack_general, Problem::knapsack_proportional,
                    Problem::interval, Problem::throughput})
    CHECK(parse_problem(to_string(p)) == p);
  for (ArrivalModel m : {ArrivalModel::adversarial, ArrivalModel::rom, ArrivalModel::realtime_rom})
    CHECK(parse_model(to_string(m)) == m);
  CHECK_THROWS_AS(parse_problem("tsp"), InputError);
  CHECK_THROWS_AS(parse_model("sorted"), InputError);
}

TEST_CASE("make_instance derives keys and validates") {
  auto k = make_instance(Problem::knapsack_general, {pl({{"weight", Rational(1, 2)}, {"value", 3}})});
  CHECK(k.items[0].key == ItemKey{3, Rational(1, 2)});

  auto t = make_instance(Problem::throughput, {pl({{"release", 0}, {"slack", 2}})}, {{"p", 1}});
  CHECK(t.items[0].key == ItemKey{1, 2});

  auto iv = make_instance(Problem::interval, {pl({{"release", 0}, {"length", 2}, {"weight", 5}})});
  CHECK(iv.items[0].key == ItemKey{5, 2});

  CHECK_THROWS_AS(make_instance(Problem::knapsack_general, {pl({{"weight", 2}, {"value", 1}})}), InputError);
  CHECK_THROWS_AS(make_instance(Problem::knapsack_general, {pl({{"weight", 1}})}), InputError);
  CHECK_THROWS_AS(make_instance(Problem::string_guess, {pl({{"bit", 2}})}), InputError);
  CHECK_THROWS_AS(make_instance(Problem::throughput, {pl({{"release", 0}, {"slack", 1}})}), InputError);
  CHECK_THROWS_AS(make_instance(Problem::interval, {pl({{"release", 0}, {"length", 0}, {"weight", 1}})}),
                  InputError);
  CHECK_THROWS_AS(make_instance(Problem::knapsack_proportional, {pl({{"weight", Rational(1, 2)}, {"value", 1}})}),
                  InputError);
  CHECK_THROWS_AS(make_instance(Problem::string_guess, {}), InputError);

  Instance bad = k;
  bad.items[0].key = ItemKey{1, 1};
  CHECK_THROWS_AS(validate(bad), InputError);
}

TEST_CASE("arrange applies the permutation") {
  auto inst = make_instance(Problem::string_guess, {pl({{"bit", 0}}), pl({{"bit", 1}}), pl({{"bit", 1}})});
  auto seq = arrange(inst, ArrivalModel::rom, {2, 0, 1});
  REQUIRE(seq.items.size() == 3);
  CHECK(seq.items[0] == inst.items[2]);
  CHECK(seq.items[1] == inst.items[0]);
  CHECK_THROWS_AS(arrange(inst, ArrivalModel::rom, {0, 1}), InputError);
  CHECK_THROWS_AS(arrange(inst, ArrivalModel::realtime_rom, {0, 1, 2}), InputError);
}

TEST_CASE("realtime_rom keeps the release grid and permutes attributes") {
  auto inst = make_instance(Problem::throughput,
                            {pl({{"release", 3}, {"slack", 0}}), pl({{"release", 0}, {"slack", 1}}),
                             pl({{"release", 1}, {"slack", 2}})},
                            {{"p", 1}});
  // Release order: slack 1 @0, slack 2 @1, slack 0 @3.
  auto seq = arrange(inst, ArrivalModel::realtime_rom, {2, 0, 1});
  CHECK(seq.items[0].payload.at("release") == 0);
  CHECK(seq.items[0].payload.at("slack") == 0);
  CHECK(seq.items[1].payload.at("release") == 1);
  CHECK(seq.items[1].payload.at("slack") == 1);
  CHECK(seq.items[2].payload.at("release") == 3);
  CHECK(seq.items[2].payload.at("slack") == 2);
  CHECK(seq.items[2].key == ItemKey{1, 2});
}

TEST_CASE("permute is deterministic in the seed") {
  auto inst = make_instance(Problem::string_guess, std::vector<Payload>(8, pl({{"bit", 1}})));
  CHECK(permute(inst, ArrivalModel::rom, 5).permutation == permute(inst, ArrivalModel::rom, 5).permutation);
  auto adv = permute(inst, ArrivalModel::adversarial, 5).permutation;
  CHECK(std::is_sorted(adv.begin(), adv.end()));
  auto p = random_permutation(50, 9);
  std::sort(p.begin(), p.end());
  Permutation id(50);
  std::iota(id.begin(), id.end(), std::size_t{0});
  CHECK(p == id);
}

TEST_CASE("random_permutation is close to uniform on 3 labels") {
  std::map<Permutation, int> counts;
  const int trials = 60000;
  for (int t = 0; t < trials; ++t) counts[random_permutation(3, derive_seed(17, t))]++;
  CHECK(counts.size() == 6);
  for (auto& [perm, c] : counts) CHECK(std::abs(c - trials / 6) < 400);
}

TEST_CASE("permutation enumeration") {
  PermutationEnumerator e(4);
  CHECK(e.count() == 24);
  std::set<Permutation> seen;
  std::uint64_t rank = 0;
  do {
    CHECK(unrank_permutation(4, rank) == e.current());
    seen.insert(e.current());
    ++rank;
  } while (e.next());
  CHECK(seen.size() == 24);
  CHECK_THROWS_AS(PermutationEnumerator(kMaxEnumeration + 1), CapacityError);
  std::size_t calls = 0;
  for_each_permutation(5, [&](const Permutation&) { ++calls; });
  CHECK(calls == 120);
}

TEST_CASE("parallel reductions match their serial references") {
  auto visit = [](std::uint64_t& acc, const Permutation& p) {
    std::uint64_t h = 0;
    for (std::size_t i = 0; i < p.size(); ++i) h += (i + 1) * p[i];
    acc += h * h;
  };
  auto merge = [](std::uint64_t& a, const std::uint64_t& b) { a += b; };
  CHECK(reduce_permutations<std::uint64_t>(7, 0, visit, merge, Execution::serial) ==
        reduce_permutations<std::uint64_t>(7, 0, visit, merge, Execution::parallel));

  auto trial = [](double& acc, std::uint64_t t) { acc += Rng(derive_seed(3, t)).uniform(); };
  auto dmerge = [](double& a, const double& b) { a += b; };
  const double s = reduce_trials<double>(5000, 0.0, trial, dmerge, Execution::serial);
  const double p1 = reduce_trials<double>(5000, 0.0, trial, dmerge, Execution::parallel);
  const double p2 = reduce_trials<double>(5000, 0.0, trial, dmerge, Execution::parallel);
  CHECK(p1 == p2);
  CHECK(std::fabs(s - p1) < 1e-9);
}

TEST_CASE("Rng::below stays in range") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}
