#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "rombit/intervals.hpp"
#include "rombit/rng.hpp"

namespace rombit::intervals {
namespace {

Interval iv(Rational r, Rational len, Rational w, std::size_t label = 0) { return Interval{r, len, w, label}; }

std::vector<Interval> labeled(std::vector<Interval> v) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i].label = i;
  return v;
}

Rational brute_opt(const std::vector<Interval>& set) {
  Rational best{0};
  for (std::uint32_t mask = 0; mask < (1u << set.size()); ++mask) {
    std::vector<Interval> pick;
    for (std::size_t i = 0; i < set.size(); ++i)
      if (mask >> i & 1) pick.push_back(set[i]);
    bool ok = true;
    for (std::size_t a = 0; a < pick.size() && ok; ++a)
      for (std::size_t b = a + 1; b < pick.size() && ok; ++b)
        ok = pick[a].deadline() <= pick[b].release || pick[b].deadline() <= pick[a].release;
    if (!ok) continue;
    Rational w{0};
    for (const auto& p : pick) w += p.weight;
    best = std::max(best, w);
  }
  return best;
}

Instance random_instance(Rng& rng, std::size_t n, Variant variant) {
  std::vector<Payload> pls;
  for (std::size_t i = 0; i < n; ++i) {
    Rational release, length, weight;
    switch (variant) {
      case Variant::single:
        release = Rational(static_cast<std::int64_t>(rng.below(13)), 4);
        length = 1;
        weight = static_cast<std::int64_t>(1 + rng.below(3));
        break;
      case Variant::monotone:
        release = Rational(static_cast<std::int64_t>(rng.below(9)), 2);
        length = 1 + Rational(static_cast<std::int64_t>(rng.below(5)), 8);
        weight = static_cast<std::int64_t>(1 + rng.below(3));
        break;
      case Variant::c_benevolent:
        release = Rational(static_cast<std::int64_t>(rng.below(9)), 2);
        length = Rational(static_cast<std::int64_t>(2 + rng.below(3)), 2);
        weight = length * length;
        break;
    }
    pls.push_back(Payload{{"release", release}, {"length", length}, {"weight", weight}});
  }
  return make_instance(Problem::interval, std::move(pls));
}

}  // namespace

TEST_CASE("overlap is half-open") {
  CHECK(!overlaps(iv(0, 1, 1), iv(1, 1, 1)));
  CHECK(overlaps(iv(0, 2, 1), iv(1, 1, 1)));
  CHECK(feasible(std::vector<Interval>{iv(0, 1, 1), iv(1, 1, 1), iv(3, 1, 1)}));
  CHECK(!feasible(std::vector<Interval>{iv(0, 1, 1), iv(Rational(1, 2), 1, 1)}));
}

TEST_CASE("fixed slots keep the heaviest interval per chosen slot") {
  auto one = fung_single_length(labeled({iv(Rational(1, 2), 1, 3)}), 1, 0);
  CHECK(one.value == 3);

  auto two = fung_single_length(labeled({iv(0, 1, 2), iv(Rational(1, 2), 1, 5)}), 1, 0);
  REQUIRE(two.accepted.size() == 1);
  CHECK(two.accepted[0].weight == 5);
  REQUIRE(two.revoked.size() == 1);
  CHECK(two.revoked[0].weight == 2);

  auto even = fung_single_length(labeled({iv(0, 1, 2), iv(Rational(3, 2), 1, 5), iv(3, 1, 7)}), 0, 0);
  CHECK(even.value == 12);
  auto odd = fung_single_length(labeled({iv(0, 1, 2), iv(Rational(3, 2), 1, 5), iv(3, 1, 7)}), 1, 0);
  CHECK(odd.value == 2);

  CHECK_THROWS_AS(fung_single_length(labeled({iv(0, 1, 1), iv(2, 2, 1)}), 1, 0), InputError);
}

TEST_CASE("single-length ROM example, both branches") {
  const auto seq = labeled({iv(0, 1, 1), iv(Rational(1, 5), 1, 1), iv(Rational(3, 2), 1, 3)});
  CHECK(offline_opt_intervals(seq) == 4);
  auto natural = rom_single_length(seq);
  CHECK(natural.bit == 1);
  CHECK(natural.prefix_end == 0);
  CHECK(natural.switch_index == 2);
  CHECK(rom_single_length(seq, 0).value == 4);
  CHECK(rom_single_length(seq, 1).value == 1);
  CHECK(audit(seq, Variant::single).empty());

  const auto same = labeled({iv(0, 1, 2), iv(Rational(1, 2), 1, 2), iv(1, 1, 2), iv(3, 1, 2)});
  auto all = rom_single_length(same);
  CHECK(!all.bit);
  CHECK(all.value == offline_opt_intervals(same));
}

TEST_CASE("adaptive slots hand trace") {
  const auto seq = labeled({iv(0, 2, 4), iv(1, 2, 4), iv(Rational(5, 2), Rational(3, 2), Rational(9, 4))});
  auto t = adaptive_slots_trace(seq, Variant::c_benevolent);
  REQUIRE(t.bounds.size() == 1);
  CHECK(t.bounds[0] == std::vector<Rational>{0, 2, 3, 4});
  REQUIRE(t.a.size() == 1);
  CHECK(t.a[0].label == 1);
  REQUIRE(t.b.size() == 2);
  CHECK(t.b[0].label == 0);
  CHECK(t.b[1].label == 2);
  CHECK(adaptive_slots_run(seq, 1, Variant::c_benevolent).value == 4);
  CHECK(adaptive_slots_run(seq, 0, Variant::c_benevolent).value == 4 + Rational(9, 4));

  auto single = adaptive_slots_trace(labeled({iv(1, 1, 1)}), Variant::monotone);
  CHECK(single.a.size() + single.b.size() >= 1);
}

TEST_CASE("a heavier distinct interval after an identical prefix") {
  const auto seq = labeled({iv(0, 1, 1), iv(1, 1, 1), iv(3, 1, 5)});
  const Rational opt = offline_opt_intervals(seq);
  CHECK(opt == 7);
  CHECK(std::max(rom_adaptive(seq, Variant::monotone, 0).value, rom_adaptive(seq, Variant::monotone, 1).value) == opt);
  auto pre = rom_adaptive(labeled({iv(0, 1, 1), iv(1, 1, 1), iv(2, 1, 1)}), Variant::monotone);
  CHECK(pre.value == 3);
}

TEST_CASE("variant validation") {
  CHECK_NOTHROW(validate_variant(labeled({iv(0, 1, 1), iv(1, 1, 2)}), Variant::single));
  CHECK_THROWS_AS(validate_variant(labeled({iv(0, 1, 1), iv(1, 2, 2)}), Variant::single), InputError);
  CHECK_THROWS_AS(validate_variant(labeled({iv(0, 5, 1), iv(1, 1, 2)}), Variant::monotone), InputError);
  CHECK_NOTHROW(validate_variant(labeled({iv(0, 1, 1), iv(1, 2, 4)}), Variant::c_benevolent));
  const std::vector<std::pair<Rational, Rational>> concave{{1, 3}, {2, 4}};
  CHECK_THROWS_AS(validate_variant(labeled({iv(0, 1, 3), iv(1, 2, 4)}), Variant::c_benevolent, concave),
                  InputError);
  CHECK(parse_variant("cben") == Variant::c_benevolent);
  CHECK(parse_variant("single") == Variant::single);
  CHECK_THROWS_AS(parse_variant("dben"), InputError);
}

TEST_CASE("offline optimum") {
  CHECK(offline_opt_intervals(labeled({iv(0, 1, 2), iv(1, 1, 3), iv(5, 1, 1)})) == 6);
  CHECK(offline_opt_intervals(labeled({iv(0, 2, 3), iv(0, 2, 5)})) == 5);
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    std::vector<Interval> set;
    for (std::size_t i = 0; i < 10; ++i)
      set.push_back(iv(Rational(static_cast<std::int64_t>(rng.below(20)), 2),
                       Rational(static_cast<std::int64_t>(1 + rng.below(6)), 2),
                       static_cast<std::int64_t>(1 + rng.below(9)), i));
    REQUIRE(offline_opt_intervals(set) == brute_opt(set));
  }
}

TEST_CASE("audits hold on every release-grid order of small instances") {
  Rng rng(77);
  for (Variant variant : {Variant::single, Variant::monotone, Variant::c_benevolent}) {
    for (int k = 0; k < 12; ++k) {
      const std::size_t n = 3 + static_cast<std::size_t>(k % 4);
      const Instance inst = random_instance(rng, n, variant);
      for_each_permutation(n, [&](const Permutation& p) {
        const auto seq = items_of(arrange(inst, ArrivalModel::realtime_rom, p));
        validate_variant(seq, variant);
        for (int b : {0, 1}) {
          const auto sel = rom_intervals(seq, variant, b);
          REQUIRE(feasible(sel.accepted));
          REQUIRE(sel.value == total_weight(sel.accepted));
          REQUIRE(sel.value <= offline_opt_intervals(seq));
          for (const auto& r : sel.revoked)
            REQUIRE(std::none_of(sel.accepted.begin(), sel.accepted.end(),
                                 [&](const Interval& a) { return a.label == r.label; }));
        }
        const auto issues = audit(seq, variant);
        if (!issues.empty()) FAIL_CHECK(issues.front());
      });
    }
  }
}

TEST_CASE("adaptive branches are feasible and together cover OPT") {
  Rng rng(5);
  for (int k = 0; k < 60; ++k) {
    const Variant variant = k % 2 ? Variant::monotone : Variant::c_benevolent;
    const Instance inst = random_instance(rng, 7, variant);
    const auto seq = items_of(arrange(inst, ArrivalModel::realtime_rom, random_permutation(7, 100 + k)));
    const auto t = adaptive_slots_trace(seq, variant);
    REQUIRE(feasible(t.a));
    REQUIRE(feasible(t.b));
    REQUIRE(total_weight(t.a) + total_weight(t.b) >= offline_opt_intervals(seq));
    REQUIRE(t.slot_a.size() == t.a.size());
    REQUIRE(t.slot_b.size() == t.b.size());
    for (std::size_t s : t.slot_a) CHECK(s % 2 == 1);
    for (const auto& bounds : t.bounds)
      for (std::size_t j = 1; j < bounds.size(); ++j) REQUIRE(bounds[j - 1] < bounds[j]);
  }
}

}  // namespace rombit::intervals
