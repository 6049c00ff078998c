#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rombit/extraction.hpp"

using namespace rombit;

namespace {

ItemKey k(int v) { return ItemKey{Rational(v)}; }

std::vector<ItemKey> keys_of(std::initializer_list<int> vs) {
  std::vector<ItemKey> out;
  for (int v : vs) out.push_back(k(v));
  return out;
}

// Written from the rule statements, separate from the library's state machine.
std::optional<int> oracle_bit(const std::vector<int>& seq, ExtractionMode mode) {
  if (seq.size() < 2) return std::nullopt;
  if (mode == ExtractionMode::distinct_unbiased) {
    if (seq[0] == seq[1]) return std::nullopt;
    return seq[0] < seq[1] ? 1 : 0;
  }
  if (mode == ExtractionMode::combine && seq[1] != seq[0]) return seq[1] < seq[0] ? 1 : 0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i] == seq[0]) continue;
    const std::size_t index = i + 1;
    if (mode == ExtractionMode::process1) return 1 - static_cast<int>(index % 2);
    return index % 2 == 1 ? 1 : 0;
  }
  return std::nullopt;
}

struct OracleBias {
  Rational one{0};
  Rational no_bit{0};
  std::optional<Rational> given_distinct;
};

OracleBias oracle_bias(const std::vector<int>& values, ExtractionMode mode) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::int64_t total = 0, ones = 0, none = 0, distinct = 0, distinct_ones = 0;
  do {
    std::vector<int> seq;
    for (auto i : idx) seq.push_back(values[i]);
    auto b = oracle_bit(seq, mode);
    ++total;
    if (!b) ++none;
    if (b == 1) ++ones;
    if (seq.size() >= 2 && seq[0] != seq[1]) {
      ++distinct;
      if (b == 1) ++distinct_ones;
    }
  } while (std::next_permutation(idx.begin(), idx.end()));
  OracleBias out{Rational(ones, total), Rational(none, total), std::nullopt};
  if (distinct) out.given_distinct = Rational(distinct_ones, distinct);
  return out;
}

}  // namespace

TEST_CASE("process 1 follows the parity rule") {
  CHECK(extract(keys_of({1, 2}), ExtractionMode::process1) == 1);
  CHECK(extract(keys_of({1, 1, 2}), ExtractionMode::process1) == 0);
  CHECK(extract(keys_of({1, 1, 1, 0}), ExtractionMode::process1) == 1);
  CHECK(!extract(keys_of({3, 3, 3}), ExtractionMode::process1));

  Extractor e(ExtractionMode::process1);
  CHECK(!process1_feed(e, k(4)));
  CHECK(e.first_type() == k(4));
  CHECK(process1_feed(e, k(5)) == 1);
  CHECK(e.done());
  CHECK_THROWS_AS(process1_feed(e, k(6)), StateError);
}

TEST_CASE("distinct extractor compares the first two keys") {
  CHECK(distinct_unbiased(k(1), k(2)) == 1);
  CHECK(distinct_unbiased(k(2), k(1)) == 0);
  CHECK_THROWS_AS(distinct_unbiased(k(2), k(2)), PreconditionError);
  Extractor e(ExtractionMode::distinct_unbiased);
  e.feed(k(1));
  CHECK_THROWS_AS(e.feed(k(1)), PreconditionError);
}

TEST_CASE("combine uses order first, parity second") {
  CHECK(extract(keys_of({2, 1}), ExtractionMode::combine) == 1);
  CHECK(extract(keys_of({1, 2}), ExtractionMode::combine) == 0);
  CHECK(extract(keys_of({1, 1, 2}), ExtractionMode::combine) == 1);
  CHECK(extract(keys_of({1, 1, 1, 0}), ExtractionMode::combine) == 0);
  CHECK(extract(keys_of({1, 1, 1, 1, 0}), ExtractionMode::combine) == 1);
  Extractor e(ExtractionMode::combine);
  combine_feed(e, k(0));
  combine_feed(e, k(0));
  CHECK(combine_feed(e, k(9)) == 1);
  CHECK(e.counter() == 3);
  CHECK_THROWS_AS(combine_feed(e, k(1)), StateError);
}

TEST_CASE("multi-coordinate keys compare lexicographically") {
  std::vector<ItemKey> ks{ItemKey{1, 5}, ItemKey{1, 2}};
  CHECK(extract(ks, ExtractionMode::combine) == 1);
  std::vector<ItemKey> mixed{ItemKey{1}, ItemKey{1, 2}};
  CHECK_THROWS_AS(extract(mixed, ExtractionMode::combine), InputError);
}

TEST_CASE("pairwise bits") {
  CHECK(pairwise_bits(keys_of({1, 2, 3, 4})) == std::vector<int>{1, 1});
  CHECK(pairwise_bits(keys_of({2, 1, 4, 3})) == std::vector<int>{0, 0});
  CHECK_THROWS_AS(pairwise_bits(keys_of({1, 2, 3})), InputError);
  CHECK_THROWS_AS(pairwise_bits(keys_of({1, 1})), PreconditionError);

  // Every bit is marginally unbiased over all 720 orders.
  std::vector<int> vals{0, 1, 2, 3, 4, 5};
  std::vector<int> ones(3, 0);
  int total = 0;
  do {
    std::vector<ItemKey> ks;
    for (int v : vals) ks.push_back(k(v));
    auto bits = pairwise_bits(ks);
    for (int j = 0; j < 3; ++j) ones[j] += bits[j];
    ++total;
  } while (std::next_permutation(vals.begin(), vals.end()));
  CHECK(total == 720);
  for (int c : ones) CHECK(c == 360);
}

TEST_CASE("exact bias on small multisets") {
  auto aab = keys_of({0, 0, 1});
  CHECK(*exact_bias(aab, ExtractionMode::process1).exact_prob_one == Rational(2, 3));
  CHECK(*exact_bias(aab, ExtractionMode::combine).exact_prob_one == Rational(2, 3));
  CHECK(*exact_bias(keys_of({0, 1}), ExtractionMode::process1).exact_prob_one == 1);
  CHECK(*exact_bias(keys_of({0, 1, 2, 3}), ExtractionMode::distinct_unbiased).exact_prob_one == Rational(1, 2));

  for (auto mode : {ExtractionMode::process1, ExtractionMode::distinct_unbiased, ExtractionMode::combine}) {
    auto rep = exact_bias(keys_of({5, 5, 5}), mode);
    CHECK(*rep.exact_no_bit_mass == 1);
    CHECK(*rep.exact_prob_one == 0);
    CHECK(!rep.stderr_);
  }
  CHECK_THROWS_AS(exact_bias(distinct_keys(11), ExtractionMode::combine), CapacityError);
}

TEST_CASE("exact bias agrees with the enumeration oracle") {
  const std::vector<std::vector<int>> suites{
      {0, 0, 1}, {0, 1, 1, 1}, {0, 0, 1, 1, 2}, {3, 1, 1, 1, 1, 2}, {0, 0, 0, 0, 0, 1, 2},
      {0, 1, 2, 3, 4, 5, 6}, {0, 0, 1, 1, 1, 2, 2, 2}};
  for (const auto& vals : suites) {
    std::vector<ItemKey> ks;
    for (int v : vals) ks.push_back(k(v));
    for (auto mode : {ExtractionMode::process1, ExtractionMode::distinct_unbiased, ExtractionMode::combine}) {
      CAPTURE(vals.size());
      auto rep = exact_bias(ks, mode);
      auto want = oracle_bias(vals, mode);
      CHECK(*rep.exact_prob_one == want.one);
      CHECK(*rep.exact_no_bit_mass == want.no_bit);
      if (mode == ExtractionMode::combine) {
        REQUIRE(rep.exact_prob_one_given_distinct_start);
        CHECK(*rep.exact_prob_one_given_distinct_start == Rational(1, 2));
        CHECK(*rep.exact_prob_one_given_distinct_start == *want.given_distinct);
      }
      CHECK(*rep.exact_prob_one ==
            *exact_bias(ks, mode, Execution::serial).exact_prob_one);
    }
  }
}

TEST_CASE("closed-form predictions") {
  CHECK(process1_prediction(0.5) == doctest::Approx(2.0 / 3.0));
  CHECK(process1_prediction(1e-9) == doctest::Approx(0.5));
  const double a = 0.3;
  CHECK(process1_prediction(a) == doctest::Approx(a / (1 + a) + (1 - a) / (2 - a)));
  CHECK(combine_prediction(std::sqrt(2.0) - 1) == doctest::Approx(2 - std::sqrt(2.0)));
  CHECK(combine_prediction(0.9) == doctest::Approx(0.05 + 0.9 / 1.9));
  for (double r = 0.05; r < 1; r += 0.05) {
    CHECK(combine_prediction(r) > 0.5);
    CHECK(combine_prediction(r) <= 2 - std::sqrt(2.0) + 1e-12);
  }
}

TEST_CASE("Monte Carlo bias is deterministic and reasonably accurate") {
  auto ks = two_type_keys(1000, 0.5);
  auto a = empirical_bias(ks, ExtractionMode::process1, 20000, 11);
  auto b = empirical_bias(ks, ExtractionMode::process1, 20000, 11);
  auto s = empirical_bias(ks, ExtractionMode::process1, 20000, 11, {}, Execution::serial);
  CHECK(a.prob_one == b.prob_one);
  CHECK(a.prob_one == s.prob_one);
  REQUIRE(a.stderr_);
  CHECK(*a.stderr_ == doctest::Approx(std::sqrt(a.prob_one * (1 - a.prob_one) / 20000)));
  CHECK(std::fabs(a.prob_one - 2.0 / 3.0) < 4 * *a.stderr_ + 0.002);

  EmpiricalOptions opt;
  opt.first_key = k(0);
  auto c = empirical_bias(centered_type_keys(1000, 0.4), ExtractionMode::combine, 20000, 5, opt);
  CHECK(std::fabs(c.prob_one - combine_prediction(0.4)) < 4 * *c.stderr_ + 0.005);
  opt.first_key = k(7);
  CHECK_THROWS_AS(empirical_bias(ks, ExtractionMode::combine, 10, 5, opt), InputError);
  CHECK_THROWS_AS(empirical_bias(ks, ExtractionMode::combine, 0, 5), InputError);
}

TEST_CASE("key generators") {
  auto t = two_type_keys(10, 0.34);
  CHECK(std::count(t.begin(), t.end(), k(0)) == 3);
  auto c = centered_type_keys(9, 0.34);
  CHECK(std::count(c.begin(), c.end(), k(0)) == 3);
  CHECK(std::count(c.begin(), c.end(), k(-1)) == 3);
  CHECK(std::count(c.begin(), c.end(), k(1)) == 3);
  CHECK(rank_keys(keys_of({5, 1, 5, 3})) == std::vector<int>{2, 0, 2, 1});
}

TEST_CASE("bias curve rejects degenerate parameters") {
  std::vector<double> bad{0.0};
  CHECK_THROWS_AS(bias_curve(ExtractionMode::process1, bad, 100, 10, 1), InputError);
  std::vector<double> grid{0.25, 0.75};
  auto pts = bias_curve(ExtractionMode::process1, grid, 2000, 4000, 3);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].predicted == doctest::Approx(process1_prediction(0.25)));
  CHECK(parse_mode("p1") == ExtractionMode::process1);
  CHECK(parse_mode("combine") == ExtractionMode::combine);
  CHECK_THROWS_AS(parse_mode("p9"), InputError);
}
