#include "rombit/knapsack.hpp"

#include <cmath>

#include "rombit/extraction.hpp"
#include "rombit/rng.hpp"

namespace rombit::knapsack {

namespace {

const Rational kOne{1};

void check_capacity(const State& s) {
  if (s.total_weight() > kOne) throw std::logic_error("knapsack capacity exceeded");
}

// Removes contents[idx]; logs a revocation unless it is the item being offered.
void evict(State& s, std::size_t idx, std::size_t arriving_label) {
  Item gone = s.contents[idx];
  s.contents.erase(s.contents.begin() + static_cast<std::ptrdiff_t>(idx));
  if (gone.label != arriving_label) s.revocations.push_back({s.step, gone});
}

// Lowest weight, latest label among ties.
template <class Pred>
std::optional<std::size_t> smallest(const std::vector<Item>& v, Pred&& eligible) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!eligible(v[i])) continue;
    if (!best || v[i].weight < v[*best].weight ||
        (v[i].weight == v[*best].weight && v[i].label > v[*best].label))
      best = i;
  }
  return best;
}

// Highest weight, latest label among ties.
template <class Pred>
std::optional<std::size_t> largest(const std::vector<Item>& v, Pred&& eligible) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!eligible(v[i])) continue;
    if (!best || v[i].weight > v[*best].weight ||
        (v[i].weight == v[*best].weight && v[i].label > v[*best].label))
      best = i;
  }
  return best;
}

// Lowest weight, earliest label among ties.
std::optional<std::size_t> keeper_of(const std::vector<Item>& v, WeightClass c) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (classify(v[i].weight) != c) continue;
    if (!best || v[i].weight < v[*best].weight ||
        (v[i].weight == v[*best].weight && v[i].label < v[*best].label))
      best = i;
  }
  return best;
}

std::optional<std::size_t> label_of(const std::optional<std::size_t>& idx, const std::vector<Item>& v) {
  if (!idx) return std::nullopt;
  return v[*idx].label;
}

bool is_medium(WeightClass c) { return c != WeightClass::S && c != WeightClass::L; }

// Common entry: returns false when the step is already fully handled.
bool begin_step(State& s, const Item& item) {
  ++s.step;
  if (s.frozen) return false;
  const WeightClass c = classify(item.weight);
  if (c == WeightClass::M4) s.m4_seen = true;
  if (c == WeightClass::L) {
    while (!s.contents.empty()) evict(s, s.contents.size() - 1, item.label);
    s.contents.push_back(item);
    s.frozen = true;
    return false;
  }
  s.contents.push_back(item);
  return true;
}

}  // namespace

std::vector<Item> arrange(const Instance& instance, const Permutation& perm) {
  std::vector<Item> out;
  out.reserve(perm.size());
  for (std::size_t pos = 0; pos < perm.size(); ++pos) {
    const auto& p = instance.items.at(perm[pos]).payload;
    Item it;
    it.weight = p.at("weight");
    auto v = p.find("value");
    it.value = v == p.end() ? it.weight : v->second;
    it.label = pos;
    out.push_back(it);
  }
  return out;
}

std::vector<Item> items_of(const ArrivalSequence& sequence) {
  std::vector<Item> out;
  out.reserve(sequence.items.size());
  for (std::size_t pos = 0; pos < sequence.items.size(); ++pos) {
    const auto& p = sequence.items[pos].payload;
    Item it;
    it.weight = p.at("weight");
    auto v = p.find("value");
    it.value = v == p.end() ? it.weight : v->second;
    it.label = pos;
    out.push_back(it);
  }
  return out;
}

WeightClass classify(const Rational& w) {
  if (w <= Rational(3, 10)) return WeightClass::S;
  if (w <= Rational(2, 5)) return WeightClass::M1;
  if (w <= Rational(1, 2)) return WeightClass::M2;
  if (w < Rational(3, 5)) return WeightClass::M3;
  if (w < Rational(7, 10)) return WeightClass::M4;
  return WeightClass::L;
}

std::string_view to_string(WeightClass c) {
  switch (c) {
    case WeightClass::S: return "S";
    case WeightClass::M1: return "M1";
    case WeightClass::M2: return "M2";
    case WeightClass::M3: return "M3";
    case WeightClass::M4: return "M4";
    case WeightClass::L: return "L";
  }
  return "?";
}

Rational total_weight(std::span<const Item> items) {
  Rational t{0};
  for (const auto& i : items) t += i.weight;
  return t;
}

Rational total_value(std::span<const Item> items) {
  Rational t{0};
  for (const auto& i : items) t += i.value;
  return t;
}

Rational State::total_weight() const { return knapsack::total_weight(contents); }
Rational State::total_value() const { return knapsack::total_value(contents); }

void a1_step(State& s, const Item& item) {
  if (!begin_step(s, item)) return;
  const WeightClass keep_class = s.m4_seen ? WeightClass::M4 : WeightClass::M3;
  const auto keep = label_of(keeper_of(s.contents, keep_class), s.contents);
  while (s.total_weight() > kOne) {
    auto idx = smallest(s.contents, [&](const Item& i) { return !keep || i.label != *keep; });
    evict(s, *idx, item.label);
  }
  check_capacity(s);
}

std::vector<Item> heaviest_feasible_subset(std::span<const Item> items) {
  std::vector<Item> order(items.begin(), items.end());
  std::stable_sort(order.begin(), order.end(), [](const Item& a, const Item& b) { return a.weight > b.weight; });
  std::vector<Rational> suffix(order.size() + 1, Rational{0});
  for (std::size_t i = order.size(); i-- > 0;) suffix[i] = suffix[i + 1] + order[i].weight;

  Rational best{-1};
  std::vector<char> chosen(order.size(), 0), best_set;
  std::function<void(std::size_t, const Rational&)> dfs = [&](std::size_t i, const Rational& load) {
    if (load > best) {
      best = load;
      best_set = chosen;
    }
    if (i == order.size() || best == kOne || load + suffix[i] <= best) return;
    if (load + order[i].weight <= kOne) {
      chosen[i] = 1;
      dfs(i + 1, load + order[i].weight);
      chosen[i] = 0;
    }
    dfs(i + 1, load);
  };
  dfs(0, Rational{0});

  std::vector<Item> out;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (best_set[i]) out.push_back(order[i]);
  std::sort(out.begin(), out.end(), [](const Item& a, const Item& b) { return a.label < b.label; });
  return out;
}

void a2_step(State& s, const Item& item) {
  if (!begin_step(s, item)) return;
  const Rational threshold = s.m4_seen ? Rational(8, 10) : Rational(9, 10);
  auto subset = heaviest_feasible_subset(s.contents);
  if (total_weight(subset) >= threshold) {
    for (std::size_t i = s.contents.size(); i-- > 0;) {
      const auto label = s.contents[i].label;
      const bool kept = std::any_of(subset.begin(), subset.end(), [&](const Item& x) { return x.label == label; });
      if (!kept) evict(s, i, item.label);
    }
    s.frozen = true;
    check_capacity(s);
    return;
  }
  const auto keep2 = label_of(keeper_of(s.contents, WeightClass::M2), s.contents);
  const auto keep1 = label_of(keeper_of(s.contents, WeightClass::M1), s.contents);
  auto not_kept = [&](const Item& i) { return (!keep2 || i.label != *keep2) && (!keep1 || i.label != *keep1); };
  while (s.total_weight() > kOne) {
    auto idx = largest(s.contents, [&](const Item& i) { return is_medium(classify(i.weight)) && not_kept(i); });
    if (!idx) break;
    evict(s, *idx, item.label);
  }
  while (s.total_weight() > kOne) {
    auto idx = smallest(s.contents, [&](const Item& i) { return classify(i.weight) == WeightClass::S; });
    if (!idx) break;
    evict(s, *idx, item.label);
  }
  check_capacity(s);
}

State subroutine_a1(State state, const Item& item) {
  a1_step(state, item);
  return state;
}

State subroutine_a2(State state, const Item& item) {
  a2_step(state, item);
  return state;
}

State run_a1(std::span<const Item> sequence) {
  State s;
  for (const auto& i : sequence) a1_step(s, i);
  return s;
}

State run_a2(std::span<const Item> sequence) {
  State s;
  for (const auto& i : sequence) a2_step(s, i);
  return s;
}

namespace {

bool same_labels(const std::vector<Item>& a, const std::vector<Item>& b) {
  if (a.size() != b.size()) return false;
  std::vector<std::size_t> x, y;
  for (const auto& i : a) x.push_back(i.label);
  for (const auto& i : b) y.push_back(i.label);
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

}  // namespace

ProportionalRun rom_proportional(std::span<const Item> sequence) {
  ProportionalRun run;
  State greedy, a1, a2;
  Extractor combine(ExtractionMode::combine);
  std::size_t i = 0;
  for (; i < sequence.size(); ++i) {
    const Item& item = sequence[i];
    if (auto b = combine.feed(ItemKey{item.weight})) {
      run.bit = *b;
      run.switch_index = i;
      break;
    }
    // Identical prefix: plain greedy, tracked alongside both subroutines.
    ++greedy.step;
    if (!greedy.frozen) {
      if (greedy.total_weight() + item.weight <= kOne) greedy.contents.push_back(item);
      if (classify(item.weight) == WeightClass::L) greedy.frozen = true;
    }
    a1_step(a1, item);
    a2_step(a2, item);
  }
  if (!run.bit) {
    run.final = greedy;
    run.value = greedy.total_value();
    return run;
  }
  State chosen = *run.bit == 1 ? a1 : a2;
  if (!same_labels(chosen.contents, greedy.contents))
    throw std::logic_error("subroutine disagrees with greedy on the identical prefix");
  for (; i < sequence.size(); ++i) {
    if (*run.bit == 1) a1_step(chosen, sequence[i]);
    else a2_step(chosen, sequence[i]);
  }
  run.final = chosen;
  run.value = chosen.total_value();
  return run;
}

TwoBinRun rom_proportional_tworbin(std::span<const Item> sequence, std::optional<int> forced_bit) {
  TwoBinRun run;
  Extractor combine(ExtractionMode::combine);
  Rational W{0};
  std::size_t i = 0;
  for (; i < sequence.size(); ++i) {
    const Item& item = sequence[i];
    if (auto b = combine.feed(ItemKey{item.weight})) {
      run.bit = forced_bit ? *forced_bit : *b;
      break;
    }
    if (W + item.weight <= kOne) {
      W += item.weight;
      run.contents.push_back(item);
      ++run.prefix_accepted;
    }
  }
  if (!run.bit) {
    run.value = total_value(run.contents);
    return run;
  }
  const Rational w = sequence.front().weight;
  if (W > 0 && kOne - W < w) {
    run.early_exit = true;
    run.value = total_value(run.contents);
    return run;
  }
  std::vector<Item> bin1 = run.contents, bin2;
  Rational load1 = W, load2{0};
  for (; i < sequence.size(); ++i) {
    const Item& item = sequence[i];
    if (load1 + item.weight <= kOne) {
      load1 += item.weight;
      bin1.push_back(item);
    } else if (load2 + item.weight <= kOne) {
      load2 += item.weight;
      bin2.push_back(item);
    }
  }
  if (*run.bit == 1) {
    run.contents = bin1;
  } else {
    run.revocations = run.contents.size();
    run.contents = bin2;
  }
  run.value = total_value(run.contents);
  return run;
}

namespace {

// a strictly denser than b (value / weight, cross-multiplied).
bool denser(const Item& a, const Item& b) { return a.value * b.weight > b.value * a.weight; }

void greedy_step(std::vector<Item>& contents, const Item& item) {
  contents.push_back(item);
  while (total_weight(contents) > kOne) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < contents.size(); ++i) {
      const Item& c = contents[i];
      const Item& w = contents[worst];
      if (denser(w, c) || (!denser(c, w) && c.label > w.label)) worst = i;
    }
    contents.erase(contents.begin() + static_cast<std::ptrdiff_t>(worst));
  }
}

void max_step(std::vector<Item>& contents, const Item& item) {
  if (item.weight > kOne) return;
  if (contents.empty() || item.value > contents.front().value) contents = {item};
}

}  // namespace

std::vector<Item> run_greedy(std::span<const Item> sequence) {
  std::vector<Item> c;
  for (const auto& i : sequence) greedy_step(c, i);
  return c;
}

std::vector<Item> run_max(std::span<const Item> sequence) {
  std::vector<Item> c;
  for (const auto& i : sequence) max_step(c, i);
  return c;
}

GeneralRun rom_general(std::span<const Item> sequence) {
  GeneralRun run;
  Extractor combine(ExtractionMode::combine);
  std::size_t i = 0;
  for (; i < sequence.size(); ++i) {
    if (auto b = combine.feed(sequence[i].key())) {
      run.bit = *b;
      break;
    }
    greedy_step(run.contents, sequence[i]);
  }
  if (run.bit && *run.bit == 0) {
    std::vector<Item> best;
    for (const auto& c : run.contents) max_step(best, c);
    run.contents = best;
  }
  for (; i < sequence.size(); ++i) {
    if (run.bit && *run.bit == 0) max_step(run.contents, sequence[i]);
    else greedy_step(run.contents, sequence[i]);
  }
  run.value = total_value(run.contents);
  return run;
}

Rational offline_opt(std::span<const Item> items) {
  std::vector<Item> v;
  for (const auto& i : items)
    if (i.weight <= kOne) v.push_back(i);
  if (v.size() > kMaxOfflineItems)
    throw CapacityError("offline knapsack optimum limited to " + std::to_string(kMaxOfflineItems) + " items");
  std::sort(v.begin(), v.end(), [](const Item& a, const Item& b) { return denser(a, b); });
  std::vector<Rational> suffix(v.size() + 1, Rational{0});
  for (std::size_t i = v.size(); i-- > 0;) suffix[i] = suffix[i + 1] + v[i].value;
  Rational best{0};
  std::function<void(std::size_t, const Rational&, const Rational&)> dfs = [&](std::size_t i, const Rational& load,
                                                                                const Rational& value) {
    if (value > best) best = value;
    if (i == v.size() || value + suffix[i] <= best) return;
    if (load + v[i].weight <= kOne) dfs(i + 1, load + v[i].weight, value + v[i].value);
    dfs(i + 1, load, value);
  };
  dfs(0, Rational{0}, Rational{0});
  return best;
}

Instance revocation_instance(std::size_t n, const Rational& eps) {
  if (n < 2) throw InputError("revocation experiment needs n >= 2");
  if (eps <= 0 || eps >= 1) throw InputError("revocation experiment needs 0 < eps < 1");
  std::vector<Payload> payloads;
  const Rational small = eps / static_cast<std::int64_t>(n);
  for (std::size_t i = 0; i + 1 < n; ++i) payloads.push_back({{"weight", small}});
  payloads.push_back({{"weight", Rational{1}}});
  return make_instance(Problem::knapsack_proportional, std::move(payloads), {}, "revocation-" + std::to_string(n));
}

namespace {

std::size_t threshold_of(std::size_t n, double alpha) {
  return static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n) - 1e-12));
}

// Copies revoked when the unit item arrives at `pos` in an otherwise small sequence.
std::size_t revoked_at(std::size_t n, const Rational& eps, std::size_t pos) {
  std::vector<Item> seq(n);
  const Rational small = eps / static_cast<std::int64_t>(n);
  for (std::size_t i = 0; i < n; ++i) seq[i] = {i == pos ? Rational{1} : small, i == pos ? Rational{1} : small, i};
  return rom_proportional_tworbin(seq, 0).revocations;
}

}  // namespace

RevocationResult revocation_experiment(std::size_t n, const Rational& eps, double alpha, std::uint64_t trials,
                                       std::uint64_t seed, Execution exec) {
  const Instance inst = revocation_instance(n, eps);
  RevocationResult res;
  res.n = n;
  res.alpha = alpha;
  res.threshold = threshold_of(n, alpha);
  res.trials = trials;
  res.bound = 1.0 - alpha - 1.0 / static_cast<double>(n);
  const std::uint64_t hits = reduce_trials(
      trials, std::uint64_t{0},
      [&](std::uint64_t& acc, std::uint64_t t) {
        const Permutation perm = random_permutation(n, derive_seed(seed, t));
        const auto seq = arrange(inst, perm);
        if (rom_proportional_tworbin(seq, 0).revocations >= res.threshold) ++acc;
      },
      [](std::uint64_t& a, std::uint64_t b) { a += b; }, exec);
  if (trials > 0) {
    res.probability = static_cast<double>(hits) / static_cast<double>(trials);
    res.stderr_ = std::sqrt(res.probability * (1 - res.probability) / static_cast<double>(trials));
  }
  return res;
}

ExactRevocation exact_revocation(std::size_t n, const Rational& eps, double alpha) {
  revocation_instance(n, eps);
  const std::size_t m = threshold_of(n, alpha);
  std::int64_t all = 0, not_first = 0;
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (revoked_at(n, eps, pos) >= m) {
      ++all;
      if (pos > 0) ++not_first;
    }
  }
  return {Rational(all, static_cast<std::int64_t>(n)), Rational(not_first, static_cast<std::int64_t>(n - 1))};
}

}  // namespace rombit::knapsack
