#include "rombit/core.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "rombit/rng.hpp"

namespace rombit {

Rational approximate(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw InputError("non-finite number");
  // Stern-Brocot / continued-fraction convergents.
  const bool negative = x < 0;
  double v = std::fabs(x);
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_f = std::floor(v);
    if (a_f > 9.0e15) break;
    const auto a = static_cast<std::int64_t>(a_f);
    const std::int64_t q2 = q0 + a * q1;
    if (q2 > max_den) break;
    const std::int64_t p2 = p0 + a * p1;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double frac = v - a_f;
    if (frac < 1e-12) break;
    v = 1.0 / frac;
  }
  if (q1 == 0) throw InputError("number out of range");
  Rational r(p1, q1);
  return negative ? -r : r;
}

Rational parse_rational(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
      const std::int64_t num = std::stoll(text.substr(0, slash), &used);
      if (used != slash) throw InputError("bad numerator");
      const std::string rest = text.substr(slash + 1);
      const std::int64_t den = std::stoll(rest, &used);
      if (used != rest.size() || den == 0) throw InputError("bad denominator");
      return Rational(num, den);
    }
    const double v = std::stod(text, &used);
    if (used != text.size()) throw InputError("trailing characters");
    if (text.find_first_of(".eE") == std::string::npos) return Rational(std::stoll(text));
    return approximate(v);
  } catch (const std::logic_error&) {
    throw InputError("not a number: '" + text + "'");
  }
}

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << q.numerator();
  if (q.denominator() != 1) os << '/' << q.denominator();
  return os.str();
}

std::strong_ordering lex_compare(const ItemKey& a, const ItemKey& b) {
  if (a.dimension() != b.dimension())
    throw InputError("key dimension mismatch: " + std::to_string(a.dimension()) + " vs " +
                     std::to_string(b.dimension()));
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    if (a.coords[i] < b.coords[i]) return std::strong_ordering::less;
    if (b.coords[i] < a.coords[i]) return std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

namespace {

constexpr std::pair<Problem, std::string_view> kProblemTags[] = {
    {Problem::string_guess, "string_guess"},
    {Problem::knapsack_general, "knapsack_general"},
    {Problem::knapsack_proportional, "knapsack_proportional"},
    {Problem::interval, "interval"},
    {Problem::throughput, "throughput"},
};

constexpr std::pair<ArrivalModel, std::string_view> kModelTags[] = {
    {ArrivalModel::adversarial, "adversarial"},
    {ArrivalModel::rom, "rom"},
    {ArrivalModel::realtime_rom, "realtime_rom"},
};

const Rational& field(const Payload& payload, std::string_view name) {
  auto it = payload.find(name);
  if (it == payload.end()) throw InputError("payload is missing field '" + std::string(name) + "'");
  return it->second;
}

}  // namespace

std::string_view to_string(Problem p) {
  for (auto [value, tag] : kProblemTags)
    if (value == p) return tag;
  return "?";
}

Problem parse_problem(std::string_view tag) {
  for (auto [value, name] : kProblemTags)
    if (name == tag) return value;
  throw InputError("unknown problem tag '" + std::string(tag) + "'");
}

bool is_realtime(Problem p) { return p == Problem::interval || p == Problem::throughput; }

std::string_view to_string(ArrivalModel m) {
  for (auto [value, tag] : kModelTags)
    if (value == m) return tag;
  return "?";
}

ArrivalModel parse_model(std::string_view tag) {
  for (auto [value, name] : kModelTags)
    if (name == tag) return value;
  throw InputError("unknown arrival model '" + std::string(tag) + "'");
}

ItemKey derive_key(Problem problem, const Payload& payload,
                   const std::map<std::string, Rational, std::less<>>& meta) {
  switch (problem) {
    case Problem::string_guess:
      return ItemKey{field(payload, "bit")};
    case Problem::knapsack_general:
      return ItemKey{field(payload, "value"), field(payload, "weight")};
    case Problem::knapsack_proportional:
      return ItemKey{field(payload, "weight")};
    case Problem::interval:
      return ItemKey{field(payload, "weight"), field(payload, "length")};
    case Problem::throughput: {
      auto p = meta.find("p");
      if (p == meta.end()) throw InputError("throughput instance needs meta.p");
      return ItemKey{p->second, field(payload, "slack")};
    }
  }
  throw InputError("bad problem");
}

void validate(const Instance& instance) {
  if (instance.items.empty()) throw InputError("instance has no items");
  const std::size_t d = instance.items.front().key.dimension();
  if (d == 0) throw InputError("key dimension must be >= 1");
  for (std::size_t i = 0; i < instance.items.size(); ++i) {
    const Item& item = instance.items[i];
    const std::string where = "item " + std::to_string(i) + ": ";
    if (item.key.dimension() != d) throw InputError(where + "key dimension differs within instance");
    if (!(item.key == derive_key(instance.problem, item.payload, instance.meta)))
      throw InputError(where + "key does not match payload");
    const Payload& pl = item.payload;
    switch (instance.problem) {
      case Problem::string_guess: {
        const Rational& b = field(pl, "bit");
        if (b != 0 && b != 1) throw InputError(where + "bit must be 0 or 1");
        break;
      }
      case Problem::knapsack_general:
        if (field(pl, "weight") <= 0 || field(pl, "weight") > 1)
          throw InputError(where + "weight must lie in (0,1]");
        if (field(pl, "value") <= 0) throw InputError(where + "value must be positive");
        break;
      case Problem::knapsack_proportional:
        if (field(pl, "weight") <= 0 || field(pl, "weight") > 1)
          throw InputError(where + "weight must lie in (0,1]");
        if (auto v = pl.find("value"); v != pl.end() && v->second != field(pl, "weight"))
          throw InputError(where + "proportional item needs value == weight");
        break;
      case Problem::interval:
        if (field(pl, "release") < 0) throw InputError(where + "release must be non-negative");
        if (field(pl, "length") <= 0) throw InputError(where + "length must be positive");
        if (field(pl, "weight") <= 0) throw InputError(where + "weight must be positive");
        break;
      case Problem::throughput:
        if (field(pl, "release") < 0) throw InputError(where + "release must be non-negative");
        if (field(pl, "slack") < 0) throw InputError(where + "slack must be non-negative");
        if (instance.meta.at("p") <= 0) throw InputError("meta.p must be positive");
        break;
    }
  }
}

Instance make_instance(Problem problem, std::vector<Payload> payloads,
                       std::map<std::string, Rational, std::less<>> meta, std::string id) {
  Instance inst;
  inst.id = std::move(id);
  inst.problem = problem;
  inst.meta = std::move(meta);
  inst.items.reserve(payloads.size());
  for (auto& pl : payloads) {
    ItemKey key = derive_key(problem, pl, inst.meta);
    inst.items.push_back(Item{std::move(key), std::move(pl)});
  }
  validate(inst);
  return inst;
}

Permutation random_permutation(std::size_t n, std::uint64_t seed) {
  Permutation perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  return perm;
}

std::vector<Item> release_sorted(const Instance& instance) {
  std::vector<Item> items = instance.items;
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.payload.at("release") < b.payload.at("release");
  });
  return items;
}

ArrivalSequence arrange(const Instance& instance, ArrivalModel model, const Permutation& perm,
                        std::uint64_t seed) {
  const std::size_t n = instance.items.size();
  if (perm.size() != n) throw InputError("permutation size does not match instance");
  ArrivalSequence seq;
  seq.model = model;
  seq.permutation = perm;
  seq.seed = seed;
  seq.items.reserve(n);
  if (model == ArrivalModel::realtime_rom) {
    if (!is_realtime(instance.problem))
      throw InputError("realtime_rom needs a problem with release times, got " +
                       std::string(to_string(instance.problem)));
    const std::vector<Item> base = release_sorted(instance);
    for (std::size_t k = 0; k < n; ++k) {
      Item item = base[perm[k]];
      item.payload["release"] = base[k].payload.at("release");
      item.key = derive_key(instance.problem, item.payload, instance.meta);
      seq.items.push_back(std::move(item));
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) seq.items.push_back(instance.items[perm[k]]);
  }
  return seq;
}

ArrivalSequence permute(const Instance& instance, ArrivalModel model, std::uint64_t seed) {
  const std::size_t n = instance.items.size();
  Permutation perm(n);
  if (model == ArrivalModel::adversarial) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
  } else {
    perm = random_permutation(n, seed);
  }
  return arrange(instance, model, perm, seed);
}

std::uint64_t factorial(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

Permutation unrank_permutation(std::size_t n, std::uint64_t rank) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  Permutation perm;
  perm.reserve(n);
  for (std::size_t i = n; i > 0; --i) {
    const std::uint64_t block = factorial(i - 1);
    const auto idx = static_cast<std::size_t>(rank / block);
    rank %= block;
    perm.push_back(pool[idx]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  return perm;
}

PermutationEnumerator::PermutationEnumerator(std::size_t n) : perm_(n) {
  if (n > kMaxEnumeration)
    throw CapacityError("enumeration limited to n <= " + std::to_string(kMaxEnumeration) +
                        ", got " + std::to_string(n));
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
}

bool PermutationEnumerator::next() { return std::next_permutation(perm_.begin(), perm_.end()); }

void for_each_permutation(std::size_t n, const std::function<void(const Permutation&)>& fn) {
  PermutationEnumerator it(n);
  do {
    fn(it.current());
  } while (it.next());
}

}  // namespace rombit
