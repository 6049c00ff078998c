#include "rombit/intervals.hpp"

#include <algorithm>

#include "rombit/extraction.hpp"

namespace rombit::intervals {

bool overlaps(const Interval& a, const Interval& b) {
  return a.release < b.deadline() && b.release < a.deadline();
}

bool feasible(std::span<const Interval> set) {
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j)
      if (overlaps(set[i], set[j])) return false;
  return true;
}

Rational total_weight(std::span<const Interval> set) {
  Rational t{0};
  for (const auto& i : set) t += i.weight;
  return t;
}

namespace {

Interval interval_from(const Payload& p, std::size_t label) {
  return Interval{p.at("release"), p.at("length"), p.at("weight"), label};
}

}  // namespace

std::vector<Interval> items_of(const ArrivalSequence& sequence) {
  std::vector<Interval> out;
  for (std::size_t k = 0; k < sequence.items.size(); ++k) out.push_back(interval_from(sequence.items[k].payload, k));
  return out;
}

std::vector<Interval> items_of(const Instance& instance) {
  std::vector<Interval> out;
  for (std::size_t k = 0; k < instance.items.size(); ++k) out.push_back(interval_from(instance.items[k].payload, k));
  return out;
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::single: return "single";
    case Variant::monotone: return "monotone";
    case Variant::c_benevolent: return "cben";
  }
  return "?";
}

Variant parse_variant(std::string_view tag) {
  if (tag == "single") return Variant::single;
  if (tag == "monotone") return Variant::monotone;
  if (tag == "cben" || tag == "c_benevolent") return Variant::c_benevolent;
  throw InputError("unknown interval variant '" + std::string(tag) + "'");
}

namespace {

void check_convex_increasing(std::vector<std::pair<Rational, Rational>> pts) {
  pts.emplace_back(Rational{0}, Rational{0});
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  for (std::size_t k = 1; k < pts.size(); ++k) {
    if (pts[k].first == pts[k - 1].first) throw InputError("weight function assigns two weights to one length");
    if (pts[k].second <= pts[k - 1].second) throw InputError("weight function is not strictly increasing");
  }
  for (std::size_t k = 2; k < pts.size(); ++k) {
    const Rational s1 = (pts[k - 1].second - pts[k - 2].second) / (pts[k - 1].first - pts[k - 2].first);
    const Rational s2 = (pts[k].second - pts[k - 1].second) / (pts[k].first - pts[k - 1].first);
    if (s2 < s1) throw InputError("weight function is not convex");
  }
}

}  // namespace

void validate_variant(std::span<const Interval> set, Variant variant,
                      std::span<const std::pair<Rational, Rational>> weight_fn) {
  switch (variant) {
    case Variant::single:
      for (const auto& i : set)
        if (i.length != set.front().length) throw InputError("single-length variant needs equal lengths");
      break;
    case Variant::monotone:
      for (const auto& a : set)
        for (const auto& b : set)
          if (a.release < b.release && a.deadline() > b.deadline())
            throw InputError("monotone variant violated: later release ends earlier");
      break;
    case Variant::c_benevolent: {
      std::vector<std::pair<Rational, Rational>> pts;
      if (weight_fn.empty()) {
        for (const auto& i : set) pts.emplace_back(i.length, i.weight);
      } else {
        pts.assign(weight_fn.begin(), weight_fn.end());
        for (const auto& i : set) {
          auto it = std::find_if(pts.begin(), pts.end(), [&](const auto& p) { return p.first == i.length; });
          if (it == pts.end() || it->second != i.weight)
            throw InputError("interval weight does not match the supplied weight function");
        }
      }
      check_convex_increasing(std::move(pts));
      break;
    }
  }
}

Selection fung_single_length(std::span<const Interval> sequence, int bit, const Rational& origin) {
  Selection sel;
  sel.bit = bit;
  if (sequence.empty()) return sel;
  const Rational p = sequence.front().length;
  for (const auto& i : sequence)
    if (i.length != p) throw InputError("single-length slots need equal lengths");
  std::map<std::int64_t, Interval> held;
  for (const auto& i : sequence) {
    if (i.release < origin) continue;
    const Rational q = (i.release - origin) / p;
    const std::int64_t slot = q.numerator() / q.denominator() + 1;
    if ((slot % 2 == 1) != (bit == 1)) continue;
    auto it = held.find(slot);
    if (it == held.end()) {
      held.emplace(slot, i);
    } else if (i.weight > it->second.weight) {
      sel.revoked.push_back(it->second);
      it->second = i;
    }
  }
  for (const auto& [slot, i] : held) sel.accepted.push_back(i);
  sel.value = total_weight(sel.accepted);
  return sel;
}

namespace {

struct Prefix {
  std::vector<Interval> accepted;  // excludes the last one, reported separately
  std::optional<Interval> last;
  std::optional<std::size_t> last_index;
  std::optional<std::size_t> switch_index;
  std::optional<int> bit;
};

// Greedy earliest-deadline acceptance while intervals equal the first one.
Prefix greedy_prefix(std::span<const Interval> sequence) {
  Prefix pre;
  Extractor combine(ExtractionMode::combine);
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    const Interval& i = sequence[k];
    if (auto b = combine.feed(i.key())) {
      pre.bit = *b;
      pre.switch_index = k;
      break;
    }
    if (pre.last && overlaps(*pre.last, i)) continue;
    if (pre.last) pre.accepted.push_back(*pre.last);
    pre.last = i;
    pre.last_index = k;
  }
  return pre;
}

Selection prefix_only(const Prefix& pre) {
  Selection sel;
  sel.accepted = pre.accepted;
  if (pre.last) sel.accepted.push_back(*pre.last);
  sel.prefix_end = pre.last_index;
  sel.value = total_weight(sel.accepted);
  return sel;
}

void check_release_order(std::span<const Interval> sequence) {
  for (std::size_t k = 1; k < sequence.size(); ++k)
    if (sequence[k].release < sequence[k - 1].release)
      throw InputError("real-time interval selection needs non-decreasing releases");
}

}  // namespace

Selection rom_single_length(std::span<const Interval> sequence, std::optional<int> forced_bit) {
  check_release_order(sequence);
  validate_variant(sequence, Variant::single);
  const Prefix pre = greedy_prefix(sequence);
  if (!pre.bit) return prefix_only(pre);
  const int bit = forced_bit ? *forced_bit : *pre.bit;
  std::vector<Interval> rest{*pre.last};
  rest.insert(rest.end(), sequence.begin() + static_cast<std::ptrdiff_t>(*pre.switch_index), sequence.end());
  Selection sel = fung_single_length(rest, bit, pre.last->release);
  // The last prefix interval ends where the second slot begins.
  if (bit == 0) sel.accepted.push_back(*pre.last);
  sel.accepted.insert(sel.accepted.end(), pre.accepted.begin(), pre.accepted.end());
  sel.bit = bit;
  sel.prefix_end = pre.last_index;
  sel.switch_index = pre.switch_index;
  sel.value = total_weight(sel.accepted);
  return sel;
}

namespace {

struct Phase {
  std::vector<Rational> bounds;  // b_0 = phase start, b_k = end of slot k
  std::size_t k = 0;             // current slot index
  std::optional<Interval> opener;
  std::optional<Interval> candidate;
};

class Engine {
 public:
  Engine(Variant variant, AdaptiveTrace& trace) : variant_(variant), trace_(trace) {}

  void open(const Interval& i) {
    phase_ = Phase{};
    phase_->bounds = {i.release, i.deadline()};
    phase_->k = 1;
    phase_->opener = i;
    trace_.bounds.push_back(phase_->bounds);
  }

  void close_until(const Rational& t) {
    while (phase_ && phase_->bounds[phase_->k] <= t) close_slot();
  }

  void arrive(const Interval& i) {
    close_until(i.release);
    if (!phase_) {
      open(i);
      return;
    }
    Phase& ph = *phase_;
    if (ph.k == 1 && i.release == ph.bounds[0]) {
      if (better_opener(i, *ph.opener)) {
        trace_.revoked_b.push_back(*ph.opener);
        ph.opener = i;
        ph.bounds[1] = i.deadline();
        trace_.bounds.back() = ph.bounds;
      }
      return;
    }
    if (variant_ == Variant::c_benevolent && i.deadline() <= ph.bounds[ph.k]) return;
    if (!ph.candidate) {
      ph.candidate = i;
    } else if (better_candidate(i, *ph.candidate)) {
      (ph.k % 2 == 1 ? trace_.revoked_a : trace_.revoked_b).push_back(*ph.candidate);
      ph.candidate = i;
    }
  }

  void finish() {
    while (phase_) close_slot();
  }

 private:
  // Opening interval: longest (c_benevolent) or heaviest (monotone).
  bool better_opener(const Interval& x, const Interval& y) const {
    if (variant_ == Variant::c_benevolent) {
      if (x.length != y.length) return x.length > y.length;
      return x.weight > y.weight;
    }
    if (x.weight != y.weight) return x.weight > y.weight;
    return x.length > y.length;
  }

  bool better_candidate(const Interval& x, const Interval& y) const { return better_opener(x, y); }

  void close_slot() {
    Phase& ph = *phase_;
    if (ph.k == 1) finalize(*ph.opener, 0);
    if (!ph.candidate) {
      phase_.reset();
      return;
    }
    finalize(*ph.candidate, ph.k);
    if (ph.candidate->deadline() <= ph.bounds[ph.k]) {
      // The next slot would be empty.
      phase_.reset();
      return;
    }
    ph.bounds.push_back(ph.candidate->deadline());
    trace_.bounds.back() = ph.bounds;
    ph.candidate.reset();
    ++ph.k;
  }

  void finalize(const Interval& i, std::size_t slot) {
    if (slot % 2 == 1) {
      trace_.a.push_back(i);
      trace_.slot_a.push_back(slot);
    } else {
      trace_.b.push_back(i);
      trace_.slot_b.push_back(slot);
    }
  }

  Variant variant_;
  AdaptiveTrace& trace_;
  std::optional<Phase> phase_;
};

}  // namespace

AdaptiveTrace adaptive_slots_trace(std::span<const Interval> sequence, Variant variant,
                                   std::optional<Interval> anchor) {
  if (variant == Variant::single) throw InputError("adaptive slots need the monotone or cben variant");
  check_release_order(sequence);
  AdaptiveTrace trace;
  Engine engine(variant, trace);
  if (anchor) engine.open(*anchor);
  for (const auto& i : sequence) engine.arrive(i);
  engine.finish();
  return trace;
}

Selection adaptive_slots_run(std::span<const Interval> sequence, int bit, Variant variant) {
  validate_variant(sequence, variant);
  const AdaptiveTrace trace = adaptive_slots_trace(sequence, variant);
  Selection sel;
  sel.bit = bit;
  sel.accepted = bit == 1 ? trace.a : trace.b;
  sel.revoked = bit == 1 ? trace.revoked_a : trace.revoked_b;
  sel.value = total_weight(sel.accepted);
  return sel;
}

Selection rom_adaptive(std::span<const Interval> sequence, Variant variant, std::optional<int> forced_bit) {
  validate_variant(sequence, variant);
  const Prefix pre = greedy_prefix(sequence);
  if (!pre.bit) return prefix_only(pre);
  const int bit = forced_bit ? *forced_bit : *pre.bit;
  const auto rest = sequence.subspan(*pre.switch_index);
  const AdaptiveTrace trace = adaptive_slots_trace(rest, variant, *pre.last);
  Selection sel;
  sel.bit = bit;
  sel.prefix_end = pre.last_index;
  sel.switch_index = pre.switch_index;
  sel.accepted = pre.accepted;
  if (bit == 1) {
    sel.accepted.insert(sel.accepted.end(), trace.a.begin(), trace.a.end());
    sel.revoked = trace.revoked_a;
    // A holds the last prefix interval until one of its own picks collides with it.
    const bool collides = std::any_of(trace.a.begin(), trace.a.end(),
                                      [&](const Interval& i) { return overlaps(i, *pre.last); });
    if (collides) sel.revoked.push_back(*pre.last);
    else sel.accepted.push_back(*pre.last);
  } else {
    sel.accepted.insert(sel.accepted.end(), trace.b.begin(), trace.b.end());
    sel.revoked = trace.revoked_b;
  }
  sel.value = total_weight(sel.accepted);
  return sel;
}

Selection rom_intervals(std::span<const Interval> sequence, Variant variant, std::optional<int> forced_bit) {
  if (variant == Variant::single) return rom_single_length(sequence, forced_bit);
  return rom_adaptive(sequence, variant, forced_bit);
}

Rational offline_opt_intervals(std::span<const Interval> set) {
  std::vector<Interval> v(set.begin(), set.end());
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.deadline() < b.deadline(); });
  std::vector<Rational> deadlines;
  for (const auto& i : v) deadlines.push_back(i.deadline());
  std::vector<Rational> best(v.size() + 1, Rational{0});
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto pred = std::upper_bound(deadlines.begin(), deadlines.begin() + static_cast<std::ptrdiff_t>(k), v[k].release) -
                      deadlines.begin();
    best[k + 1] = std::max(best[k], best[static_cast<std::size_t>(pred)] + v[k].weight);
  }
  return best.back();
}

std::vector<std::string> audit(std::span<const Interval> sequence, Variant variant) {
  std::vector<std::string> out;
  const Selection one = rom_intervals(sequence, variant, 1);
  const Selection zero = rom_intervals(sequence, variant, 0);
  if (!feasible(one.accepted)) out.push_back("bit-1 selection overlaps");
  if (!feasible(zero.accepted)) out.push_back("bit-0 selection overlaps");

  const Rational opt = offline_opt_intervals(sequence);
  if (!one.switch_index) {
    if (one.value != opt) out.push_back("identical instance: greedy prefix is not optimal");
    return out;
  }
  const std::size_t i = *one.prefix_end;
  const std::size_t j = *one.switch_index;
  const auto before_i = sequence.subspan(0, i);
  const auto from_i = sequence.subspan(i);
  const Prefix pre = greedy_prefix(sequence);
  const Rational alg_before_i = total_weight(pre.accepted);
  const Rational opt_before_i = offline_opt_intervals(before_i);
  const Rational opt_from_i = offline_opt_intervals(from_i);

  if (total_weight(pre.accepted) + pre.last->weight != offline_opt_intervals(sequence.subspan(0, j)))
    out.push_back("greedy prefix is not optimal on the identical intervals");
  if (alg_before_i != opt_before_i) out.push_back("prefix before the last greedy interval is not optimal");
  if (opt > opt_before_i + opt_from_i) out.push_back("relaxation bound OPT <= OPT(<i) + OPT(>=i) fails");

  if (variant == Variant::single) {
    const Rational p = sequence.front().length;
    const Rational origin = sequence[i].release;
    std::map<std::int64_t, Rational> heaviest;
    for (const auto& x : from_i) {
      const Rational q = (x.release - origin) / p;
      const std::int64_t slot = q.numerator() / q.denominator() + 1;
      auto& w = heaviest[slot];
      w = std::max(w, x.weight);
    }
    Rational slot_sum{0};
    for (const auto& [slot, w] : heaviest) slot_sum += w;
    if (opt_from_i > slot_sum) out.push_back("slot-cover bound OPT(>=i) <= sum of slot maxima fails");
    if (2 * alg_before_i + slot_sum < opt) out.push_back("branch chain 2 ALG(<i) + sum W >= OPT fails");
  } else {
    const AdaptiveTrace trace = adaptive_slots_trace(sequence.subspan(j), variant, *pre.last);
    if (!feasible(trace.a)) out.push_back("A overlaps within its slots");
    if (!feasible(trace.b)) out.push_back("B overlaps within its slots");
    if (total_weight(trace.a) + total_weight(trace.b) < opt_from_i)
      out.push_back("branch sum A + B >= OPT(>=i) fails");
  }
  if (one.value + zero.value < opt) out.push_back("branch values sum below OPT");
  return out;
}

}  // namespace rombit::intervals
