#include "rombit/harness.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>

#include "rombit/extraction.hpp"
#include "rombit/knapsack.hpp"
#include "rombit/rng.hpp"
#include "rombit/string_guess.hpp"
#include "rombit/throughput.hpp"

namespace rombit {

void configure_threads_from_env() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (const char* v = std::getenv("ROMBIT_THREADS")) {
      const int n = std::atoi(v);
      if (n > 0) omp_set_num_threads(n);
    }
  });
}

bool ratio_at_least_one(Problem problem) {
  return problem != Problem::knapsack_general && problem != Problem::knapsack_proportional;
}

ArrivalModel default_model(Problem problem) {
  return is_realtime(problem) ? ArrivalModel::realtime_rom : ArrivalModel::rom;
}

intervals::Variant infer_variant(const Instance& instance) {
  const auto set = intervals::items_of(instance);
  const bool single = std::all_of(set.begin(), set.end(), [&](const auto& i) { return i.length == set.front().length; });
  if (single) return intervals::Variant::single;
  if (!instance.weight_fn.empty()) return intervals::Variant::c_benevolent;
  return intervals::Variant::monotone;
}

namespace {

struct Outcome {
  Rational alg{0};
  Rational opt{0};
  std::string violation;
  std::string diagnostic;
};

struct Context {
  const Instance& instance;
  const ExperimentConfig& config;
  intervals::Variant variant = intervals::Variant::single;
  Rational fixed_opt{0};  // order-independent optimum (knapsack)
};

Outcome evaluate(const Context& ctx, const ArrivalSequence& seq) {
  Outcome out;
  const bool audits = ctx.config.audits;
  switch (ctx.instance.problem) {
    case Problem::string_guess: {
      out.alg = static_cast<std::int64_t>(guess_run(seq).correct);
      out.opt = static_cast<std::int64_t>(seq.items.size());
      break;
    }
    case Problem::knapsack_general: {
      const auto items = knapsack::items_of(seq);
      out.alg = knapsack::rom_general(items).value;
      out.opt = ctx.fixed_opt;
      if (audits) {
        const Rational g = knapsack::total_value(knapsack::run_greedy(items));
        const Rational m = knapsack::total_value(knapsack::run_max(items));
        if (g + m < out.opt) out.violation = "GREEDY + MAX < OPT";
      }
      break;
    }
    case Problem::knapsack_proportional: {
      const auto items = knapsack::items_of(seq);
      out.opt = ctx.fixed_opt;
      if (ctx.config.two_bin) {
        const auto run = knapsack::rom_proportional_tworbin(items);
        out.alg = run.value;
        if (audits && knapsack::total_weight(run.contents) > 1) out.violation = "two-bin knapsack over capacity";
        break;
      }
      try {
        const auto run = knapsack::rom_proportional(items);
        out.alg = run.value;
        if (audits) {
          const Rational a1 = knapsack::run_a1(items).total_value();
          const Rational a2 = knapsack::run_a2(items).total_value();
          if (5 * (a1 + a2) < 7 * out.opt) out.violation = "A1 + A2 < 7/5 OPT";
          else if (run.bit && run.value != (*run.bit == 1 ? a1 : a2))
            out.violation = "ROM knapsack differs from the selected subroutine";
        }
      } catch (const std::logic_error& e) {
        if (dynamic_cast<const InputError*>(&e)) throw;
        out.violation = e.what();
      }
      break;
    }
    case Problem::interval: {
      const auto set = intervals::items_of(seq);
      out.alg = intervals::rom_intervals(set, ctx.variant).value;
      out.opt = intervals::offline_opt_intervals(set);
      if (audits) {
        const auto v = intervals::audit(set, ctx.variant);
        if (!v.empty()) out.violation = v.front();
      }
      break;
    }
    case Problem::throughput: {
      const auto set = throughput::jobs_of(seq, ctx.instance);
      out.alg = static_cast<std::int64_t>(throughput::rom_simulation(set).chosen().size());
      out.opt = static_cast<std::int64_t>(throughput::offline_opt_throughput(set));
      if (audits) {
        const auto a = throughput::audit(set);
        if (!a.violations.empty()) out.violation = a.violations.front();
        if (!a.diagnostics.empty()) out.diagnostic = a.diagnostics.front();
      }
      break;
    }
  }
  return out;
}

struct Acc {
  Rational alg{0};
  Rational opt{0};
  double alg_sum = 0, alg_sq = 0, opt_sum = 0;
  std::uint64_t count = 0, violations = 0, diagnostics = 0;
  std::string first_violation, first_diagnostic;

  void add(const Outcome& o, bool exact) {
    if (exact) {
      alg += o.alg;
      opt += o.opt;
    }
    const double a = to_double(o.alg);
    alg_sum += a;
    alg_sq += a * a;
    opt_sum += to_double(o.opt);
    ++count;
    if (!o.violation.empty()) {
      ++violations;
      if (first_violation.empty()) first_violation = o.violation;
    }
    if (!o.diagnostic.empty()) {
      ++diagnostics;
      if (first_diagnostic.empty()) first_diagnostic = o.diagnostic;
    }
  }

  void merge(const Acc& o) {
    alg += o.alg;
    opt += o.opt;
    alg_sum += o.alg_sum;
    alg_sq += o.alg_sq;
    opt_sum += o.opt_sum;
    count += o.count;
    violations += o.violations;
    diagnostics += o.diagnostics;
    if (first_violation.empty()) first_violation = o.first_violation;
    if (first_diagnostic.empty()) first_diagnostic = o.first_diagnostic;
  }
};

double ratio_of(Problem problem, double mean_alg, double mean_opt) {
  if (ratio_at_least_one(problem)) {
    if (mean_alg == 0) return mean_opt == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    return mean_opt / mean_alg;
  }
  if (mean_opt == 0) return 1.0;
  return mean_alg / mean_opt;
}

}  // namespace

InstanceResult run_instance(const Instance& instance, const ExperimentConfig& config) {
  configure_threads_from_env();
  const ArrivalModel model = config.model.value_or(default_model(instance.problem));
  Context ctx{instance, config};
  if (instance.problem == Problem::interval) {
    ctx.variant = config.variant.value_or(infer_variant(instance));
    intervals::validate_variant(intervals::items_of(instance), ctx.variant, instance.weight_fn);
  }
  if (instance.problem == Problem::knapsack_general || instance.problem == Problem::knapsack_proportional) {
    const Permutation id = [&] {
      Permutation p(instance.size());
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = k;
      return p;
    }();
    ctx.fixed_opt = knapsack::offline_opt(knapsack::arrange(instance, id));
  }

  InstanceResult res;
  res.row.instance_id = instance.id;
  res.row.problem = std::string(to_string(instance.problem));
  if (config.two_bin) {
    if (instance.problem != Problem::knapsack_proportional)
      throw InputError("instance " + instance.id + ": the two-bin algorithm needs a proportional instance");
    res.row.problem = "knapsack_tworbin";
  }
  res.row.model = std::string(to_string(model));
  res.row.seed = config.seed;

  Acc acc;
  const bool exact = config.exact || model == ArrivalModel::adversarial;
  try {
    if (model == ArrivalModel::adversarial) {
      acc.add(evaluate(ctx, permute(instance, model, config.seed)), true);
    } else if (exact) {
      acc = reduce_permutations(
          instance.size(), Acc{},
          [&](Acc& a, const Permutation& perm) { a.add(evaluate(ctx, arrange(instance, model, perm)), true); },
          [](Acc& a, const Acc& b) { a.merge(b); }, config.exec);
    } else {
      acc = reduce_trials(
          config.trials, Acc{},
          [&](Acc& a, std::uint64_t t) { a.add(evaluate(ctx, permute(instance, model, derive_seed(config.seed, t))), false); },
          [](Acc& a, const Acc& b) { a.merge(b); }, config.exec);
    }
  } catch (const CapacityError& e) {
    throw CapacityError("instance " + instance.id + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError("instance " + instance.id + ": " + e.what());
  }

  res.orders = acc.count;
  res.violations = acc.violations;
  res.diagnostics = acc.diagnostics;
  res.first_violation = acc.first_violation;
  res.first_diagnostic = acc.first_diagnostic;
  res.row.trials = acc.count;
  const double n = acc.count == 0 ? 1.0 : static_cast<double>(acc.count);
  if (exact) {
    const auto count = static_cast<std::int64_t>(std::max<std::uint64_t>(acc.count, 1));
    res.exact_alg = acc.alg / count;
    res.exact_opt = acc.opt / count;
    res.row.mean_alg = to_double(*res.exact_alg);
    res.row.opt = to_double(*res.exact_opt);
    res.row.seed = model == ArrivalModel::adversarial ? config.seed : 0;
  } else {
    res.row.mean_alg = acc.alg_sum / n;
    res.row.opt = acc.opt_sum / n;
    const double var = std::max(0.0, acc.alg_sq / n - res.row.mean_alg * res.row.mean_alg);
    res.row.stderr_ = acc.count > 1 ? std::sqrt(var * n / (n - 1) / n) : 0.0;
  }
  res.row.empirical_ratio = ratio_of(instance.problem, res.row.mean_alg, res.row.opt);
  return res;
}

std::vector<ReportRow> ExperimentReport::rows() const {
  std::vector<ReportRow> out;
  for (const auto& r : results) out.push_back(r.row);
  return out;
}

ExperimentReport run_experiment(const std::vector<Instance>& instances, const ExperimentConfig& config) {
  ExperimentReport rep;
  for (const auto& inst : instances) {
    if (inst.problem != instances.front().problem) throw InputError("instances mix problems");
    rep.results.push_back(run_instance(inst, config));
  }
  if (rep.results.empty()) return rep;
  const bool high = ratio_at_least_one(instances.front().problem);
  std::vector<double> ratios;
  for (const auto& r : rep.results) {
    ratios.push_back(r.row.empirical_ratio);
    rep.violations += r.violations;
    rep.diagnostics += r.diagnostics;
  }
  rep.worst_ratio = high ? *std::max_element(ratios.begin(), ratios.end())
                         : *std::min_element(ratios.begin(), ratios.end());
  std::sort(ratios.begin(), ratios.end());
  double sum = 0;
  for (double v : ratios) sum += v;
  rep.mean_ratio = sum / static_cast<double>(ratios.size());
  return rep;
}

namespace {

std::string param(const Params& params, std::string_view name, std::string fallback) {
  auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

std::size_t size_for(const Params& params, std::size_t k) {
  if (params.count("n")) return static_cast<std::size_t>(std::stoull(params.find("n")->second));
  const std::size_t lo = std::stoull(param(params, "n_min", "3"));
  const std::size_t hi = std::stoull(param(params, "n_max", "8"));
  if (hi < lo) throw InputError("n_max below n_min");
  return lo + k % (hi - lo + 1);
}

Rational frac(std::uint64_t num, std::int64_t den) { return Rational(static_cast<std::int64_t>(num), den); }

std::vector<Payload> random_uniform(Problem problem, std::size_t n, Rng& rng, const Params& params,
                                    std::map<std::string, Rational, std::less<>>& meta,
                                    std::vector<std::pair<Rational, Rational>>& weight_fn) {
  std::vector<Payload> out;
  const std::int64_t span = static_cast<std::int64_t>(2 * n + 1);
  switch (problem) {
    case Problem::string_guess:
      for (std::size_t k = 0; k < n; ++k) out.push_back({{"bit", frac(rng.below(2), 1)}});
      break;
    case Problem::knapsack_general:
      for (std::size_t k = 0; k < n; ++k)
        out.push_back({{"weight", frac(1 + rng.below(20), 20)}, {"value", frac(1 + rng.below(10), 10)}});
      break;
    case Problem::knapsack_proportional:
      for (std::size_t k = 0; k < n; ++k) out.push_back({{"weight", frac(1 + rng.below(20), 20)}});
      break;
    case Problem::interval: {
      const auto variant = intervals::parse_variant(param(params, "variant", "single"));
      for (std::size_t k = 0; k < n; ++k) {
        Payload p;
        if (variant == intervals::Variant::monotone) {
          // Releases on a 1/2 grid and lengths within 1/2 of each other stay monotone under any permutation.
          p["release"] = frac(rng.below(n + 1), 2);
          p["length"] = Rational(1) + frac(rng.below(5), 8);
          p["weight"] = frac(1 + rng.below(5), 1);
        } else if (variant == intervals::Variant::c_benevolent) {
          p["release"] = frac(rng.below(static_cast<std::uint64_t>(span)), 4);
          const Rational len = frac(1 + rng.below(4), 2);
          p["length"] = len;
          p["weight"] = len * len;
        } else {
          p["release"] = frac(rng.below(static_cast<std::uint64_t>(span)), 4);
          p["length"] = Rational(1);
          p["weight"] = frac(1 + rng.below(5), 1);
        }
        out.push_back(std::move(p));
      }
      if (variant == intervals::Variant::c_benevolent)
        for (std::int64_t m = 1; m <= 4; ++m) weight_fn.emplace_back(Rational(m, 2), Rational(m * m, 4));
      break;
    }
    case Problem::throughput:
      meta["p"] = Rational(1);
      for (std::size_t k = 0; k < n; ++k)
        out.push_back({{"release", frac(rng.below(static_cast<std::uint64_t>(span)), 4)}, {"slack", frac(rng.below(9), 4)}});
      break;
  }
  return out;
}

std::vector<Payload> two_type(Problem problem, std::size_t n, Rng& rng, const Params& params,
                              std::map<std::string, Rational, std::less<>>& meta) {
  const double fraction = to_double(parse_rational(param(params, "fraction", "0.5")));
  if (!(fraction >= 0 && fraction <= 1)) throw InputError("fraction must lie in [0,1]");
  const auto first = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  std::vector<Payload> out;
  switch (problem) {
    case Problem::string_guess:
      for (std::size_t k = 0; k < n; ++k) out.push_back({{"bit", Rational(k < first ? 0 : 1)}});
      break;
    case Problem::knapsack_general:
    case Problem::knapsack_proportional: {
      const Rational w1 = parse_rational(param(params, "w1", "1/4"));
      const Rational w2 = parse_rational(param(params, "w2", "3/5"));
      for (std::size_t k = 0; k < n; ++k) {
        Payload p{{"weight", k < first ? w1 : w2}};
        if (problem == Problem::knapsack_general) p["value"] = p["weight"];
        out.push_back(std::move(p));
      }
      break;
    }
    case Problem::throughput: {
      meta["p"] = Rational(1);
      const Rational s1 = parse_rational(param(params, "s1", "0"));
      const Rational s2 = parse_rational(param(params, "s2", "1"));
      const std::int64_t span = static_cast<std::int64_t>(2 * n + 1);
      for (std::size_t k = 0; k < n; ++k)
        out.push_back({{"release", frac(rng.below(static_cast<std::uint64_t>(span)), 4)}, {"slack", k < first ? s1 : s2}});
      break;
    }
    case Problem::interval:
      throw InputError("family two-type is not defined for interval instances");
  }
  return out;
}

}  // namespace

std::vector<Instance> generate_instances(Problem problem, const std::string& family, const Params& params,
                                         std::size_t count, std::uint64_t seed) {
  if (family != "random-uniform" && family != "two-type" && family != "adversarial")
    throw InputError("unknown family '" + family + "'");
  std::vector<Instance> out;
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng(derive_seed(seed, k));
    const std::size_t n = size_for(params, k);
    std::map<std::string, Rational, std::less<>> meta;
    std::vector<std::pair<Rational, Rational>> weight_fn;
    std::vector<Payload> payloads;
    if (family == "random-uniform") {
      payloads = random_uniform(problem, n, rng, params, meta, weight_fn);
    } else if (family == "two-type") {
      payloads = two_type(problem, n, rng, params, meta);
    } else if (problem == Problem::knapsack_general || problem == Problem::knapsack_proportional) {
      const Rational eps = parse_rational(param(params, "eps", "1/100"));
      Instance inst = knapsack::revocation_instance(n, eps);
      for (auto& item : inst.items)
        if (problem == Problem::knapsack_general) item.payload["value"] = item.payload["weight"];
      payloads.clear();
      for (auto& item : inst.items) payloads.push_back(item.payload);
    } else if (problem == Problem::string_guess) {
      Params p = params;
      p["fraction"] = std::to_string(std::sqrt(2.0) - 1.0);
      payloads = two_type(problem, n, rng, p, meta);
    } else {
      throw InputError("family adversarial is not defined for " + std::string(to_string(problem)) + " instances");
    }
    Instance inst = make_instance(problem, std::move(payloads), std::move(meta), family + "-" + std::to_string(k));
    inst.weight_fn = std::move(weight_fn);
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<Aggregate> aggregate(const std::vector<ReportRow>& rows) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& r : rows) groups[{r.problem, r.model}].push_back(r.empirical_ratio);
  std::vector<Aggregate> out;
  for (auto& [key, ratios] : groups) {
    std::sort(ratios.begin(), ratios.end());
    Aggregate a;
    a.problem = key.first;
    a.model = key.second;
    a.rows = ratios.size();
    const bool high = key.first.rfind("knapsack", 0) != 0;
    a.worst_ratio = high ? ratios.back() : ratios.front();
    double sum = 0;
    for (double v : ratios) sum += v;
    a.mean_ratio = sum / static_cast<double>(ratios.size());
    out.push_back(a);
  }
  return out;
}

}  // namespace rombit
