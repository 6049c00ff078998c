#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rombit/core.hpp"
#include "rombit/intervals.hpp"
#include "rombit/io.hpp"
#include "rombit/parallel.hpp"

namespace rombit {

struct ExperimentConfig {
  std::optional<ArrivalModel> model;  // default: realtime_rom for problems with releases, rom otherwise
  bool exact = true;
  std::uint64_t trials = 0;           // Monte Carlo when !exact
  std::uint64_t seed = 0;
  bool audits = false;
  std::optional<intervals::Variant> variant;  // default inferred per instance
  bool two_bin = false;                       // proportional knapsack: the two-bin algorithm
  Execution exec = Execution::parallel;
};

struct InstanceResult {
  ReportRow row;
  std::optional<Rational> exact_alg;  // E[ALG] over all orders (exact mode)
  std::optional<Rational> exact_opt;  // E[OPT] over all orders (exact mode)
  std::uint64_t orders = 0;           // permutations or trials evaluated
  std::uint64_t violations = 0;       // orders with at least one failed audit
  std::uint64_t diagnostics = 0;      // orders with an informational mismatch
  std::string first_violation;
  std::string first_diagnostic;
};

struct ExperimentReport {
  std::vector<InstanceResult> results;
  double worst_ratio = 0;
  double mean_ratio = 0;
  std::uint64_t violations = 0;
  std::uint64_t diagnostics = 0;

  std::vector<ReportRow> rows() const;
};

/// True when the ratio is stated as E[OPT]/E[ALG] >= 1; false for knapsack (E[ALG]/OPT <= 1).
bool ratio_at_least_one(Problem problem);

ArrivalModel default_model(Problem problem);

/// Variant implied by the instance: equal lengths -> single, weight_fn -> cben, else monotone.
intervals::Variant infer_variant(const Instance& instance);

InstanceResult run_instance(const Instance& instance, const ExperimentConfig& config);

/// Instances must share one problem. Results keep input order.
ExperimentReport run_experiment(const std::vector<Instance>& instances, const ExperimentConfig& config);

using Params = std::map<std::string, std::string, std::less<>>;

/// Families: random-uniform, two-type, adversarial. Size comes from `n` or the
/// cycling range `n_min`..`n_max`. Deterministic in (problem, family, params, count, seed).
std::vector<Instance> generate_instances(Problem problem, const std::string& family, const Params& params,
                                         std::size_t count, std::uint64_t seed);

struct Aggregate {
  std::string problem;
  std::string model;
  std::size_t rows = 0;
  double worst_ratio = 0;
  double mean_ratio = 0;
};

/// Groups rows by (problem, model); independent of row order.
std::vector<Aggregate> aggregate(const std::vector<ReportRow>& rows);

}  // namespace rombit
