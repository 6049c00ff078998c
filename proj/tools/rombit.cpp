// rombit: command-line front end for the random-order experiments.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "rombit/extraction.hpp"
#include "rombit/harness.hpp"
#include "rombit/io.hpp"
#include "rombit/knapsack.hpp"
#include "rombit/rng.hpp"
#include "rombit/string_guess.hpp"

using namespace rombit;

namespace {

struct Global {
  std::uint64_t seed = 1;
  std::string out = "-";
  std::string format = "csv";
};

// Writes to --out, or stdout for "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InputError("cannot open " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct RunOptions {
  std::string instances;
  bool exact = false;
  std::uint64_t trials = 0;
  bool audit = false;
  std::string model;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--instances", o.instances, "JSON-lines instance file ('-' for stdin)")->required();
  auto* ex = cmd->add_flag("--exact", o.exact, "Enumerate every arrival order");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials")->excludes(ex);
  cmd->add_flag("--audit", o.audit, "Run the inequality audits; exit nonzero on any violation");
  cmd->add_option("--model", o.model, "adversarial | rom | realtime_rom");
}

int run_problem(const Global& g, const RunOptions& o, std::optional<Problem> expect,
                std::optional<intervals::Variant> variant = {}, bool two_bin = false) {
  const auto instances = read_instances(o.instances);
  if (expect)
    for (const auto& inst : instances)
      if (inst.problem != *expect && !(*expect == Problem::knapsack_general && inst.problem == Problem::knapsack_proportional))
        throw InputError("instance " + inst.id + " is a " + std::string(to_string(inst.problem)) + " instance");
  ExperimentConfig cfg;
  cfg.exact = o.exact || o.trials == 0;
  cfg.trials = o.trials;
  cfg.seed = g.seed;
  cfg.audits = o.audit;
  cfg.variant = variant;
  cfg.two_bin = two_bin;
  if (!o.model.empty()) cfg.model = parse_model(o.model);

  std::vector<InstanceResult> results;
  std::uint64_t violations = 0;
  for (const auto& inst : instances) {
    results.push_back(run_instance(inst, cfg));
    violations += results.back().violations;
  }
  std::vector<ReportRow> rows;
  for (const auto& r : results) rows.push_back(r.row);
  Output out(g.out);
  write_report(out.stream(), rows, parse_format(g.format));
  if (o.audit) {
    std::uint64_t diagnostics = 0, orders = 0;
    for (const auto& r : results) {
      diagnostics += r.diagnostics;
      orders += r.orders;
      if (r.violations) std::cerr << "violation in " << r.row.instance_id << ": " << r.first_violation << '\n';
    }
    std::cerr << "audit: " << instances.size() << " instances, " << orders << " orders, " << violations
              << " violations, " << diagnostics << " diagnostics\n";
    if (violations > 0) return 1;
  }
  return 0;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(to_double(parse_rational(tok)));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads_from_env();
  CLI::App app{"Random-order bit extraction and de-randomized online algorithms"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Base seed")->capture_default_str();
  app.add_option("--out", g.out, "Output path ('-' for stdout)")->capture_default_str();
  app.add_option("--format", g.format, "csv | jsonl")->capture_default_str();

  // bias
  auto* bias = app.add_subcommand("bias", "Bias of the one-bit extractors");
  std::string bias_mode = "combine";
  std::size_t bias_n = 100000;
  std::uint64_t bias_trials = 100000;
  std::string bias_grid = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  bool bias_exact = false;
  bias->add_option("--mode", bias_mode, "p1 | p2 | combine")->capture_default_str();
  bias->add_option("--n", bias_n, "Items per instance")->capture_default_str();
  bias->add_option("--trials", bias_trials, "Monte Carlo trials")->capture_default_str();
  bias->add_option("--grid", bias_grid, "Comma-separated type fractions")->capture_default_str();
  bias->add_flag("--exact", bias_exact, "Enumerate all orders (n <= 10)");

  // guess
  auto* guess = app.add_subcommand("guess", "String guessing");
  std::size_t guess_n = 10000;
  double guess_p = 0.6;
  std::uint64_t guess_trials = 10000;
  RunOptions guess_run_opts;
  guess->add_option("--n", guess_n, "String length")->capture_default_str();
  guess->add_option("--p-one", guess_p, "Pr(bit = 1) for the generated string")->capture_default_str();
  guess->add_option("--trials", guess_trials, "Monte Carlo trials")->capture_default_str();
  auto* guess_inst = guess->add_option("--instances", guess_run_opts.instances, "Instance file instead of a generated string");
  guess->add_flag("--exact", guess_run_opts.exact, "Enumerate all orders of each instance")->needs(guess_inst);

  // knapsack
  auto* knap = app.add_subcommand("knapsack", "General and proportional knapsack with revoking");
  RunOptions knap_opts;
  knap->add_option("--instances", knap_opts.instances, "JSON-lines instance file");
  auto* knap_exact = knap->add_flag("--exact", knap_opts.exact, "Enumerate every arrival order");
  knap->add_option("--trials", knap_opts.trials, "Monte Carlo trials")->excludes(knap_exact);
  knap->add_flag("--audit", knap_opts.audit, "Run the inequality audits");
  knap->add_option("--model", knap_opts.model, "adversarial | rom");
  std::string knap_variant;
  knap->add_option("--variant", knap_variant, "general | proportional | tworbin (default: from the instances)");
  bool revocation = false;
  std::size_t rev_n = 100;
  std::string rev_eps = "1/100";
  std::string rev_alpha = "0.25,0.5,0.75";
  knap->add_flag("--revocation", revocation, "Revocation-count experiment instead of instances");
  knap->add_option("--n", rev_n, "Revocation experiment size")->capture_default_str();
  knap->add_option("--eps", rev_eps, "Total weight of the small copies")->capture_default_str();
  knap->add_option("--alpha", rev_alpha, "Comma-separated thresholds")->capture_default_str();

  // intervals
  auto* ints = app.add_subcommand("intervals", "Weighted interval selection");
  RunOptions int_opts;
  std::string variant_tag;
  add_run_options(ints, int_opts);
  ints->add_option("--variant", variant_tag, "single | monotone | cben (default: inferred)");

  // throughput
  auto* thr = app.add_subcommand("throughput", "Equal-length throughput scheduling");
  RunOptions thr_opts;
  add_run_options(thr, thr_opts);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate instance files");
  std::string gen_problem, gen_family = "random-uniform";
  std::size_t gen_count = 10;
  std::vector<std::string> gen_params;
  gen->add_option("--problem", gen_problem, "Problem tag")->required();
  gen->add_option("--family", gen_family, "random-uniform | two-type | adversarial")->capture_default_str();
  gen->add_option("--count", gen_count, "Number of instances")->capture_default_str();
  gen->add_option("--param", gen_params, "key=value (n, n_min, n_max, fraction, eps, variant, ...)");

  // report
  auto* rep = app.add_subcommand("report", "Aggregate CSV reports");
  std::vector<std::string> rep_inputs;
  rep->add_option("inputs", rep_inputs, "CSV report files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*bias) {
      const ExtractionMode mode = parse_mode(bias_mode);
      Output out(g.out);
      auto& os = out.stream();
      os << std::setprecision(10);
      if (bias_exact) {
        os << "mode,parameter,n,prob_one,no_bit_mass,prob_one_given_distinct_start\n";
        const auto grid = mode == ExtractionMode::distinct_unbiased ? std::vector<double>{0.5} : parse_grid(bias_grid);
        for (double f : grid) {
          const auto keys = mode == ExtractionMode::distinct_unbiased ? distinct_keys(bias_n) : two_type_keys(bias_n, f);
          const auto r = exact_bias(keys, mode);
          os << to_string(mode) << ',' << f << ',' << bias_n << ',' << to_string(*r.exact_prob_one) << ','
             << to_string(*r.exact_no_bit_mass) << ','
             << (r.exact_prob_one_given_distinct_start ? to_string(*r.exact_prob_one_given_distinct_start) : "") << '\n';
        }
      } else {
        os << "mode,parameter,predicted,empirical,stderr\n";
        const auto grid = parse_grid(bias_grid);
        for (const auto& p : bias_curve(mode, grid, bias_n, bias_trials, g.seed))
          os << to_string(mode) << ',' << p.parameter << ',' << p.predicted << ',' << p.empirical << ',' << p.stderr_
             << '\n';
      }
      return 0;
    }
    if (*guess) {
      if (!guess_run_opts.instances.empty()) {
        guess_run_opts.trials = guess_run_opts.exact ? 0 : guess_trials;
        return run_problem(g, guess_run_opts, Problem::string_guess);
      }
      const auto bits = bernoulli_bits(guess_n, guess_p, g.seed);
      const auto est = empirical_expected_correct(bits, guess_trials, derive_seed(g.seed, 1));
      ReportRow row;
      row.instance_id = "bernoulli";
      row.problem = "string_guess";
      row.model = "rom";
      row.trials = est.trials;
      row.seed = g.seed;
      row.mean_alg = est.mean_correct;
      row.opt = static_cast<double>(guess_n);
      row.empirical_ratio = est.mean_correct > 0 ? row.opt / est.mean_correct : 0;
      row.stderr_ = est.stderr_;
      Output out(g.out);
      write_report(out.stream(), {row}, parse_format(g.format));
      return 0;
    }
    if (*knap) {
      if (revocation) {
        const Rational eps = parse_rational(rev_eps);
        const std::uint64_t trials = knap_opts.trials ? knap_opts.trials : 100000;
        Output out(g.out);
        auto& os = out.stream();
        os << std::setprecision(10);
        os << "n,alpha,threshold,trials,probability,stderr,bound,exact_unconditional,exact_given_not_first\n";
        for (double a : parse_grid(rev_alpha)) {
          const auto r = knapsack::revocation_experiment(rev_n, eps, a, trials, g.seed);
          const auto ex = knapsack::exact_revocation(rev_n, eps, a);
          os << r.n << ',' << a << ',' << r.threshold << ',' << r.trials << ',' << r.probability << ','
             << r.stderr_ << ',' << r.bound << ',' << to_string(ex.unconditional) << ','
             << to_string(ex.given_not_first) << '\n';
        }
        return 0;
      }
      if (knap_opts.instances.empty()) throw InputError("knapsack needs --instances or --revocation");
      if (knap_variant.empty()) return run_problem(g, knap_opts, Problem::knapsack_general);
      if (knap_variant == "general") return run_problem(g, knap_opts, Problem::knapsack_general);
      if (knap_variant == "proportional") return run_problem(g, knap_opts, Problem::knapsack_proportional);
      if (knap_variant == "tworbin") return run_problem(g, knap_opts, Problem::knapsack_proportional, {}, true);
      throw InputError("unknown knapsack variant '" + knap_variant + "'");
    }
    if (*ints) {
      std::optional<intervals::Variant> v;
      if (!variant_tag.empty()) v = intervals::parse_variant(variant_tag);
      return run_problem(g, int_opts, Problem::interval, v);
    }
    if (*thr) return run_problem(g, thr_opts, Problem::throughput);
    if (*gen) {
      Params params;
      for (const auto& kv : gen_params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw InputError("--param expects key=value, got '" + kv + "'");
        params[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      const auto instances = generate_instances(parse_problem(gen_problem), gen_family, params, gen_count, g.seed);
      Output out(g.out);
      write_instances(out.stream(), instances);
      return 0;
    }
    if (*rep) {
      std::vector<ReportRow> rows;
      for (const auto& path : rep_inputs) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open " + path);
        auto part = read_report_csv(in);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      Output out(g.out);
      auto& os = out.stream();
      os << std::setprecision(10) << "problem,model,rows,worst_ratio,mean_ratio\n";
      for (const auto& a : aggregate(rows))
        os << a.problem << ',' << a.model << ',' << a.rows << ',' << a.worst_ratio << ',' << a.mean_ratio << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "rombit: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
