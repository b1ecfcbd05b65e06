// symregg: run SymRegg or PAES on a CSV file, tabulate success
// probabilities over seeds, or rebuild a Pareto front from a trace.
//
// Every run/experiment flag can also come from an environment variable
// named SYMREGG_<FLAG> (e.g. SYMREGG_EVALS, SYMREGG_MAX_SIZE). A flag given
// on the command line wins over the environment, which wins over the default.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "symregg/harness.hpp"
#include "symregg/io.hpp"

namespace {

using namespace symregg;

struct Options {
  std::size_t evals = 1000;
  int max_size = 10;
  std::string ops = "+,-,*,/,powabs,recip";
  int max_params = 0;
  double train_ratio = 1.0;
  std::string loss = "mse";
  int opt_iters = 100;
  int opt_retries = 2;
  std::size_t top_per_size = 50;
  std::size_t top_overall = 100;
  std::uint64_t seed = 0;
  std::string algorithm = "symregg";
  std::string dataset;
  std::string target;
  std::string rules;
  bool serial = false;

  CLI::Option* opt_iters_flag = nullptr;
  CLI::Option* opt_retries_flag = nullptr;
  CLI::Option* max_size_flag = nullptr;
};

void add_common(CLI::App& app, Options& o) {
  auto env = [](CLI::Option* opt, const char* name) { opt->envname(std::string("SYMREGG_") + name); };
  env(app.add_option("--evals", o.evals, "Evaluation budget N (PAES: 0 walks the whole space)")->capture_default_str(),
      "EVALS");
  o.max_size_flag = app.add_option("--max-size", o.max_size, "Largest expression size (PAES default 5)")
                        ->capture_default_str()
                        ->check(CLI::Range(1, 64));
  env(o.max_size_flag, "MAX_SIZE");
  env(app.add_option("--ops", o.ops, "Comma separated operators")->capture_default_str(), "OPS");
  env(app.add_option("--max-params", o.max_params, "0: anonymous parameter; m: indexed t0..t(m-1)")
          ->capture_default_str()
          ->check(CLI::NonNegativeNumber),
      "MAX_PARAMS");
  env(app.add_option("--train-ratio", o.train_ratio, "Fraction of rows used for fitting")
          ->capture_default_str()
          ->check(CLI::Range(0.0, 1.0)),
      "TRAIN_RATIO");
  env(app.add_option("--loss", o.loss, "Loss function")->capture_default_str()->check(CLI::IsMember({"mse"})), "LOSS");
  o.opt_iters_flag = app.add_option("--opt-iters", o.opt_iters, "Optimizer iterations per retry (PAES default 1000)")
                         ->capture_default_str()
                         ->check(CLI::PositiveNumber);
  env(o.opt_iters_flag, "OPT_ITERS");
  o.opt_retries_flag = app.add_option("--opt-retries", o.opt_retries, "Optimizer restarts (PAES default 50)")
                           ->capture_default_str()
                           ->check(CLI::PositiveNumber);
  env(o.opt_retries_flag, "OPT_RETRIES");
  env(app.add_option("--top-per-size", o.top_per_size, "Stage 1 pool: best per size")->capture_default_str(),
      "TOP_PER_SIZE");
  env(app.add_option("--top-overall", o.top_overall, "Stage 2 pool: best overall")->capture_default_str(),
      "TOP_OVERALL");
  env(app.add_option("--seed", o.seed, "Random seed")->capture_default_str(), "SEED");
  env(app.add_option("--algorithm", o.algorithm, "symregg or paes")
          ->capture_default_str()
          ->check(CLI::IsMember({"symregg", "paes"})),
      "ALGORITHM");
  env(app.add_option("--dataset", o.dataset, "CSV file with a header row")->required()->check(CLI::ExistingFile),
      "DATASET");
  env(app.add_option("--target", o.target, "Target column (default: last)"), "TARGET");
  env(app.add_option("--rules", o.rules, "Rule file replacing the built-in rules")->check(CLI::ExistingFile), "RULES");
  app.add_flag("--serial", o.serial, "Disable OpenMP parallelism in PAES fitting and the harness");
}

RunSpec make_spec(const Options& o) {
  RunSpec spec;
  spec.algorithm = algorithm_from_name(o.algorithm);
  const std::vector<Op> ops = parse_op_list(o.ops);
  FitConfig fit;
  fit.loss = loss_from_name(o.loss);
  fit.train_ratio = o.train_ratio;
  fit.opt_iterations = o.opt_iters;
  fit.retries = o.opt_retries;

  SearchConfig& s = spec.search;
  s.evaluations = o.evals;
  s.max_size = o.max_size;
  s.ops = ops;
  s.max_params = o.max_params;
  s.fit = fit;
  s.seed = o.seed;
  s.top_per_size = o.top_per_size;
  s.top_overall = o.top_overall;
  if (!o.rules.empty()) s.rules = load_rules(o.rules);

  PaesConfig& p = spec.paes;
  p.max_size = o.max_size_flag->count() ? o.max_size : PaesConfig{}.max_size;
  p.ops = ops;
  p.max_params = o.max_params;
  p.evaluations = o.evals;
  p.fit.loss = fit.loss;
  p.fit.train_ratio = fit.train_ratio;
  if (o.opt_iters_flag->count()) p.fit.opt_iterations = o.opt_iters;
  if (o.opt_retries_flag->count()) p.fit.retries = o.opt_retries;
  p.seed = o.seed;
  p.parallel = !o.serial;
  return spec;
}

void print_front(std::ostream& out, const ParetoFront& front) {
  out << "size\tloss\teval_index\texpression\n";
  for (const auto& f : front) {
    out << f.size << '\t' << format_double(f.loss) << '\t' << f.eval_index << '\t' << f.expr << '\n';
  }
}

template <typename F>
void write_file(const std::string& path, F&& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  body(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic regression with e-graph guided search"};
  app.require_subcommand(1);

  Options run_opts;
  std::string trace_out, report_out;
  auto* run = app.add_subcommand("run", "One seeded run; prints the Pareto front");
  add_common(*run, run_opts);
  run->add_option("--trace-out", trace_out, "Write the evaluation trace (TSV)")->envname("SYMREGG_TRACE_OUT");
  run->add_option("--report-out", report_out, "Write the JSON summary report")->envname("SYMREGG_REPORT_OUT");

  Options exp_opts;
  std::size_t runs = 10;
  std::vector<double> thresholds;
  std::string table_out;
  auto* exp = app.add_subcommand("experiment", "Success probability over seeds seed, seed+1, ...");
  add_common(*exp, exp_opts);
  exp->add_option("--runs", runs, "Number of seeded runs")
      ->capture_default_str()
      ->check(CLI::PositiveNumber)
      ->envname("SYMREGG_RUNS");
  exp->add_option("--thresholds", thresholds, "Comma separated loss thresholds")
      ->delimiter(',')
      ->required()
      ->envname("SYMREGG_THRESHOLDS");
  exp->add_option("--table-out", table_out, "CSV table (default: stdout)")->envname("SYMREGG_TABLE_OUT");

  std::string trace_in;
  auto* front = app.add_subcommand("front", "Rebuild the Pareto front from a trace file");
  front->add_option("trace", trace_in, "Trace file written by --trace-out")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*front) {
      print_front(std::cout, pareto_front(load_trace(trace_in)));
      return 0;
    }
    if (*run) {
      const RunSpec spec = make_spec(run_opts);
      const Dataset data = load_csv(run_opts.dataset, run_opts.target);
      const RunResult r = run_once(data, spec, run_opts.seed);
      if (!trace_out.empty()) save_trace(trace_out, r.trace);
      if (!report_out.empty()) write_file(report_out, [&](std::ostream& o) { o << report_json(spec, r).dump(2) << '\n'; });
      print_front(std::cout, r.front);
      std::cerr << "status: " << status_name(r.status) << ", evaluations: " << r.trace.size() << ", "
                << r.seconds << " s\n";
      return r.status == RunStatus::Completed ? 0 : 3;
    }
    const RunSpec spec = make_spec(exp_opts);
    const Dataset data = load_csv(exp_opts.dataset, exp_opts.target);
    const ExperimentResult res = run_experiment(data, spec, runs, thresholds, exp_opts.seed, !exp_opts.serial);
    if (table_out.empty()) {
      write_table(std::cout, res.table);
    } else {
      write_file(table_out, [&](std::ostream& o) { write_table(o, res.table); });
    }
    return 0;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
