#include "symregg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "symregg/io.hpp"

namespace symregg {

Algorithm algorithm_from_name(std::string_view name) {
  if (name == "symregg") return Algorithm::SymRegg;
  if (name == "paes") return Algorithm::Paes;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "' (symregg, paes)");
}

std::string_view algorithm_name(Algorithm a) { return a == Algorithm::SymRegg ? "symregg" : "paes"; }

RunResult run_once(const Dataset& data, const RunSpec& spec, std::uint64_t seed) {
  RunResult out;
  out.seed = seed;
  if (spec.algorithm == Algorithm::SymRegg) {
    SearchConfig cfg = spec.search;
    cfg.seed = seed;
    SearchResult r = run_symregg(data, cfg);
    out.trace = std::move(r.trace);
    out.front = std::move(r.front);
    out.status = r.status;
    out.stats = r.stats;
    out.seconds = r.seconds;
  } else {
    PaesConfig cfg = spec.paes;
    cfg.seed = seed;
    PaesResult r = run_paes(data, cfg);
    out.trace = std::move(r.trace);
    out.front = std::move(r.front);
    out.status = r.status;
    out.space_size = r.space_size;
    out.seconds = r.seconds;
  }
  return out;
}

std::vector<double> best_so_far(const Trace& trace) {
  std::vector<double> out;
  out.reserve(trace.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : trace) {
    if (r.train_loss < best) best = r.train_loss;
    out.push_back(best);
  }
  return out;
}

std::vector<ProbabilityRow> success_table(const std::vector<std::vector<double>>& curves,
                                          const std::vector<double>& thresholds) {
  std::size_t longest = 0;
  for (const auto& c : curves) longest = std::max(longest, c.size());
  std::vector<ProbabilityRow> rows;
  if (curves.empty()) return rows;
  rows.reserve(thresholds.size() * longest);
  for (double t : thresholds) {
    // First evaluation count at which each run reaches t.
    std::vector<std::size_t> hits;
    for (const auto& c : curves) {
      auto it = std::find_if(c.begin(), c.end(), [t](double v) { return v <= t; });
      hits.push_back(it == c.end() ? std::numeric_limits<std::size_t>::max()
                                   : static_cast<std::size_t>(it - c.begin()) + 1);
    }
    for (std::size_t n = 1; n <= longest; ++n) {
      auto reached = std::count_if(hits.begin(), hits.end(), [n](std::size_t h) { return h <= n; });
      rows.push_back({t, n, static_cast<double>(reached) / static_cast<double>(curves.size())});
    }
  }
  return rows;
}

ExperimentResult run_experiment(const Dataset& data, const RunSpec& spec, std::size_t runs,
                                const std::vector<double>& thresholds, std::uint64_t base_seed, bool parallel) {
  if (runs == 0) throw std::invalid_argument("runs must be >= 1");
  if (thresholds.empty()) throw std::invalid_argument("at least one threshold is required");
  ExperimentResult res;
  res.runs.resize(runs);
  std::vector<std::string> errors(runs);
  const auto count = static_cast<std::ptrdiff_t>(runs);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const std::uint64_t seed = base_seed + idx;
    try {
      res.runs[idx] = run_once(data, spec, seed);
    } catch (const std::exception& e) {
      errors[idx] = "run with seed " + std::to_string(seed) + " failed: " + e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }
  std::vector<std::vector<double>> curves;
  for (const auto& r : res.runs) curves.push_back(best_so_far(r.trace));
  res.table = success_table(curves, thresholds);
  return res;
}

void write_table(std::ostream& out, const std::vector<ProbabilityRow>& table) {
  out << "threshold,eval_count,probability\n";
  for (const auto& r : table) {
    out << format_double(r.threshold) << ',' << r.eval_count << ',' << format_double(r.probability) << '\n';
  }
}

nlohmann::json report_json(const RunSpec& spec, const RunResult& run) {
  using nlohmann::json;
  auto loss_value = [](double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); };
  auto op_names = [](const std::vector<Op>& ops) {
    json a = json::array();
    for (Op op : ops) a.push_back(std::string(symbol(op)));
    return a;
  };
  const FitConfig& fit = spec.algorithm == Algorithm::SymRegg ? spec.search.fit : spec.paes.fit;
  json cfg = {
      {"algorithm", algorithm_name(spec.algorithm)},
      {"seed", run.seed},
      {"loss", loss_name(fit.loss)},
      {"opt_iterations", fit.opt_iterations},
      {"opt_retries", fit.retries},
      {"train_ratio", fit.train_ratio},
  };
  if (spec.algorithm == Algorithm::SymRegg) {
    const SearchConfig& s = spec.search;
    cfg["evaluations"] = s.evaluations;
    cfg["max_size"] = s.max_size;
    cfg["ops"] = op_names(s.ops);
    cfg["max_params"] = s.max_params;
    cfg["top_per_size"] = s.top_per_size;
    cfg["top_overall"] = s.top_overall;
    cfg["p_perturb"] = s.p_perturb;
    cfg["node_budget"] = s.node_budget;
  } else {
    const PaesConfig& p = spec.paes;
    cfg["evaluations"] = p.evaluations;
    cfg["max_size"] = p.max_size;
    cfg["ops"] = op_names(p.ops);
    cfg["max_params"] = p.max_params;
  }

  json front = json::array();
  for (const auto& f : run.front) {
    front.push_back({{"size", f.size},
                     {"loss", loss_value(f.loss)},
                     {"eval_index", f.eval_index},
                     {"expression", f.expr},
                     {"params", f.params}});
  }
  json doc = {
      {"config", cfg},
      {"status", status_name(run.status)},
      {"evaluations", run.trace.size()},
      {"wall_seconds", run.seconds},
      {"front", front},
  };
  if (spec.algorithm == Algorithm::SymRegg) {
    doc["egraph"] = {{"classes", run.stats.classes},
                     {"nodes", run.stats.nodes},
                     {"merges", run.stats.merges},
                     {"evaluated", run.stats.evaluated},
                     {"roots", run.stats.roots}};
  } else {
    doc["space_size"] = run.space_size;
  }
  return doc;
}

}  // namespace symregg
