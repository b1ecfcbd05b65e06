#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "symregg/paes.hpp"
#include "symregg/search.hpp"

namespace symregg {

enum class Algorithm { SymRegg, Paes };

Algorithm algorithm_from_name(std::string_view name);
std::string_view algorithm_name(Algorithm a);

/// One seeded run of either algorithm.
struct RunResult {
  std::uint64_t seed = 0;
  Trace trace;
  ParetoFront front;
  RunStatus status = RunStatus::Completed;
  EGraphStats stats;        // SymRegg only
  std::size_t space_size = 0;  // PAES only
  double seconds = 0.0;
};

struct RunSpec {
  Algorithm algorithm = Algorithm::SymRegg;
  SearchConfig search;  // used for SymRegg
  PaesConfig paes;      // used for PAES
};

/// Runs one algorithm with `seed` replacing the configured seed.
RunResult run_once(const Dataset& data, const RunSpec& spec, std::uint64_t seed);

/// Running minimum of the training loss; entry c-1 covers evaluations 1..c.
std::vector<double> best_so_far(const Trace& trace);

struct ProbabilityRow {
  double threshold = 0.0;
  std::size_t eval_count = 0;
  double probability = 0.0;
};

/// For every threshold and every evaluation count 1..max length, the
/// fraction of curves whose best-so-far loss is <= threshold by then.
/// A curve shorter than the longest one keeps its last value.
std::vector<ProbabilityRow> success_table(const std::vector<std::vector<double>>& curves,
                                          const std::vector<double>& thresholds);

struct ExperimentResult {
  std::vector<RunResult> runs;
  std::vector<ProbabilityRow> table;
};

/// Runs seeds base_seed, base_seed + 1, ... and tabulates success
/// probabilities. Runs are spread over OpenMP threads when `parallel` is
/// set; a failing run is reported with its seed.
ExperimentResult run_experiment(const Dataset& data, const RunSpec& spec, std::size_t runs,
                                const std::vector<double>& thresholds, std::uint64_t base_seed, bool parallel = true);

void write_table(std::ostream& out, const std::vector<ProbabilityRow>& table);

/// Summary document: configuration, timing, status, front and graph size.
nlohmann::json report_json(const RunSpec& spec, const RunResult& run);

}  // namespace symregg
