#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "symregg/egraph.hpp"
#include "symregg/fit.hpp"
#include "symregg/rewrite.hpp"

namespace symregg {

enum class Method { Init, Stage1, Stage2, Stage3, Stage4, Paes };

std::string_view method_name(Method m);
Method method_from_name(std::string_view name);

struct TraceRecord {
  std::uint64_t eval_index = 0;
  Method method = Method::Init;
  int size = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  std::string expr;
  std::vector<double> params;
};

using Trace = std::vector<TraceRecord>;

struct FrontEntry {
  int size = 0;
  double loss = 0.0;  // validation loss
  std::uint64_t eval_index = 0;
  std::string expr;
  std::vector<double> params;
};

using ParetoFront = std::vector<FrontEntry>;

/// Best record per size by validation loss (earlier record on ties), then
/// only the sizes whose loss beats every smaller size.
ParetoFront pareto_front(const Trace& trace);

struct SearchConfig {
  std::size_t evaluations = 1000;
  int max_size = 10;
  std::size_t top_per_size = 50;
  std::size_t top_overall = 100;
  double p_perturb = 0.5;
  std::vector<Op> ops{Op::Add, Op::Sub, Op::Mul, Op::Div, Op::PowAbs, Op::Recip};
  /// 0: a single anonymous placeholder, relabeled per expression.
  /// m > 0: indexed terminals t0 .. t(m-1) that may repeat.
  int max_params = 0;
  FitConfig fit;
  std::uint64_t seed = 0;
  std::size_t stage_attempts = 20;   // parent samples before stage 1 or 2 fails
  std::size_t stage4_attempts = 100;  // random draws before the run is exhausted
  std::size_t node_budget = 10000;   // per saturation step
  std::size_t match_limit = 1000;    // per rule and saturation step
  /// Largest rewritten term saturation may add; 0 means max_size.
  int saturation_size = 0;
  std::vector<Rule> rules = default_rules();

  /// Throws std::invalid_argument when the configuration cannot run on a
  /// dataset with `vars` variables.
  void validate(std::size_t vars) const;
};

/// Variables x0 .. x(vars-1) followed by the parameter terminal(s).
std::vector<Token> make_terminals(std::size_t vars, int max_params);

enum class RunStatus { Completed, Exhausted };

std::string_view status_name(RunStatus s);

/// Bookkeeping for one generated-and-evaluated expression.
struct IterationDiag {
  std::uint64_t eval_index = 0;
  Method method = Method::Init;
  std::size_t stage1_attempts = 0;
  std::size_t stage2_attempts = 0;
  std::size_t stage3_candidates = 0;
  std::size_t stage4_attempts = 0;
  std::size_t revisits = 0;  // candidates equivalent to an evaluated class
};

struct SearchResult {
  Trace trace;
  ParetoFront front;
  EGraphStats stats;
  RunStatus status = RunStatus::Completed;
  std::vector<IterationDiag> diagnostics;
  double seconds = 0.0;
};

/// Seed of the parameter fit for one evaluation of a run.
std::uint64_t fit_seed(std::uint64_t run_seed, std::uint64_t eval_index);

class Search {
 public:
  struct Candidate {
    Expr expr;
    Method method;
  };

  Search(Dataset data, SearchConfig cfg);

  /// Inserts and evaluates every terminal and one random expression.
  /// Returns the number of evaluations used.
  std::size_t initialize();
  /// Runs the generation cascade once. Nothing when all four stages fail.
  std::optional<Candidate> attempt_generate();
  /// Inserts, saturates and, unless the candidate turned out to be
  /// equivalent to an evaluated class, fits it and appends to the trace.
  std::optional<TraceRecord> evaluate(const Candidate& c);
  /// Generates and evaluates until one new record is produced. False when
  /// the search space is exhausted.
  bool step();
  SearchResult run();

  const EGraph& graph() const { return graph_; }
  const Trace& trace() const { return trace_; }
  const std::vector<IterationDiag>& diagnostics() const { return diags_; }
  const std::vector<Token>& terminals() const { return terminals_; }

 private:
  std::optional<Candidate> from_pool(const std::vector<ClassId>& pool, Method method, std::size_t& attempts);
  std::optional<TraceRecord> evaluate_class(ClassId root, Method method);
  SaturationOptions step_options(std::vector<ClassId> scope) const;

  SearchConfig cfg_;
  Dataset data_;
  Split split_;
  std::vector<Token> terminals_;
  EGraph graph_;
  EGraph records_;                      // evaluated forms only
  std::vector<ClassId> record_classes_;  // exploration class of each record
  std::mt19937_64 rng_;
  Trace trace_;
  std::vector<IterationDiag> diags_;
  IterationDiag current_;
};

/// Convenience wrapper: Search(data, cfg).run().
SearchResult run_symregg(const Dataset& data, const SearchConfig& cfg);

}  // namespace symregg
