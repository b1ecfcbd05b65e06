#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symregg/egraph.hpp"

namespace symregg {

/// Tree over tokens and pattern variables. `var >= 0` marks a variable slot
/// (an index into Rule::vars) that matches any e-class.
struct Pattern {
  Token token;
  int var = -1;
  std::vector<Pattern> children;

  bool is_var() const { return var >= 0; }
};

/// Directed rewrite. A bidirectional rule from a rule file is expanded into
/// two Rule values that both carry `bidirectional = true`.
struct Rule {
  std::string name;
  Pattern lhs;
  Pattern rhs;
  std::vector<std::string> vars;
  bool bidirectional = false;
  /// Variables that must not bind a class known to be the constant 0.
  std::vector<int> nonzero;
  /// Variables occurring more than once on either side. Duplicating or
  /// equating a class that carries anonymous parameters changes the number
  /// of free parameters, so these only fire on parameter-free classes.
  std::vector<int> repeated;

  /// "lhs => rhs" in the rule-file syntax.
  std::string to_string() const;
};

/// Parses rule-file text: one "[name:] lhs => rhs" or "lhs <=> rhs" per
/// line, pattern variables written "?a", optional trailing
/// "if nonzero(?a)". Blank lines and lines starting with '#' are skipped.
/// Throws ParseError (with the line number in the message) on bad input.
std::vector<Rule> parse_rules(std::string_view text);
std::vector<Rule> load_rules(const std::string& path);

/// The curated rule set used by the search.
std::vector<Rule> default_rules();
/// Source text of default_rules(), in rule-file syntax.
std::string_view default_rules_text();

/// Converts a pattern to an expression whose variable slots become x0, x1,
/// ... (slot i -> x_i). Used to check rules numerically.
Expr pattern_to_expr(const Pattern& p);

struct Match {
  std::size_t rule = 0;
  ClassId cls = 0;
  std::vector<ClassId> subst;

  friend bool operator==(const Match&, const Match&) = default;
};

/// Every (rule, class, substitution) whose guards hold, for the canonical
/// classes in `scope` (all classes when empty). Deterministic order:
/// scope order, then rule order, then substitution order. Classes are
/// matched in parallel with OpenMP; the graph is only read.
std::vector<Match> match_all(const EGraph& g, std::span<const Rule> rules, std::span<const ClassId> scope = {});
/// Single-threaded reference for match_all.
std::vector<Match> match_all_serial(const EGraph& g, std::span<const Rule> rules,
                                    std::span<const ClassId> scope = {});

/// Size of the smallest expression the pattern denotes under `subst`.
long instance_size(const EGraph& g, const Pattern& p, std::span<const ClassId> subst);

/// Adds the pattern under `subst` and returns its class.
ClassId instantiate(EGraph& g, const Pattern& p, std::span<const ClassId> subst);

struct SaturationOptions {
  std::size_t node_budget = 10000;  // new e-nodes allowed per step
  std::vector<ClassId> scope;       // empty: the whole graph
  /// Skip a match when the smallest instance of its right-hand side would be
  /// larger than this. 0 disables the cap.
  int max_term_size = 0;
  /// A rule with more matches than this in one step is not applied in that
  /// step. 0 disables the limit.
  std::size_t match_limit = 0;
};

struct SaturationResult {
  std::size_t matches = 0;
  std::size_t skipped = 0;  // matches dropped by the size cap or match limit
  std::size_t merges = 0;
  std::size_t new_nodes = 0;
  bool budget_exhausted = false;
};

/// One match-apply-merge pass: all matches are collected first, then every
/// rhs is instantiated and merged, then the graph is rebuilt. The step stops
/// applying matches once `node_budget` new nodes were created; the graph is
/// rebuilt and consistent either way.
SaturationResult saturate_one_step(EGraph& g, std::span<const Rule> rules, const SaturationOptions& opts = {});

/// Repeats full-graph steps until nothing changes, `max_steps` is reached or
/// the graph holds more than `max_nodes` nodes. Desk-scale use only.
SaturationResult saturate(EGraph& g, std::span<const Rule> rules, std::size_t max_steps, std::size_t max_nodes);

}  // namespace symregg
