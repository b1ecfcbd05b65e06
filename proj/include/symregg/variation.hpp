#pragma once

#include <optional>
#include <random>
#include <span>

#include "symregg/egraph.hpp"

namespace symregg {

/// What a variation operator may build.
struct VariationSpace {
  int max_size = 10;
  std::span<const Token> terminals;
  std::span<const Op> ops;
};

/// Mutation at a uniformly chosen position. First a freshly grown subtree
/// replaces the one at that position; when that gives a visited expression,
/// every same-arity substitution of the token at that position (operators
/// for inner nodes, terminals for leaves) is tried and one unvisited result
/// is drawn. Nothing when the position offers no unvisited expression.
std::optional<Expr> perturb(const EGraph& g, const Expr& parent, const VariationSpace& space,
                            std::mt19937_64& rng);

/// Replaces a uniformly chosen subtree of `parent1` with a subtree of
/// `parent2`. Candidates that exceed max_size or give a visited expression
/// are discarded; one survivor is drawn uniformly.
std::optional<Expr> recombine(const EGraph& g, const Expr& parent1, const Expr& parent2,
                              const VariationSpace& space, std::mt19937_64& rng);

}  // namespace symregg
