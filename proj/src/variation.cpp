#include "symregg/variation.hpp"

#include <algorithm>

namespace symregg {

namespace {

std::size_t pick(std::size_t n, std::mt19937_64& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool acceptable(const EGraph& g, const Expr& e, int max_size) { return e.size() <= max_size && !g.is_visited(e); }

}  // namespace

std::optional<Expr> perturb(const EGraph& g, const Expr& parent, const VariationSpace& space,
                            std::mt19937_64& rng) {
  const int pos = static_cast<int>(pick(static_cast<std::size_t>(parent.size()), rng));
  const Expr& target = subtree_at(parent, pos);

  const int budget = space.max_size - (parent.size() - target.size());
  if (budget >= 1 && !space.terminals.empty()) {
    Expr grown = random_expr(budget, space.terminals, space.ops, rng);
    Expr cand = replace_at(parent, pos, grown);
    if (acceptable(g, cand, space.max_size)) return cand;
  }

  std::vector<Expr> options;
  const Token& t = target.token();
  if (t.is_terminal()) {
    for (const Token& term : space.terminals) {
      if (term == t) continue;
      Expr cand = replace_at(parent, pos, Expr(term));
      if (acceptable(g, cand, space.max_size)) options.push_back(std::move(cand));
    }
  } else {
    std::vector<Expr> kids(target.children().begin(), target.children().end());
    for (Op op : space.ops) {
      if (op == t.op || arity(op) != t.arity()) continue;
      Expr cand = replace_at(parent, pos, Expr::make(Token::oper(op), kids));
      if (acceptable(g, cand, space.max_size)) options.push_back(std::move(cand));
    }
  }
  if (options.empty()) return std::nullopt;
  return options[pick(options.size(), rng)];
}

std::optional<Expr> recombine(const EGraph& g, const Expr& parent1, const Expr& parent2,
                              const VariationSpace& space, std::mt19937_64& rng) {
  const int pos = static_cast<int>(pick(static_cast<std::size_t>(parent1.size()), rng));
  const int room = space.max_size - (parent1.size() - subtree_at(parent1, pos).size());

  std::vector<Expr> donors = subtrees(parent2);
  std::sort(donors.begin(), donors.end(), [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
  donors.erase(std::unique(donors.begin(), donors.end()), donors.end());

  std::vector<Expr> options;
  for (const Expr& d : donors) {
    if (d.size() > room) continue;
    Expr cand = replace_at(parent1, pos, d);
    if (acceptable(g, cand, space.max_size)) options.push_back(std::move(cand));
  }
  if (options.empty()) return std::nullopt;
  return options[pick(options.size(), rng)];
}

}  // namespace symregg
