#include "symregg/paes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "symregg/eval.hpp"

namespace symregg {

namespace {

// Orders the arguments of commutative operators, bottom-up.
Expr commutative_form(const Expr& e) {
  if (e.token().is_terminal()) return e;
  std::vector<Expr> kids;
  for (const auto& c : e.children()) kids.push_back(commutative_form(c));
  if (kids.size() == 2 && is_commutative(e.token().op) && compare(kids[1], kids[0]) < 0) std::swap(kids[0], kids[1]);
  return Expr::make(e.token(), std::move(kids));
}

double round_significant(double v) {
  if (std::isnan(v)) return std::numeric_limits<double>::quiet_NaN();
  if (v == 0.0) return 0.0;
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return std::strtod(buf, nullptr);
}

}  // namespace

double projected_count(int max_size, std::size_t terminals, std::span<const Op> ops) {
  double unary = 0, binary = 0;
  for (Op op : ops) (arity(op) == 1 ? unary : binary) += 1;
  std::vector<double> count(static_cast<std::size_t>(std::max(max_size, 0)) + 1, 0.0);
  double total = 0;
  for (int s = 1; s <= max_size; ++s) {
    double c = s == 1 ? static_cast<double>(terminals) : unary * count[static_cast<std::size_t>(s - 1)];
    for (int l = 1; l + 1 < s; ++l) {
      c += binary * count[static_cast<std::size_t>(l)] * count[static_cast<std::size_t>(s - 1 - l)];
    }
    count[static_cast<std::size_t>(s)] = c;
    total += c;
  }
  return total;
}

std::vector<Expr> enumerate(int max_size, std::span<const Token> terminals, std::span<const Op> ops, double limit) {
  const double projected = projected_count(max_size, terminals.size(), ops);
  if (projected > limit) {
    throw std::length_error("enumeration would build " + std::to_string(projected) + " trees (limit " +
                            std::to_string(limit) + ")");
  }
  // The graph is only used for hash-consing with folding; no rules run.
  EGraph g;
  std::unordered_set<ClassId> seen;
  std::vector<std::vector<Expr>> by_size(static_cast<std::size_t>(std::max(max_size, 0)) + 1);
  auto offer = [&](const Expr& raw) {
    Expr e = commutative_form(raw);
    // Folding can leave commutative arguments out of order, so alternate
    // until the folded form is ordered.
    ClassId id = g.insert(e);
    Expr cur = e;
    for (int round = 0; round < 8; ++round) {
      Expr next = commutative_form(g.extract_smallest(id));
      if (next == cur) break;
      cur = next;
      id = g.insert(cur);
    }
    if (!seen.insert(id).second) return;
    by_size[static_cast<std::size_t>(e.size())].push_back(e);
  };

  for (const Token& t : terminals) offer(Expr(t));
  for (int s = 2; s <= max_size; ++s) {
    for (Op op : ops) {
      if (arity(op) == 1) {
        for (const Expr& c : by_size[static_cast<std::size_t>(s - 1)]) offer(Expr(op, c));
        continue;
      }
      for (int l = 1; l + 1 < s; ++l) {
        const int r = s - 1 - l;
        if (is_commutative(op) && l > r) continue;
        const auto& left = by_size[static_cast<std::size_t>(l)];
        const auto& right = by_size[static_cast<std::size_t>(r)];
        for (std::size_t i = 0; i < left.size(); ++i) {
          const std::size_t j0 = is_commutative(op) && l == r ? i : 0;
          for (std::size_t j = j0; j < right.size(); ++j) {
            offer(Expr(op, left[i], right[j]));
          }
        }
      }
    }
  }
  std::vector<Expr> out;
  for (auto& v : by_size) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<Expr> permuted_sample(std::vector<Expr> items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    std::swap(items[i - 1], items[j]);
  }
  return items;
}

Probe make_probe(std::size_t vars, std::size_t points, std::size_t params, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Probe p;
  p.points.resize(points, std::vector<double>(vars));
  for (auto& pt : p.points) {
    for (auto& v : pt) v = u(rng);
  }
  p.params.resize(params);
  for (auto& v : p.params) v = u(rng);
  return p;
}

std::vector<double> fingerprint(const Expr& e, const Probe& probe) {
  const Expr labeled = relabel_params(e);
  if (static_cast<std::size_t>(labeled.param_count()) > probe.params.size()) {
    throw std::invalid_argument("probe has too few parameter values");
  }
  std::vector<double> out;
  out.reserve(probe.points.size());
  for (const auto& pt : probe.points) out.push_back(round_significant(evaluate_point(labeled, probe.params, pt)));
  return out;
}

std::string fingerprint_key(std::span<const double> fp) {
  std::string key;
  char buf[40];
  for (double v : fp) {
    if (std::isnan(v)) {
      key += "nan;";
      continue;
    }
    std::snprintf(buf, sizeof buf, "%.8e;", v);
    key += buf;
  }
  return key;
}

PaesResult run_paes(const Dataset& data, const PaesConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.fit.validate();
  const std::vector<Token> terminals = make_terminals(data.vars(), cfg.max_params);
  std::vector<Expr> order = permuted_sample(enumerate(cfg.max_size, terminals, cfg.ops), cfg.seed);
  PaesResult res;
  res.space_size = order.size();
  std::size_t n = order.size();
  if (cfg.evaluations > 0 && cfg.evaluations < n) n = cfg.evaluations;
  if (cfg.evaluations > order.size()) res.status = RunStatus::Exhausted;

  const Split parts = split(data, cfg.fit.train_ratio, cfg.seed);
  res.trace.resize(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4) if (cfg.parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const Expr labeled = relabel_params(order[idx]);
    FitConfig fc = cfg.fit;
    fc.seed = fit_seed(cfg.seed, idx + 1);
    FitResult fr = fit_params(labeled, parts.train, parts.val, fc);
    res.trace[idx] = TraceRecord{idx + 1, Method::Paes, labeled.size(), fr.train_loss, fr.val_loss, to_string(labeled),
                                 std::move(fr.params)};
  }
  res.front = pareto_front(res.trace);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace symregg
