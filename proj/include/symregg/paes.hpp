#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "symregg/search.hpp"

namespace symregg {

/// Number of raw trees of size <= max_size before any deduplication.
double projected_count(int max_size, std::size_t terminals, std::span<const Op> ops);

/// Every expression of size <= max_size over `terminals` and `ops`, once.
/// Duplicates are removed after parameter folding and after ordering the
/// arguments of commutative operators. Sorted by size, then by the order in
/// which they were built. Throws std::length_error when projected_count
/// exceeds `limit`.
std::vector<Expr> enumerate(int max_size, std::span<const Token> terminals, std::span<const Op> ops,
                            double limit = 1e7);

/// Fisher-Yates shuffle of `items` driven by mt19937_64(seed).
std::vector<Expr> permuted_sample(std::vector<Expr> items, std::uint64_t seed);

/// Fixed evaluation points for semantic fingerprints.
struct Probe {
  std::vector<std::vector<double>> points;  // points[i][j]: value of x_j
  std::vector<double> params;               // value of t_i
};

/// `points` variable vectors uniform in [lo, hi], `params` values uniform in
/// [lo, hi], all from mt19937_64(seed).
Probe make_probe(std::size_t vars, std::size_t points, std::size_t params, std::uint64_t seed, double lo = 0.5,
                 double hi = 2.0);

/// Evaluations on the probe, rounded to 9 significant digits. Anonymous
/// placeholders are relabeled first. NaN is stored as one canonical NaN.
std::vector<double> fingerprint(const Expr& e, const Probe& probe);
/// Hashable text form of a fingerprint; equal keys <=> equal fingerprints.
std::string fingerprint_key(std::span<const double> fp);

struct PaesConfig {
  int max_size = 5;
  std::vector<Op> ops{Op::Add, Op::Sub, Op::Mul, Op::Div, Op::PowAbs, Op::Recip};
  int max_params = 0;
  /// Stop after this many evaluations; 0 walks the whole permuted space.
  std::size_t evaluations = 0;
  FitConfig fit{Loss::MSE, 1000, 50, 1.0, 0};
  std::uint64_t seed = 0;
  bool parallel = true;
};

struct PaesResult {
  Trace trace;
  ParetoFront front;
  std::size_t space_size = 0;
  RunStatus status = RunStatus::Completed;
  double seconds = 0.0;
};

/// Enumerates, permutes and fits. Fits run in parallel when `parallel` is
/// set; every fit uses fit_seed(seed, eval_index), so the trace does not
/// depend on the thread count.
PaesResult run_paes(const Dataset& data, const PaesConfig& cfg);

}  // namespace symregg
