#pragma once

#include <span>
#include <vector>

#include "symregg/dataset.hpp"
#include "symregg/expr.hpp"

namespace symregg {

/// An expression flattened to postfix form for repeated evaluation.
///
/// `run` is the production kernel: rows are processed in fixed-size blocks,
/// each block executes the whole program over column slices, and blocks are
/// distributed with OpenMP once the dataset is large enough to pay for the
/// fork. Every row goes through the same scalar operations in the same order
/// as the per-row reference, so the outputs are bit-identical to
/// `evaluate_serial`.
class Program {
 public:
  static constexpr std::size_t kBlock = 256;
  static constexpr std::size_t kParallelRows = 8192;

  explicit Program(const Expr& e);

  /// Writes one prediction per row of `data` into `out`.
  /// Throws std::invalid_argument when `params` is too short or the
  /// expression references a variable the dataset does not have.
  void run(std::span<const double> params, const Dataset& data, std::span<double> out) const;

  int param_count() const { return param_count_; }

 private:
  struct Instr {
    TokenKind kind;
    Op op;
    std::int32_t index;
    double value;
  };
  std::vector<Instr> code_;
  int max_stack_ = 0;
  int param_count_ = 0;
  int var_count_ = 0;
};

/// Evaluates `e` on every row. Parameters must be indexed (see relabel_params).
std::vector<double> evaluate(const Expr& e, std::span<const double> params, const Dataset& data);

/// Reference evaluator: plain recursion, one row at a time, no threading.
/// Kept for testing the kernel.
std::vector<double> evaluate_serial(const Expr& e, std::span<const double> params, const Dataset& data);

/// Single-point evaluation used by oracles. `vars[j]` is the value of x_j.
double evaluate_point(const Expr& e, std::span<const double> params, std::span<const double> vars);

}  // namespace symregg
