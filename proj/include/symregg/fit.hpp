#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "symregg/dataset.hpp"
#include "symregg/expr.hpp"

namespace symregg {

enum class Loss { MSE };

Loss loss_from_name(std::string_view name);
std::string_view loss_name(Loss loss);

struct FitConfig {
  Loss loss = Loss::MSE;
  int opt_iterations = 100;
  int retries = 2;
  double train_ratio = 1.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct FitResult {
  std::vector<double> params;
  double train_loss = std::numeric_limits<double>::infinity();
  double val_loss = std::numeric_limits<double>::infinity();
  int evaluations_used = 1;
  int iterations = 0;  // optimizer iterations summed over retries
};

struct Split {
  Dataset train;
  Dataset val;
};

/// ratio == 1 returns the dataset twice (validation aliases training).
/// Otherwise a seeded shuffle puts ceil(ratio * n) rows into training.
/// Throws std::invalid_argument when either side would be empty.
Split split(const Dataset& data, double ratio, std::uint64_t seed);

/// Mean squared residual; +inf when any prediction is not finite.
double mse(std::span<const double> pred, std::span<const double> target);
double loss(Loss kind, std::span<const double> pred, std::span<const double> target);

/// Fits the indexed parameters of `e` on `train` and scores on `val`.
/// Each retry starts from theta ~ N(0, 1) and runs BFGS with a backtracking
/// line search and central finite-difference gradients. The best retry by
/// training loss wins. Parameter-free expressions are only evaluated.
/// Counts as one evaluation.
FitResult fit_params(const Expr& e, const Dataset& train, const Dataset& val, const FitConfig& cfg);
/// Splits `data` with cfg.train_ratio and cfg.seed, then fits.
FitResult fit_params(const Expr& e, const Dataset& data, const FitConfig& cfg);

/// Central-difference gradient of the training loss, as used by the
/// optimizer. Exposed for tests.
std::vector<double> loss_gradient(const Expr& e, std::span<const double> params, const Dataset& data, Loss kind);

/// Process-wide count of fit_params calls.
std::uint64_t evaluation_count();
void reset_evaluation_count();

}  // namespace symregg
