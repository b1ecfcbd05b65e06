#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "symregg/dataset.hpp"

namespace testing {

// n points x0 uniform in [lo, hi], y = f(x0).
inline symregg::Dataset sample_1d(std::size_t n, double lo, double hi, const std::function<double(double)>& f,
                                  std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = u(rng);
    y[i] = f(x[i]);
  }
  return symregg::Dataset({x}, y, {"x"});
}

// Evenly spaced x0 in [lo, hi].
inline symregg::Dataset grid_1d(std::size_t n, double lo, double hi, const std::function<double(double)>& f) {
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    y[i] = f(x[i]);
  }
  return symregg::Dataset({x}, y, {"x"});
}

inline bool close_rel(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Pearson chi-square statistic against a uniform expectation.
inline double chi_square_uniform(const std::vector<std::size_t>& counts) {
  double total = 0;
  for (auto c : counts) total += static_cast<double>(c);
  const double expected = total / static_cast<double>(counts.size());
  double chi = 0;
  for (auto c : counts) chi += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  return chi;
}

}  // namespace testing
