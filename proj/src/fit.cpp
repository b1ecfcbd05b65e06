#include "symregg/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "symregg/eval.hpp"

namespace symregg {

namespace {

std::atomic<std::uint64_t> g_evaluations{0};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Loss of one parameter vector with a reusable prediction buffer.
class Objective {
 public:
  Objective(const Expr& e, const Dataset& data, Loss kind)
      : prog_(e), data_(data), kind_(kind), pred_(data.rows()) {}

  double operator()(std::span<const double> theta) {
    prog_.run(theta, data_, pred_);
    return loss(kind_, pred_, data_.target());
  }

  bool gradient(std::vector<double>& theta, std::vector<double>& g) {
    static const double step = std::cbrt(std::numeric_limits<double>::epsilon());
    g.resize(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double saved = theta[i];
      const double h = step * std::max(1.0, std::abs(saved));
      theta[i] = saved + h;
      const double up = (*this)(theta);
      theta[i] = saved - h;
      const double down = (*this)(theta);
      theta[i] = saved;
      g[i] = (up - down) / ((saved + h) - (saved - h));
      if (!std::isfinite(g[i])) return false;
    }
    return true;
  }

 private:
  Program prog_;
  const Dataset& data_;
  Loss kind_;
  std::vector<double> pred_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct Minimum {
  std::vector<double> theta;
  double value = kInf;
  int iterations = 0;
};

Minimum bfgs(Objective& f, std::vector<double> theta, int max_iter) {
  const std::size_t k = theta.size();
  Minimum best{theta, f(theta), 0};
  double fx = best.value;
  if (!std::isfinite(fx)) return best;

  std::vector<double> g, g_new, p(k), s(k), y(k), trial(k), hy(k);
  if (!f.gradient(theta, g)) return best;
  std::vector<double> H(k * k, 0.0);
  auto reset_h = [&](double scale) {
    std::fill(H.begin(), H.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) H[i * k + i] = scale;
  };
  reset_h(1.0);

  for (int it = 0; it < max_iter; ++it) {
    best.iterations = it + 1;
    if (std::sqrt(dot(g, g)) < 1e-10) break;
    for (std::size_t i = 0; i < k; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc -= H[i * k + j] * g[j];
      p[i] = acc;
    }
    double slope = dot(g, p);
    if (!(slope < 0.0)) {
      reset_h(1.0);
      for (std::size_t i = 0; i < k; ++i) p[i] = -g[i];
      slope = -dot(g, g);
    }

    double alpha = 1.0;
    double f_trial = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < k; ++i) trial[i] = theta[i] + alpha * p[i];
      f_trial = f(trial);
      if (std::isfinite(f_trial) && f_trial <= fx + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;

    if (!f.gradient(trial, g_new)) {
      theta = trial;
      fx = f_trial;
      break;
    }
    for (std::size_t i = 0; i < k; ++i) {
      s[i] = trial[i] - theta[i];
      y[i] = g_new[i] - g[i];
    }
    const double fx_old = fx;
    theta = trial;
    fx = f_trial;
    g = g_new;

    const double sy = dot(s, y);
    if (sy > 1e-300) {
      if (it == 0) reset_h(sy / dot(y, y));
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < k; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) acc += H[i * k + j] * y[j];
        hy[i] = acc;
      }
      const double yhy = dot(y, hy);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          H[i * k + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
      }
    }
    if (fx_old - fx <= 0.0 && alpha < 1e-12) break;
  }
  if (fx < best.value) {
    best.theta = theta;
    best.value = fx;
  }
  return best;
}

}  // namespace

Loss loss_from_name(std::string_view name) {
  if (name == "mse" || name == "MSE") return Loss::MSE;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "' (supported: mse)");
}

std::string_view loss_name(Loss) { return "mse"; }

void FitConfig::validate() const {
  if (opt_iterations < 1) throw std::invalid_argument("opt_iterations must be >= 1");
  if (retries < 1) throw std::invalid_argument("retries must be >= 1");
  if (!(train_ratio > 0.0 && train_ratio <= 1.0)) throw std::invalid_argument("train_ratio must be in (0, 1]");
}

Split split(const Dataset& data, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("train ratio must be in (0, 1]");
  if (ratio == 1.0) return {data, data};
  const std::size_t n = data.rows();
  const auto n_train = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) throw std::invalid_argument("split leaves an empty training or validation set");
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<std::size_t> train(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> val(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  return {data.subset(train), data.subset(val)};
}

double mse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw std::invalid_argument("mse: length mismatch");
  if (pred.empty()) throw std::invalid_argument("mse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!std::isfinite(pred[i])) return kInf;
    const double r = pred[i] - target[i];
    sum += r * r;
  }
  const double m = sum / static_cast<double>(pred.size());
  return std::isfinite(m) ? m : kInf;
}

double loss(Loss, std::span<const double> pred, std::span<const double> target) { return mse(pred, target); }

std::vector<double> loss_gradient(const Expr& e, std::span<const double> params, const Dataset& data, Loss kind) {
  Objective f(e, data, kind);
  std::vector<double> theta(params.begin(), params.end());
  std::vector<double> g;
  f.gradient(theta, g);
  return g;
}

FitResult fit_params(const Expr& e, const Dataset& train, const Dataset& val, const FitConfig& cfg) {
  cfg.validate();
  g_evaluations.fetch_add(1, std::memory_order_relaxed);
  FitResult res;
  const auto k = static_cast<std::size_t>(e.param_count());
  Objective f(e, train, cfg.loss);
  if (k == 0) {
    res.train_loss = f({});
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int r = 0; r < cfg.retries; ++r) {
      std::vector<double> theta(k);
      for (auto& t : theta) t = normal(rng);
      Minimum m = bfgs(f, std::move(theta), cfg.opt_iterations);
      res.iterations += m.iterations;
      if (res.params.empty() || m.value < res.train_loss) {
        res.params = std::move(m.theta);
        res.train_loss = m.value;
      }
    }
  }
  if (train.same_storage(val)) {
    res.val_loss = res.train_loss;
  } else {
    Program prog(e);
    std::vector<double> pred(val.rows());
    prog.run(res.params, val, pred);
    res.val_loss = loss(cfg.loss, pred, val.target());
  }
  return res;
}

FitResult fit_params(const Expr& e, const Dataset& data, const FitConfig& cfg) {
  Split s = split(data, cfg.train_ratio, cfg.seed);
  return fit_params(e, s.train, s.val, cfg);
}

std::uint64_t evaluation_count() { return g_evaluations.load(); }
void reset_evaluation_count() { g_evaluations.store(0); }

}  // namespace symregg
