#include <benchmark/benchmark.h>

#include <random>

#include "symregg/eval.hpp"
#include "symregg/paes.hpp"
#include "symregg/rewrite.hpp"

using namespace symregg;

namespace {

Dataset wide_data(std::size_t rows) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::vector<double> x0(rows), x1(rows), y(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    x0[i] = u(rng);
    x1[i] = u(rng);
    y[i] = x0[i] * x1[i];
  }
  return Dataset({x0, x1}, y, {"a", "b"});
}

const Expr kExpr = parse("((powabs(x0, t0) * (x1 + t1)) / (recip(x0) - (t2 * x1)))");
const std::vector<double> kParams{1.5, 0.3, 2.0};

void BM_Evaluate(benchmark::State& state) {
  const Dataset d = wide_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(kExpr, kParams, d));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvaluateSerial(benchmark::State& state) {
  const Dataset d = wide_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_serial(kExpr, kParams, d));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

EGraph random_graph(int exprs) {
  std::mt19937_64 rng(77);
  const std::vector<Token> terms{Token::variable(0), Token::variable(1), Token::anon_param(), Token::constant(2)};
  const Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Recip, Op::Log, Op::Exp};
  EGraph g;
  for (int i = 0; i < exprs; ++i) g.insert(random_expr(10, terms, ops, rng));
  saturate_one_step(g, default_rules());
  return g;
}

void BM_MatchAll(benchmark::State& state) {
  const EGraph g = random_graph(static_cast<int>(state.range(0)));
  const auto rules = default_rules();
  for (auto _ : state) benchmark::DoNotOptimize(match_all(g, rules));
}

void BM_MatchAllSerial(benchmark::State& state) {
  const EGraph g = random_graph(static_cast<int>(state.range(0)));
  const auto rules = default_rules();
  for (auto _ : state) benchmark::DoNotOptimize(match_all_serial(g, rules));
}

void paes_fit(benchmark::State& state, bool parallel) {
  const Dataset d = wide_data(200);
  PaesConfig cfg;
  cfg.max_size = 4;
  cfg.fit = FitConfig{Loss::MSE, 50, 2, 1.0, 0};
  cfg.parallel = parallel;
  for (auto _ : state) benchmark::DoNotOptimize(run_paes(d, cfg));
}

void BM_PaesFit(benchmark::State& state) { paes_fit(state, true); }
void BM_PaesFitSerial(benchmark::State& state) { paes_fit(state, false); }

}  // namespace

BENCHMARK(BM_Evaluate)->Arg(1 << 10)->Arg(1 << 16);
BENCHMARK(BM_EvaluateSerial)->Arg(1 << 10)->Arg(1 << 16);
BENCHMARK(BM_MatchAll)->Arg(100)->Arg(800);
BENCHMARK(BM_MatchAllSerial)->Arg(100)->Arg(800);
BENCHMARK(BM_PaesFit)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PaesFitSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
