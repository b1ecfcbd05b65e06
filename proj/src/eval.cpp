#include "symregg/eval.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace symregg {

namespace {

void check_params(const Expr& e, std::span<const double> params) {
  if (e.has_anon_params()) {
    throw std::invalid_argument("expression has unlabeled parameters; call relabel_params first");
  }
  if (params.size() < static_cast<std::size_t>(e.param_count())) {
    throw std::invalid_argument("parameter vector too short: need " + std::to_string(e.param_count()) +
                                ", got " + std::to_string(params.size()));
  }
}

int max_var(const Expr& e) {
  int m = e.token().kind == TokenKind::Var ? e.token().index + 1 : 0;
  for (const auto& c : e.children()) m = std::max(m, max_var(c));
  return m;
}

void check_vars(int var_count, const Dataset& data) {
  if (static_cast<std::size_t>(var_count) > data.vars()) {
    throw std::invalid_argument("expression uses x" + std::to_string(var_count - 1) + " but dataset has " +
                                std::to_string(data.vars()) + " variable(s)");
  }
}

double eval_row(const Expr& e, std::span<const double> params, const Dataset& data, std::size_t row) {
  const Token& t = e.token();
  switch (t.kind) {
    case TokenKind::Var: return data.at(row, static_cast<std::size_t>(t.index));
    case TokenKind::Param: return params[static_cast<std::size_t>(t.index)];
    case TokenKind::Const: return t.value;
    case TokenKind::Op: break;
  }
  double a = eval_row(e.child(0), params, data, row);
  if (t.arity() == 1) return apply(t.op, a);
  double b = eval_row(e.child(1), params, data, row);
  return apply(t.op, a, b);
}

double eval_point(const Expr& e, std::span<const double> params, std::span<const double> vars) {
  const Token& t = e.token();
  switch (t.kind) {
    case TokenKind::Var: return vars[static_cast<std::size_t>(t.index)];
    case TokenKind::Param: return params[static_cast<std::size_t>(t.index)];
    case TokenKind::Const: return t.value;
    case TokenKind::Op: break;
  }
  double a = eval_point(e.child(0), params, vars);
  if (t.arity() == 1) return apply(t.op, a);
  return apply(t.op, a, eval_point(e.child(1), params, vars));
}

}  // namespace

Program::Program(const Expr& e) : param_count_(e.param_count()), var_count_(max_var(e)) {
  if (e.has_anon_params()) {
    throw std::invalid_argument("expression has unlabeled parameters; call relabel_params first");
  }
  code_.reserve(static_cast<std::size_t>(e.size()));
  int depth = 0;
  // Iterative post-order so deep trees do not recurse here.
  struct Frame {
    const Expr* e;
    std::size_t next;
  };
  std::vector<Frame> stack{{&e, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < f.e->children().size()) {
      const Expr* c = &f.e->child(f.next++);
      stack.push_back({c, 0});
      continue;
    }
    const Token& t = f.e->token();
    code_.push_back({t.kind, t.op, t.index, t.value});
    if (t.is_terminal()) {
      ++depth;
    } else {
      depth -= t.arity() - 1;
    }
    max_stack_ = std::max(max_stack_, depth);
    stack.pop_back();
  }
}

void Program::run(std::span<const double> params, const Dataset& data, std::span<double> out) const {
  if (params.size() < static_cast<std::size_t>(param_count_)) {
    throw std::invalid_argument("parameter vector too short: need " + std::to_string(param_count_) +
                                ", got " + std::to_string(params.size()));
  }
  check_vars(var_count_, data);
  const std::size_t n = data.rows();
  if (out.size() < n) throw std::invalid_argument("output buffer too short");
  const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>((n + kBlock - 1) / kBlock);
  const std::size_t width = static_cast<std::size_t>(max_stack_);

#pragma omp parallel for schedule(static) if (n >= kParallelRows)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
    const std::size_t len = std::min(kBlock, n - begin);
    thread_local std::vector<double> buffer;
    if (buffer.size() < width * kBlock) buffer.resize(width * kBlock);
    double* base = buffer.data();
    std::size_t top = 0;  // number of occupied slots
    for (const Instr& ins : code_) {
      switch (ins.kind) {
        case TokenKind::Var: {
          const double* col = data.column(static_cast<std::size_t>(ins.index)).data() + begin;
          std::copy(col, col + len, base + top * kBlock);
          ++top;
          break;
        }
        case TokenKind::Param:
          std::fill(base + top * kBlock, base + top * kBlock + len, params[static_cast<std::size_t>(ins.index)]);
          ++top;
          break;
        case TokenKind::Const:
          std::fill(base + top * kBlock, base + top * kBlock + len, ins.value);
          ++top;
          break;
        case TokenKind::Op:
          if (symregg::arity(ins.op) == 1) {
            double* a = base + (top - 1) * kBlock;
            for (std::size_t i = 0; i < len; ++i) a[i] = apply(ins.op, a[i]);
          } else {
            double* a = base + (top - 2) * kBlock;
            const double* c = base + (top - 1) * kBlock;
            for (std::size_t i = 0; i < len; ++i) a[i] = apply(ins.op, a[i], c[i]);
            --top;
          }
          break;
      }
    }
    std::copy(base, base + len, out.data() + begin);
  }
}

std::vector<double> evaluate(const Expr& e, std::span<const double> params, const Dataset& data) {
  check_params(e, params);
  Program prog(e);
  std::vector<double> out(data.rows());
  prog.run(params, data, out);
  return out;
}

std::vector<double> evaluate_serial(const Expr& e, std::span<const double> params, const Dataset& data) {
  check_params(e, params);
  check_vars(max_var(e), data);
  std::vector<double> out(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) out[i] = eval_row(e, params, data, i);
  return out;
}

double evaluate_point(const Expr& e, std::span<const double> params, std::span<const double> vars) {
  check_params(e, params);
  if (static_cast<std::size_t>(max_var(e)) > vars.size()) {
    throw std::invalid_argument("not enough variable values for expression");
  }
  return eval_point(e, params, vars);
}

}  // namespace symregg
