#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace symregg {

enum class Op : std::uint8_t { Add, Sub, Mul, Div, PowAbs, Recip, Log, Exp, Sqrt, Abs };

inline constexpr Op kAllOps[] = {Op::Add,  Op::Sub, Op::Mul, Op::Div,  Op::PowAbs,
                                 Op::Recip, Op::Log, Op::Exp, Op::Sqrt, Op::Abs};

int arity(Op op);
bool is_commutative(Op op);
std::string_view symbol(Op op);
std::optional<Op> op_from_name(std::string_view name);

/// Parses a comma separated operator list such as "+,-,*,/,powabs,recip".
std::vector<Op> parse_op_list(std::string_view text);

/// Scalar semantics shared by every evaluator. powabs(a, b) = |a|^b and
/// recip(a) = 1/a; nothing is protected, so 1/0 = +inf and log(-1) = NaN.
double apply(Op op, double a, double b = 0.0);

enum class TokenKind : std::uint8_t { Var, Param, Const, Op };

struct Token {
  static constexpr std::int32_t kAnonymous = -1;

  TokenKind kind = TokenKind::Const;
  Op op = Op::Add;
  std::int32_t index = 0;
  double value = 0.0;

  static Token variable(int j);
  static Token param(int i);
  static Token anon_param();
  static Token constant(double v);
  static Token oper(Op o);

  int arity() const { return kind == TokenKind::Op ? symregg::arity(op) : 0; }
  bool is_terminal() const { return kind != TokenKind::Op; }
  bool is_param() const { return kind == TokenKind::Param; }
  bool is_anon_param() const { return kind == TokenKind::Param && index == kAnonymous; }

  friend bool operator==(const Token& a, const Token& b);
};

/// Total order used wherever tokens need a deterministic sort.
int compare(const Token& a, const Token& b);
std::size_t hash_value(const Token& t);
std::string to_string(const Token& t);

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  explicit Expr(Token leaf);
  Expr(Op op, Expr child);
  Expr(Op op, Expr lhs, Expr rhs);
  /// Throws std::invalid_argument when the child count does not match the arity.
  static Expr make(Token token, std::vector<Expr> children);

  const Token& token() const { return node_->token; }
  std::span<const Expr> children() const { return node_->children; }
  const Expr& child(std::size_t i) const { return node_->children[i]; }
  int size() const { return node_->size; }

  /// 1 + highest indexed parameter, 0 when there are none.
  int param_count() const { return node_->param_count; }
  bool has_anon_params() const { return node_->has_anon; }
  /// Number of parameter leaves, anonymous or indexed.
  int param_leaves() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node {
    Token token;
    std::vector<Expr> children;
    int size = 1;
    int param_count = 0;
    bool has_anon = false;
  };
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static std::shared_ptr<const Node> build(Token token, std::vector<Expr> children);

  std::shared_ptr<const Node> node_;
};

int compare(const Expr& a, const Expr& b);
std::size_t hash_value(const Expr& e);

// Pre-order positions: 0 is the root, children follow left to right.
std::vector<Expr> subtrees(const Expr& e);
const Expr& subtree_at(const Expr& e, int pos);
Expr replace_at(const Expr& e, int pos, const Expr& replacement);

/// Infix text with mandatory parentheses around binary operators and
/// call syntax for unary functions and powabs. Constants print in the
/// shortest form that reads back to the same double.
std::string to_string(const Expr& e);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

Expr parse(std::string_view text);

/// Anonymous placeholders become t0, t1, ... in left-to-right order.
/// Indexed parameters are left untouched.
Expr relabel_params(const Expr& e);
/// Inverse direction: every parameter becomes the anonymous placeholder.
Expr anonymize_params(const Expr& e);

/// Grow-style random tree with size <= max_size. Leaves are drawn from
/// `terminals`, inner nodes uniformly from the operators that still fit.
Expr random_expr(int max_size, std::span<const Token> terminals, std::span<const Op> ops,
                 std::mt19937_64& rng);

}  // namespace symregg
