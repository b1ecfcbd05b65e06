#include "symregg/expr.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <functional>

#include "symregg/syntax.hpp"

namespace symregg {

namespace {

void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

struct OpInfo {
  Op op;
  std::string_view name;
  int arity;
};

constexpr OpInfo kOpTable[] = {
    {Op::Add, "+", 2},         {Op::Sub, "-", 2},        {Op::Mul, "*", 2},
    {Op::Div, "/", 2},         {Op::PowAbs, "powabs", 2}, {Op::Recip, "recip", 1},
    {Op::Log, "log", 1},       {Op::Exp, "exp", 1},      {Op::Sqrt, "sqrt", 1},
    {Op::Abs, "abs", 1},
};

const OpInfo& info(Op op) { return kOpTable[static_cast<std::size_t>(op)]; }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

int arity(Op op) { return info(op).arity; }

bool is_commutative(Op op) { return op == Op::Add || op == Op::Mul; }

std::string_view symbol(Op op) { return info(op).name; }

std::optional<Op> op_from_name(std::string_view name) {
  for (const auto& i : kOpTable) {
    if (i.name == name) return i.op;
  }
  if (name == "add") return Op::Add;
  if (name == "sub") return Op::Sub;
  if (name == "mul") return Op::Mul;
  if (name == "div") return Op::Div;
  return std::nullopt;
}

std::vector<Op> parse_op_list(std::string_view text) {
  std::vector<Op> ops;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto item = text.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      auto op = op_from_name(item);
      if (!op) throw std::invalid_argument("unknown operator '" + std::string(item) + "'");
      if (std::find(ops.begin(), ops.end(), *op) == ops.end()) ops.push_back(*op);
    }
    start = end + 1;
  }
  if (ops.empty()) throw std::invalid_argument("empty operator list");
  return ops;
}

double apply(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    case Op::PowAbs: return std::pow(std::fabs(a), b);
    case Op::Recip: return 1.0 / a;
    case Op::Log: return std::log(a);
    case Op::Exp: return std::exp(a);
    case Op::Sqrt: return std::sqrt(a);
    case Op::Abs: return std::fabs(a);
  }
  return std::nan("");
}

// ---------------------------------------------------------------------------
// Token

Token Token::variable(int j) { return Token{TokenKind::Var, Op::Add, j, 0.0}; }
Token Token::param(int i) { return Token{TokenKind::Param, Op::Add, i, 0.0}; }
Token Token::anon_param() { return Token{TokenKind::Param, Op::Add, kAnonymous, 0.0}; }
Token Token::constant(double v) {
  // -0.0 and 0.0 must hash-cons to one node.
  return Token{TokenKind::Const, Op::Add, 0, v == 0.0 ? 0.0 : v};
}
Token Token::oper(Op o) { return Token{TokenKind::Op, o, 0, 0.0}; }

bool operator==(const Token& a, const Token& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TokenKind::Var:
    case TokenKind::Param: return a.index == b.index;
    case TokenKind::Const: return std::bit_cast<std::uint64_t>(a.value) == std::bit_cast<std::uint64_t>(b.value);
    case TokenKind::Op: return a.op == b.op;
  }
  return false;
}

int compare(const Token& a, const Token& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case TokenKind::Var:
    case TokenKind::Param:
      return a.index == b.index ? 0 : (a.index < b.index ? -1 : 1);
    case TokenKind::Const:
      if (a == b) return 0;
      return a.value < b.value ? -1 : 1;
    case TokenKind::Op: return a.op == b.op ? 0 : (a.op < b.op ? -1 : 1);
  }
  return 0;
}

std::size_t hash_value(const Token& t) {
  std::size_t h = static_cast<std::size_t>(t.kind) * 1315423911u;
  switch (t.kind) {
    case TokenKind::Var:
    case TokenKind::Param: hash_combine(h, std::hash<std::int32_t>{}(t.index)); break;
    case TokenKind::Const: hash_combine(h, std::hash<std::uint64_t>{}(std::bit_cast<std::uint64_t>(t.value))); break;
    case TokenKind::Op: hash_combine(h, static_cast<std::size_t>(t.op)); break;
  }
  return h;
}

std::string to_string(const Token& t) {
  switch (t.kind) {
    case TokenKind::Var: return "x" + std::to_string(t.index);
    case TokenKind::Param: return t.index == Token::kAnonymous ? "t" : "t" + std::to_string(t.index);
    case TokenKind::Const: return format_double(t.value);
    case TokenKind::Op: return std::string(symbol(t.op));
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Expr

std::shared_ptr<const Expr::Node> Expr::build(Token token, std::vector<Expr> children) {
  if (static_cast<int>(children.size()) != token.arity()) {
    throw std::invalid_argument("arity mismatch for '" + to_string(token) + "': expected " +
                                std::to_string(token.arity()) + " children, got " +
                                std::to_string(children.size()));
  }
  auto node = std::make_shared<Node>();
  node->token = token;
  node->size = 1;
  if (token.is_param()) {
    if (token.is_anon_param()) {
      node->has_anon = true;
    } else {
      node->param_count = token.index + 1;
    }
  }
  for (const auto& c : children) {
    node->size += c.size();
    node->param_count = std::max(node->param_count, c.param_count());
    node->has_anon = node->has_anon || c.has_anon_params();
  }
  node->children = std::move(children);
  return node;
}

Expr::Expr(Token leaf) : node_(build(leaf, {})) {}
Expr::Expr(Op op, Expr child) : node_(build(Token::oper(op), {std::move(child)})) {}
Expr::Expr(Op op, Expr lhs, Expr rhs) : node_(build(Token::oper(op), {std::move(lhs), std::move(rhs)})) {}

Expr Expr::make(Token token, std::vector<Expr> children) {
  return Expr(build(token, std::move(children)));
}

int Expr::param_leaves() const {
  int n = token().is_param() ? 1 : 0;
  for (const auto& c : children()) n += c.param_leaves();
  return n;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.size() != b.size() || !(a.token() == b.token())) return false;
  for (std::size_t i = 0; i < a.children().size(); ++i) {
    if (!(a.child(i) == b.child(i))) return false;
  }
  return true;
}

int compare(const Expr& a, const Expr& b) {
  if (int c = compare(a.token(), b.token()); c != 0) return c;
  for (std::size_t i = 0; i < a.children().size(); ++i) {
    if (int c = compare(a.child(i), b.child(i)); c != 0) return c;
  }
  return 0;
}

std::size_t hash_value(const Expr& e) {
  std::size_t h = hash_value(e.token());
  for (const auto& c : e.children()) hash_combine(h, hash_value(c));
  return h;
}

namespace {

void collect(const Expr& e, std::vector<Expr>& out) {
  out.push_back(e);
  for (const auto& c : e.children()) collect(c, out);
}

const Expr* find_at(const Expr& e, int& pos) {
  if (pos == 0) return &e;
  --pos;
  for (const auto& c : e.children()) {
    if (pos < c.size()) return find_at(c, pos);
    pos -= c.size();
  }
  return nullptr;
}

Expr replace_rec(const Expr& e, int pos, const Expr& replacement) {
  if (pos == 0) return replacement;
  --pos;
  std::vector<Expr> kids(e.children().begin(), e.children().end());
  for (auto& c : kids) {
    if (pos < c.size()) {
      c = replace_rec(c, pos, replacement);
      return Expr::make(e.token(), std::move(kids));
    }
    pos -= c.size();
  }
  return e;
}

void print(const Expr& e, std::string& out) {
  const Token& t = e.token();
  if (t.is_terminal()) {
    out += to_string(t);
    return;
  }
  if (t.arity() == 2 && t.op != Op::PowAbs) {
    out += '(';
    print(e.child(0), out);
    out += ' ';
    out += symbol(t.op);
    out += ' ';
    print(e.child(1), out);
    out += ')';
    return;
  }
  out += symbol(t.op);
  out += '(';
  print(e.child(0), out);
  if (t.arity() == 2) {
    out += ", ";
    print(e.child(1), out);
  }
  out += ')';
}

}  // namespace

std::vector<Expr> subtrees(const Expr& e) {
  std::vector<Expr> out;
  out.reserve(static_cast<std::size_t>(e.size()));
  collect(e, out);
  return out;
}

const Expr& subtree_at(const Expr& e, int pos) {
  if (pos < 0 || pos >= e.size()) throw std::out_of_range("subtree position out of range");
  return *find_at(e, pos);
}

Expr replace_at(const Expr& e, int pos, const Expr& replacement) {
  if (pos < 0 || pos >= e.size()) throw std::out_of_range("subtree position out of range");
  return replace_rec(e, pos, replacement);
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t pos, bool patterns)
      : text_(text), pos_(pos), patterns_(patterns) {}

  SyntaxTree tree() {
    skip_ws();
    if (eof()) fail("unexpected end of input");
    char c = peek();
    if (c == '(') return binary();
    if (c == '?') return pattern_var();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
        (c == '-' && pos_ + 1 < text_.size() &&
         (std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) || text_[pos_ + 1] == '.'))) {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  std::size_t pos() const { return pos_; }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool eof() const { return pos_ >= text_.size(); }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  char peek() const { return text_[pos_]; }

  void expect(char c) {
    skip_ws();
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  SyntaxTree binary() {
    expect('(');
    SyntaxTree lhs = tree();
    skip_ws();
    if (eof()) fail("expected binary operator");
    std::size_t op_pos = pos_;
    Op op;
    switch (peek()) {
      case '+': op = Op::Add; break;
      case '-': op = Op::Sub; break;
      case '*': op = Op::Mul; break;
      case '/': op = Op::Div; break;
      default: fail(std::string("expected binary operator, found '") + peek() + "'");
    }
    ++pos_;
    SyntaxTree rhs = tree();
    skip_ws();
    if (eof() || peek() != ')') {
      if (!eof() && std::string_view("+-*/").find(peek()) != std::string_view::npos) {
        throw ParseError("arity mismatch: binary operator '" + std::string(symbol(op)) +
                             "' takes exactly two operands",
                         op_pos);
      }
      fail("expected ')'");
    }
    ++pos_;
    return SyntaxTree{Token::oper(op), {}, {std::move(lhs), std::move(rhs)}};
  }

  SyntaxTree pattern_var() {
    std::size_t start = pos_;
    if (!patterns_) fail("pattern variables are not allowed here");
    ++pos_;
    std::size_t name_start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    if (pos_ == name_start) throw ParseError("empty pattern variable name", start);
    return SyntaxTree{Token{}, std::string(text_.substr(start, pos_ - start)), {}};
  }

  SyntaxTree number() {
    std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
    if (!eof() && (peek() == 'e' || peek() == 'E')) {
      ++pos_;
      if (!eof() && (peek() == '+' || peek() == '-')) ++pos_;
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    double v = 0.0;
    auto s = text_.substr(start, pos_ - start);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ParseError("malformed number '" + std::string(s) + "'", start);
    }
    return SyntaxTree{Token::constant(v), {}, {}};
  }

  SyntaxTree identifier() {
    std::size_t start = pos_;
    while (!eof() && std::isalpha(static_cast<unsigned char>(peek()))) ++pos_;
    std::string_view word = text_.substr(start, pos_ - start);
    std::size_t digits_start = pos_;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    std::string_view digits = text_.substr(digits_start, pos_ - digits_start);

    std::size_t save = pos_;
    skip_ws();
    bool call = !eof() && peek() == '(';
    if (!call) pos_ = save;

    if (call && digits.empty()) {
      auto op = op_from_name(word);
      if (!op || (arity(*op) == 2 && *op != Op::PowAbs)) {
        throw ParseError("unknown function '" + std::string(word) + "'", start);
      }
      ++pos_;
      std::vector<SyntaxTree> args;
      args.push_back(tree());
      skip_ws();
      while (!eof() && peek() == ',') {
        ++pos_;
        args.push_back(tree());
        skip_ws();
      }
      if (static_cast<int>(args.size()) != arity(*op)) {
        throw ParseError("arity mismatch: '" + std::string(word) + "' takes " +
                             std::to_string(arity(*op)) + " argument(s), got " +
                             std::to_string(args.size()),
                         start);
      }
      expect(')');
      return SyntaxTree{Token::oper(*op), {}, std::move(args)};
    }

    auto index = [&]() {
      int v = 0;
      auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (res.ec != std::errc()) throw ParseError("index out of range", digits_start);
      return v;
    };
    if (word == "x" && !digits.empty()) return SyntaxTree{Token::variable(index()), {}, {}};
    if (word == "t" && !digits.empty()) return SyntaxTree{Token::param(index()), {}, {}};
    if (word == "t" && digits.empty()) return SyntaxTree{Token::anon_param(), {}, {}};
    throw ParseError("unknown symbol '" + std::string(text_.substr(start, pos_ - start)) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_;
  bool patterns_;
};

Expr to_expr(const SyntaxTree& t) {
  std::vector<Expr> kids;
  kids.reserve(t.children.size());
  for (const auto& c : t.children) kids.push_back(to_expr(c));
  return Expr::make(t.token, std::move(kids));
}

}  // namespace

SyntaxTree parse_syntax_prefix(std::string_view text, std::size_t& pos, bool allow_pattern_vars) {
  Parser p(text, pos, allow_pattern_vars);
  SyntaxTree t = p.tree();
  pos = p.pos();
  return t;
}

SyntaxTree parse_syntax(std::string_view text, bool allow_pattern_vars) {
  Parser p(text, 0, allow_pattern_vars);
  SyntaxTree t = p.tree();
  p.skip_ws();
  if (!p.eof()) throw ParseError("trailing input", p.pos());
  return t;
}

Expr parse(std::string_view text) { return to_expr(parse_syntax(text, false)); }

// ---------------------------------------------------------------------------
// Parameters

namespace {

Expr relabel_rec(const Expr& e, int& next) {
  if (e.token().is_anon_param()) return Expr(Token::param(next++));
  if (!e.has_anon_params()) return e;
  std::vector<Expr> kids;
  kids.reserve(e.children().size());
  for (const auto& c : e.children()) kids.push_back(relabel_rec(c, next));
  return Expr::make(e.token(), std::move(kids));
}

Expr anonymize_rec(const Expr& e) {
  if (e.token().is_param()) return Expr(Token::anon_param());
  if (e.param_count() == 0) return e;
  std::vector<Expr> kids;
  kids.reserve(e.children().size());
  for (const auto& c : e.children()) kids.push_back(anonymize_rec(c));
  return Expr::make(e.token(), std::move(kids));
}

}  // namespace

Expr relabel_params(const Expr& e) {
  if (!e.has_anon_params()) return e;
  int next = e.param_count();
  return relabel_rec(e, next);
}

Expr anonymize_params(const Expr& e) { return anonymize_rec(e); }

// ---------------------------------------------------------------------------
// Random generation

namespace {

Expr grow(int budget, int depth, std::span<const Token> terminals, std::span<const Op> unary,
          std::span<const Op> binary, std::mt19937_64& rng) {
  auto leaf = [&] {
    std::uniform_int_distribution<std::size_t> pick(0, terminals.size() - 1);
    return Expr(terminals[pick(rng)]);
  };
  bool can_unary = budget >= 2 && !unary.empty();
  bool can_binary = budget >= 3 && !binary.empty();
  if (!can_unary && !can_binary) return leaf();

  const double p_leaf = static_cast<double>(depth + 1) / static_cast<double>(depth + 4);
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p_leaf) return leaf();

  std::size_t choices = (can_unary ? unary.size() : 0) + (can_binary ? binary.size() : 0);
  std::size_t k = std::uniform_int_distribution<std::size_t>(0, choices - 1)(rng);
  if (can_unary && k < unary.size()) {
    return Expr(unary[k], grow(budget - 1, depth + 1, terminals, unary, binary, rng));
  }
  if (can_unary) k -= unary.size();
  int left_budget = std::uniform_int_distribution<int>(1, budget - 2)(rng);
  Expr lhs = grow(left_budget, depth + 1, terminals, unary, binary, rng);
  Expr rhs = grow(budget - 1 - lhs.size(), depth + 1, terminals, unary, binary, rng);
  return Expr(binary[k], std::move(lhs), std::move(rhs));
}

}  // namespace

Expr random_expr(int max_size, std::span<const Token> terminals, std::span<const Op> ops,
                 std::mt19937_64& rng) {
  if (max_size < 1) throw std::invalid_argument("random_expr: max_size must be >= 1");
  if (terminals.empty()) throw std::invalid_argument("random_expr: empty terminal set");
  std::vector<Op> unary, binary;
  for (Op op : ops) (arity(op) == 1 ? unary : binary).push_back(op);
  return grow(max_size, 0, terminals, unary, binary, rng);
}

}  // namespace symregg
