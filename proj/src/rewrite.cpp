#include "symregg/rewrite.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "symregg/syntax.hpp"

namespace symregg {

namespace {

constexpr std::string_view kDefaultRules = R"(# commutativity
add-comm: (?a + ?b) => (?b + ?a)
mul-comm: (?a * ?b) => (?b * ?a)
# associativity
add-assoc: ((?a + ?b) + ?c) <=> (?a + (?b + ?c))
mul-assoc: ((?a * ?b) * ?c) <=> (?a * (?b * ?c))
# distributivity
distribute: (?a * (?b + ?c)) <=> ((?a * ?b) + (?a * ?c))
# identities
add-zero: (?a + 0) => ?a
mul-one: (?a * 1) => ?a
mul-zero: (?a * 0) => 0
sub-zero: (?a - 0) => ?a
div-one: (?a / 1) => ?a
sub-self: (?a - ?a) => 0
div-self: (?a / ?a) => 1 if nonzero(?a)
double: (?a + ?a) <=> (2 * ?a)
# reciprocals
recip-recip: recip(recip(?a)) => ?a
recip-div: recip((?a / ?b)) => (?b / ?a)
# powers
powabs-one: powabs(?a, 1) => abs(?a)
powabs-split: powabs(?a, (?b + ?c)) <=> (powabs(?a, ?b) * powabs(?a, ?c))
# log / exp
log-product: (log(?a) + log(?b)) <=> log((?a * ?b))
exp-sum: (exp(?a) * exp(?b)) <=> exp((?a + ?b))
)";

Pattern to_pattern(const SyntaxTree& t, std::vector<std::string>& vars, bool allow_new) {
  Pattern p;
  if (t.is_pattern_var()) {
    auto it = std::find(vars.begin(), vars.end(), t.pattern_var);
    if (it == vars.end()) {
      if (!allow_new) throw std::invalid_argument("variable " + t.pattern_var + " does not occur on the left side");
      vars.push_back(t.pattern_var);
      it = vars.end() - 1;
    }
    p.var = static_cast<int>(it - vars.begin());
    return p;
  }
  p.token = t.token;
  for (const auto& c : t.children) p.children.push_back(to_pattern(c, vars, allow_new));
  return p;
}

void count_vars(const Pattern& p, std::vector<int>& counts) {
  if (p.is_var()) {
    ++counts[static_cast<std::size_t>(p.var)];
    return;
  }
  for (const auto& c : p.children) count_vars(c, counts);
}

bool same_pattern(const Pattern& a, const Pattern& b) {
  if (a.var != b.var) return false;
  if (a.is_var()) return true;
  if (!(a.token == b.token) || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_pattern(a.children[i], b.children[i])) return false;
  }
  return true;
}

std::string pattern_text(const Pattern& p, const std::vector<std::string>& vars) {
  if (p.is_var()) return vars[static_cast<std::size_t>(p.var)];
  const Token& t = p.token;
  if (t.is_terminal()) return to_string(t);
  std::string a = pattern_text(p.children[0], vars);
  if (t.arity() == 1) return std::string(symbol(t.op)) + "(" + a + ")";
  std::string b = pattern_text(p.children[1], vars);
  if (t.op == Op::PowAbs) return "powabs(" + a + ", " + b + ")";
  return "(" + a + " " + std::string(symbol(t.op)) + " " + b + ")";
}

void finish_rule(Rule& r) {
  std::vector<int> lhs_counts(r.vars.size(), 0), rhs_counts(r.vars.size(), 0);
  count_vars(r.lhs, lhs_counts);
  count_vars(r.rhs, rhs_counts);
  r.repeated.clear();
  for (std::size_t i = 0; i < r.vars.size(); ++i) {
    if (lhs_counts[i] > 1 || rhs_counts[i] > 1) r.repeated.push_back(static_cast<int>(i));
  }
}

std::vector<Rule> parse_rule_line(std::string_view line) {
  std::string_view body = line;
  std::string name;
  if (auto colon = body.find(':'); colon != std::string_view::npos) {
    name = std::string(body.substr(0, colon));
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.erase(name.begin());
    body = body.substr(colon + 1);
  }
  std::size_t pos = 0;
  SyntaxTree lhs_tree = parse_syntax_prefix(body, pos, true);
  while (pos < body.size() && std::isspace(static_cast<unsigned char>(body[pos]))) ++pos;
  bool both = false;
  if (body.substr(pos, 3) == "<=>") {
    both = true;
    pos += 3;
  } else if (body.substr(pos, 2) == "=>") {
    pos += 2;
  } else {
    throw ParseError("expected '=>' or '<=>'", pos);
  }
  SyntaxTree rhs_tree = parse_syntax_prefix(body, pos, true);

  Rule r;
  r.name = name.empty() ? std::string(body) : name;
  r.bidirectional = both;
  r.lhs = to_pattern(lhs_tree, r.vars, true);
  std::size_t lhs_vars = r.vars.size();
  r.rhs = to_pattern(rhs_tree, r.vars, both);
  if (both && r.vars.size() != lhs_vars) {
    throw std::invalid_argument("bidirectional rule needs the same variables on both sides");
  }

  while (pos < body.size() && std::isspace(static_cast<unsigned char>(body[pos]))) ++pos;
  if (pos < body.size()) {
    if (body.substr(pos, 2) != "if") throw ParseError("unexpected trailing input", pos);
    pos += 2;
    std::string_view guards = body.substr(pos);
    std::size_t g = 0;
    while (true) {
      auto start = guards.find("nonzero(", g);
      if (start == std::string_view::npos) break;
      auto end = guards.find(')', start);
      if (end == std::string_view::npos) throw ParseError("unterminated guard", pos + start);
      std::string var(guards.substr(start + 8, end - start - 8));
      auto it = std::find(r.vars.begin(), r.vars.end(), var);
      if (it == r.vars.end()) throw std::invalid_argument("guard on unknown variable " + var);
      r.nonzero.push_back(static_cast<int>(it - r.vars.begin()));
      g = end + 1;
    }
    if (r.nonzero.empty()) throw ParseError("unknown guard", pos);
  }

  if (r.lhs.is_var()) throw std::invalid_argument("left side may not be a bare variable");
  if (same_pattern(r.lhs, r.rhs)) throw std::invalid_argument("left and right side are identical");
  finish_rule(r);

  std::vector<Rule> out{r};
  if (both) {
    if (r.rhs.is_var()) throw std::invalid_argument("right side of <=> may not be a bare variable");
    Rule rev = r;
    rev.name = r.name + "-rev";
    std::swap(rev.lhs, rev.rhs);
    finish_rule(rev);
    out.push_back(std::move(rev));
  }
  return out;
}

using Subst = std::vector<ClassId>;
constexpr ClassId kUnbound = static_cast<ClassId>(-1);

void match_pattern(const EGraph& g, const Pattern& p, ClassId c, const Subst& s, std::vector<Subst>& out) {
  c = g.find(c);
  if (p.is_var()) {
    ClassId bound = s[static_cast<std::size_t>(p.var)];
    if (bound == kUnbound) {
      Subst next = s;
      next[static_cast<std::size_t>(p.var)] = c;
      out.push_back(std::move(next));
    } else if (bound == c) {
      out.push_back(s);
    }
    return;
  }
  if (p.token.kind == TokenKind::Const) {
    const auto& cv = g.info(c).const_value;
    if (cv && Token::constant(*cv) == p.token) out.push_back(s);
    return;
  }
  for (const ENode& n : g.nodes(c)) {
    if (!(n.token == p.token)) continue;
    if (n.arity() == 0) {
      out.push_back(s);
      return;
    }
    if (n.arity() == 1) {
      match_pattern(g, p.children[0], n.children[0], s, out);
      continue;
    }
    std::vector<Subst> left;
    match_pattern(g, p.children[0], n.children[0], s, left);
    for (const auto& l : left) match_pattern(g, p.children[1], n.children[1], l, out);
  }
}

bool guards_hold(const EGraph& g, const Rule& r, const Subst& s) {
  for (int v : r.repeated) {
    if (!g.info(s[static_cast<std::size_t>(v)]).param_free) return false;
  }
  for (int v : r.nonzero) {
    const auto& cv = g.info(s[static_cast<std::size_t>(v)]).const_value;
    if (cv && *cv == 0.0) return false;
  }
  return true;
}

void match_class(const EGraph& g, std::span<const Rule> rules, ClassId c, std::vector<Match>& out) {
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const Rule& rule = rules[r];
    std::vector<Subst> found;
    match_pattern(g, rule.lhs, c, Subst(rule.vars.size(), kUnbound), found);
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    for (auto& s : found) {
      if (guards_hold(g, rule, s)) out.push_back(Match{r, c, std::move(s)});
    }
  }
}

std::vector<ClassId> resolve_scope(const EGraph& g, std::span<const ClassId> scope) {
  if (scope.empty()) return g.classes();
  std::vector<ClassId> out;
  out.reserve(scope.size());
  for (ClassId c : scope) out.push_back(g.find(c));
  // Keep the first occurrence of each class, in the caller's order.
  std::vector<ClassId> unique;
  std::vector<ClassId> used;
  for (ClassId c : out) {
    auto it = std::lower_bound(used.begin(), used.end(), c);
    if (it != used.end() && *it == c) continue;
    used.insert(it, c);
    unique.push_back(c);
  }
  return unique;
}

}  // namespace

std::string Rule::to_string() const {
  std::string s = pattern_text(lhs, vars) + " => " + pattern_text(rhs, vars);
  for (std::size_t i = 0; i < nonzero.size(); ++i) {
    s += (i == 0 ? " if " : ", ");
    s += "nonzero(" + vars[static_cast<std::size_t>(nonzero[i])] + ")";
  }
  return s;
}

std::vector<Rule> parse_rules(std::string_view text) {
  std::vector<Rule> rules;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    try {
      auto parsed = parse_rule_line(line);
      rules.insert(rules.end(), parsed.begin(), parsed.end());
    } catch (const ParseError& e) {
      throw ParseError("rule line " + std::to_string(line_no) + ": " + e.what(), e.position());
    } catch (const std::invalid_argument& e) {
      throw ParseError("rule line " + std::to_string(line_no) + ": " + e.what(), 0);
    }
  }
  return rules;
}

std::vector<Rule> load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rule file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_rules(ss.str());
}

std::string_view default_rules_text() { return kDefaultRules; }

std::vector<Rule> default_rules() {
  static const std::vector<Rule> rules = parse_rules(kDefaultRules);
  return rules;
}

Expr pattern_to_expr(const Pattern& p) {
  if (p.is_var()) return Expr(Token::variable(p.var));
  std::vector<Expr> kids;
  for (const auto& c : p.children) kids.push_back(pattern_to_expr(c));
  return Expr::make(p.token, std::move(kids));
}

std::vector<Match> match_all_serial(const EGraph& g, std::span<const Rule> rules, std::span<const ClassId> scope) {
  std::vector<Match> out;
  for (ClassId c : resolve_scope(g, scope)) match_class(g, rules, c, out);
  return out;
}

std::vector<Match> match_all(const EGraph& g, std::span<const Rule> rules, std::span<const ClassId> scope) {
  const std::vector<ClassId> classes = resolve_scope(g, scope);
  const auto count = static_cast<std::ptrdiff_t>(classes.size());
  std::vector<std::vector<Match>> per_class(classes.size());
#pragma omp parallel for schedule(dynamic, 16) if (count >= 512)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    match_class(g, rules, classes[static_cast<std::size_t>(i)], per_class[static_cast<std::size_t>(i)]);
  }
  std::vector<Match> out;
  for (auto& v : per_class) {
    for (auto& m : v) out.push_back(std::move(m));
  }
  return out;
}

long instance_size(const EGraph& g, const Pattern& p, std::span<const ClassId> subst) {
  if (p.is_var()) return g.info(subst[static_cast<std::size_t>(p.var)]).best_size;
  long size = 1;
  for (const auto& c : p.children) size += instance_size(g, c, subst);
  return size;
}

ClassId instantiate(EGraph& g, const Pattern& p, std::span<const ClassId> subst) {
  if (p.is_var()) return g.find(subst[static_cast<std::size_t>(p.var)]);
  ClassId kids[2] = {0, 0};
  for (std::size_t i = 0; i < p.children.size(); ++i) kids[i] = instantiate(g, p.children[i], subst);
  return g.add_node(p.token, std::span<const ClassId>(kids, p.children.size()));
}

SaturationResult saturate_one_step(EGraph& g, std::span<const Rule> rules, const SaturationOptions& opts) {
  if (g.needs_rebuild()) g.rebuild();
  SaturationResult res;
  const std::vector<Match> matches = match_all(g, rules, opts.scope);
  res.matches = matches.size();
  std::vector<std::size_t> per_rule(rules.size(), 0);
  for (const Match& m : matches) ++per_rule[m.rule];
  const std::size_t start_ids = g.ids_allocated();
  for (const Match& m : matches) {
    const Rule& rule = rules[m.rule];
    if ((opts.match_limit > 0 && per_rule[m.rule] > opts.match_limit) ||
        (opts.max_term_size > 0 && !rule.rhs.is_var() && instance_size(g, rule.rhs, m.subst) > opts.max_term_size)) {
      ++res.skipped;
      continue;
    }
    std::size_t created = g.ids_allocated() - start_ids;
    if (created >= opts.node_budget) {
      res.budget_exhausted = true;
      break;
    }
    ClassId rhs = instantiate(g, rule.rhs, m.subst);
    if (g.find(rhs) != g.find(m.cls)) {
      g.merge(rhs, m.cls);
      ++res.merges;
    }
  }
  res.new_nodes = g.ids_allocated() - start_ids;
  g.rebuild();
  return res;
}

SaturationResult saturate(EGraph& g, std::span<const Rule> rules, std::size_t max_steps, std::size_t max_nodes) {
  SaturationResult total;
  for (std::size_t step = 0; step < max_steps; ++step) {
    SaturationOptions opts;
    opts.node_budget = max_nodes > g.node_count() ? max_nodes - g.node_count() : 0;
    if (opts.node_budget == 0) {
      total.budget_exhausted = true;
      break;
    }
    SaturationResult r = saturate_one_step(g, rules, opts);
    total.matches += r.matches;
    total.skipped += r.skipped;
    total.merges += r.merges;
    total.new_nodes += r.new_nodes;
    if (r.budget_exhausted) {
      total.budget_exhausted = true;
      break;
    }
    if (r.merges == 0 && r.new_nodes == 0) break;
  }
  return total;
}

}  // namespace symregg
