#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "symregg/expr.hpp"

namespace symregg {

/// Untyped parse tree shared by the expression parser and the rule-file
/// parser. A node is either a token or, in pattern mode, a "?name" variable.
struct SyntaxTree {
  Token token;
  std::string pattern_var;
  std::vector<SyntaxTree> children;

  bool is_pattern_var() const { return !pattern_var.empty(); }
};

/// Parses one complete tree; trailing input is a syntax error.
SyntaxTree parse_syntax(std::string_view text, bool allow_pattern_vars);

/// Parses a tree starting at `pos` and advances `pos` past it.
SyntaxTree parse_syntax_prefix(std::string_view text, std::size_t& pos, bool allow_pattern_vars);

}  // namespace symregg
