#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "symregg/expr.hpp"

namespace symregg {

using ClassId = std::uint32_t;

struct ENode {
  Token token;
  std::array<ClassId, 2> children{0, 0};

  int arity() const { return token.arity(); }
  std::span<const ClassId> kids() const { return {children.data(), static_cast<std::size_t>(arity())}; }

  friend bool operator==(const ENode& a, const ENode& b) {
    return a.token == b.token && a.children[0] == b.children[0] && a.children[1] == b.children[1];
  }
};

int compare(const ENode& a, const ENode& b);

struct ENodeHash {
  std::size_t operator()(const ENode& n) const;
};

/// Fitness of one evaluated expression.
struct EvalRecord {
  std::uint64_t eval_index = 0;
  int size = 0;  // size of the expression that was fitted
  double train_loss = std::numeric_limits<double>::infinity();
  double val_loss = std::numeric_limits<double>::infinity();
  std::vector<double> params;
};

/// Per-class analysis data.
struct ClassInfo {
  static constexpr int kNoExtraction = std::numeric_limits<int>::max();

  int best_size = kNoExtraction;
  ENode best_node;
  std::string best_text;  // printed smallest form, used as the tie-break
  std::optional<double> const_value;
  bool param_free = false;  // some member has no anonymous parameter
  bool is_param = false;    // the class holds the anonymous placeholder
  bool is_root = false;
  std::optional<EvalRecord> eval;

  bool evaluated() const { return eval.has_value(); }
};

struct EGraphStats {
  std::size_t classes = 0;
  std::size_t nodes = 0;
  std::size_t merges = 0;
  std::size_t evaluated = 0;
  std::size_t roots = 0;
};

/// Multi-root equality graph.
///
/// Insertion is bottom-up with hash-consing. Two normalizations run while a
/// node is being added, before the hash-cons lookup:
///   - constant folding: an operator whose children all carry a constant is
///     replaced by the folded constant when the result is finite;
///   - parameter folding: operators over anonymous placeholders that add no
///     degree of freedom collapse (t+t -> t, recip(t) -> t, 2*t -> t,
///     (t*x)/t -> t*x).
/// A class that is known to be constant keeps only its constant leaf.
/// Merges are deferred: call rebuild() to restore congruence closure and the
/// analyses. insert() alone keeps the graph canonical.
class EGraph {
 public:
  EGraph() = default;

  /// Inserts a whole expression and marks its class as a root.
  ClassId insert(const Expr& e);
  /// Adds one operator or terminal over existing classes (with folding).
  ClassId add_node(const Token& token, std::span<const ClassId> children);
  /// Non-mutating counterpart of insert(): the class the expression would
  /// land in, or nothing when some part of it is not in the graph.
  std::optional<ClassId> lookup(const Expr& e) const;
  /// True when the expression's class exists and has been evaluated.
  bool is_visited(const Expr& e) const;

  /// Unions two classes. Returns the surviving id. Call rebuild() afterwards.
  ClassId merge(ClassId a, ClassId b);
  void rebuild();
  bool needs_rebuild() const { return !pending_.empty() || !analysis_pending_.empty(); }

  ClassId find(ClassId id) const;
  bool is_canonical(ClassId id) const { return find(id) == id; }

  const ClassInfo& info(ClassId id) const { return classes_[find(id)].info; }
  /// Member nodes of a canonical class (children canonical after rebuild).
  const std::vector<ENode>& nodes(ClassId id) const { return classes_[find(id)].nodes; }
  /// Canonical class ids in increasing order.
  std::vector<ClassId> classes() const;
  /// Canonical ids reachable from `id` through children, `id` included,
  /// in breadth-first order.
  std::vector<ClassId> descendants(ClassId id) const;

  /// Smallest member of the class; ties go to the lexicographically smaller
  /// printed form. Throws std::logic_error if the class has no finite
  /// extraction.
  Expr extract_smallest(ClassId id) const;
  /// The smallest expression whose root is exactly `node`.
  Expr extract_node(const ENode& node) const;

  /// Stores the fitness of a class. Throws std::logic_error when the class
  /// was already evaluated.
  void mark_evaluated(ClassId id, EvalRecord record);
  void mark_evaluated(ClassId id, double train_loss, double val_loss, std::vector<double> params);

  /// For every expression size with evaluated classes, the <= k best by
  /// validation loss (ties: earlier evaluation first).
  std::vector<std::pair<int, std::vector<ClassId>>> top_by_size(std::size_t k) const;
  std::vector<ClassId> top_overall(std::size_t k) const;
  std::optional<ClassId> random_unevaluated(std::mt19937_64& rng) const;
  /// Unevaluated canonical classes in index order (stage-3 candidates).
  const std::vector<ClassId>& unevaluated() const { return unevaluated_; }

  std::vector<ClassId> roots() const;
  std::size_t class_count() const { return class_count_; }
  std::size_t node_count() const { return node_count_; }
  /// Total class ids ever handed out (grows by one per new e-node).
  std::size_t ids_allocated() const { return classes_.size(); }
  std::size_t evaluated_count() const { return eval_owner_.size(); }
  EGraphStats stats() const;

  /// Deterministic text dump of every canonical class.
  std::string dump() const;
  /// Throws std::logic_error describing the first broken invariant.
  void check_invariants() const;

 private:
  struct EClass {
    std::vector<ENode> nodes;
    std::vector<std::pair<ENode, ClassId>> parents;
    ClassInfo info;
  };

  struct RankKey {
    double loss;
    std::uint64_t eval_index;
    friend bool operator<(const RankKey& a, const RankKey& b) {
      if (a.loss != b.loss) return a.loss < b.loss;
      return a.eval_index < b.eval_index;
    }
  };

  // Outcome of the insertion-time normalizations.
  struct Normalized {
    enum class Kind { Node, Existing, Constant } kind = Kind::Node;
    ENode node;
    ClassId existing = 0;
    double constant = 0.0;
  };

  Normalized normalize(ENode node) const;
  ENode canonicalize(ENode node) const;
  ClassId create_class(const ENode& node);
  ClassId insert_rec(const Expr& e);
  std::optional<ClassId> lookup_rec(const Expr& e) const;
  bool has_node_with_param_child(ClassId id, Op a, Op b) const;

  void repair(ClassId id);
  void propagate_analysis(ClassId id);
  bool fold_class(ClassId id);
  void normalize_nodes(ClassId id);
  std::string render(const ENode& node) const;
  void set_root(ClassId id);

  void index_eval(ClassId id);
  void unindex_eval(const EvalRecord& rec);
  void add_unevaluated(ClassId id);
  void remove_unevaluated(ClassId id);

  std::vector<ClassId> uf_;
  std::vector<std::uint32_t> uf_size_;
  std::vector<EClass> classes_;
  std::unordered_map<ENode, ClassId, ENodeHash> hashcons_;
  std::vector<ClassId> pending_;
  std::vector<ClassId> analysis_pending_;
  std::vector<ClassId> dirty_;
  std::vector<ClassId> roots_;

  std::set<RankKey> ranked_;
  std::map<int, std::set<RankKey>> ranked_by_size_;
  std::unordered_map<std::uint64_t, ClassId> eval_owner_;
  std::uint64_t next_eval_index_ = 1;

  std::vector<ClassId> unevaluated_;
  std::vector<std::int64_t> unevaluated_pos_;

  std::size_t class_count_ = 0;
  std::size_t node_count_ = 0;
  std::size_t merges_ = 0;
};

}  // namespace symregg
