#include "symregg/egraph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace symregg {

namespace {

double rank_loss(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : v; }

bool param_foldable(Op op) {
  // log(t) is kept as a node so that log(t) + log(x) can still be rewritten
  // into log(t * x).
  return op != Op::Log;
}

}  // namespace

int compare(const ENode& a, const ENode& b) {
  if (int c = compare(a.token, b.token); c != 0) return c;
  for (int i = 0; i < a.arity(); ++i) {
    if (a.children[i] != b.children[i]) return a.children[i] < b.children[i] ? -1 : 1;
  }
  return 0;
}

std::size_t ENodeHash::operator()(const ENode& n) const {
  std::size_t h = hash_value(n.token);
  h ^= (static_cast<std::size_t>(n.children[0]) * 0x9e3779b97f4a7c15ULL) + (h << 6) + (h >> 2);
  h ^= (static_cast<std::size_t>(n.children[1]) * 0xc2b2ae3d27d4eb4fULL) + (h << 6) + (h >> 2);
  return h;
}

// ---------------------------------------------------------------------------
// Union-find and node bookkeeping

ClassId EGraph::find(ClassId id) const {
  while (uf_[id] != id) id = uf_[id];
  return id;
}

ENode EGraph::canonicalize(ENode node) const {
  for (int i = 0; i < node.arity(); ++i) node.children[i] = find(node.children[i]);
  return node;
}

std::string EGraph::render(const ENode& node) const {
  const Token& t = node.token;
  if (t.is_terminal()) return to_string(t);
  const auto& a = classes_[find(node.children[0])].info.best_text;
  if (t.arity() == 1) return std::string(symbol(t.op)) + "(" + a + ")";
  const auto& b = classes_[find(node.children[1])].info.best_text;
  if (t.op == Op::PowAbs) return "powabs(" + a + ", " + b + ")";
  return "(" + a + " " + std::string(symbol(t.op)) + " " + b + ")";
}

bool EGraph::has_node_with_param_child(ClassId id, Op a, Op b) const {
  for (const ENode& n : classes_[find(id)].nodes) {
    if (n.token.kind != TokenKind::Op || (n.token.op != a && n.token.op != b)) continue;
    for (ClassId c : n.kids()) {
      if (classes_[find(c)].info.is_param) return true;
    }
  }
  return false;
}

EGraph::Normalized EGraph::normalize(ENode node) const {
  Normalized out;
  node = canonicalize(node);
  const Token& t = node.token;
  if (t.kind != TokenKind::Op) {
    out.node = node;
    return out;
  }

  bool all_const = true;
  double vals[2] = {0.0, 0.0};
  for (int i = 0; i < node.arity(); ++i) {
    const auto& cv = classes_[node.children[i]].info.const_value;
    if (!cv) {
      all_const = false;
      break;
    }
    vals[i] = *cv;
  }
  if (all_const) {
    double v = apply(t.op, vals[0], vals[1]);
    if (std::isfinite(v)) {
      out.kind = Normalized::Kind::Constant;
      out.constant = v;
      return out;
    }
  }

  auto is_param = [&](ClassId c) { return classes_[c].info.is_param; };

  bool all_param = true;
  for (ClassId c : node.kids()) all_param = all_param && is_param(c);
  if (all_param && param_foldable(t.op)) {
    out.kind = Normalized::Kind::Existing;
    out.existing = node.children[0];
    return out;
  }

  if (t.arity() == 2 && t.op != Op::PowAbs) {
    // t combined with a constant is still one free constant; multiplying
    // by 0 is not, so zero only folds under + and -.
    for (int side = 0; side < 2; ++side) {
      const auto& cv = classes_[node.children[1 - side]].info.const_value;
      if (is_param(node.children[side]) && cv && (t.op == Op::Add || t.op == Op::Sub || *cv != 0.0)) {
        out.kind = Normalized::Kind::Existing;
        out.existing = node.children[side];
        return out;
      }
    }
  }

  if (t.op == Op::Div && is_param(node.children[1])) node.token = Token::oper(Op::Mul);

  // A factor or term that is a placeholder or a constant adds nothing to an
  // expression that already has a free factor or term of the same kind.
  auto absorbable = [&](ClassId c, bool multiplicative) {
    if (is_param(c)) return true;
    const auto& cv = classes_[c].info.const_value;
    return cv && (!multiplicative || *cv != 0.0);
  };
  const Op op = node.token.op;
  for (int side = 0; side < 2 && node.arity() == 2; ++side) {
    ClassId p = node.children[side];
    ClassId other = node.children[1 - side];
    bool folds = false;
    if (op == Op::Mul || (op == Op::Div && side == 1)) {
      folds = absorbable(p, true) && has_node_with_param_child(other, Op::Mul, Op::Div);
    } else if (op == Op::Add || (op == Op::Sub && side == 1)) {
      folds = absorbable(p, false) && has_node_with_param_child(other, Op::Add, Op::Sub);
    }
    if (folds) {
      out.kind = Normalized::Kind::Existing;
      out.existing = other;
      return out;
    }
  }
  out.node = node;
  return out;
}

ClassId EGraph::create_class(const ENode& node) {
  const auto id = static_cast<ClassId>(classes_.size());
  uf_.push_back(id);
  uf_size_.push_back(1);
  classes_.emplace_back();
  unevaluated_pos_.push_back(-1);

  ClassInfo info;
  info.best_node = node;
  info.is_param = node.token.is_anon_param();
  info.param_free = !node.token.is_anon_param();
  long size = 1;
  for (ClassId c : node.kids()) {
    const ClassInfo& ci = classes_[c].info;
    size += ci.best_size;
    info.param_free = info.param_free && ci.param_free;
  }
  info.best_size = static_cast<int>(std::min<long>(size, ClassInfo::kNoExtraction));
  if (node.token.kind == TokenKind::Const) info.const_value = node.token.value;
  info.best_text = render(node);

  EClass& cls = classes_[id];
  cls.nodes.push_back(node);
  cls.info = std::move(info);
  for (ClassId c : node.kids()) classes_[c].parents.emplace_back(node, id);
  hashcons_.emplace(node, id);
  ++class_count_;
  ++node_count_;
  add_unevaluated(id);
  return id;
}

ClassId EGraph::add_node(const Token& token, std::span<const ClassId> children) {
  if (static_cast<int>(children.size()) != token.arity()) {
    throw std::invalid_argument("add_node: arity mismatch for '" + to_string(token) + "'");
  }
  ENode node{token, {0, 0}};
  for (std::size_t i = 0; i < children.size(); ++i) node.children[i] = children[i];
  Normalized n = normalize(node);
  switch (n.kind) {
    case Normalized::Kind::Existing: return find(n.existing);
    case Normalized::Kind::Constant: return add_node(Token::constant(n.constant), {});
    case Normalized::Kind::Node: break;
  }
  if (auto it = hashcons_.find(n.node); it != hashcons_.end()) return find(it->second);
  return create_class(n.node);
}

ClassId EGraph::insert_rec(const Expr& e) {
  ClassId kids[2] = {0, 0};
  for (std::size_t i = 0; i < e.children().size(); ++i) kids[i] = insert_rec(e.child(i));
  return add_node(e.token(), std::span<const ClassId>(kids, e.children().size()));
}

ClassId EGraph::insert(const Expr& e) {
  ClassId id = insert_rec(e);
  set_root(id);
  return id;
}

std::optional<ClassId> EGraph::lookup_rec(const Expr& e) const {
  ENode node{e.token(), {0, 0}};
  for (std::size_t i = 0; i < e.children().size(); ++i) {
    auto c = lookup_rec(e.child(i));
    if (!c) return std::nullopt;
    node.children[i] = *c;
  }
  Normalized n = normalize(node);
  switch (n.kind) {
    case Normalized::Kind::Existing: return find(n.existing);
    case Normalized::Kind::Constant: n.node = ENode{Token::constant(n.constant), {0, 0}}; break;
    case Normalized::Kind::Node: break;
  }
  auto it = hashcons_.find(n.node);
  if (it == hashcons_.end()) return std::nullopt;
  return find(it->second);
}

std::optional<ClassId> EGraph::lookup(const Expr& e) const { return lookup_rec(e); }

bool EGraph::is_visited(const Expr& e) const {
  auto id = lookup(e);
  return id && info(*id).evaluated();
}

void EGraph::set_root(ClassId id) {
  id = find(id);
  if (!classes_[id].info.is_root) {
    classes_[id].info.is_root = true;
    roots_.push_back(id);
  }
}

// ---------------------------------------------------------------------------
// Merging and rebuilding

ClassId EGraph::merge(ClassId a, ClassId b) {
  a = find(a);
  b = find(b);
  if (a == b) return a;
  ClassId root = a, other = b;
  if (uf_size_[b] > uf_size_[a] || (uf_size_[b] == uf_size_[a] && b < a)) std::swap(root, other);
  uf_[other] = root;
  uf_size_[root] += uf_size_[other];
  ++merges_;
  --class_count_;

  EClass& r = classes_[root];
  EClass& o = classes_[other];
  r.nodes.insert(r.nodes.end(), o.nodes.begin(), o.nodes.end());
  r.parents.insert(r.parents.end(), o.parents.begin(), o.parents.end());
  std::vector<ENode>().swap(o.nodes);
  std::vector<std::pair<ENode, ClassId>>().swap(o.parents);

  ClassInfo& ri = r.info;
  ClassInfo& oi = o.info;
  if (oi.best_size < ri.best_size || (oi.best_size == ri.best_size && oi.best_text < ri.best_text)) {
    ri.best_size = oi.best_size;
    ri.best_node = oi.best_node;
    ri.best_text = std::move(oi.best_text);
  }
  if (!ri.const_value && oi.const_value) ri.const_value = oi.const_value;
  ri.param_free = ri.param_free || oi.param_free;
  ri.is_param = ri.is_param || oi.is_param;
  ri.is_root = ri.is_root || oi.is_root;
  if (ri.eval && oi.eval) {
    // The smaller evaluated expression wins; equal sizes keep the earlier one.
    bool take_other = oi.eval->size < ri.eval->size ||
                      (oi.eval->size == ri.eval->size && oi.eval->eval_index < ri.eval->eval_index);
    if (take_other) {
      unindex_eval(*ri.eval);
      ri.eval = std::move(oi.eval);
    } else {
      unindex_eval(*oi.eval);
    }
    eval_owner_[ri.eval->eval_index] = root;
  } else if (oi.eval) {
    ri.eval = std::move(oi.eval);
    eval_owner_[ri.eval->eval_index] = root;
  }
  oi.eval.reset();

  remove_unevaluated(other);
  if (ri.evaluated()) remove_unevaluated(root);

  pending_.push_back(root);
  analysis_pending_.push_back(root);
  dirty_.push_back(root);
  return root;
}

void EGraph::repair(ClassId id) {
  auto parents = std::move(classes_[id].parents);
  classes_[id].parents.clear();
  for (const auto& [node, cls] : parents) hashcons_.erase(node);

  std::vector<std::pair<ENode, ClassId>> fresh;
  fresh.reserve(parents.size());
  for (const auto& [node, cls] : parents) {
    ENode canon = canonicalize(node);
    ClassId mine = find(cls);
    dirty_.push_back(mine);
    auto [it, inserted] = hashcons_.try_emplace(canon, mine);
    if (!inserted) {
      ClassId theirs = find(it->second);
      if (theirs != mine) mine = merge(mine, theirs);
      it->second = mine;
    }
    fresh.emplace_back(canon, mine);
  }
  std::sort(fresh.begin(), fresh.end(), [](const auto& x, const auto& y) { return compare(x.first, y.first) < 0; });
  fresh.erase(std::unique(fresh.begin(), fresh.end(), [](const auto& x, const auto& y) { return x.first == y.first; }),
              fresh.end());
  auto& target = classes_[find(id)].parents;
  target.insert(target.end(), fresh.begin(), fresh.end());
}

void EGraph::propagate_analysis(ClassId id) {
  const auto parents = classes_[id].parents;
  for (const auto& [raw, cls] : parents) {
    ENode node = canonicalize(raw);
    ClassId p = find(cls);
    bool changed = false;

    long size = 1;
    bool param_free = !node.token.is_anon_param();
    bool all_const = node.token.kind == TokenKind::Op;
    double vals[2] = {0.0, 0.0};
    for (int i = 0; i < node.arity(); ++i) {
      const ClassInfo& ci = classes_[node.children[i]].info;
      size += ci.best_size;
      param_free = param_free && ci.param_free;
      if (ci.const_value) {
        vals[i] = *ci.const_value;
      } else {
        all_const = false;
      }
    }
    {
      ClassInfo& pi = classes_[p].info;
      if (size < pi.best_size) {
        pi.best_size = static_cast<int>(size);
        pi.best_node = node;
        pi.best_text = render(node);
        changed = true;
      } else if (size == pi.best_size) {
        std::string text = render(node);
        if (text < pi.best_text) {
          pi.best_node = node;
          pi.best_text = std::move(text);
          changed = true;
        }
      }
      if (param_free && !pi.param_free) {
        pi.param_free = true;
        changed = true;
      }
    }
    if (all_const && !classes_[p].info.const_value) {
      double v = apply(node.token.op, vals[0], vals[1]);
      if (std::isfinite(v)) {
        ClassId k = add_node(Token::constant(v), {});
        p = merge(p, k);
        changed = true;
      }
    }
    if (changed) analysis_pending_.push_back(p);
  }
}

bool EGraph::fold_class(ClassId id) {
  bool merged = false;
  const std::vector<ENode> nodes = classes_[find(id)].nodes;
  for (const ENode& raw : nodes) {
    if (raw.token.is_terminal()) continue;
    Normalized r = normalize(raw);
    ClassId target = 0;
    if (r.kind == Normalized::Kind::Existing) {
      target = find(r.existing);
    } else if (r.kind == Normalized::Kind::Constant) {
      target = add_node(Token::constant(r.constant), {});
    } else {
      continue;
    }
    if (find(id) != target) {
      merge(id, target);
      merged = true;
    }
  }
  return merged;
}

void EGraph::normalize_nodes(ClassId id) {
  auto& nodes = classes_[id].nodes;
  std::size_t before = nodes.size();
  if (classes_[id].info.const_value) {
    // A folded class keeps only its constant leaf. The removed operator
    // nodes stay in the hash-cons so they still resolve to this class.
    nodes.erase(std::remove_if(nodes.begin(), nodes.end(), [](const ENode& n) { return !n.token.is_terminal(); }),
                nodes.end());
  } else {
    // Nodes that fold into another member of the class are redundant.
    auto keep = std::remove_if(nodes.begin(), nodes.end(), [&](const ENode& n) {
      return !n.token.is_terminal() && normalize(n).kind != Normalized::Kind::Node;
    });
    if (keep != nodes.begin()) nodes.erase(keep, nodes.end());
  }
  for (auto& n : nodes) n = canonicalize(n);
  std::sort(nodes.begin(), nodes.end(), [](const ENode& a, const ENode& b) { return compare(a, b) < 0; });
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  node_count_ -= before - nodes.size();
}

void EGraph::rebuild() {
  std::vector<ClassId> touched;
  while (true) {
    while (!pending_.empty() || !analysis_pending_.empty()) {
      while (!pending_.empty()) {
        std::vector<ClassId> todo;
        todo.swap(pending_);
        for (auto& c : todo) c = find(c);
        std::sort(todo.begin(), todo.end());
        todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
        for (ClassId c : todo) repair(find(c));
      }
      while (!analysis_pending_.empty() && pending_.empty()) {
        ClassId c = find(analysis_pending_.back());
        analysis_pending_.pop_back();
        propagate_analysis(c);
      }
    }
    // Merges can expose folds that insertion could not see yet.
    std::vector<ClassId> batch;
    batch.swap(dirty_);
    for (auto& c : batch) c = find(c);
    std::sort(batch.begin(), batch.end());
    batch.erase(std::unique(batch.begin(), batch.end()), batch.end());
    bool merged = false;
    for (ClassId c : batch) merged = fold_class(c) || merged;
    touched.insert(touched.end(), batch.begin(), batch.end());
    if (!merged && dirty_.empty() && !needs_rebuild()) break;
  }
  for (auto& c : touched) c = find(c);
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (ClassId c : touched) normalize_nodes(c);
}

// ---------------------------------------------------------------------------
// Queries

std::vector<ClassId> EGraph::classes() const {
  std::vector<ClassId> out;
  out.reserve(class_count_);
  for (ClassId i = 0; i < classes_.size(); ++i) {
    if (uf_[i] == i) out.push_back(i);
  }
  return out;
}

std::vector<ClassId> EGraph::descendants(ClassId id) const {
  std::vector<ClassId> out;
  std::vector<bool> seen(classes_.size(), false);
  std::deque<ClassId> queue{find(id)};
  seen[find(id)] = true;
  while (!queue.empty()) {
    ClassId c = queue.front();
    queue.pop_front();
    out.push_back(c);
    for (const ENode& n : classes_[c].nodes) {
      for (ClassId k : n.kids()) {
        k = find(k);
        if (!seen[k]) {
          seen[k] = true;
          queue.push_back(k);
        }
      }
    }
  }
  return out;
}

Expr EGraph::extract_node(const ENode& node) const {
  std::vector<Expr> kids;
  for (ClassId c : node.kids()) kids.push_back(extract_smallest(c));
  return Expr::make(node.token, std::move(kids));
}

Expr EGraph::extract_smallest(ClassId id) const {
  const ClassInfo& ci = info(id);
  if (ci.best_size == ClassInfo::kNoExtraction) {
    throw std::logic_error("class e" + std::to_string(find(id)) + " has no finite extraction");
  }
  return extract_node(ci.best_node);
}

std::vector<ClassId> EGraph::roots() const {
  std::vector<ClassId> out;
  std::vector<bool> seen(classes_.size(), false);
  for (ClassId r : roots_) {
    r = find(r);
    if (!seen[r]) {
      seen[r] = true;
      out.push_back(r);
    }
  }
  return out;
}

EGraphStats EGraph::stats() const {
  return EGraphStats{class_count_, node_count_, merges_, eval_owner_.size(), roots().size()};
}

// ---------------------------------------------------------------------------
// Evaluation bookkeeping

void EGraph::index_eval(ClassId id) {
  const EvalRecord& rec = *classes_[id].info.eval;
  RankKey key{rank_loss(rec.val_loss), rec.eval_index};
  ranked_.insert(key);
  ranked_by_size_[rec.size].insert(key);
  eval_owner_[rec.eval_index] = id;
}

void EGraph::unindex_eval(const EvalRecord& rec) {
  RankKey key{rank_loss(rec.val_loss), rec.eval_index};
  ranked_.erase(key);
  if (auto it = ranked_by_size_.find(rec.size); it != ranked_by_size_.end()) {
    it->second.erase(key);
    if (it->second.empty()) ranked_by_size_.erase(it);
  }
  eval_owner_.erase(rec.eval_index);
}

void EGraph::mark_evaluated(ClassId id, EvalRecord record) {
  id = find(id);
  ClassInfo& ci = classes_[id].info;
  if (ci.evaluated()) {
    throw std::logic_error("class e" + std::to_string(id) + " is already evaluated");
  }
  if (eval_owner_.count(record.eval_index)) {
    throw std::logic_error("evaluation index " + std::to_string(record.eval_index) + " is already in use");
  }
  if (record.size <= 0) record.size = ci.best_size;
  next_eval_index_ = std::max(next_eval_index_, record.eval_index + 1);
  ci.eval = std::move(record);
  set_root(id);
  remove_unevaluated(id);
  index_eval(id);
}

void EGraph::mark_evaluated(ClassId id, double train_loss, double val_loss, std::vector<double> params) {
  EvalRecord rec;
  rec.eval_index = next_eval_index_;
  rec.size = info(id).best_size;
  rec.train_loss = train_loss;
  rec.val_loss = val_loss;
  rec.params = std::move(params);
  mark_evaluated(id, std::move(rec));
}

std::vector<std::pair<int, std::vector<ClassId>>> EGraph::top_by_size(std::size_t k) const {
  std::vector<std::pair<int, std::vector<ClassId>>> out;
  for (const auto& [size, keys] : ranked_by_size_) {
    std::vector<ClassId> ids;
    for (const RankKey& key : keys) {
      if (ids.size() >= k) break;
      ids.push_back(find(eval_owner_.at(key.eval_index)));
    }
    out.emplace_back(size, std::move(ids));
  }
  return out;
}

std::vector<ClassId> EGraph::top_overall(std::size_t k) const {
  std::vector<ClassId> out;
  for (const RankKey& key : ranked_) {
    if (out.size() >= k) break;
    out.push_back(find(eval_owner_.at(key.eval_index)));
  }
  return out;
}

void EGraph::add_unevaluated(ClassId id) {
  if (unevaluated_pos_[id] >= 0) return;
  unevaluated_pos_[id] = static_cast<std::int64_t>(unevaluated_.size());
  unevaluated_.push_back(id);
}

void EGraph::remove_unevaluated(ClassId id) {
  std::int64_t pos = unevaluated_pos_[id];
  if (pos < 0) return;
  ClassId last = unevaluated_.back();
  unevaluated_[static_cast<std::size_t>(pos)] = last;
  unevaluated_pos_[last] = pos;
  unevaluated_.pop_back();
  unevaluated_pos_[id] = -1;
}

std::optional<ClassId> EGraph::random_unevaluated(std::mt19937_64& rng) const {
  if (unevaluated_.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, unevaluated_.size() - 1);
  return unevaluated_[pick(rng)];
}

// ---------------------------------------------------------------------------
// Diagnostics

std::string EGraph::dump() const {
  std::ostringstream os;
  os.precision(17);
  for (ClassId c : classes()) {
    const EClass& cls = classes_[c];
    const ClassInfo& ci = cls.info;
    os << "e" << c << " size=" << ci.best_size << " best=" << ci.best_text;
    if (ci.const_value) os << " const=" << to_string(Token::constant(*ci.const_value));
    if (ci.is_root) os << " root";
    if (ci.eval) {
      os << " eval=#" << ci.eval->eval_index << " train=" << ci.eval->train_loss << " val=" << ci.eval->val_loss;
    }
    os << "\n";
    std::vector<ENode> nodes;
    for (const ENode& n : cls.nodes) nodes.push_back(canonicalize(n));
    std::sort(nodes.begin(), nodes.end(), [](const ENode& a, const ENode& b) { return compare(a, b) < 0; });
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (const ENode& n : nodes) {
      os << "  " << to_string(n.token);
      if (n.arity() > 0) {
        os << "(";
        for (int i = 0; i < n.arity(); ++i) os << (i ? ", " : "") << "e" << n.children[i];
        os << ")";
      }
      os << "\n";
    }
  }
  return os.str();
}

void EGraph::check_invariants() const {
  auto fail = [](const std::string& msg) { throw std::logic_error("egraph invariant: " + msg); };
  if (needs_rebuild()) fail("graph has pending merges");
  std::unordered_map<ENode, ClassId, ENodeHash> seen;
  std::size_t evaluated = 0;
  for (ClassId c : classes()) {
    const EClass& cls = classes_[c];
    if (cls.nodes.empty()) fail("empty class e" + std::to_string(c));
    long best = ClassInfo::kNoExtraction;
    bool has_const = false;
    for (const ENode& raw : cls.nodes) {
      ENode n = canonicalize(raw);
      if (!(n == raw)) fail("non-canonical node in e" + std::to_string(c));
      auto [it, inserted] = seen.emplace(n, c);
      if (!inserted) {
        fail("node " + to_string(n.token) + " appears in e" + std::to_string(it->second) + " and e" +
             std::to_string(c));
      }
      auto hc = hashcons_.find(n);
      if (hc == hashcons_.end() || find(hc->second) != c) fail("hash-cons out of date for e" + std::to_string(c));
      long size = 1;
      for (ClassId k : n.kids()) size += classes_[k].info.best_size;
      best = std::min(best, size);
      if (n.token.kind == TokenKind::Const && cls.info.const_value &&
          Token::constant(*cls.info.const_value) == n.token) {
        has_const = true;
      }
    }
    if (best != cls.info.best_size) {
      fail("best_size of e" + std::to_string(c) + " is " + std::to_string(cls.info.best_size) + ", expected " +
           std::to_string(best));
    }
    if (cls.info.const_value && !has_const) fail("const_value without constant node in e" + std::to_string(c));
    if (cls.info.evaluated()) ++evaluated;
    bool listed = unevaluated_pos_[c] >= 0;
    if (listed == cls.info.evaluated()) fail("unevaluated index out of date for e" + std::to_string(c));
  }
  if (evaluated != ranked_.size() || evaluated != eval_owner_.size()) fail("evaluation index out of date");
}

}  // namespace symregg
