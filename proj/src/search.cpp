#include "symregg/search.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <stdexcept>

#include "symregg/variation.hpp"

namespace symregg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Init: return "init";
    case Method::Stage1: return "stage1";
    case Method::Stage2: return "stage2";
    case Method::Stage3: return "stage3";
    case Method::Stage4: return "stage4";
    case Method::Paes: return "paes";
  }
  return "?";
}

Method method_from_name(std::string_view name) {
  for (Method m : {Method::Init, Method::Stage1, Method::Stage2, Method::Stage3, Method::Stage4, Method::Paes}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view status_name(RunStatus s) { return s == RunStatus::Completed ? "completed" : "exhausted"; }

ParetoFront pareto_front(const Trace& trace) {
  std::map<int, const TraceRecord*> best;
  for (const auto& r : trace) {
    auto [it, fresh] = best.try_emplace(r.size, &r);
    if (!fresh && r.val_loss < it->second->val_loss) it->second = &r;
  }
  ParetoFront front;
  for (const auto& [size, r] : best) {
    if (!front.empty() && !(r->val_loss < front.back().loss)) continue;
    front.push_back(FrontEntry{size, r->val_loss, r->eval_index, r->expr, r->params});
  }
  return front;
}

std::vector<Token> make_terminals(std::size_t vars, int max_params) {
  std::vector<Token> out;
  for (std::size_t j = 0; j < vars; ++j) out.push_back(Token::variable(static_cast<int>(j)));
  if (max_params <= 0) {
    out.push_back(Token::anon_param());
  } else {
    for (int i = 0; i < max_params; ++i) out.push_back(Token::param(i));
  }
  return out;
}

void SearchConfig::validate(std::size_t vars) const {
  fit.validate();
  if (max_size < 1) throw std::invalid_argument("max_size must be >= 1");
  if (max_params < 0) throw std::invalid_argument("max_params must be >= 0");
  if (!(p_perturb >= 0.0 && p_perturb <= 1.0)) throw std::invalid_argument("p_perturb must be in [0, 1]");
  if (top_per_size == 0 || top_overall == 0) throw std::invalid_argument("pool sizes must be >= 1");
  const std::size_t init = make_terminals(vars, max_params).size() + 1;
  if (evaluations < init + 1) {
    throw std::invalid_argument("evaluations must be at least " + std::to_string(init + 1) +
                                " (initialization uses " + std::to_string(init) + ")");
  }
}

std::uint64_t fit_seed(std::uint64_t run_seed, std::uint64_t eval_index) {
  return splitmix64(splitmix64(run_seed) ^ eval_index);
}

Search::Search(Dataset data, SearchConfig cfg)
    : cfg_(std::move(cfg)),
      data_(std::move(data)),
      split_(split(data_, cfg_.fit.train_ratio, cfg_.seed)),
      terminals_(make_terminals(data_.vars(), cfg_.max_params)),
      rng_(cfg_.seed) {
  cfg_.validate(data_.vars());
}

SaturationOptions Search::step_options(std::vector<ClassId> scope) const {
  SaturationOptions opts;
  opts.node_budget = cfg_.node_budget;
  opts.match_limit = cfg_.match_limit;
  opts.max_term_size = cfg_.saturation_size > 0 ? cfg_.saturation_size : cfg_.max_size;
  opts.scope = std::move(scope);
  return opts;
}

std::optional<TraceRecord> Search::evaluate_class(ClassId root, Method method) {
  root = graph_.find(root);
  if (graph_.info(root).evaluated()) {
    ++current_.revisits;
    return std::nullopt;
  }
  const Expr smallest = graph_.extract_smallest(root);
  const Expr labeled = relabel_params(smallest);

  // The record graph holds only evaluated forms, each saturated one step on
  // insertion; a collision there is also a revisit.
  ClassId rec_id = records_.insert(anonymize_params(labeled));
  saturate_one_step(records_, cfg_.rules, step_options(records_.descendants(rec_id)));
  rec_id = records_.find(rec_id);
  if (const auto& prior = records_.info(rec_id).eval) {
    graph_.merge(root, record_classes_[prior->eval_index - 1]);
    graph_.rebuild();
    ++current_.revisits;
    return std::nullopt;
  }

  const std::uint64_t index = trace_.size() + 1;
  FitConfig fc = cfg_.fit;
  fc.seed = fit_seed(cfg_.seed, index);
  FitResult fr = fit_params(labeled, split_.train, split_.val, fc);

  EvalRecord rec;
  rec.eval_index = index;
  rec.size = labeled.size();
  rec.train_loss = fr.train_loss;
  rec.val_loss = fr.val_loss;
  rec.params = fr.params;
  graph_.mark_evaluated(root, rec);
  records_.mark_evaluated(rec_id, rec);
  record_classes_.push_back(root);

  TraceRecord tr{index, method, labeled.size(), fr.train_loss, fr.val_loss, to_string(labeled), fr.params};
  trace_.push_back(tr);
  current_.eval_index = index;
  current_.method = method;
  diags_.push_back(current_);
  current_ = IterationDiag{};
  return tr;
}

std::optional<TraceRecord> Search::evaluate(const Candidate& c) {
  ClassId root = graph_.insert(c.expr);
  saturate_one_step(graph_, cfg_.rules, step_options(graph_.descendants(root)));
  return evaluate_class(root, c.method);
}

std::size_t Search::initialize() {
  if (!trace_.empty()) throw std::logic_error("search already initialized");
  for (const Token& t : terminals_) {
    if (!evaluate(Candidate{Expr(t), Method::Init})) throw std::logic_error("terminal inserted twice");
  }
  for (std::size_t i = 0; i < cfg_.stage4_attempts; ++i) {
    Expr e = random_expr(cfg_.max_size, terminals_, cfg_.ops, rng_);
    if (graph_.is_visited(e)) continue;
    if (evaluate(Candidate{e, Method::Init})) break;
  }
  return trace_.size();
}

std::optional<Search::Candidate> Search::from_pool(const std::vector<ClassId>& pool, Method method,
                                                   std::size_t& attempts) {
  if (pool.empty()) return std::nullopt;
  VariationSpace space{cfg_.max_size, terminals_, cfg_.ops};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::bernoulli_distribution use_perturb(cfg_.p_perturb);
  for (std::size_t a = 0; a < cfg_.stage_attempts; ++a) {
    ++attempts;
    std::optional<Expr> child;
    if (use_perturb(rng_)) {
      child = perturb(graph_, graph_.extract_smallest(pool[pick(rng_)]), space, rng_);
    } else {
      const Expr p1 = graph_.extract_smallest(pool[pick(rng_)]);
      const Expr p2 = graph_.extract_smallest(pool[pick(rng_)]);
      child = recombine(graph_, p1, p2, space, rng_);
    }
    if (child) return Candidate{*child, method};
  }
  return std::nullopt;
}

std::optional<Search::Candidate> Search::attempt_generate() {
  std::vector<ClassId> pool;
  for (auto& [size, ids] : graph_.top_by_size(cfg_.top_per_size)) pool.insert(pool.end(), ids.begin(), ids.end());
  if (auto c = from_pool(pool, Method::Stage1, current_.stage1_attempts)) return c;

  if (auto c = from_pool(graph_.top_overall(cfg_.top_overall), Method::Stage2, current_.stage2_attempts)) return c;

  std::vector<ClassId> open;
  for (ClassId id : graph_.unevaluated()) {
    if (graph_.info(id).best_size <= cfg_.max_size) open.push_back(id);
  }
  current_.stage3_candidates = open.size();
  if (!open.empty()) {
    ClassId id = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng_)];
    return Candidate{graph_.extract_smallest(id), Method::Stage3};
  }

  for (std::size_t i = 0; i < cfg_.stage4_attempts; ++i) {
    ++current_.stage4_attempts;
    Expr e = random_expr(cfg_.max_size, terminals_, cfg_.ops, rng_);
    if (!graph_.is_visited(e)) return Candidate{e, Method::Stage4};
  }
  return std::nullopt;
}

bool Search::step() {
  // A candidate can still land in an evaluated class once saturation has
  // run; such candidates are dropped and generation starts over.
  for (std::size_t tries = 0; tries < cfg_.stage4_attempts; ++tries) {
    auto c = attempt_generate();
    if (!c) return false;
    if (evaluate(*c)) return true;
  }
  return false;
}

SearchResult Search::run() {
  const auto start = std::chrono::steady_clock::now();
  SearchResult res;
  if (trace_.empty()) initialize();
  while (trace_.size() < cfg_.evaluations) {
    if (!step()) {
      res.status = RunStatus::Exhausted;
      break;
    }
  }
  res.trace = trace_;
  res.front = pareto_front(trace_);
  res.stats = graph_.stats();
  res.diagnostics = diags_;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

SearchResult run_symregg(const Dataset& data, const SearchConfig& cfg) { return Search(data, cfg).run(); }

}  // namespace symregg
