#include <doctest.h>

#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "support.hpp"
#include "symregg/harness.hpp"
#include "symregg/paes.hpp"

using namespace symregg;

namespace {

const Op kDefaultOps[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::PowAbs, Op::Recip};

std::vector<Token> x_and_theta() { return {Token::variable(0), Token::anon_param()}; }

// Reference trees: every shape, every labeling, no deduplication.
std::vector<Expr> naive_trees(int size, const std::vector<Token>& terms, std::span<const Op> ops) {
  std::vector<Expr> out;
  if (size == 1) {
    for (const auto& t : terms) out.emplace_back(t);
    return out;
  }
  for (Op op : ops) {
    if (arity(op) == 1) {
      for (auto& c : naive_trees(size - 1, terms, ops)) out.emplace_back(op, c);
      continue;
    }
    for (int l = 1; l + 1 < size; ++l) {
      auto left = naive_trees(l, terms, ops);
      auto right = naive_trees(size - 1 - l, terms, ops);
      for (auto& a : left) {
        for (auto& b : right) out.emplace_back(op, a, b);
      }
    }
  }
  return out;
}

Expr sorted_commutative(const Expr& e) {
  if (e.token().is_terminal()) return e;
  std::vector<Expr> kids;
  for (const auto& c : e.children()) kids.push_back(sorted_commutative(c));
  if (kids.size() == 2 && is_commutative(e.token().op) && to_string(kids[1]) < to_string(kids[0])) {
    std::swap(kids[0], kids[1]);
  }
  return Expr::make(e.token(), std::move(kids));
}

// Insert with folding, reordering commutative arguments until stable.
ClassId insert_normalized(EGraph& g, const Expr& e) {
  Expr cur = sorted_commutative(e);
  ClassId id = g.insert(cur);
  for (int round = 0; round < 8; ++round) {
    Expr next = sorted_commutative(g.extract_smallest(id));
    if (next == cur) break;
    cur = next;
    id = g.insert(cur);
  }
  return id;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

TEST_SUITE("paes") {
  TEST_CASE("enumeration examples") {
    auto t = x_and_theta();
    auto one = enumerate(1, t, kDefaultOps);
    REQUIRE(one.size() == 2);
    CHECK(one[0] == parse("x0"));
    CHECK(one[1] == parse("t"));

    const Op plus[] = {Op::Add};
    auto three = enumerate(3, t, plus);
    std::set<std::string> text;
    for (const auto& e : three) text.insert(to_string(e));
    CHECK(text == std::set<std::string>{"x0", "t", "(x0 + x0)", "(x0 + t)"});
  }

  TEST_CASE("enumeration counts") {
    auto t = x_and_theta();
    // Cumulative counts. Sizes 1-3 checked by hand: {x0, t}, recip(x0), then
    // recip(recip(x0)) and 12 binary combinations; larger sizes are frozen.
    const std::size_t expected[] = {2, 3, 16, 44, 264, 1000};
    std::size_t previous = 0;
    for (int s = 1; s <= 6; ++s) {
      const std::size_t n = enumerate(s, t, kDefaultOps).size();
      CHECK(n == expected[s - 1]);
      CHECK(n > previous);
      previous = n;
    }
  }

  TEST_CASE("projected-count guard") {
    auto t = x_and_theta();
    // Raw trees: 2 leaves, 2 recips, 2 recips of recips + 5 binary ops * 2 * 2.
    CHECK(projected_count(3, 2, kDefaultOps) == 26);
    CHECK_THROWS_AS(enumerate(12, t, kDefaultOps), std::length_error);
    CHECK_THROWS_AS(enumerate(5, t, kDefaultOps, 100), std::length_error);
  }

  TEST_CASE("enumeration is complete against generate-all-trees") {
    auto t = x_and_theta();
    for (int max_size = 1; max_size <= 5; ++max_size) {
      auto listed = enumerate(max_size, t, kDefaultOps);
      EGraph g;
      std::unordered_set<ClassId> ids;
      for (const auto& e : listed) ids.insert(insert_normalized(g, e));
      CHECK(ids.size() == listed.size());  // nothing listed twice
      std::size_t missing = 0;
      for (int s = 1; s <= max_size; ++s) {
        for (const auto& e : naive_trees(s, t, kDefaultOps)) {
          if (!ids.count(insert_normalized(g, e))) ++missing;
        }
      }
      CHECK_MESSAGE(missing == 0, "max_size " << max_size);
    }
  }

  TEST_CASE("permutation basics") {
    auto items = enumerate(4, x_and_theta(), kDefaultOps);
    REQUIRE(items.size() >= 40);
    auto a = permuted_sample(items, 1);
    auto b = permuted_sample(items, 2);
    auto a2 = permuted_sample(items, 1);
    CHECK(a.size() == items.size());
    std::set<std::string> seen;
    for (const auto& e : a) seen.insert(to_string(e));
    CHECK(seen.size() == items.size());
    CHECK(a == a2);
    CHECK(a != b);

    auto big = enumerate(5, x_and_theta(), kDefaultOps);
    REQUIRE(big.size() >= 100);
    CHECK(permuted_sample(big, 1) != permuted_sample(big, 2));
  }

  TEST_CASE("permutation positions are uniform") {
    std::vector<Expr> items;
    for (int i = 0; i < 10; ++i) items.emplace_back(Token::constant(i));
    std::vector<std::size_t> counts(100, 0);
    for (std::uint64_t s = 0; s < 10000; ++s) {
      auto p = permuted_sample(items, s);
      for (std::size_t pos = 0; pos < 10; ++pos) counts[static_cast<std::size_t>(p[pos].token().value) * 10 + pos]++;
    }
    CHECK(testing::chi_square_uniform(counts) < 126.0826);  // chi2(81), p = 0.001
  }

  TEST_CASE("fingerprints") {
    Probe probe = make_probe(1, 20, 4, 5);
    CHECK(fingerprint(parse("(2 * x0)"), probe) == fingerprint(parse("(x0 + x0)"), probe));
    Probe two{{{0.5}, {2.0}}, {}};
    CHECK(fingerprint(parse("x0"), two) != fingerprint(parse("recip(x0)"), two));
    auto fp = fingerprint(parse("log((x0 - 5))"), probe);
    CHECK(std::isnan(fp[0]));
    CHECK(fingerprint_key(fp) == fingerprint_key(fingerprint(parse("log((x0 - 6))"), probe)));
    // Rounding hides last-bit noise.
    CHECK(fingerprint(parse("((x0 * 3) / 3)"), probe) == fingerprint(parse("x0"), probe));
  }

  TEST_CASE("fingerprint grouping equals pairwise union-find closure") {
    auto listed = enumerate(5, x_and_theta(), kDefaultOps);
    Probe probe = make_probe(1, 12, 8, 21);
    std::vector<std::vector<double>> fps;
    std::unordered_map<std::string, int> keys;
    for (const auto& e : listed) {
      fps.push_back(fingerprint(e, probe));
      keys.emplace(fingerprint_key(fps.back()), 0);
    }
    UnionFind uf(listed.size());
    auto same = [](const std::vector<double>& a, const std::vector<double>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] == b[i] || (std::isnan(a[i]) && std::isnan(b[i])))) return false;
      }
      return true;
    };
    for (std::size_t i = 0; i < fps.size(); ++i) {
      for (std::size_t j = i + 1; j < fps.size(); ++j) {
        if (same(fps[i], fps[j])) uf.unite(i, j);
      }
    }
    std::set<std::size_t> components;
    for (std::size_t i = 0; i < fps.size(); ++i) components.insert(uf.find(i));
    CHECK(components.size() == keys.size());
    CHECK(keys.size() < listed.size());
  }

  TEST_CASE("full traversal visits each expression once") {
    Dataset d = testing::grid_1d(20, 0.5, 2, [](double x) { return 1.5 * x + 0.5; });
    PaesConfig cfg;
    cfg.max_size = 4;
    cfg.fit = FitConfig{Loss::MSE, 50, 2, 1.0, 0};
    cfg.seed = 3;
    auto res = run_paes(d, cfg);
    auto listed = enumerate(4, make_terminals(1, 0), cfg.ops);
    CHECK(res.space_size == listed.size());
    REQUIRE(res.trace.size() == listed.size());
    std::multiset<std::string> want, got;
    for (const auto& e : listed) want.insert(to_string(relabel_params(e)));
    for (const auto& r : res.trace) got.insert(r.expr);
    CHECK(got == want);
    for (std::size_t i = 0; i < res.trace.size(); ++i) {
      CHECK(res.trace[i].eval_index == i + 1);
      CHECK(res.trace[i].method == Method::Paes);
    }
    auto curve = best_so_far(res.trace);
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] <= curve[i - 1]);
  }

  TEST_CASE("parallel and serial fitting give the same trace") {
    Dataset d = testing::grid_1d(20, 0.5, 2, [](double x) { return x * x; });
    PaesConfig cfg;
    cfg.max_size = 4;
    cfg.fit = FitConfig{Loss::MSE, 30, 2, 1.0, 0};
    auto par = run_paes(d, cfg);
    cfg.parallel = false;
    auto ser = run_paes(d, cfg);
    REQUIRE(par.trace.size() == ser.trace.size());
    for (std::size_t i = 0; i < par.trace.size(); ++i) {
      CHECK(par.trace[i].expr == ser.trace[i].expr);
      CHECK(testing::close_rel(par.trace[i].train_loss, ser.trace[i].train_loss, 0));
    }
  }

  TEST_CASE("evaluation cap and exhausted status") {
    Dataset d = testing::grid_1d(10, 0.5, 2, [](double x) { return x; });
    PaesConfig cfg;
    cfg.max_size = 3;
    cfg.fit = FitConfig{Loss::MSE, 10, 1, 1.0, 0};
    cfg.evaluations = 5;
    auto capped = run_paes(d, cfg);
    CHECK(capped.trace.size() == 5);
    CHECK(capped.status == RunStatus::Completed);
    cfg.evaluations = 10000;
    auto all = run_paes(d, cfg);
    CHECK(all.trace.size() == all.space_size);
    CHECK(all.status == RunStatus::Exhausted);
  }
}
