#include <doctest.h>

#include <set>

#include "symregg/rewrite.hpp"
#include "symregg/variation.hpp"

using namespace symregg;

TEST_SUITE("variation") {
  TEST_CASE("recombination discards replacements that give a visited expression") {
    // parent1 = x + sqrt(x), parent2 = x + 2x; replacing sqrt(x) with 2x
    // would rebuild parent2, so only x + 2x, x and 2 remain.
    EGraph g;
    const Expr p1 = parse("(x0 + sqrt(x0))");
    const Expr p2 = parse("(x0 + (2 * x0))");
    g.mark_evaluated(g.insert(p1), 1, 1, {});
    g.mark_evaluated(g.insert(p2), 1, 1, {});
    std::vector<Token> terms{Token::variable(0), Token::constant(2)};
    const Op ops[] = {Op::Add, Op::Mul, Op::Sqrt};
    VariationSpace space{10, terms, ops};
    std::mt19937_64 rng(1);
    std::set<std::string> replaced;
    for (int i = 0; i < 2000; ++i) {
      auto c = recombine(g, p1, p2, space, rng);
      REQUIRE(c.has_value());
      CHECK_FALSE(g.is_visited(*c));
      if (c->token() == Token::oper(Op::Add) && c->child(0) == parse("x0") &&
          c->child(1).token() != Token::oper(Op::Sqrt)) {
        replaced.insert(to_string(c->child(1)));
      }
    }
    CHECK(replaced == std::set<std::string>{"(x0 + (2 * x0))", "x0", "2"});
  }

  TEST_CASE("recombination with only visited outcomes fails") {
    EGraph g;
    const Expr x = parse("x0");
    g.mark_evaluated(g.insert(x), 1, 1, {});
    std::vector<Token> terms{Token::variable(0)};
    const Op ops[] = {Op::Add};
    VariationSpace space{5, terms, ops};
    std::mt19937_64 rng(2);
    CHECK_FALSE(recombine(g, x, x, space, rng).has_value());
  }

  TEST_CASE("perturbation of an exhausted neighborhood fails") {
    EGraph g;
    const Expr x = parse("x0");
    g.mark_evaluated(g.insert(x), 1, 1, {});
    std::vector<Token> terms{Token::variable(0)};
    const Op ops[] = {Op::Add};
    VariationSpace space{1, terms, ops};
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) CHECK_FALSE(perturb(g, x, space, rng).has_value());
  }

  TEST_CASE("perturbation reaches exactly the unvisited neighbours") {
    // With x0 and x0 + x0 evaluated, the only unvisited expressions of size
    // <= 3 over {x0} are x0 - x0 and x0 * x0.
    EGraph g;
    const Expr parent = parse("(x0 + x0)");
    g.mark_evaluated(g.insert(parent), 1, 1, {});
    g.mark_evaluated(g.insert(parse("x0")), 1, 1, {});
    std::vector<Token> terms{Token::variable(0)};
    const Op ops[] = {Op::Add, Op::Sub, Op::Mul};
    VariationSpace space{3, terms, ops};
    std::mt19937_64 rng(4);
    std::set<std::string> out;
    for (int i = 0; i < 500; ++i) {
      auto c = perturb(g, parent, space, rng);
      if (c) out.insert(to_string(*c));
    }
    CHECK(out == std::set<std::string>{"(x0 - x0)", "(x0 * x0)"});
  }

  TEST_CASE("outputs are novel, bounded and deterministic") {
    auto rules = default_rules();
    std::vector<Token> terms{Token::variable(0), Token::variable(1), Token::anon_param()};
    const Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::PowAbs, Op::Recip};
    VariationSpace space{8, terms, ops};
    std::mt19937_64 build(6);
    EGraph g;
    std::vector<Expr> parents;
    for (int i = 0; i < 40; ++i) {
      Expr e = random_expr(8, terms, ops, build);
      ClassId c = g.insert(e);
      saturate_one_step(g, rules, {10000, g.descendants(c), 8, 1000});
      c = g.find(c);
      if (g.info(c).evaluated()) continue;
      g.mark_evaluated(c, 1, 1, {});
      parents.push_back(g.extract_smallest(c));
    }
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, parents.size() - 1);
    int produced = 0;
    for (int i = 0; i < 10000; ++i) {
      const Expr& a = parents[pick(rng)];
      auto c = (i % 2) ? perturb(g, a, space, rng) : recombine(g, a, parents[pick(rng)], space, rng);
      if (!c) continue;
      ++produced;
      REQUIRE(c->size() <= 8);
      REQUIRE_FALSE(g.is_visited(*c));
    }
    CHECK(produced > 5000);

    std::mt19937_64 r1(99), r2(99);
    for (int i = 0; i < 50; ++i) {
      auto a = perturb(g, parents[0], space, r1);
      auto b = perturb(g, parents[0], space, r2);
      REQUIRE(a.has_value() == b.has_value());
      if (a) CHECK(*a == *b);
    }
  }
}
