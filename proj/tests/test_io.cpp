#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "symregg/harness.hpp"
#include "symregg/io.hpp"

using namespace symregg;

TEST_SUITE("cli") {
  TEST_CASE("csv with the target last") {
    std::istringstream in("x,y\n1,2\n2,4\n3,6\n");
    Dataset d = read_csv(in);
    CHECK(d.vars() == 1);
    CHECK(d.rows() == 3);
    CHECK(d.target()[2] == 6);
    CHECK(d.names() == std::vector<std::string>{"x"});
  }

  TEST_CASE("csv with a named target anywhere") {
    std::istringstream in("a, target ,b\n1,10,100\n2,20,200\n\n");
    Dataset d = read_csv(in, "target");
    CHECK(d.vars() == 2);
    CHECK(d.names() == std::vector<std::string>{"a", "b"});
    CHECK(d.at(1, 1) == 200);
    CHECK(d.target()[1] == 20);
  }

  TEST_CASE("csv errors") {
    auto error_of = [](const std::string& text, const std::string& target = "") -> std::string {
      std::istringstream in(text);
      try {
        read_csv(in, target);
      } catch (const InputError& e) {
        return e.what();
      }
      return "";
    };
    CHECK(error_of("x,y\n1,2\n2,3\n3,abc\n") == "row 4, column 2: non-numeric value 'abc'");
    {
      std::istringstream in("x,y\n1,2\n2,3\n3,abc\n");
      try {
        read_csv(in);
      } catch (const InputError& e) {
        CHECK(e.row() == 4);
        CHECK(e.column() == 2);
      }
    }
    CHECK(error_of("x,y\n1,2\n", "z").find("target column 'z' not found") != std::string::npos);
    CHECK(error_of("") == "empty file");
    CHECK(error_of("\n\n") == "empty file");
    CHECK(error_of("x,y\n") == "no data rows");
    CHECK(error_of("x,y\n1,2,3\n") == "row 2: expected 2 fields, found 3");
    CHECK(error_of("x,y\n1,inf\n") == "row 2, column 2: non-finite value 'inf'");
    CHECK(error_of("y\n1\n").find("at least one variable") != std::string::npos);
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), InputError);
  }

  TEST_CASE("trace round trip") {
    Trace t;
    t.push_back({1, Method::Init, 1, 0.1, 0.2, "x0", {}});
    t.push_back({2, Method::Stage3, 5, 1.0 / 3.0, std::numeric_limits<double>::infinity(), "((t0 * x0) + t1)",
                 {2.000000000000001, -1e-300}});
    t.push_back({3, Method::Paes, 3, std::nan(""), 4.0, "powabs(x0, t0)", {0.5}});
    std::stringstream buf;
    write_trace(buf, t);
    Trace back = read_trace(buf);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(back[i].eval_index == t[i].eval_index);
      CHECK(back[i].method == t[i].method);
      CHECK(back[i].size == t[i].size);
      CHECK(testing::close_rel(back[i].train_loss, t[i].train_loss, 0));
      CHECK(testing::close_rel(back[i].val_loss, t[i].val_loss, 0));
      CHECK(back[i].expr == t[i].expr);
      CHECK(back[i].params == t[i].params);
    }
  }

  TEST_CASE("trace parse errors") {
    std::istringstream wrong_fields("1\tinit\t1\n");
    CHECK_THROWS_AS(read_trace(wrong_fields), InputError);
    std::istringstream bad_method("1\tbogus\t1\t0\t0\tx0\t\n");
    CHECK_THROWS_AS(read_trace(bad_method), InputError);
  }

  TEST_CASE("re-ingesting a trace reproduces the front") {
    Dataset d = testing::sample_1d(30, 0.5, 2, [](double x) { return 1 / (x + 1); });
    SearchConfig cfg;
    cfg.evaluations = 200;
    cfg.max_size = 7;
    cfg.seed = 4;
    auto res = run_symregg(d, cfg);
    std::stringstream buf;
    write_trace(buf, res.trace);
    auto front = pareto_front(read_trace(buf));
    REQUIRE(front.size() == res.front.size());
    for (std::size_t i = 0; i < front.size(); ++i) {
      CHECK(front[i].size == res.front[i].size);
      CHECK(front[i].loss == res.front[i].loss);
      CHECK(front[i].eval_index == res.front[i].eval_index);
      CHECK(front[i].expr == res.front[i].expr);
      CHECK(front[i].params == res.front[i].params);
    }
  }

  TEST_CASE("success table") {
    std::vector<double> curve(20, 1.0);
    for (std::size_t i = 9; i < 20; ++i) curve[i] = 0.01;
    auto table = success_table({curve}, {0.1});
    REQUIRE(table.size() == 20);
    for (const auto& row : table) CHECK(row.probability == (row.eval_count >= 10 ? 1.0 : 0.0));

    auto two = success_table({curve, std::vector<double>(20, 1.0)}, {0.1, 2.0});
    REQUIRE(two.size() == 40);
    CHECK(two[9].probability == 0.5);
    CHECK(two[20].probability == 1.0);
  }

  TEST_CASE("experiment table: monotone, below-optimum threshold is all zero") {
    Dataset d = testing::grid_1d(15, 0.5, 2, [](double x) { return x * x + 0.1; });
    RunSpec spec;
    spec.algorithm = Algorithm::Paes;
    spec.paes.max_size = 3;
    spec.paes.fit = FitConfig{Loss::MSE, 50, 3, 1.0, 0};
    // The full enumeration establishes the optimum of this space.
    auto full = run_paes(d, spec.paes);
    double optimum = std::numeric_limits<double>::infinity();
    for (const auto& r : full.trace) optimum = std::min(optimum, r.train_loss);
    REQUIRE(optimum > 0);

    auto res = run_experiment(d, spec, 4, {optimum / 2, optimum * 1.0000001}, 10);
    REQUIRE(res.runs.size() == 4);
    for (const auto& row : res.table) {
      if (row.threshold < optimum) CHECK(row.probability == 0.0);
    }
    // Every run walks the whole space, so the optimum is reached by the end.
    CHECK(res.table.back().probability == 1.0);
    for (std::size_t i = 1; i < res.table.size(); ++i) {
      if (res.table[i].threshold == res.table[i - 1].threshold) {
        CHECK(res.table[i].probability >= res.table[i - 1].probability);
      }
    }
  }

  TEST_CASE("harness runs match standalone runs") {
    Dataset d = testing::sample_1d(25, 0.5, 2, [](double x) { return 2 * x / (1 + x); });
    RunSpec spec;
    spec.search.evaluations = 80;
    spec.search.max_size = 7;
    auto res = run_experiment(d, spec, 3, {1e-6}, 100);
    for (std::size_t r = 0; r < 3; ++r) {
      SearchConfig cfg = spec.search;
      cfg.seed = 100 + r;
      auto alone = run_symregg(d, cfg);
      REQUIRE(alone.trace.size() == res.runs[r].trace.size());
      for (std::size_t i = 0; i < alone.trace.size(); ++i) {
        CHECK(alone.trace[i].expr == res.runs[r].trace[i].expr);
        CHECK(alone.trace[i].train_loss == res.runs[r].trace[i].train_loss);
      }
    }
    auto serial = run_experiment(d, spec, 3, {1e-6}, 100, false);
    for (std::size_t i = 0; i < serial.table.size(); ++i) CHECK(serial.table[i].probability == res.table[i].probability);
  }

  TEST_CASE("experiment errors name the seed") {
    Dataset d = testing::grid_1d(5, 0.5, 2, [](double x) { return x; });
    RunSpec spec;
    spec.search.evaluations = 2;  // below the initialization cost
    CHECK_THROWS_WITH_AS(run_experiment(d, spec, 2, {0.1}, 7), doctest::Contains("seed 7"), std::runtime_error);
    CHECK_THROWS_AS(run_experiment(d, spec, 0, {0.1}, 7), std::invalid_argument);
    CHECK_THROWS_AS(run_experiment(d, spec, 1, {}, 7), std::invalid_argument);
  }

  TEST_CASE("report document") {
    Dataset d = testing::grid_1d(10, 0.5, 2, [](double x) { return x; });
    RunSpec spec;
    spec.search.evaluations = 20;
    spec.search.max_size = 5;
    RunResult r = run_once(d, spec, 3);
    auto doc = report_json(spec, r);
    CHECK(doc["config"]["algorithm"] == "symregg");
    CHECK(doc["config"]["seed"] == 3);
    CHECK(doc["status"] == "completed");
    CHECK(doc["evaluations"] == 20);
    CHECK(doc["egraph"]["classes"].get<std::size_t>() == r.stats.classes);
    CHECK(doc["front"].size() == r.front.size());
    CHECK(doc.contains("wall_seconds"));
  }
}
