#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "aprob/applications.hpp"
#include "aprob/errors.hpp"
#include "aprob/io.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aprob;

namespace {

// Every complete plan for `label`, with its path probability.
std::vector<std::pair<std::string, Rational>> plan_leaves(const PlannerSpec& s, const std::string& label,
                                                          std::size_t depth) {
  std::vector<std::pair<std::string, Rational>> out;
  if (s.p[2] != 0) out.emplace_back("M3(" + label + ")", s.p[2]);
  if (s.p[3] != 0) out.emplace_back("M4(" + label + ")", s.p[3]);
  if (depth >= s.max_depth) return out;
  if (s.p[0] != 0) {
    std::vector<std::pair<std::string, Rational>> partial{{"", s.p[0]}};
    for (std::size_t i = 1; i <= s.split_arity; ++i) {
      std::vector<std::pair<std::string, Rational>> grown;
      for (const auto& [text, p] : partial) {
        for (const auto& [sub, q] : plan_leaves(s, label + "." + std::to_string(i), depth + 1)) {
          grown.emplace_back(text + (i > 1 ? "," : "") + sub, p * q);
        }
      }
      partial = std::move(grown);
    }
    for (const auto& [text, p] : partial) out.emplace_back("M1(" + text + ")", p);
  }
  if (s.p[1] != 0) {
    for (std::size_t i = 1; i <= s.alternatives; ++i) {
      for (const auto& [sub, q] : plan_leaves(s, label + "~" + std::to_string(i), depth + 1)) {
        out.emplace_back("M2(" + sub + ")", s.p[1] / s.alternatives * q);
      }
    }
  }
  return out;
}

std::string program_text(const InducedProgram& p) { return to_string(p.program); }

std::vector<Point> load_points(const char* name) {
  return parse_points(read_file(std::string(APROB_DATA_DIR) + "/" + name));
}

}  // namespace

TEST_CASE("triple parsing") {
  CHECK(parse_triple("35, 41, + : 76") == ExampleTriple{35, 41, "+", 76});
  CHECK(parse_triple(" -8,9,x:-72") == ExampleTriple{-8, 9, "x", -72});
  CHECK_THROWS_AS(parse_triple("35, 41 : 76"), FormatError);
  CHECK_THROWS_AS(parse_triple("a, 41, + : 76"), FormatError);
  const auto all = parse_triples(read_file(std::string(APROB_DATA_DIR) + "/algebra.txt"));
  REQUIRE(all.size() == 3);
  CHECK(all[0] == ExampleTriple{35, 41, "+", 76});
}

TEST_CASE("inducing the algebra examples") {
  const auto all = parse_triples(read_file(std::string(APROB_DATA_DIR) + "/algebra.txt"));
  const auto groups = induce_by_operator(all, expression_model());
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].first == "+");
  const auto& plus = groups[0].second;
  REQUIRE_FALSE(plus.empty());
  CHECK(program_text(plus[0]) == "R1 R2 Add");
  CHECK(plus[0].prior == Rational(1, 343));
  Rational total = 0;
  for (const auto& p : plus) {
    total += p.posterior;
    for (const auto& e : all) {
      if (e.op != "+") continue;
      CHECK(run_expr(p.program, ExprInput{e.a, e.b, e.op}).value() == e.result);
    }
  }
  CHECK(total == 1);
  CHECK(groups[1].first == "x");
  CHECK(program_text(groups[1].second[0]) == "R1 R2 Mul");
}

TEST_CASE("observing solutions raises the first-position probability") {
  auto model = expression_model();
  const Rational before = model.probability("R1", 0, "+");
  CHECK(before == Rational(1, 7));
  for (int i = 0; i < 3; ++i) model = model.observed(std::vector<std::string>{"R1", "R2", "Add"}, "+");
  CHECK(model.probability("R1", 0, "+") == Rational(2, 5));
  CHECK(model.probability("R1", 0, "+") > before);
  const std::vector<ExampleTriple> one{{20, 22, "+", 42}};
  const auto induced = induce_expr(one, model);
  CHECK(program_text(induced[0]) == "R1 R2 Add");
  CHECK(induced[0].posterior > Rational(1, 2));
}

TEST_CASE("a single ambiguous example") {
  const std::vector<ExampleTriple> one{{2, 3, "+", 6}};
  const auto induced = induce_expr(one, expression_model());
  std::vector<std::string> texts;
  for (const auto& p : induced) texts.push_back(program_text(p));
  CHECK(std::find(texts.begin(), texts.end(), "R1 R2 Mul") != texts.end());
  CHECK(std::find(texts.begin(), texts.end(), "R2 R1 Mul") != texts.end());
  for (std::size_t i = 1; i < induced.size(); ++i) CHECK(induced[i].prior <= induced[i - 1].prior);
  for (const auto& p : induced) CHECK(run_expr(p.program, ExprInput{2, 3, std::string("+")}).value() == 6);

  const std::vector<ExampleTriple> impossible{{2, 3, "+", 1000}};
  CHECK(induce_expr(impossible, expression_model()).empty());
  CHECK_THROWS_AS(induce_expr(std::vector<ExampleTriple>{}, expression_model()), DomainError);
}

TEST_CASE("planner without recursion") {
  PlannerSpec s{{Rational(0), Rational(0), Rational(7, 10), Rational(3, 10)}, 2, 2, 1};
  PlannerStream stream(s, "root");
  const auto a = stream.next();
  const auto b = stream.next();
  CHECK(a->payload == "M3(root)");
  CHECK(a->p == Rational(7, 10));
  CHECK(b->payload == "M4(root)");
  CHECK(b->p == Rational(3, 10));
  CHECK_FALSE(stream.next().has_value());
}

TEST_CASE("two-level planner") {
  const PlannerSpec s = parse_planner_spec(nlohmann::json::parse(read_file(std::string(APROB_DATA_DIR) + "/planner.json")));
  PlannerStream stream(s, "root");
  std::vector<Candidate> out;
  while (auto c = stream.next()) out.push_back(*c);
  REQUIRE(out.size() == 6);
  CHECK(out[0].payload == "M3(root)");
  CHECK(out[0].p == Rational(1, 2));
  CHECK(out[2].payload == "M1(M3(root.1),M3(root.2))");
  CHECK(out[2].p == Rational(2, 5) * Rational(1, 2) * Rational(1, 2));
}

TEST_CASE("planner emissions match the recursive expansion") {
  const std::vector<PlannerSpec> specs{
      {{Rational(3, 10), Rational(1, 5), Rational(2, 5), Rational(1, 10)}, 2, 2, 3},
      {{Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)}, 3, 2, 3},
      {{Rational(1, 2), Rational(0), Rational(1, 3), Rational(1, 6)}, 2, 1, 3},
  };
  for (const auto& s : specs) {
    auto expected = plan_leaves(s, "root", 1);
    std::map<std::string, Rational> by_text(expected.begin(), expected.end());
    PlannerStream stream(s, "root");
    std::vector<Candidate> out;
    Rational mass = 0;
    while (auto c = stream.next()) {
      if (!out.empty()) CHECK(c->p <= out.back().p);
      REQUIRE(by_text.count(c->payload) == 1);
      CHECK(by_text[c->payload] == c->p);
      mass += c->p;
      out.push_back(*c);
    }
    CHECK(out.size() == expected.size());
    CHECK(mass <= 1);
  }
}

TEST_CASE("deep planner streams never increase over 200 emissions") {
  PlannerSpec s{{Rational(3, 10), Rational(1, 5), Rational(2, 5), Rational(1, 10)}, 2, 3, 12};
  PlannerStream stream(s, "root");
  Rational previous = 2;
  Rational mass = 0;
  for (int i = 0; i < 200; ++i) {
    const auto c = stream.next();
    REQUIRE(c.has_value());
    CHECK(c->p <= previous);
    previous = c->p;
    mass += c->p;
  }
  CHECK(mass <= 1);
}

TEST_CASE("planner validation") {
  CHECK_THROWS_AS(validate({{Rational(1, 2), Rational(1, 2), Rational(1, 2), 0}, 2, 2, 1}), DomainError);
  CHECK_THROWS_AS(validate({{Rational(-1, 2), 0, 0, 0}, 2, 2, 1}), DomainError);
  CHECK_THROWS_AS(validate({{0, 0, 1, 0}, 2, 2, 0}), DomainError);
}

TEST_CASE("analogy scores") {
  const std::vector<std::uint64_t> a{100, 103, 103, 105};
  const std::vector<std::uint64_t> b{105, 107, 108};
  const auto s = analogy_score(a, b);
  CHECK(s.common_length == 100);
  // 1 + 2^-3 + 2^-3 + 2^-5 and 2^-5 + 2^-7 + 2^-8
  CHECK(s.mass_a == Rational(41, 32));
  CHECK(s.mass_b == Rational(11, 256));
  CHECK(to_double(s.mass_a) == 1.28125);
  CHECK(to_double(s.mass_b) == 0.04296875);
  CHECK(s.ratio == doctest::Approx(328.0 / 11).epsilon(1e-12));

  CHECK(analogy_score(a, a).ratio == 1.0);
  const std::vector<std::uint64_t> one{1};
  const std::vector<std::uint64_t> two{2};
  CHECK(analogy_score(one, two).ratio == 2.0);
  CHECK_THROWS_AS(analogy_score(std::vector<std::uint64_t>{}, two), DomainError);
}

TEST_CASE("analogy ratios depend only on length differences") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint64_t> a;
    std::vector<std::uint64_t> b;
    for (std::size_t i = 0, n = 1 + rng() % 5; i < n; ++i) a.push_back(1 + rng() % 30);
    for (std::size_t i = 0, n = 1 + rng() % 5; i < n; ++i) b.push_back(1 + rng() % 30);
    const std::uint64_t shift = rng() % 1000;
    auto a2 = a;
    auto b2 = b;
    for (auto& l : a2) l += shift;
    for (auto& l : b2) l += shift;
    CHECK(analogy_score(a, b).ratio == analogy_score(a2, b2).ratio);
  }
}

TEST_CASE("signed gamma code") {
  for (std::int64_t v = -40; v <= 40; ++v) CHECK(signed_gamma_length(v) == oracle::signed_gamma_bits(v));
  CHECK(signed_gamma_length(0) == 1);
  CHECK(signed_gamma_length(1) == 3);
  CHECK(signed_gamma_length(-1) == 3);
  CHECK(quantize(0.25, 0.1) == 3);
  CHECK(quantize(-0.25, 0.1) == -3);
  CHECK_THROWS_AS(quantize(1.0, 0.0), DomainError);
}

TEST_CASE("two one-dimensional clusters") {
  const auto points = load_points("two_clusters_1d.txt");
  const auto best = mdl_cluster(points, 3, 0.1);
  CHECK(best.centers.size() == 2);
  const auto one = cluster_with(points, 1, 0.1, 0);
  CHECK(best.total_bits < one.total_bits);
  CHECK(best.total_bits == oracle::cluster_bits(points, best.centers, best.assignments, 0.1));
  CHECK(one.total_bits == oracle::cluster_bits(points, one.centers, one.assignments, 0.1));
  CHECK(best.assignments[0] == best.assignments[2]);
  CHECK(best.assignments[3] == best.assignments[5]);
  CHECK(best.assignments[0] != best.assignments[3]);
}

TEST_CASE("two-dimensional clusters") {
  const auto points = load_points("two_clusters_2d.txt");
  const auto best = mdl_cluster(points, 4, 0.1, 3);
  CHECK(best.centers.size() == 2);
  CHECK(best.total_bits == oracle::cluster_bits(points, best.centers, best.assignments, 0.1));
  CHECK(best.total_bits <= cluster_with(points, 1, 0.1, 3).total_bits);
}

TEST_CASE("cluster edge cases") {
  const std::vector<Point> single{{0.5}};
  const auto s = mdl_cluster(single, 3, 0.1);
  CHECK(s.centers.size() == 1);
  // a zero residual still costs the one-bit gamma code of 0
  CHECK(s.total_bits == oracle::signed_gamma_bits(5) + 0 + oracle::signed_gamma_bits(0));

  const std::vector<Point> same(7, Point{2.0, -1.0});
  for (std::size_t max = 1; max <= 5; ++max) CHECK(mdl_cluster(same, max, 0.5).centers.size() == 1);

  CHECK_THROWS_AS(mdl_cluster(single, 3, 0.0), DomainError);
  CHECK_THROWS_AS(mdl_cluster(std::vector<Point>{}, 3, 0.1), DomainError);
  CHECK_THROWS_AS(mdl_cluster(std::vector<Point>{{1.0}, {1.0, 2.0}}, 3, 0.1), DomainError);
}

TEST_CASE("cluster searches agree across worker counts and beat one center") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point> points;
    for (int c = 0; c < 3; ++c) {
      for (int i = 0; i < 8; ++i) points.push_back({c * 8.0 + noise(rng), -c * 5.0 + noise(rng)});
    }
    const auto seq = mdl_cluster(points, 5, 0.2, static_cast<std::uint64_t>(trial), 1);
    const auto par = mdl_cluster(points, 5, 0.2, static_cast<std::uint64_t>(trial), 4);
    CHECK(seq.total_bits == par.total_bits);
    CHECK(seq.centers == par.centers);
    CHECK(seq.assignments == par.assignments);
    CHECK(seq.total_bits == oracle::cluster_bits(points, seq.centers, seq.assignments, 0.2));
    CHECK(seq.total_bits <= cluster_with(points, 1, 0.2, static_cast<std::uint64_t>(trial)).total_bits);
  }
}

TEST_CASE("points parsing") {
  const auto p = parse_points("1 2\n\n3.5 -4\n");
  REQUIRE(p.size() == 2);
  CHECK(p[1] == Point{3.5, -4.0});
  CHECK_THROWS_AS(parse_points("1 x\n"), FormatError);
}
