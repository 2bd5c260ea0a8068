#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "aprob/errors.hpp"
#include "aprob/prob_model.hpp"
#include "doctest.h"

using namespace aprob;

namespace {

const std::vector<std::string> kExpr = {"R1", "R2", "R3", "Add", "Sub", "Mul", "Div"};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  for (const char c : text) out.emplace_back(1, c);
  return out;
}

std::vector<std::string> repeat(const std::vector<std::string>& unit, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.insert(out.end(), unit.begin(), unit.end());
  return out;
}

}  // namespace

TEST_CASE("code lengths") {
  CHECK(code_length(Rational(1, 2)) == doctest::Approx(1.0));
  CHECK(code_length(Rational(1)) == doctest::Approx(0.0));
  CHECK(code_length(Rational(1, 343)) == doctest::Approx(3 * std::log2(7.0)).epsilon(1e-12));
  CHECK_THROWS_AS(code_length(Rational(0)), DomainError);
  CHECK_THROWS_AS(code_length(Rational(3, 2)), DomainError);
  CHECK_THROWS_AS(code_length(-0.5), DomainError);
}

TEST_CASE("kraft sums are exact") {
  const std::vector<std::uint64_t> complete{1, 2, 2};
  CHECK(kraft_sum(complete) == 1);
  const std::vector<std::uint64_t> a{0, 3, 3, 5};
  CHECK(kraft_sum(a) == Rational(41, 32));
  const std::vector<std::uint64_t> b{5, 7, 8};
  CHECK(kraft_sum(b) == Rational(11, 256));
  CHECK(to_double(kraft_sum(b)) == 0.04296875);
  CHECK(kraft_sum(std::vector<std::uint64_t>{}) == 0);
}

TEST_CASE("kraft sum of a realizable prefix code is at most one") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    // grow a random prefix code by splitting leaves
    std::vector<std::uint64_t> leaves{0};
    const int splits = static_cast<int>(rng() % 12);
    for (int s = 0; s < splits; ++s) {
      const auto at = rng() % leaves.size();
      const auto depth = leaves[at];
      leaves.erase(leaves.begin() + static_cast<long>(at));
      leaves.push_back(depth + 1);
      if (rng() % 3) leaves.push_back(depth + 1);
    }
    CHECK(kraft_sum(leaves) <= 1);
  }
}

TEST_CASE("elias gamma") {
  CHECK(elias_gamma_length(1) == 1);
  CHECK(elias_gamma_length(2) == 3);
  CHECK(elias_gamma_length(3) == 3);
  CHECK(elias_gamma_length(4) == 5);
  CHECK(elias_gamma_length(255) == 15);
  CHECK_THROWS_AS(elias_gamma_length(0), DomainError);
}

TEST_CASE("combined code length of parallel codes") {
  const std::vector<double> two{1.0, 1.0};
  CHECK(combined_code_length(two) == doctest::Approx(0.0));
  const std::vector<double> one{3.0};
  CHECK(combined_code_length(one) == doctest::Approx(3.0));
}

TEST_CASE("alphabet") {
  const Alphabet a({"x", "y", "z"});
  CHECK(a.size() == 3);
  CHECK(a.id("y") == 1);
  CHECK_FALSE(a.find("w").has_value());
  CHECK_THROWS_AS(a.id("w"), DomainError);
  CHECK_THROWS_AS(Alphabet({"x", "x"}), DomainError);
  CHECK(a.extended("w").id("w") == 3);
}

TEST_CASE("laplace smoothing") {
  const Alphabet seven(kExpr);
  const SymbolModel uniform(seven);
  for (const auto& s : kExpr) CHECK(uniform.probability(s) == Rational(1, 7));

  const SymbolModel ab(Alphabet({"a", "b"}), {3, 0}, 1);
  CHECK(ab.probability("a") == Rational(4, 5));

  const SymbolModel r1(seven, {3, 0, 0, 0, 0, 0, 0}, 1);
  CHECK(r1.probability("R1") == Rational(2, 5));
  CHECK_THROWS_AS(r1.probability("Mod"), DomainError);

  const SymbolModel half(Alphabet({"a", "b", "c"}), {1, 0, 2}, Rational(1, 2));
  CHECK(half.probability("a") == Rational(3, 9));
}

TEST_CASE("probabilities sum to one exactly") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 9;
    std::vector<std::string> symbols;
    std::vector<std::uint64_t> counts;
    for (std::size_t i = 0; i < n; ++i) {
      symbols.push_back("s" + std::to_string(i));
      counts.push_back(rng() % 20);
    }
    const SymbolModel m(Alphabet(symbols), counts, Rational(1 + rng() % 3, 1 + rng() % 4));
    Rational total = 0;
    for (SymbolId s = 0; s < n; ++s) total += m.probability(s);
    CHECK(total == 1);
  }
}

TEST_CASE("sequence probability") {
  const SymbolModel uniform{Alphabet(kExpr)};
  const std::vector<std::string> program{"R1", "R2", "Add"};
  CHECK(uniform.sequence_probability(program) == Rational(1, 343));
  CHECK(uniform.sequence_probability(std::vector<std::string>{}) == 1);

  const SymbolModel ab(Alphabet({"a", "b"}), {1, 1}, 1);
  CHECK(ab.sequence_probability(split("ab")) == Rational(1, 4));

  // multiplicative over concatenation with frozen counts
  const auto s = split("abba");
  const auto t = split("bab");
  auto st = s;
  st.insert(st.end(), t.begin(), t.end());
  CHECK(ab.sequence_probability(st) == ab.sequence_probability(s) * ab.sequence_probability(t));
}

TEST_CASE("observe") {
  const SymbolModel m(Alphabet({"a", "b"}));
  const auto after = m.observed(split("aab"));
  CHECK(after.count("a") == 2);
  CHECK(after.count("b") == 1);
  CHECK(m.observed(std::vector<std::string>{}) == m);
  CHECK_THROWS_AS(m.observed(split("abc")), DomainError);
}

TEST_CASE("conditional model back-off") {
  const ConditionalModel start(Alphabet(kExpr), ContextSchema::position_and_token);
  CHECK(start.probability("R1", 0, "+") == Rational(1, 7));

  auto m = start.observed(std::vector<std::string>{"R1", "R2", "Add"}, "+");
  m = m.observed(std::vector<std::string>{"R1", "R2", "Mul"}, "x");
  m = m.observed(std::vector<std::string>{"R1", "R2", "Add"}, "+");
  CHECK(m.probability("R1", 0) == Rational(2, 5));
  CHECK(m.probability("Add", 2, "+") == Rational(3, 9));
  CHECK(m.probability("Mul", 2, "x") == Rational(2, 8));
  // unseen token at a seen position falls back to the position
  CHECK(m.probability("R1", 0, "-") == Rational(2, 5));
  // unseen position falls back to the pooled model
  CHECK(m.probability("R1", 7) == Rational(4, 16));

  for (const auto& [key, model] : m.contexts()) {
    Rational total = 0;
    for (SymbolId s = 0; s < model.alphabet().size(); ++s) total += model.probability(s);
    CHECK(total == 1);
  }
}

TEST_CASE("position-only schema ignores the token") {
  auto m = ConditionalModel(Alphabet(kExpr), ContextSchema::position)
               .observed(std::vector<std::string>{"R1", "R2", "Add"}, "+");
  CHECK(m.probability("Add", 2, "+") == m.probability("Add", 2, "x"));
  CHECK(parse_context_schema(to_string(ContextSchema::position_and_token)) == ContextSchema::position_and_token);
}

TEST_CASE("substitution is greedy and non-overlapping") {
  const auto aaaa = split("aaaa");
  const auto aa = split("aa");
  CHECK(substitute(aaaa, aa, "X") == std::vector<std::string>{"X", "X"});
  CHECK(substitute(split("aaa"), aa, "X") == std::vector<std::string>{"X", "a"});
  CHECK(count_occurrences(split("aaaaa"), aa) == 2);
  CHECK(count_occurrences(split("abcab"), split("ab")) == 2);
}

TEST_CASE("defining a composite") {
  const ProbabilityModel base(Alphabet({"a", "b"}), 1, ContextSchema::position);
  const auto model = base.observed(split("ababab"));
  const auto def = model.define_composite(split("ab"));
  CHECK(def.model.corpus().size() == 3);
  // gamma(2) + 2 * log2(rank 2) for the definition, three uses at 4/6 each, against six 1/2 codes
  CHECK(def.delta_bits == doctest::Approx(5 + 3 * std::log2(6.0 / 4) - 6).epsilon(1e-12));
  CHECK(def.delta_bits == doctest::Approx(def.model.description_length() - model.description_length()).epsilon(1e-12));
  std::vector<std::string> ab10;
  for (int i = 0; i < 10; ++i) ab10.insert(ab10.end(), {"a", "b"});
  const auto longer = base.observed(ab10).define_composite(split("ab"));
  CHECK(longer.delta_bits == doctest::Approx(5 + 10 * std::log2(13.0 / 11) - 20).epsilon(1e-12));
  CHECK(longer.delta_bits < 0);
  CHECK(def.model.expanded_corpus() == split("ababab"));
  CHECK(def.model.symbols().count(def.symbol) == 3);
  CHECK(def.model.symbols().count("a") == 0);

  const auto a4 = base.observed(split("aaaa")).define_composite(split("aa"));
  CHECK(a4.model.corpus() == std::vector<std::string>{a4.symbol, a4.symbol});

  CHECK_THROWS_AS(model.define_composite(split("a")), DomainError);
  CHECK_THROWS_AS(model.define_composite(split("ac")), DomainError);
}

TEST_CASE("a phrase that never occurs costs at least its definition") {
  const ProbabilityModel base(Alphabet({"a", "b", "c"}), 1, ContextSchema::position);
  const auto model = base.observed(split("abab"));
  const auto def = model.define_composite(split("ca"));
  const double cost = definition_cost(def.model.composites().definitions().back(), def.model.alphabet());
  CHECK(cost > 0);
  CHECK(def.delta_bits >= cost);

  // with an empty corpus only the table grows
  const auto empty = base.define_composite(split("ca"));
  CHECK(empty.delta_bits == doctest::Approx(cost));
}

TEST_CASE("total description length") {
  const ProbabilityModel ab(Alphabet({"a", "b"}), 1, ContextSchema::position);
  CHECK(ab.description_length() == 0.0);
  const SymbolModel uniform(Alphabet({"a", "b"}));
  CHECK(total_description_length(uniform, {}, split("ab")) == doctest::Approx(2.0));

  std::vector<std::string> corpus = repeat({"a", "b"}, 100);
  const auto model = ab.observed(corpus);
  const auto def = model.define_composite(split("ab"));
  CHECK(def.model.description_length() < model.description_length());
}

TEST_CASE("nested composites expand to base symbols") {
  const ProbabilityModel base(Alphabet({"a", "b"}), 1, ContextSchema::position);
  const auto corpus = repeat({"a", "a"}, 32);
  auto m = base.observed(corpus).define_composite(split("aa"));
  const auto outer = m.model.define_composite(std::vector<std::string>{m.symbol, m.symbol});
  CHECK(outer.model.corpus().size() == 16);
  CHECK(outer.model.expanded_corpus() == corpus);
  CHECK(outer.model.composites().expand(std::vector<std::string>{outer.symbol}) == split("aaaa"));
}

TEST_CASE("composite names stay unique") {
  const ProbabilityModel base(Alphabet({"a", "b", "{a,b}"}), 1, ContextSchema::position);
  const auto def = base.observed(split("abab")).define_composite(split("ab"));
  CHECK(def.symbol != "{a,b}");
  CHECK(def.model.alphabet().contains(def.symbol));
}

TEST_CASE("observe on a model with composites re-encodes new tokens") {
  const ProbabilityModel base(Alphabet({"a", "b"}), 1, ContextSchema::position);
  const auto def = base.observed(split("abab")).define_composite(split("ab"));
  const auto more = def.model.observed(split("abb"));
  CHECK(more.corpus().size() == 4);
  CHECK(more.expanded_corpus() == split("abababb"));
}

TEST_CASE("model invariants are checked on reassembly") {
  const ProbabilityModel base(Alphabet({"a", "b"}), 1, ContextSchema::position);
  const auto m = base.observed(split("abab"));
  CHECK_NOTHROW(ProbabilityModel(m.symbols(), m.contexts(), m.composites(), m.corpus()));
  CHECK_THROWS_AS(ProbabilityModel(m.symbols().with_counts({5, 0}), m.contexts(), m.composites(), m.corpus()),
                  DomainError);
}
