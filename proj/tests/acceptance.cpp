// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "aprob/applications.hpp"
#include "aprob/errors.hpp"
#include "aprob/io.hpp"
#include "aprob/search.hpp"
#include "aprob/universal_prior.hpp"
#include "aprob/update.hpp"
#include "oracles.hpp"

using namespace aprob;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string data(const char* name) { return read_file(std::string(APROB_DATA_DIR) + "/" + name); }

Rational oracle_mass(const std::string& x, unsigned L, std::uint64_t budget) {
  return Rational(BigInt(oracle::mass_over(oracle::minimal_programs(x, L, budget), L)), BigInt(1) << L);
}

// ---------------------------------------------------------------- 1

Outcome prediction_formula() {
  const auto p = predict_next("1", 6, 1000);
  const bool exact = p.p_one == Rational(2, 3) && std::abs(to_double(p.p_one) - 2.0 / 3) < 1e-9;
  const bool masses = pm_estimate("11", 6, 1000).mass == Rational(1, 8) &&
                      pm_estimate("10", 6, 1000).mass == Rational(1, 16) &&
                      oracle_mass("11", 6, 1000) == Rational(1, 8) && oracle_mass("10", 6, 1000) == Rational(1, 16);
  return {exact && masses, fmt::format("P(1|1) = {}, pm(11) = {}, pm(10) = {}", to_string(p.p_one),
                                       to_string(p.mass_one), to_string(p.mass_zero))};
}

// ---------------------------------------------------------------- 2

Outcome kraft_properties() {
  std::mt19937_64 rng(2);
  std::size_t violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const unsigned n = static_cast<unsigned>(rng() % 7);
    const auto x = oracle::bits_of(rng() & ((std::uint64_t{1} << n) - 1), n);
    Rational previous = 0;
    for (unsigned L = 1; L <= 12; ++L) {
      const auto programs = minimal_programs(x, L, 1000);
      const auto m = pm_estimate(x, L, 1000).mass;
      const auto split = pm_estimate(x + "0", L, 1000).mass + pm_estimate(x + "1", L, 1000).mass;
      if (!oracle::prefix_free(programs) || m < previous || m > 1 || m < split) ++violations;
      previous = m;
    }
  }
  return {violations == 0, fmt::format("200 targets x 12 depths, {} violations", violations)};
}

// ---------------------------------------------------------------- 3

Rational brute_force_min(const std::vector<Bet>& bets) {
  std::vector<std::size_t> perm(bets.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::optional<Rational> best;
  do {
    Rational spend = 0;
    Rational lose = 1;
    for (const auto i : perm) {
      spend += lose * bets[i].cost;
      lose *= 1 - bets[i].p;
    }
    if (!best || spend < *best) best = spend;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return *best;
}

Outcome bet_ordering() {
  std::mt19937_64 rng(3);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    std::vector<Bet> bets;
    for (std::size_t i = 0; i < n; ++i) {
      bets.push_back({Rational(1 + static_cast<long>(rng() % 9), 10), Rational(1 + static_cast<long>(rng() % 12))});
    }
    if (expected_spend(bets, order_bets(bets)) != brute_force_min(bets)) ++mismatches;
  }
  return {mismatches == 0, fmt::format("500 bet lists (n <= 7), {} differ from the permutation minimum", mismatches)};
}

// ---------------------------------------------------------------- 4

// Payload "cost:flag"; flag 1 marks the planted solution.
class PlantedMachine final : public Machine {
 public:
  std::string name() const override { return "planted"; }
  MachineRun run(std::string_view candidate, std::uint64_t cap) const override {
    const auto colon = candidate.find(':');
    const std::uint64_t cost = std::stoull(std::string(candidate.substr(0, colon)));
    if (cost > cap) return {false, {}, std::nullopt, cap};
    return {true, std::string(candidate.substr(colon + 1)), std::nullopt, cost};
  }
};

Outcome doubling_bound() {
  std::mt19937_64 rng(4);
  const PlantedMachine machine;
  std::vector<double> ratios;
  std::size_t bound_violations = 0;
  std::size_t unsolved = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    std::vector<long> weights;
    for (std::size_t i = 0; i < n; ++i) weights.push_back(1 + static_cast<long>(rng() % 100));
    std::sort(weights.rbegin(), weights.rend());
    const long total = std::accumulate(weights.begin(), weights.end(), 0L);
    const long denominator = total + static_cast<long>(rng() % static_cast<std::uint64_t>(total + 1));
    const std::size_t planted = rng() % n;
    std::vector<std::pair<std::string, Rational>> items;
    for (std::size_t i = 0; i < n; ++i) {
      const auto cost = 1 + rng() % 50;
      items.emplace_back(fmt::format("{}:{}", cost, i == planted ? 1 : 0), Rational(weights[i], denominator));
    }
    ListStream stream(items, Rational(total, denominator));
    const std::uint64_t t0 = std::uint64_t{1} << (rng() % 3);
    const auto r = levin_search(machine, "1", stream, {t0, std::uint64_t{1} << 40, 1});
    if (r.outcome != SearchOutcome::solved) {
      ++unsolved;
      continue;
    }
    const double scale = static_cast<double>(r.solve_steps) / to_double(r.solution->p);
    if (static_cast<double>(r.total_steps) > 4 * std::max(static_cast<double>(t0), scale)) ++bound_violations;
    ratios.push_back(static_cast<double>(r.total_steps) / scale);
  }
  std::sort(ratios.begin(), ratios.end());
  const double median = ratios.empty() ? 0.0 : ratios[ratios.size() / 2];
  std::printf("  total/(t/p) distribution over %zu solved streams:\n   ", ratios.size());
  for (const double q : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    const auto i = std::min(ratios.size() - 1, static_cast<std::size_t>(q * static_cast<double>(ratios.size())));
    std::printf(" q%.2f=%.4f", q, ratios[i]);
  }
  std::printf("\n");
  return {bound_violations == 0 && unsolved == 0 && median <= 2.5,
          fmt::format("1000 planted streams, {} over 4*max(T0, t/p), {} unsolved, median ratio {:.4f} (factor-2 bound)",
                      bound_violations, unsolved, median)};
}

// ---------------------------------------------------------------- 5

Outcome algebra_example() {
  const auto triples = parse_triples(data("algebra.txt"));
  const auto groups = induce_by_operator(triples, expression_model());
  bool top = groups.size() == 2;
  std::string found;
  for (const auto& [op, programs] : groups) {
    const std::string expected = op == "+" ? "R1 R2 Add" : "R1 R2 Mul";
    top = top && !programs.empty() && to_string(programs[0].program) == expected &&
          programs[0].prior == Rational(1, 343);
    if (!programs.empty()) found += fmt::format("{}: {} ({}) ", op, to_string(programs[0].program), to_string(programs[0].prior));
  }
  ProbabilityModel model(Alphabet(expression_model().alphabet()), 1, ContextSchema::position_and_token);
  for (const auto& t : triples) {
    const auto& best = groups[t.op == "+" ? 0 : 1].second[0].program;
    const auto tokens = parse_corpus(to_string(best));
    model = incorporate_solution(model, {"", tokens}, 1000).model;
  }
  const Rational p = model.contexts().probability("R1", 0);
  return {top && p == Rational(2, 5), fmt::format("{}| p(first = R1) after three = {}", found, to_string(p))};
}

// ---------------------------------------------------------------- 6

Outcome analogy_example() {
  const std::vector<std::uint64_t> a{100, 103, 103, 105};
  const std::vector<std::uint64_t> b{105, 107, 108};
  const auto s = analogy_score(a, b);
  // Printed values 1.28135, .0429688 and 29.3 are misprints; the exact sums are 41/32 and
  // 11/256 and their ratio is 328/11.
  const bool ok = s.common_length == 100 && s.mass_a == Rational(41, 32) && s.mass_b == Rational(11, 256) &&
                  std::abs(s.ratio - 29.818) < 1e-3;
  return {ok, fmt::format("mass_a = {} x 2^-100, mass_b = {} x 2^-100, ratio {:.6f} (printed: 1.28135, .0429688, 29.3)",
                          to_double(s.mass_a), to_double(s.mass_b), s.ratio)};
}

// ---------------------------------------------------------------- 7

Outcome compression() {
  std::vector<std::string> ab;
  for (int i = 0; i < 100; ++i) ab.insert(ab.end(), {"a", "b"});
  const auto model = ProbabilityModel(Alphabet({"a", "b"}), 1, ContextSchema::position).observed(ab);
  const auto r = compress_corpus(model, 1'000'000);
  const double reduction = 1.0 - r.ledger.l_after / r.ledger.l0;
  const bool lossless = r.model.expanded_corpus() == ab;

  std::mt19937_64 rng(7);
  const std::vector<std::string> symbols{"s0", "s1", "s2", "s3", "s4", "s5", "s6", "s7"};
  std::size_t increases = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> corpus;
    for (int i = 0; i < 50; ++i) corpus.push_back(symbols[rng() % symbols.size()]);
    const auto m = ProbabilityModel(Alphabet(symbols), 1, ContextSchema::position).observed(corpus);
    const auto c = compress_corpus(m, 100'000);
    if (c.ledger.l_after > c.ledger.l0 + 1e-9 || c.model.expanded_corpus() != corpus) ++increases;
  }
  return {reduction >= 0.4 && lossless && increases == 0,
          fmt::format("ab x100: {:.2f} -> {:.2f} bits ({:.1f}% smaller), lossless {}; random corpora lengthened: {}",
                      r.ledger.l0, r.ledger.l_after, 100 * reduction, lossless, increases)};
}

// ---------------------------------------------------------------- 8

Outcome session_loop() {
  const auto spec = parse_session_text(data("session.json"));
  std::vector<SessionProblem> problems;
  for (const auto& p : spec.problems) problems.push_back(to_session_problem(p));
  const auto result =
      run_session(problems, ProbabilityModel(Alphabet(spec.alphabet), spec.smoothing), {spec.compression_factor, 1});
  bool ledgers = true;
  bool solved = result.trace.size() == 2;
  for (const auto& e : result.trace) {
    solved = solved && e.search && e.search->outcome == SearchOutcome::solved;
    if (e.ledger && e.ledger->accepted) ledgers = ledgers && e.ledger->l_after < e.ledger->l0 + e.ledger->l_ps;
  }
  if (!solved) return {false, "a fixture problem was not solved"};
  const auto first = result.trace[0].search->total_steps;
  const auto second = result.trace[1].search->total_steps;
  return {second <= first && ledgers,
          fmt::format("total steps {} then {}; ledgers consistent: {}", first, second, ledgers)};
}

// ---------------------------------------------------------------- 9

Outcome clustering() {
  const auto points = parse_points(data("two_clusters_1d.txt"));
  const auto two = cluster_with(points, 2, 0.1, 0);
  const auto one = cluster_with(points, 1, 0.1, 0);
  const auto two_bits = oracle::cluster_bits(points, two.centers, two.assignments, 0.1);
  const auto one_bits = oracle::cluster_bits(points, one.centers, one.assignments, 0.1);
  const bool ok = two.total_bits == two_bits && one.total_bits == one_bits && two_bits < one_bits &&
                  mdl_cluster(points, 3, 0.1).centers.size() == 2;
  return {ok, fmt::format("2 centers: {} bits, 1 center: {} bits", two_bits, one_bits)};
}

// ---------------------------------------------------------------- 10

Outcome convergence() {
  constexpr unsigned depth = 14;
  constexpr std::size_t steps = 20;
  ConvergenceTrial trial;
  std::string stopped;
  try {
    trial = convergence_trial(BitSource::period_two, steps, depth, 1'000'000, 0);
  } catch (const InsufficientDepth& e) {
    stopped = e.what();
    for (std::size_t h = steps - 1; h >= 1; --h) {
      try {
        trial = convergence_trial(BitSource::period_two, h, depth, 1'000'000, 0);
        break;
      } catch (const InsufficientDepth&) {
      }
    }
  }
  double best = 0.0;
  std::printf("  step  bit  P(correct)  cum.sq.err\n");
  for (std::size_t i = 0; i < trial.steps.size(); ++i) {
    const auto& s = trial.steps[i];
    best = std::max(best, s.predicted_actual);
    std::printf("  %4zu    %c    %.6f    %.6f\n", i + 1, s.bit, s.predicted_actual, s.cumulative_error);
  }
  const bool ok = trial.steps.size() == steps && best >= 0.9;
  std::string detail = fmt::format("period-2 at depth {}: best P(correct) {:.4f} over {} of {} steps", depth, best,
                                   trial.steps.size(), steps);
  if (!stopped.empty()) detail += "; stopped: " + stopped;
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"prediction formula", prediction_formula},
      {"prefix-free and Kraft properties", kraft_properties},
      {"optimal bet ordering", bet_ordering},
      {"doubling search bound", doubling_bound},
      {"algebra induction", algebra_example},
      {"analogy masses", analogy_example},
      {"corpus compression", compression},
      {"solve and compress session", session_loop},
      {"MDL clustering", clustering},
      {"period-2 convergence", convergence},
  };
  const std::vector<double> limits{1.0, 30.0, 20.0, 0, 0, 0, 0, 0, 0, 0};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limits[i] > 0 && seconds >= limits[i]) {
      o.pass = false;
      o.detail += fmt::format("; over the {:.0f} s limit", limits[i]);
    }
    failures += !o.pass;
    std::printf("%s %2zu %s (%.3f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu of %zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
