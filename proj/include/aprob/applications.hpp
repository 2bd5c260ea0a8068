#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aprob/machines.hpp"
#include "aprob/prob_model.hpp"
#include "aprob/rational.hpp"
#include "aprob/search.hpp"

namespace aprob {

// ------------------------------------------------------ expression induction

/// "a, b, op : result"
struct ExampleTriple {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::string op;
  std::int64_t result = 0;

  friend bool operator==(const ExampleTriple&, const ExampleTriple&) = default;
};

/// Parses "35, 41, + : 76". Throws FormatError.
ExampleTriple parse_triple(std::string_view line);
/// One triple per non-blank line; '#' starts a comment.
std::vector<ExampleTriple> parse_triples(std::string_view text);

/// Uniform model over the seven expression tokens.
ConditionalModel expression_model(ContextSchema schema = ContextSchema::position_and_token);

struct InducedProgram {
  ExprProgram program;
  Rational prior;      // sequence probability under the conditional model
  Rational posterior;  // prior normalized over the programs found
};

struct InductionLimits {
  std::size_t max_len = 3;
  std::size_t max_candidates = 100000;
};

/// Programs consistent with every example, best prior first (emission order
/// breaks ties). Candidates come from the conditional model, conditioned on
/// the examples' shared operator token when there is one.
std::vector<InducedProgram> induce_expr(std::span<const ExampleTriple> examples, const ConditionalModel& model,
                                        const InductionLimits& limits = {});

/// Examples grouped by operator token (first-appearance order), each group
/// induced separately.
std::vector<std::pair<std::string, std::vector<InducedProgram>>> induce_by_operator(
    std::span<const ExampleTriple> examples, const ConditionalModel& model, const InductionLimits& limits = {});

// ------------------------------------------------------------- planning

/// Branch probabilities for each problem: P[0] split into subproblems that
/// must all be solved (M1), P[1] transform into alternatives (M2), P[2] and
/// P[3] terminal methods (M3, M4).
struct PlannerSpec {
  std::array<Rational, 4> p;
  std::size_t split_arity = 2;
  std::size_t alternatives = 2;
  std::size_t max_depth = 1;
};

void validate(const PlannerSpec& spec);

/// Best-first expansion of the planner tree. A leaf is a complete solution
/// plan, e.g. "M1(M3(root.1),M4(root.2))"; its probability is the product
/// of the branch probabilities on its path. Alternatives share P[1]
/// equally. Recursion stops at max_depth, where only M3 and M4 apply.
class PlannerStream final : public CandidateStream {
 public:
  PlannerStream(PlannerSpec spec, std::string root);
  std::optional<Candidate> next() override;
  std::optional<Rational> declared_mass() const override { return Rational(1); }

  struct Partial;

 private:
  PlannerSpec spec_;
  std::vector<std::shared_ptr<const Partial>> heap_;
  std::uint64_t serial_ = 0;
  std::size_t emitted_ = 0;
};

// --------------------------------------------------------------- analogy

struct AnalogyScore {
  std::uint64_t common_length = 0;  // masses below are scaled by 2^common_length
  Rational mass_a;
  Rational mass_b;
  double ratio = 0.0;  // mass_a / mass_b
};

AnalogyScore analogy_score(std::span<const std::uint64_t> lengths_a, std::span<const std::uint64_t> lengths_b);

// ------------------------------------------------------------ clustering

using Point = std::vector<double>;

/// Signed integers map 0, 1, -1, 2, -2, ... to 1, 2, 3, 4, 5, ... and are
/// then Elias-gamma coded.
std::uint64_t signed_gamma_length(std::int64_t value);
std::int64_t quantize(double value, double delta);

struct ClusterCoding {
  double delta = 0.0;
  std::vector<std::vector<std::int64_t>> centers;  // quantized coordinates (units of delta)
  std::vector<std::size_t> assignments;
  std::uint64_t total_bits = 0;
};

/// centers: gamma bits of each quantized coordinate; names: ceil(log2 k)
/// bits per point; residuals: gamma bits of round((x - center) / delta).
std::uint64_t coding_bits(std::span<const Point> points, const std::vector<std::vector<std::int64_t>>& centers,
                          std::span<const std::size_t> assignments, double delta);

/// Coding with (at most) k centers from seeded k-means.
ClusterCoding cluster_with(std::span<const Point> points, std::size_t k, double delta, std::uint64_t seed);

/// Tries 1..max_centers and returns the shortest coding; fewer centers win
/// ties. `workers` > 1 evaluates the center counts concurrently.
ClusterCoding mdl_cluster(std::span<const Point> points, std::size_t max_centers, double delta,
                          std::uint64_t seed = 0, unsigned workers = 1);

/// One point per non-blank line, whitespace-separated decimals.
std::vector<Point> parse_points(std::string_view text);

}  // namespace aprob
