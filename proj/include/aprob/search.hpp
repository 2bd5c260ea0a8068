#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aprob/machines.hpp"
#include "aprob/prob_model.hpp"
#include "aprob/rational.hpp"

namespace aprob {

// ------------------------------------------------------------------ bets

struct Bet {
  Rational p;     // win probability in (0, 1]; bets need not be normalized
  Rational cost;  // positive
};

/// Order that minimizes expected spend: p/cost descending, stable.
std::vector<std::size_t> order_bets(std::span<const Bet> bets);

/// Sum over k of cost[order[k]] * prod_{j<k} (1 - p[order[j]]).
Rational expected_spend(std::span<const Bet> bets, std::span<const std::size_t> order);

// ------------------------------------------------------------ candidates

struct Candidate {
  std::string payload;
  Rational p;
  std::size_t index = 0;  // emission rank

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Lazy source of candidates in non-increasing probability order. Streams
/// are deterministic: the same construction yields the same sequence.
class CandidateStream {
 public:
  virtual ~CandidateStream() = default;
  virtual std::optional<Candidate> next() = 0;
  /// Upper bound on the total emitted probability, when the stream has one.
  virtual std::optional<Rational> declared_mass() const { return std::nullopt; }
};

/// A fixed list, emitted in the order given.
class ListStream final : public CandidateStream {
 public:
  explicit ListStream(std::vector<std::pair<std::string, Rational>> items,
                      std::optional<Rational> declared_mass = std::nullopt);
  std::optional<Candidate> next() override;
  std::optional<Rational> declared_mass() const override { return declared_mass_; }

 private:
  std::vector<std::pair<std::string, Rational>> items_;
  std::optional<Rational> declared_mass_;
  std::size_t position_ = 0;
};

/// Best-first enumeration of symbol sequences of length 1..max_len.
/// `table[i][s]` is the probability of symbol s at position i (the last row
/// is reused for longer positions). Sequences leave in order of probability
/// descending, then length, then lexicographic rank in the alphabet. The
/// payload is the expansion of the sequence through `composites`, joined
/// with `separator`; a payload already emitted is skipped.
class SequenceStream final : public CandidateStream {
 public:
  SequenceStream(Alphabet alphabet, std::vector<std::vector<Rational>> table, std::size_t max_len,
                 CompositeTable composites = {}, std::string separator = " ");
  std::optional<Candidate> next() override;

  /// Symbol sequence behind the most recent emission.
  const std::vector<SymbolId>& last_sequence() const noexcept { return last_; }

 private:
  struct Node {
    Rational p;
    std::vector<SymbolId> symbols;
  };
  struct Order {
    bool operator()(const Node& a, const Node& b) const;
  };

  Alphabet alphabet_;
  std::vector<std::vector<Rational>> table_;
  std::size_t max_len_;
  CompositeTable composites_;
  std::string separator_;
  std::vector<Node> heap_;
  std::vector<std::string> seen_;
  std::vector<SymbolId> last_;
  std::size_t emitted_ = 0;
};

/// Stream over the model's full alphabet (composites included) using its
/// frozen symbol probabilities.
std::unique_ptr<SequenceStream> stream_from_model(const ProbabilityModel& model, std::size_t max_len,
                                                  std::string separator = " ");
std::unique_ptr<SequenceStream> stream_from_model(const SymbolModel& model, std::size_t max_len,
                                                  std::string separator = " ");
/// Position-dependent probabilities from a conditional model under a fixed
/// conditioning token.
std::unique_ptr<SequenceStream> stream_from_model(const ConditionalModel& model, std::string_view token,
                                                  std::size_t max_len, std::string separator = " ");

// ---------------------------------------------------------------- search

enum class SearchOutcome { solved, exhausted, budget_exhausted, empty_result, best_found };

std::string_view to_string(SearchOutcome outcome);

struct Phase {
  std::uint64_t budget = 0;  // T
  std::size_t tested = 0;
  std::uint64_t steps = 0;   // includes re-runs of previously capped candidates
};

struct SearchReport {
  SearchOutcome outcome = SearchOutcome::exhausted;
  std::optional<Candidate> solution;  // solver, or best candidate for optimization
  std::uint64_t solve_steps = 0;      // t_j: cost of the solving run
  std::vector<Phase> phases;
  std::uint64_t total_steps = 0;
  std::optional<double> bound_ratio;  // total_steps / (t_j / p_j)
  std::optional<double> best_value;   // optimization only
};

struct SearchOptions {
  std::uint64_t initial_budget = 1;  // T0
  std::uint64_t max_total = std::numeric_limits<std::uint64_t>::max();
  unsigned workers = 1;
};

/// Doubling search for a candidate whose machine output equals `target`.
/// Phase T runs every candidate with floor(p*T) >= 1, from scratch, under
/// that step cap; T doubles until a solver appears, the stream is exhausted
/// without any capped run, or max_total steps are spent.
SearchReport levin_search(const Machine& machine, const std::string& target, CandidateStream& stream,
                          const SearchOptions& options = {});

/// Same phase schedule under a total budget of `tau` steps; never stops
/// early on success. Returns the highest value among fully evaluated
/// candidates (earliest emission wins ties).
SearchReport optimize(const Machine& machine, std::uint64_t tau, CandidateStream& stream,
                      const SearchOptions& options = {});

}  // namespace aprob
