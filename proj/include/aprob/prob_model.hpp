#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aprob/rational.hpp"

namespace aprob {

using SymbolId = std::uint32_t;

/// Ordered set of distinct text tokens. The order is part of the value: ranks,
/// tie-breaks and definition costs all refer to it.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::string& symbol(SymbolId id) const { return symbols_.at(id); }

  std::optional<SymbolId> find(std::string_view symbol) const;
  bool contains(std::string_view symbol) const { return find(symbol).has_value(); }
  /// Throws DomainError for unknown symbols.
  SymbolId id(std::string_view symbol) const;

  Alphabet extended(std::string symbol) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, SymbolId, std::less<>> index_;
};

/// Add-alpha smoothed symbol statistics:
///   p(s) = (count(s) + alpha) / (sum(counts) + alpha * |alphabet|)
class SymbolModel {
 public:
  SymbolModel() = default;
  explicit SymbolModel(Alphabet alphabet, Rational smoothing = 1);
  SymbolModel(Alphabet alphabet, std::vector<std::uint64_t> counts, Rational smoothing);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  const Rational& smoothing() const noexcept { return smoothing_; }
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t count(std::string_view symbol) const { return counts_[alphabet_.id(symbol)]; }

  Rational probability(SymbolId id) const;
  Rational probability(std::string_view symbol) const { return probability(alphabet_.id(symbol)); }
  /// -log2 p(symbol).
  double code_length(SymbolId id) const;

  /// Product of per-symbol probabilities with the counts frozen.
  Rational sequence_probability(std::span<const std::string> sequence) const;
  Rational sequence_probability(std::span<const SymbolId> sequence) const;

  SymbolModel observed(std::span<const std::string> sequence) const;
  SymbolModel with_symbol(std::string symbol) const;
  SymbolModel with_counts(std::vector<std::uint64_t> counts) const;

  friend bool operator==(const SymbolModel& a, const SymbolModel& b) {
    return a.alphabet_ == b.alphabet_ && a.counts_ == b.counts_ && a.smoothing_ == b.smoothing_;
  }

 private:
  Alphabet alphabet_;
  std::vector<std::uint64_t> counts_;
  Rational smoothing_ = 1;
  std::uint64_t total_ = 0;
};

enum class ContextSchema {
  position,            // context = index of the symbol in its sequence
  position_and_token,  // additionally keyed by a conditioning token
};

std::string_view to_string(ContextSchema schema);
ContextSchema parse_context_schema(std::string_view text);

/// A context is a position, optionally refined by a conditioning token.
/// An empty token means "any token at this position".
struct ContextKey {
  std::size_t position = 0;
  std::string token;

  auto operator<=>(const ContextKey&) const = default;
};

/// Per-context symbol statistics with back-off: (position, token) if seen,
/// else (position) if seen, else the pooled fallback model.
class ConditionalModel {
 public:
  ConditionalModel() = default;
  ConditionalModel(Alphabet alphabet, ContextSchema schema, Rational smoothing = 1);
  ConditionalModel(ContextSchema schema, SymbolModel fallback, std::map<ContextKey, SymbolModel> contexts);

  ContextSchema schema() const noexcept { return schema_; }
  const Alphabet& alphabet() const noexcept { return fallback_.alphabet(); }
  const SymbolModel& fallback() const noexcept { return fallback_; }
  const std::map<ContextKey, SymbolModel>& contexts() const noexcept { return contexts_; }

  const SymbolModel& model_for(std::size_t position, std::string_view token = {}) const;
  Rational probability(std::string_view symbol, std::size_t position, std::string_view token = {}) const;
  Rational sequence_probability(std::span<const std::string> sequence, std::string_view token = {}) const;

  ConditionalModel observed(std::span<const std::string> sequence, std::string_view token = {}) const;
  ConditionalModel with_symbol(std::string symbol) const;

  friend bool operator==(const ConditionalModel&, const ConditionalModel&) = default;

 private:
  ContextSchema schema_ = ContextSchema::position;
  SymbolModel fallback_;
  std::map<ContextKey, SymbolModel> contexts_;
};

struct CompositeDefinition {
  std::string symbol;
  std::vector<std::string> body;

  friend bool operator==(const CompositeDefinition&, const CompositeDefinition&) = default;
};

/// Ordered composite-symbol definitions. A body may only reference base
/// symbols or composites defined before it, so expansion always terminates.
class CompositeTable {
 public:
  const std::vector<CompositeDefinition>& definitions() const noexcept { return definitions_; }
  std::size_t size() const noexcept { return definitions_.size(); }
  bool empty() const noexcept { return definitions_.empty(); }

  const CompositeDefinition* find(std::string_view symbol) const;
  bool contains(std::string_view symbol) const { return find(symbol) != nullptr; }

  CompositeTable with(CompositeDefinition definition) const;

  /// Rewrites composites into base symbols, recursively.
  std::vector<std::string> expand(std::span<const std::string> sequence) const;

  friend bool operator==(const CompositeTable&, const CompositeTable&) = default;

 private:
  std::vector<CompositeDefinition> definitions_;
};

/// -log2 p. Throws DomainError unless 0 < p <= 1.
double code_length(const Rational& p);
double code_length(double p);

/// Sum of 2^-l over the lengths, exact.
Rational kraft_sum(std::span<const std::uint64_t> lengths);

/// Length of the Elias gamma code of n >= 1: 2*floor(log2 n) + 1.
std::uint64_t elias_gamma_length(std::uint64_t n);

/// -log2(sum 2^-l): the single code length equivalent to several parallel
/// codes for the same object.
double combined_code_length(std::span<const double> lengths);

/// Greedy left-to-right non-overlapping replacement of `phrase` by `symbol`.
std::vector<std::string> substitute(std::span<const std::string> corpus, std::span<const std::string> phrase,
                                    const std::string& symbol);
std::size_t count_occurrences(std::span<const std::string> corpus, std::span<const std::string> phrase);

/// Bits to transmit one definition: gamma-coded body length, then each body
/// symbol uniformly over the symbols that existed when it was defined.
double definition_cost(const CompositeDefinition& definition, const Alphabet& alphabet);

/// Model cost (composite definitions) plus corpus cost (ideal code length of
/// every token under `model` with frozen counts).
double total_description_length(const SymbolModel& model, const CompositeTable& table,
                                std::span<const std::string> corpus);

/// The system's knowledge: symbol statistics over base symbols and
/// composites, positional statistics over base symbols, the composite table,
/// and the corpus the statistics were gathered from (stored encoded).
///
/// Symbol counts always equal prior counts plus occurrences in the encoded
/// corpus; composite definitions rebuild them from the re-encoded corpus.
class ProbabilityModel {
 public:
  ProbabilityModel() = default;
  explicit ProbabilityModel(Alphabet base, Rational smoothing = 1,
                            ContextSchema schema = ContextSchema::position_and_token);
  /// Reassembles a model from persisted parts; validates every invariant.
  ProbabilityModel(SymbolModel symbols, ConditionalModel contexts, CompositeTable composites,
                   std::vector<std::string> corpus);

  const SymbolModel& symbols() const noexcept { return symbols_; }
  const ConditionalModel& contexts() const noexcept { return contexts_; }
  const CompositeTable& composites() const noexcept { return composites_; }
  const std::vector<std::string>& corpus() const noexcept { return corpus_; }
  const Alphabet& alphabet() const noexcept { return symbols_.alphabet(); }

  std::vector<std::string> expanded_corpus() const { return composites_.expand(corpus_); }
  double description_length() const { return total_description_length(symbols_, composites_, corpus_); }

  /// Encodes `tokens` with the existing composites and appends them to the
  /// corpus; positional statistics see the raw tokens under `context`.
  ProbabilityModel observed(std::span<const std::string> tokens, std::string_view context = {}) const;

  /// Adds base symbols that are not yet known (count zero).
  ProbabilityModel with_base_symbols(std::span<const std::string> symbols) const;

  struct Definition;
  /// Defines a composite for `phrase` and re-encodes the corpus.
  Definition define_composite(std::span<const std::string> phrase) const;

  friend bool operator==(const ProbabilityModel&, const ProbabilityModel&) = default;

 private:
  std::vector<std::uint64_t> corpus_counts(const Alphabet& alphabet) const;

  SymbolModel symbols_;
  ConditionalModel contexts_;
  CompositeTable composites_;
  std::vector<std::string> corpus_;
};

struct ProbabilityModel::Definition {
  ProbabilityModel model;
  std::string symbol;
  double delta_bits = 0.0;
};

}  // namespace aprob
