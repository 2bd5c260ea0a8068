#include "aprob/prob_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include "aprob/errors.hpp"

namespace aprob {

// ---------------------------------------------------------------- Alphabet

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw DomainError("alphabet must not be empty");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) throw DomainError("alphabet symbols must be non-empty");
    if (!index_.emplace(symbols_[i], static_cast<SymbolId>(i)).second) {
      throw DomainError("duplicate symbol '" + symbols_[i] + "' in alphabet");
    }
  }
}

std::optional<SymbolId> Alphabet::find(std::string_view symbol) const {
  const auto it = index_.find(symbol);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SymbolId Alphabet::id(std::string_view symbol) const {
  if (const auto found = find(symbol)) return *found;
  throw DomainError("unknown symbol '" + std::string(symbol) + "'");
}

Alphabet Alphabet::extended(std::string symbol) const {
  auto symbols = symbols_;
  symbols.push_back(std::move(symbol));
  return Alphabet(std::move(symbols));
}

// ------------------------------------------------------------- SymbolModel

SymbolModel::SymbolModel(Alphabet alphabet, Rational smoothing)
    : SymbolModel(std::move(alphabet), {}, std::move(smoothing)) {}

SymbolModel::SymbolModel(Alphabet alphabet, std::vector<std::uint64_t> counts, Rational smoothing)
    : alphabet_(std::move(alphabet)), counts_(std::move(counts)), smoothing_(std::move(smoothing)) {
  if (alphabet_.empty()) throw DomainError("symbol model needs a non-empty alphabet");
  if (smoothing_ <= 0) throw DomainError("smoothing must be positive");
  if (counts_.empty()) counts_.assign(alphabet_.size(), 0);
  if (counts_.size() != alphabet_.size()) throw DomainError("count vector does not match alphabet size");
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

Rational SymbolModel::probability(SymbolId id) const {
  if (id >= counts_.size()) throw DomainError("symbol id out of range");
  return (Rational(counts_[id]) + smoothing_) / (Rational(total_) + smoothing_ * alphabet_.size());
}

double SymbolModel::code_length(SymbolId id) const { return aprob::code_length(probability(id)); }

Rational SymbolModel::sequence_probability(std::span<const std::string> sequence) const {
  Rational p = 1;
  for (const auto& s : sequence) p *= probability(alphabet_.id(s));
  return p;
}

Rational SymbolModel::sequence_probability(std::span<const SymbolId> sequence) const {
  Rational p = 1;
  for (const auto id : sequence) p *= probability(id);
  return p;
}

SymbolModel SymbolModel::observed(std::span<const std::string> sequence) const {
  auto counts = counts_;
  for (const auto& s : sequence) ++counts[alphabet_.id(s)];
  return SymbolModel(alphabet_, std::move(counts), smoothing_);
}

SymbolModel SymbolModel::with_symbol(std::string symbol) const {
  auto counts = counts_;
  counts.push_back(0);
  return SymbolModel(alphabet_.extended(std::move(symbol)), std::move(counts), smoothing_);
}

SymbolModel SymbolModel::with_counts(std::vector<std::uint64_t> counts) const {
  return SymbolModel(alphabet_, std::move(counts), smoothing_);
}

// -------------------------------------------------------- ConditionalModel

std::string_view to_string(ContextSchema schema) {
  return schema == ContextSchema::position ? "position" : "position+token";
}

ContextSchema parse_context_schema(std::string_view text) {
  if (text == "position") return ContextSchema::position;
  if (text == "position+token") return ContextSchema::position_and_token;
  throw FormatError("unknown context schema '" + std::string(text) + "'");
}

ConditionalModel::ConditionalModel(Alphabet alphabet, ContextSchema schema, Rational smoothing)
    : schema_(schema), fallback_(std::move(alphabet), std::move(smoothing)) {}

ConditionalModel::ConditionalModel(ContextSchema schema, SymbolModel fallback,
                                   std::map<ContextKey, SymbolModel> contexts)
    : schema_(schema), fallback_(std::move(fallback)), contexts_(std::move(contexts)) {
  for (const auto& [key, model] : contexts_) {
    if (!(model.alphabet() == fallback_.alphabet()) || model.smoothing() != fallback_.smoothing()) {
      throw DomainError("context model disagrees with the fallback alphabet or smoothing");
    }
    if (!key.token.empty() && schema_ == ContextSchema::position) {
      throw DomainError("token-keyed context in a position-only model");
    }
  }
}

const SymbolModel& ConditionalModel::model_for(std::size_t position, std::string_view token) const {
  if (!token.empty() && schema_ == ContextSchema::position_and_token) {
    if (const auto it = contexts_.find(ContextKey{position, std::string(token)}); it != contexts_.end()) {
      return it->second;
    }
  }
  if (const auto it = contexts_.find(ContextKey{position, {}}); it != contexts_.end()) return it->second;
  return fallback_;
}

Rational ConditionalModel::probability(std::string_view symbol, std::size_t position, std::string_view token) const {
  return model_for(position, token).probability(symbol);
}

Rational ConditionalModel::sequence_probability(std::span<const std::string> sequence, std::string_view token) const {
  Rational p = 1;
  for (std::size_t i = 0; i < sequence.size(); ++i) p *= probability(sequence[i], i, token);
  return p;
}

ConditionalModel ConditionalModel::observed(std::span<const std::string> sequence, std::string_view token) const {
  ConditionalModel next = *this;
  const SymbolModel blank(fallback_.alphabet(), fallback_.smoothing());
  auto bump = [&](const ContextKey& key, const std::string& symbol) {
    auto [it, inserted] = next.contexts_.try_emplace(key, blank);
    it->second = it->second.observed(std::span(&symbol, 1));
  };
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    bump(ContextKey{i, {}}, sequence[i]);
    if (schema_ == ContextSchema::position_and_token && !token.empty()) {
      bump(ContextKey{i, std::string(token)}, sequence[i]);
    }
  }
  next.fallback_ = fallback_.observed(sequence);
  return next;
}

ConditionalModel ConditionalModel::with_symbol(std::string symbol) const {
  ConditionalModel next = *this;
  next.fallback_ = fallback_.with_symbol(symbol);
  for (auto& [key, model] : next.contexts_) model = model.with_symbol(symbol);
  return next;
}

// ---------------------------------------------------------- CompositeTable

const CompositeDefinition* CompositeTable::find(std::string_view symbol) const {
  for (const auto& d : definitions_) {
    if (d.symbol == symbol) return &d;
  }
  return nullptr;
}

CompositeTable CompositeTable::with(CompositeDefinition definition) const {
  if (definition.body.size() < 2) throw DomainError("composite body needs at least two symbols");
  if (contains(definition.symbol)) throw DomainError("composite '" + definition.symbol + "' already defined");
  for (const auto& s : definition.body) {
    if (s == definition.symbol) throw DomainError("composite '" + definition.symbol + "' refers to itself");
  }
  CompositeTable next = *this;
  next.definitions_.push_back(std::move(definition));
  return next;
}

std::vector<std::string> CompositeTable::expand(std::span<const std::string> sequence) const {
  std::vector<std::string> out;
  out.reserve(sequence.size());
  // Definitions only reference earlier entries, so an explicit stack suffices.
  std::vector<std::string> stack;
  for (const auto& token : sequence) {
    stack.push_back(token);
    while (!stack.empty()) {
      std::string top = std::move(stack.back());
      stack.pop_back();
      if (const auto* d = find(top)) {
        for (auto it = d->body.rbegin(); it != d->body.rend(); ++it) stack.push_back(*it);
      } else {
        out.push_back(std::move(top));
      }
    }
  }
  return out;
}

// ----------------------------------------------------------- code lengths

double code_length(const Rational& p) {
  if (p <= 0 || p > 1) throw DomainError("probability must lie in (0, 1], got " + to_string(p));
  if (p == 1) return 0.0;
  return -log2_of(p);
}

double code_length(double p) {
  if (!(p > 0.0) || p > 1.0) throw DomainError("probability must lie in (0, 1]");
  return p == 1.0 ? 0.0 : -std::log2(p);
}

Rational kraft_sum(std::span<const std::uint64_t> lengths) {
  if (lengths.empty()) return 0;
  const std::uint64_t longest = *std::max_element(lengths.begin(), lengths.end());
  BigInt numerator = 0;
  for (const auto l : lengths) numerator += BigInt(1) << static_cast<unsigned>(longest - l);
  BigInt denominator = BigInt(1) << static_cast<unsigned>(longest);
  return Rational(numerator, denominator);
}

std::uint64_t elias_gamma_length(std::uint64_t n) {
  if (n == 0) throw DomainError("Elias gamma codes positive integers only");
  return 2 * static_cast<std::uint64_t>(std::bit_width(n) - 1) + 1;
}

double combined_code_length(std::span<const double> lengths) {
  if (lengths.empty()) throw DomainError("no codes to combine");
  const double shortest = *std::min_element(lengths.begin(), lengths.end());
  double scaled = 0.0;
  for (const double l : lengths) scaled += std::exp2(shortest - l);
  return shortest - std::log2(scaled);
}

std::vector<std::string> substitute(std::span<const std::string> corpus, std::span<const std::string> phrase,
                                    const std::string& symbol) {
  std::vector<std::string> out;
  out.reserve(corpus.size());
  std::size_t i = 0;
  while (i < corpus.size()) {
    if (!phrase.empty() && i + phrase.size() <= corpus.size() &&
        std::equal(phrase.begin(), phrase.end(), corpus.begin() + static_cast<std::ptrdiff_t>(i))) {
      out.push_back(symbol);
      i += phrase.size();
    } else {
      out.push_back(corpus[i]);
      ++i;
    }
  }
  return out;
}

std::size_t count_occurrences(std::span<const std::string> corpus, std::span<const std::string> phrase) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (!phrase.empty() && i + phrase.size() <= corpus.size()) {
    if (std::equal(phrase.begin(), phrase.end(), corpus.begin() + static_cast<std::ptrdiff_t>(i))) {
      ++n;
      i += phrase.size();
    } else {
      ++i;
    }
  }
  return n;
}

double definition_cost(const CompositeDefinition& definition, const Alphabet& alphabet) {
  const auto rank = alphabet.id(definition.symbol);
  const double per_symbol = rank > 1 ? std::log2(static_cast<double>(rank)) : 0.0;
  return static_cast<double>(elias_gamma_length(definition.body.size())) +
         static_cast<double>(definition.body.size()) * per_symbol;
}

double total_description_length(const SymbolModel& model, const CompositeTable& table,
                                std::span<const std::string> corpus) {
  double bits = 0.0;
  for (const auto& d : table.definitions()) bits += definition_cost(d, model.alphabet());
  std::vector<std::uint64_t> occurrences(model.alphabet().size(), 0);
  for (const auto& token : corpus) ++occurrences[model.alphabet().id(token)];
  for (SymbolId id = 0; id < occurrences.size(); ++id) {
    if (occurrences[id] != 0) bits += static_cast<double>(occurrences[id]) * model.code_length(id);
  }
  return bits;
}

// -------------------------------------------------------- ProbabilityModel

ProbabilityModel::ProbabilityModel(Alphabet base, Rational smoothing, ContextSchema schema)
    : symbols_(base, smoothing), contexts_(base, schema, smoothing) {}

ProbabilityModel::ProbabilityModel(SymbolModel symbols, ConditionalModel contexts, CompositeTable composites,
                                   std::vector<std::string> corpus)
    : symbols_(std::move(symbols)),
      contexts_(std::move(contexts)),
      composites_(std::move(composites)),
      corpus_(std::move(corpus)) {
  const Alphabet& alphabet = symbols_.alphabet();
  std::set<std::string, std::less<>> known;
  for (const auto& s : contexts_.alphabet().symbols()) {
    if (!alphabet.contains(s)) throw DomainError("context symbol '" + s + "' missing from the model alphabet");
    known.insert(s);
  }
  for (const auto& d : composites_.definitions()) {
    if (!alphabet.contains(d.symbol)) throw DomainError("composite '" + d.symbol + "' missing from the alphabet");
    if (known.contains(d.symbol)) throw DomainError("composite '" + d.symbol + "' shadows a base symbol");
    for (const auto& s : d.body) {
      if (!known.contains(s)) {
        throw DomainError("composite '" + d.symbol + "' references '" + s + "' before it is defined");
      }
    }
    known.insert(d.symbol);
  }
  for (const auto& s : alphabet.symbols()) {
    if (!known.contains(s)) throw DomainError("symbol '" + s + "' is neither base nor composite");
  }
  const auto occurrences = corpus_counts(alphabet);
  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    if (symbols_.counts()[i] < occurrences[i]) {
      throw DomainError("count for '" + alphabet.symbol(static_cast<SymbolId>(i)) +
                        "' is below its corpus occurrences");
    }
  }
}

std::vector<std::uint64_t> ProbabilityModel::corpus_counts(const Alphabet& alphabet) const {
  std::vector<std::uint64_t> occurrences(alphabet.size(), 0);
  for (const auto& token : corpus_) ++occurrences[alphabet.id(token)];
  return occurrences;
}

ProbabilityModel ProbabilityModel::observed(std::span<const std::string> tokens, std::string_view context) const {
  for (const auto& t : tokens) {
    if (!contexts_.alphabet().contains(t)) throw DomainError("unknown base symbol '" + t + "'");
  }
  std::vector<std::string> encoded(tokens.begin(), tokens.end());
  for (const auto& d : composites_.definitions()) encoded = substitute(encoded, d.body, d.symbol);

  ProbabilityModel next = *this;
  next.symbols_ = symbols_.observed(encoded);
  next.contexts_ = contexts_.observed(tokens, context);
  next.corpus_.insert(next.corpus_.end(), encoded.begin(), encoded.end());
  return next;
}

ProbabilityModel ProbabilityModel::with_base_symbols(std::span<const std::string> symbols) const {
  ProbabilityModel next = *this;
  for (const auto& s : symbols) {
    if (next.alphabet().contains(s)) continue;
    next.symbols_ = next.symbols_.with_symbol(s);
    next.contexts_ = next.contexts_.with_symbol(s);
  }
  return next;
}

ProbabilityModel::Definition ProbabilityModel::define_composite(std::span<const std::string> phrase) const {
  if (phrase.size() < 2) throw DomainError("a composite needs a phrase of at least two symbols");
  for (const auto& s : phrase) alphabet().id(s);

  std::string name = "{";
  for (std::size_t i = 0; i < phrase.size(); ++i) name += (i ? "," : "") + phrase[i];
  name += "}";
  if (alphabet().contains(name)) {
    std::size_t suffix = 2;
    while (alphabet().contains(name + "#" + std::to_string(suffix))) ++suffix;
    name += "#" + std::to_string(suffix);
  }

  const auto before = corpus_counts(alphabet());
  std::vector<std::uint64_t> prior(before.size());
  for (std::size_t i = 0; i < prior.size(); ++i) prior[i] = symbols_.counts()[i] - before[i];
  prior.push_back(0);

  ProbabilityModel next;
  next.composites_ = composites_.with(CompositeDefinition{name, {phrase.begin(), phrase.end()}});
  next.contexts_ = contexts_;
  next.corpus_ = substitute(corpus_, phrase, name);
  next.symbols_ = symbols_.with_symbol(name);
  const auto after = next.corpus_counts(next.alphabet());
  for (std::size_t i = 0; i < prior.size(); ++i) prior[i] += after[i];
  next.symbols_ = next.symbols_.with_counts(std::move(prior));

  const double delta = next.description_length() - description_length();
  return Definition{std::move(next), std::move(name), delta};
}

}  // namespace aprob
