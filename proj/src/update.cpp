#include "aprob/update.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "aprob/errors.hpp"

namespace aprob {
namespace {

struct PairStat {
  std::vector<std::string> phrase;
  std::size_t count = 0;
  std::size_t first = 0;
};

std::vector<PairStat> adjacent_pairs(const std::vector<std::string>& corpus) {
  std::map<std::pair<std::string, std::string>, std::size_t> first_seen;
  for (std::size_t i = 0; i + 1 < corpus.size(); ++i) first_seen.try_emplace({corpus[i], corpus[i + 1]}, i);
  std::vector<PairStat> stats;
  stats.reserve(first_seen.size());
  for (const auto& [pair, first] : first_seen) {
    PairStat s{{pair.first, pair.second}, 0, first};
    s.count = count_occurrences(corpus, s.phrase);
    stats.push_back(std::move(s));
  }
  std::sort(stats.begin(), stats.end(), [](const PairStat& a, const PairStat& b) {
    return a.count != b.count ? a.count > b.count : a.first < b.first;
  });
  return stats;
}

std::vector<std::string> fresh_symbols(const ProbabilityModel& model, std::span<const std::string> tokens) {
  std::vector<std::string> fresh;
  for (const auto& t : tokens) {
    if (!model.alphabet().contains(t) && std::find(fresh.begin(), fresh.end(), t) == fresh.end()) fresh.push_back(t);
  }
  return fresh;
}

}  // namespace

CompressionResult compress_corpus(const ProbabilityModel& model, std::uint64_t step_budget) {
  CompressionResult result{model, {}};
  result.ledger.l0 = model.description_length();
  bool out_of_budget = false;

  while (!out_of_budget) {
    const auto pairs = adjacent_pairs(result.model.corpus());
    std::optional<ProbabilityModel::Definition> best;
    for (const auto& pair : pairs) {
      const std::uint64_t cost = result.model.corpus().size();
      if (result.ledger.steps_used + cost > step_budget) {
        out_of_budget = true;
        break;
      }
      result.ledger.steps_used += cost;
      auto definition = result.model.define_composite(pair.phrase);
      if (definition.delta_bits < 0 && (!best || definition.delta_bits < best->delta_bits)) {
        best = std::move(definition);
      }
    }
    if (!best) break;
    result.model = std::move(best->model);
    result.ledger.defined.push_back(std::move(best->symbol));
  }

  result.ledger.l_after = result.model.description_length();
  result.ledger.accepted = result.ledger.l_after < result.ledger.l0;
  return result;
}

double standalone_length(const ProbabilityModel& model, const SolvedPair& pair) {
  const auto fresh = fresh_symbols(model, pair.tokens);
  const ProbabilityModel extended = model.with_base_symbols(fresh);
  std::vector<std::string> encoded = pair.tokens;
  for (const auto& d : extended.composites().definitions()) encoded = substitute(encoded, d.body, d.symbol);

  double bits = 0.0;
  for (const auto& token : encoded) bits += extended.symbols().code_length(extended.alphabet().id(token));
  for (const auto& f : fresh) {
    bits += static_cast<double>(elias_gamma_length(f.size())) + 8.0 * static_cast<double>(f.size());
  }
  return bits;
}

CompressionResult incorporate_solution(const ProbabilityModel& model, const SolvedPair& pair,
                                       std::uint64_t step_budget) {
  CompressionLedger ledger;
  ledger.l0 = model.description_length();
  if (pair.tokens.empty()) {
    ledger.l_after = ledger.l0;
    return {model, ledger};
  }
  ledger.l_ps = standalone_length(model, pair);

  const auto fresh = fresh_symbols(model, pair.tokens);
  const ProbabilityModel observed = model.with_base_symbols(fresh).observed(pair.tokens, pair.context);
  CompressionResult compressed = compress_corpus(observed, step_budget);
  ledger.steps_used = compressed.ledger.steps_used;

  if (compressed.ledger.l_after < ledger.l0 + ledger.l_ps) {
    ledger.l_after = compressed.ledger.l_after;
    ledger.accepted = true;
    ledger.defined = std::move(compressed.ledger.defined);
    return {std::move(compressed.model), ledger};
  }
  ledger.l_after = observed.description_length();
  ledger.accepted = false;
  return {observed, ledger};
}

namespace {

std::vector<std::string> split_payload(const std::string& payload, const std::string& separator) {
  std::vector<std::string> tokens;
  if (separator.empty()) {
    for (const char c : payload) tokens.emplace_back(1, c);
    return tokens;
  }
  std::size_t start = 0;
  while (start <= payload.size()) {
    const auto end = payload.find(separator, start);
    const auto piece = payload.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!piece.empty()) tokens.push_back(piece);
    if (end == std::string::npos) break;
    start = end + separator.size();
  }
  return tokens;
}

}  // namespace

SessionResult run_session(std::span<const SessionProblem> problems, ProbabilityModel model,
                          const SessionConfig& config) {
  if (problems.empty()) throw DomainError("a session needs at least one problem");
  if (!(config.compression_factor >= 0.0)) throw DomainError("compression factor must be non-negative");
  SessionResult result{{}, std::move(model)};

  for (const auto& problem : problems) {
    SessionEntry entry;
    entry.id = problem.id;
    try {
      if (!problem.machine || !problem.make_stream) throw DomainError("problem '" + problem.id + "' is incomplete");
      if (problem.target.has_value() == problem.tau.has_value()) {
        throw DomainError("problem '" + problem.id + "' must set exactly one of target and tau");
      }
      auto stream = problem.make_stream(result.model);
      SearchOptions options = problem.search;
      options.workers = std::max(options.workers, config.workers);
      SearchReport report = problem.target ? levin_search(*problem.machine, *problem.target, *stream, options)
                                           : optimize(*problem.machine, *problem.tau, *stream, options);
      const bool has_solution = report.solution && (report.outcome == SearchOutcome::solved ||
                                                    report.outcome == SearchOutcome::best_found);
      if (has_solution) {
        const SolvedPair pair{problem.context, split_payload(report.solution->payload, problem.separator)};
        const auto budget = static_cast<std::uint64_t>(
            std::ceil(config.compression_factor * static_cast<double>(report.total_steps)));
        auto incorporated = incorporate_solution(result.model, pair, budget);
        result.model = std::move(incorporated.model);
        entry.ledger = std::move(incorporated.ledger);
      }
      entry.search = std::move(report);
    } catch (const Error& e) {
      entry.error = e.what();
    }
    result.trace.push_back(std::move(entry));
  }
  return result;
}

}  // namespace aprob
