#include "aprob/search.hpp"

#include <algorithm>
#include <deque>
#include <future>
#include <numeric>

#include "aprob/errors.hpp"

namespace aprob {

// ------------------------------------------------------------------ bets

std::vector<std::size_t> order_bets(std::span<const Bet> bets) {
  std::vector<Rational> ratio;
  ratio.reserve(bets.size());
  for (const auto& b : bets) {
    if (b.p <= 0 || b.p > 1) throw DomainError("bet probability must lie in (0, 1]");
    if (b.cost <= 0) throw DomainError("bet cost must be positive");
    ratio.push_back(b.p / b.cost);
  }
  std::vector<std::size_t> order(bets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ratio[a] > ratio[b]; });
  return order;
}

Rational expected_spend(std::span<const Bet> bets, std::span<const std::size_t> order) {
  if (order.size() != bets.size()) throw DomainError("order is not a permutation of the bets");
  std::vector<bool> used(bets.size(), false);
  Rational spend = 0;
  Rational all_lost = 1;
  for (const auto i : order) {
    if (i >= bets.size() || used[i]) throw DomainError("order is not a permutation of the bets");
    used[i] = true;
    spend += bets[i].cost * all_lost;
    all_lost *= 1 - bets[i].p;
  }
  return spend;
}

// --------------------------------------------------------------- streams

ListStream::ListStream(std::vector<std::pair<std::string, Rational>> items, std::optional<Rational> declared_mass)
    : items_(std::move(items)), declared_mass_(std::move(declared_mass)) {}

std::optional<Candidate> ListStream::next() {
  if (position_ == items_.size()) return std::nullopt;
  const auto& [payload, p] = items_[position_];
  Candidate c{payload, p, position_};
  ++position_;
  return c;
}

bool SequenceStream::Order::operator()(const Node& a, const Node& b) const {
  if (a.p != b.p) return a.p < b.p;
  if (a.symbols.size() != b.symbols.size()) return a.symbols.size() > b.symbols.size();
  return a.symbols > b.symbols;
}

SequenceStream::SequenceStream(Alphabet alphabet, std::vector<std::vector<Rational>> table, std::size_t max_len,
                               CompositeTable composites, std::string separator)
    : alphabet_(std::move(alphabet)),
      table_(std::move(table)),
      max_len_(max_len),
      composites_(std::move(composites)),
      separator_(std::move(separator)) {
  if (max_len_ == 0) throw DomainError("max_len must be at least 1");
  if (table_.empty()) throw DomainError("probability table has no rows");
  for (const auto& row : table_) {
    if (row.size() != alphabet_.size()) throw DomainError("probability row does not match the alphabet");
    for (const auto& p : row) {
      if (p < 0 || p > 1) throw DomainError("symbol probability outside [0, 1]");
    }
  }
  for (SymbolId s = 0; s < alphabet_.size(); ++s) {
    if (table_[0][s] > 0) heap_.push_back(Node{table_[0][s], {s}});
  }
  std::make_heap(heap_.begin(), heap_.end(), Order{});
}

std::optional<Candidate> SequenceStream::next() {
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), Order{});
    Node node = std::move(heap_.back());
    heap_.pop_back();
    if (node.symbols.size() < max_len_) {
      const auto& row = table_[std::min(node.symbols.size(), table_.size() - 1)];
      for (SymbolId s = 0; s < alphabet_.size(); ++s) {
        if (row[s] == 0) continue;
        Node child{node.p * row[s], node.symbols};
        child.symbols.push_back(s);
        heap_.push_back(std::move(child));
        std::push_heap(heap_.begin(), heap_.end(), Order{});
      }
    }
    std::vector<std::string> names;
    names.reserve(node.symbols.size());
    for (const auto s : node.symbols) names.push_back(alphabet_.symbol(s));
    const auto expanded = composites_.expand(names);
    std::string payload;
    for (std::size_t i = 0; i < expanded.size(); ++i) {
      if (i) payload += separator_;
      payload += expanded[i];
    }
    if (!composites_.empty()) {
      const auto at = std::lower_bound(seen_.begin(), seen_.end(), payload);
      if (at != seen_.end() && *at == payload) continue;
      seen_.insert(at, payload);
    }
    last_ = std::move(node.symbols);
    return Candidate{std::move(payload), std::move(node.p), emitted_++};
  }
  return std::nullopt;
}

std::unique_ptr<SequenceStream> stream_from_model(const SymbolModel& model, std::size_t max_len,
                                                  std::string separator) {
  std::vector<Rational> row;
  for (SymbolId s = 0; s < model.alphabet().size(); ++s) row.push_back(model.probability(s));
  return std::make_unique<SequenceStream>(model.alphabet(), std::vector<std::vector<Rational>>{std::move(row)},
                                          max_len, CompositeTable{}, std::move(separator));
}

std::unique_ptr<SequenceStream> stream_from_model(const ProbabilityModel& model, std::size_t max_len,
                                                  std::string separator) {
  std::vector<Rational> row;
  for (SymbolId s = 0; s < model.alphabet().size(); ++s) row.push_back(model.symbols().probability(s));
  return std::make_unique<SequenceStream>(model.alphabet(), std::vector<std::vector<Rational>>{std::move(row)},
                                          max_len, model.composites(), std::move(separator));
}

std::unique_ptr<SequenceStream> stream_from_model(const ConditionalModel& model, std::string_view token,
                                                  std::size_t max_len, std::string separator) {
  if (max_len == 0) throw DomainError("max_len must be at least 1");
  std::vector<std::vector<Rational>> table;
  for (std::size_t position = 0; position < max_len; ++position) {
    const SymbolModel& m = model.model_for(position, token);
    std::vector<Rational> row;
    for (SymbolId s = 0; s < m.alphabet().size(); ++s) row.push_back(m.probability(s));
    table.push_back(std::move(row));
  }
  return std::make_unique<SequenceStream>(model.alphabet(), std::move(table), max_len, CompositeTable{},
                                          std::move(separator));
}

// ---------------------------------------------------------------- search

std::string_view to_string(SearchOutcome outcome) {
  switch (outcome) {
    case SearchOutcome::solved: return "solved";
    case SearchOutcome::exhausted: return "exhausted";
    case SearchOutcome::budget_exhausted: return "budget-exhausted";
    case SearchOutcome::empty_result: return "empty-result";
    case SearchOutcome::best_found: return "best-found";
  }
  return "?";
}

namespace {

// Buffers stream emissions so every phase can replay them, and enforces the
// stream contract as candidates arrive.
class StreamCursor {
 public:
  explicit StreamCursor(CandidateStream& stream) : stream_(stream), mass_limit_(stream.declared_mass()) {
    if (mass_limit_ && *mass_limit_ > 1) throw ContractViolation("declared stream mass exceeds 1");
  }

  const Candidate* at(std::size_t i) {
    while (buffer_.size() <= i && !done_) {
      auto c = stream_.next();
      if (!c) {
        done_ = true;
        break;
      }
      if (c->p <= 0 || c->p > 1) {
        throw ContractViolation("candidate '" + c->payload + "' has probability outside (0, 1]");
      }
      if (!buffer_.empty() && c->p > buffer_.back().p) {
        throw ContractViolation("stream probabilities increase at emission " + std::to_string(buffer_.size()));
      }
      emitted_mass_ += c->p;
      if (mass_limit_ && emitted_mass_ > *mass_limit_) {
        throw ContractViolation("stream emitted more probability than it declared");
      }
      c->index = buffer_.size();
      buffer_.push_back(std::move(*c));
    }
    return i < buffer_.size() ? &buffer_[i] : nullptr;
  }

 private:
  CandidateStream& stream_;
  std::optional<Rational> mass_limit_;
  Rational emitted_mass_ = 0;
  std::deque<Candidate> buffer_;
  bool done_ = false;
};

struct Admitted {
  const Candidate* candidate;
  std::uint64_t cap;
};

// Candidates admitted to the phase with budget T, in emission order.
std::vector<Admitted> admit(StreamCursor& cursor, std::uint64_t budget, bool& stream_done) {
  std::vector<Admitted> admitted;
  stream_done = false;
  for (std::size_t i = 0;; ++i) {
    const Candidate* c = cursor.at(i);
    if (c == nullptr) {
      stream_done = true;
      break;
    }
    const std::uint64_t cap = floor_product(c->p, budget);
    if (cap < 1) break;
    admitted.push_back({c, cap});
  }
  return admitted;
}

// Evaluates a phase's candidates, `workers` at a time, handing each result
// to `consume` in emission order until it returns false. Results past the
// stopping point are discarded, so the outcome matches sequential order.
template <class Consume>
void run_phase(const Machine& machine, const std::optional<std::string>& target, const std::vector<Admitted>& admitted,
               unsigned workers, Consume consume) {
  const std::size_t batch = std::max(1u, workers);
  for (std::size_t start = 0; start < admitted.size(); start += batch) {
    const std::size_t end = std::min(admitted.size(), start + batch);
    std::vector<Evaluation> results(end - start);
    if (batch == 1) {
      results[0] = evaluate_candidate(machine, admitted[start].candidate->payload, admitted[start].cap, target);
    } else {
      std::vector<std::future<Evaluation>> futures;
      for (std::size_t i = start; i < end; ++i) {
        futures.push_back(std::async(std::launch::async, [&, i] {
          return evaluate_candidate(machine, admitted[i].candidate->payload, admitted[i].cap, target);
        }));
      }
      for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
    }
    for (std::size_t i = start; i < end; ++i) {
      if (!consume(admitted[i], results[i - start])) return;
    }
  }
}

std::uint64_t next_budget(std::uint64_t budget, bool& overflow) {
  overflow = budget > std::numeric_limits<std::uint64_t>::max() / 2;
  return overflow ? budget : budget * 2;
}

}  // namespace

SearchReport levin_search(const Machine& machine, const std::string& target, CandidateStream& stream,
                          const SearchOptions& options) {
  if (options.initial_budget == 0) throw DomainError("initial budget T0 must be at least 1");
  StreamCursor cursor(stream);
  SearchReport report;
  const std::optional<std::string> goal = target;
  std::uint64_t budget = options.initial_budget;

  while (true) {
    bool stream_done = false;
    const auto admitted = admit(cursor, budget, stream_done);
    Phase phase{budget, 0, 0};
    bool any_capped = false;
    bool finished = false;

    run_phase(machine, goal, admitted, options.workers, [&](const Admitted& a, Evaluation e) {
      const std::uint64_t remaining = options.max_total - report.total_steps;
      if (remaining == 0) {
        report.outcome = SearchOutcome::budget_exhausted;
        finished = true;
        return false;
      }
      if (remaining < a.cap) {
        // The speculative run used the full cap; redo it under what is left.
        e = evaluate_candidate(machine, a.candidate->payload, remaining, goal);
      }
      ++phase.tested;
      phase.steps += e.cost;
      report.total_steps += e.cost;
      if (e.verdict == Verdict::solved) {
        report.outcome = SearchOutcome::solved;
        report.solution = *a.candidate;
        report.solve_steps = e.cost;
        report.bound_ratio = static_cast<double>(report.total_steps) * to_double(a.candidate->p) /
                             static_cast<double>(e.cost);
        finished = true;
        return false;
      }
      if (e.verdict == Verdict::capped) {
        any_capped = true;
        if (remaining < a.cap) {
          report.outcome = SearchOutcome::budget_exhausted;
          finished = true;
          return false;
        }
      }
      return true;
    });

    report.phases.push_back(phase);
    if (finished) return report;
    if (stream_done && !any_capped) {
      report.outcome = SearchOutcome::exhausted;
      return report;
    }
    if (report.total_steps >= options.max_total) {
      report.outcome = SearchOutcome::budget_exhausted;
      return report;
    }
    bool overflow = false;
    budget = next_budget(budget, overflow);
    if (overflow) {
      report.outcome = SearchOutcome::budget_exhausted;
      return report;
    }
  }
}

SearchReport optimize(const Machine& machine, std::uint64_t tau, CandidateStream& stream,
                      const SearchOptions& options) {
  if (tau == 0) throw DomainError("optimization budget tau must be at least 1");
  if (options.initial_budget == 0) throw DomainError("initial budget T0 must be at least 1");
  StreamCursor cursor(stream);
  SearchReport report;
  std::uint64_t budget = options.initial_budget;
  const std::optional<std::string> no_target;

  auto finish = [&] {
    report.outcome = report.solution ? SearchOutcome::best_found : SearchOutcome::empty_result;
    return report;
  };

  while (true) {
    bool stream_done = false;
    const auto admitted = admit(cursor, budget, stream_done);
    Phase phase{budget, 0, 0};
    bool any_capped = false;
    bool out_of_budget = false;

    run_phase(machine, no_target, admitted, options.workers, [&](const Admitted& a, Evaluation e) {
      const std::uint64_t remaining = tau - report.total_steps;
      if (remaining == 0) {
        out_of_budget = true;
        return false;
      }
      if (remaining < a.cap) e = evaluate_candidate(machine, a.candidate->payload, remaining, no_target);
      ++phase.tested;
      phase.steps += e.cost;
      report.total_steps += e.cost;
      const bool better = e.verdict == Verdict::solved &&
                          (!report.best_value || *e.value > *report.best_value ||
                           (*e.value == *report.best_value && a.candidate->index < report.solution->index));
      if (better) {
        report.best_value = e.value;
        report.solution = *a.candidate;
        report.solve_steps = e.cost;
      }
      if (e.verdict == Verdict::capped) {
        any_capped = true;
        if (remaining < a.cap) {
          out_of_budget = true;
          return false;
        }
      }
      return true;
    });

    report.phases.push_back(phase);
    if (out_of_budget || (stream_done && !any_capped) || report.total_steps >= tau) return finish();
    bool overflow = false;
    budget = next_budget(budget, overflow);
    if (overflow) return finish();
  }
}

}  // namespace aprob
