#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aprob/prob_model.hpp"
#include "aprob/search.hpp"

namespace aprob {

/// Before/after accounting for one compression session. Lengths in bits.
struct CompressionLedger {
  double l0 = 0.0;       // model + corpus before
  double l_ps = 0.0;     // new pair on its own under the pre-update model
  double l_after = 0.0;  // model + corpus after
  bool accepted = false;
  std::vector<std::string> defined;  // composites kept, in definition order
  std::uint64_t steps_used = 0;
};

struct CompressionResult {
  ProbabilityModel model;
  CompressionLedger ledger;
};

/// Greedy composite definition under a step budget. Each round scores every
/// distinct adjacent pair of the encoded corpus (most frequent first; one
/// scoring costs one step per corpus token) and keeps the definition with
/// the most negative change in description length. Stops when no pair
/// shortens the description or the budget runs out.
CompressionResult compress_corpus(const ProbabilityModel& model, std::uint64_t step_budget);

/// A solved problem expressed in base symbols, with the token that
/// conditions its positional statistics (may be empty).
struct SolvedPair {
  std::string context;
  std::vector<std::string> tokens;
};

/// Code length of the pair under `model` as it stands; unknown tokens are
/// priced by spelling them out (gamma-coded byte count plus 8 bits a byte)
/// and then coding them in the alphabet extended with them.
double standalone_length(const ProbabilityModel& model, const SolvedPair& pair);

/// Appends the pair to the knowledge corpus, then compresses. When the
/// compressed description is not shorter than L0 + L_PS the count update is
/// kept but the new composites are dropped (accepted = false).
CompressionResult incorporate_solution(const ProbabilityModel& model, const SolvedPair& pair,
                                       std::uint64_t step_budget);

/// One problem in a session. Exactly one of `target` (inversion) and `tau`
/// (time-limited optimization) is set. The stream is built from the model
/// as it stands when the problem comes up.
struct SessionProblem {
  std::string id;
  std::shared_ptr<const Machine> machine;
  std::optional<std::string> target;
  std::optional<std::uint64_t> tau;
  std::function<std::unique_ptr<CandidateStream>(const ProbabilityModel&)> make_stream;
  std::string separator = " ";  // splits a solution payload into tokens
  std::string context;
  SearchOptions search;
};

struct SessionConfig {
  double compression_factor = 1.0;  // compression budget = factor x solve steps
  unsigned workers = 1;
};

struct SessionEntry {
  std::string id;
  std::optional<SearchReport> search;
  std::optional<CompressionLedger> ledger;
  std::string error;  // set when the problem failed before producing a report
};

struct SessionResult {
  std::vector<SessionEntry> trace;
  ProbabilityModel model;
};

/// Solve, then compress, for each problem in order. Per-problem failures
/// are recorded and the session moves on.
SessionResult run_session(std::span<const SessionProblem> problems, ProbabilityModel model,
                          const SessionConfig& config = {});

}  // namespace aprob
