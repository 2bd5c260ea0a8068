#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "aprob/applications.hpp"
#include "aprob/prob_model.hpp"
#include "aprob/search.hpp"
#include "aprob/update.hpp"

namespace aprob {

inline constexpr int kModelFormatVersion = 1;

// Model document:
//   { "format": "aprob-model", "version": 1,
//     "alphabet": [...], "counts": [...], "smoothing": "n/d",
//     "contexts": { "schema": "position" | "position+token",
//                   "alphabet": [...base symbols...], "fallback": [...],
//                   "entries": [ { "position": i, "token": t, "counts": [...] } ] },
//     "composites": [ { "symbol": s, "body": [...] } ],
//     "corpus": [...] }
std::string model_to_json(const ProbabilityModel& model);
/// Throws FormatError naming the offending field; unknown versions are refused.
ProbabilityModel model_from_json(std::string_view text);

void save_model(const ProbabilityModel& model, const std::filesystem::path& path);
ProbabilityModel load_model(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Whitespace-separated tokens.
std::vector<std::string> parse_corpus(std::string_view text);

/// Distinct tokens in first-appearance order.
std::vector<std::string> distinct_tokens(std::span<const std::string> tokens);

// Problem document:
//   { "id": "...", "machine": "square" | { "name": "...", ...params },
//     "target": "49"  or  "tau": 1000,
//     "stream": { "kind": "list", "candidates": [["7", "1/2"], ...], "mass": "1" }
//             | { "kind": "uniform", "alphabet": [...], "max_len": 3, "separator": " " }
//             | { "kind": "model", "max_len": 3, "separator": " " }
//             | { "kind": "planner", "p": [...4], "split": 2, "alternatives": 2,
//                 "max_depth": 2, "root": "root" },
//     "T0": 1, "max_total": 100000, "seed": 0, "context": "+" }
struct ProblemSpec {
  std::string id;
  std::string machine_name;
  nlohmann::json machine_params;
  std::optional<std::string> target;
  std::optional<std::uint64_t> tau;
  nlohmann::json stream;
  std::uint64_t initial_budget = 1;
  std::uint64_t max_total = 1'000'000;
  std::uint64_t seed = 0;
  std::string context;
  std::string separator = " ";
};

ProblemSpec parse_problem(const nlohmann::json& document);
ProblemSpec parse_problem_text(std::string_view text);

PlannerSpec parse_planner_spec(const nlohmann::json& document);

/// `model` may be null unless the stream kind is "model".
std::unique_ptr<CandidateStream> make_stream(const nlohmann::json& spec, const ProbabilityModel* model);

SessionProblem to_session_problem(const ProblemSpec& spec);

// Session document: { "alphabet": [...], "smoothing": "1", "compression_factor": 1.0,
//                     "problems": [ problem, ... ] }
struct SessionSpec {
  std::vector<std::string> alphabet;  // used when no model is supplied
  Rational smoothing = 1;
  double compression_factor = 1.0;
  std::vector<ProblemSpec> problems;
};

SessionSpec parse_session_text(std::string_view text);

}  // namespace aprob
