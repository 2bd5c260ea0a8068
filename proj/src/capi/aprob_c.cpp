#include "aprob/aprob.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "aprob/applications.hpp"
#include "aprob/errors.hpp"
#include "aprob/io.hpp"
#include "aprob/report.hpp"
#include "aprob/universal_prior.hpp"
#include "aprob/update.hpp"

struct aprob_model {
  aprob::ProbabilityModel value;
};

struct aprob_report {
  aprob::Report value;
  std::string records_text;
  std::vector<std::string> lines;
};

namespace {

thread_local std::string last_error;

aprob_status fail(aprob_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
aprob_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return APROB_OK;
  } catch (const aprob::InsufficientDepth& e) {
    return fail(APROB_E_DEPTH, e.what());
  } catch (const aprob::DomainError& e) {
    return fail(APROB_E_DOMAIN, e.what());
  } catch (const aprob::ContractViolation& e) {
    return fail(APROB_E_CONTRACT, e.what());
  } catch (const aprob::FormatError& e) {
    return fail(APROB_E_FORMAT, e.what());
  } catch (const aprob::IoError& e) {
    return fail(APROB_E_IO, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(APROB_E_FORMAT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(APROB_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(APROB_E_INTERNAL, e.what());
  } catch (...) {
    return fail(APROB_E_INTERNAL, "unknown error");
  }
}

#define APROB_REQUIRE(cond, message)                     \
  do {                                                   \
    if (!(cond)) return fail(APROB_E_ARGUMENT, message); \
  } while (0)

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

std::vector<std::string> strings(const char* const* items, std::size_t count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!items[i]) throw aprob::DomainError("null string at index " + std::to_string(i));
    out.emplace_back(items[i]);
  }
  return out;
}

aprob_report* wrap(aprob::Report report) {
  auto* out = new aprob_report{std::move(report), {}, {}};
  out->records_text = out->value.records_text();
  for (const auto& r : out->value.records) out->lines.push_back(r.str());
  return out;
}

}  // namespace

extern "C" {

const char* aprob_version(void) { return "1.0.0"; }

const char* aprob_status_name(aprob_status status) {
  switch (status) {
    case APROB_OK: return "ok";
    case APROB_E_ARGUMENT: return "argument";
    case APROB_E_DOMAIN: return "domain";
    case APROB_E_CONTRACT: return "contract";
    case APROB_E_DEPTH: return "insufficient-depth";
    case APROB_E_FORMAT: return "format";
    case APROB_E_IO: return "io";
    case APROB_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* aprob_last_error(void) { return last_error.c_str(); }

void aprob_string_free(char* text) { std::free(text); }

// ------------------------------------------------------------------ models

aprob_status aprob_model_create(const char* const* alphabet, size_t count, const char* smoothing, const char* schema,
                                aprob_model** out) {
  APROB_REQUIRE(out, "out is null");
  APROB_REQUIRE(alphabet || count == 0, "alphabet is null");
  return guarded([&] {
    const aprob::Rational alpha = smoothing ? aprob::parse_rational(smoothing) : aprob::Rational(1);
    const auto s = schema ? aprob::parse_context_schema(schema) : aprob::ContextSchema::position_and_token;
    *out = new aprob_model{aprob::ProbabilityModel(aprob::Alphabet(strings(alphabet, count)), alpha, s)};
  });
}

aprob_status aprob_model_load(const char* path, aprob_model** out) {
  APROB_REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new aprob_model{aprob::load_model(path)}; });
}

aprob_status aprob_model_from_json(const char* text, aprob_model** out) {
  APROB_REQUIRE(text && out, "null argument");
  return guarded([&] { *out = new aprob_model{aprob::model_from_json(text)}; });
}

aprob_status aprob_model_save(const aprob_model* model, const char* path) {
  APROB_REQUIRE(model && path, "null argument");
  return guarded([&] { aprob::save_model(model->value, path); });
}

aprob_status aprob_model_to_json(const aprob_model* model, char** out) {
  APROB_REQUIRE(model && out, "null argument");
  return guarded([&] { *out = copy_string(aprob::model_to_json(model->value)); });
}

aprob_status aprob_model_clone(const aprob_model* model, aprob_model** out) {
  APROB_REQUIRE(model && out, "null argument");
  return guarded([&] { *out = new aprob_model{model->value}; });
}

void aprob_model_free(aprob_model* model) { delete model; }

aprob_status aprob_model_observe(aprob_model* model, const char* const* tokens, size_t count, const char* context) {
  APROB_REQUIRE(model && (tokens || count == 0), "null argument");
  return guarded([&] {
    const auto seq = strings(tokens, count);
    const auto fresh = aprob::distinct_tokens(seq);
    model->value = model->value.with_base_symbols(fresh).observed(seq, context ? context : "");
  });
}

aprob_status aprob_model_symbol_count(const aprob_model* model, size_t* out) {
  APROB_REQUIRE(model && out, "null argument");
  *out = model->value.alphabet().size();
  return APROB_OK;
}

aprob_status aprob_model_description_length(const aprob_model* model, double* out) {
  APROB_REQUIRE(model && out, "null argument");
  return guarded([&] { *out = model->value.description_length(); });
}

aprob_status aprob_model_probability(const aprob_model* model, const char* symbol, char** out) {
  APROB_REQUIRE(model && symbol && out, "null argument");
  return guarded([&] { *out = copy_string(aprob::to_string(model->value.symbols().probability(symbol))); });
}

aprob_status aprob_model_context_probability(const aprob_model* model, const char* symbol, size_t position,
                                             const char* token, char** out) {
  APROB_REQUIRE(model && symbol && out, "null argument");
  return guarded([&] {
    *out = copy_string(aprob::to_string(model->value.contexts().probability(symbol, position, token ? token : "")));
  });
}

aprob_status aprob_model_expanded_corpus(const aprob_model* model, char** out) {
  APROB_REQUIRE(model && out, "null argument");
  return guarded([&] {
    std::string text;
    for (const auto& t : model->value.expanded_corpus()) {
      if (!text.empty()) text += ' ';
      text += t;
    }
    *out = copy_string(text);
  });
}

// ----------------------------------------------------------------- reports

const char* aprob_report_text(const aprob_report* report) { return report ? report->value.text.c_str() : ""; }

const char* aprob_report_records(const aprob_report* report) { return report ? report->records_text.c_str() : ""; }

size_t aprob_report_record_count(const aprob_report* report) { return report ? report->lines.size() : 0; }

const char* aprob_report_record(const aprob_report* report, size_t index) {
  if (!report || index >= report->lines.size()) return nullptr;
  return report->lines[index].c_str();
}

const char* aprob_report_get(const aprob_report* report, size_t index, const char* key) {
  if (!report || !key || index >= report->value.records.size()) return nullptr;
  const std::string* value = report->value.records[index].get(key);
  return value ? value->c_str() : nullptr;
}

size_t aprob_report_find(const aprob_report* report, const char* kind) {
  if (!report || !kind) return static_cast<size_t>(-1);
  for (std::size_t i = 0; i < report->value.records.size(); ++i) {
    const std::string* k = report->value.records[i].get("kind");
    if (k && *k == kind) return i;
  }
  return static_cast<size_t>(-1);
}

void aprob_report_free(aprob_report* report) { delete report; }

// -------------------------------------------------------------- operations

aprob_status aprob_pm(const char* x, unsigned depth, uint64_t step_budget, unsigned workers, aprob_report** out) {
  APROB_REQUIRE(x && out, "null argument");
  return guarded([&] { *out = wrap(aprob::pm_report(aprob::pm_estimate(x, depth, step_budget, workers))); });
}

aprob_status aprob_predict(const char* x, unsigned depth, uint64_t step_budget, unsigned workers,
                           aprob_report** out) {
  APROB_REQUIRE(x && out, "null argument");
  return guarded([&] {
    *out = wrap(aprob::predict_report(x, depth, step_budget, aprob::predict_next(x, depth, step_budget, workers)));
  });
}

aprob_status aprob_convergence(const char* source, size_t horizon, unsigned depth, uint64_t step_budget,
                               uint64_t seed, aprob_report** out) {
  APROB_REQUIRE(source && out, "null argument");
  return guarded([&] {
    const auto trial = aprob::convergence_trial(aprob::parse_bit_source(source), horizon, depth, step_budget, seed);
    *out = wrap(aprob::trial_report(trial));
  });
}

namespace {

aprob_status run_problem(const char* problem_json, const aprob_model* model, unsigned workers, bool invert,
                         aprob_report** out) {
  APROB_REQUIRE(problem_json && out, "null argument");
  return guarded([&] {
    const aprob::ProblemSpec spec = aprob::parse_problem_text(problem_json);
    if (invert && !spec.target) throw aprob::DomainError("search-invert needs a problem with a target");
    if (!invert && !spec.tau) throw aprob::DomainError("optimize needs a problem with tau");
    const auto machine = aprob::make_machine(spec.machine_name, spec.machine_params);
    auto stream = aprob::make_stream(spec.stream, model ? &model->value : nullptr);
    aprob::SearchOptions options;
    options.initial_budget = spec.initial_budget;
    options.max_total = spec.max_total;
    options.workers = workers == 0 ? 1 : workers;
    const auto report = invert ? aprob::levin_search(*machine, *spec.target, *stream, options)
                               : aprob::optimize(*machine, *spec.tau, *stream, options);
    *out = wrap(aprob::search_report(spec.id, invert ? "invert" : "optimize", report));
  });
}

}  // namespace

aprob_status aprob_search_invert(const char* problem_json, const aprob_model* model, unsigned workers,
                                 aprob_report** out) {
  return run_problem(problem_json, model, workers, true, out);
}

aprob_status aprob_optimize(const char* problem_json, const aprob_model* model, unsigned workers,
                            aprob_report** out) {
  return run_problem(problem_json, model, workers, false, out);
}

aprob_status aprob_compress(aprob_model* model, uint64_t step_budget, aprob_report** out) {
  APROB_REQUIRE(model && out, "null argument");
  return guarded([&] {
    auto result = aprob::compress_corpus(model->value, step_budget);
    *out = wrap(aprob::compress_report(result.ledger, result.model));
    model->value = std::move(result.model);
  });
}

aprob_status aprob_incorporate(aprob_model* model, const char* const* tokens, size_t count, const char* context,
                               uint64_t step_budget, aprob_report** out) {
  APROB_REQUIRE(model && out && (tokens || count == 0), "null argument");
  return guarded([&] {
    const aprob::SolvedPair pair{context ? context : "", strings(tokens, count)};
    auto result = aprob::incorporate_solution(model->value, pair, step_budget);
    *out = wrap(aprob::incorporate_report(result.ledger, result.model));
    model->value = std::move(result.model);
  });
}

aprob_status aprob_session(const char* session_json, aprob_model* model, unsigned workers, aprob_model** model_out,
                           aprob_report** out) {
  APROB_REQUIRE(session_json && out, "null argument");
  return guarded([&] {
    const aprob::SessionSpec spec = aprob::parse_session_text(session_json);
    std::vector<aprob::SessionProblem> problems;
    for (const auto& p : spec.problems) problems.push_back(aprob::to_session_problem(p));
    aprob::ProbabilityModel start;
    if (model) {
      start = model->value;
    } else {
      if (spec.alphabet.empty()) throw aprob::DomainError("session without a model needs an alphabet");
      start = aprob::ProbabilityModel(aprob::Alphabet(spec.alphabet), spec.smoothing);
    }
    aprob::SessionConfig config;
    config.compression_factor = spec.compression_factor;
    config.workers = workers == 0 ? 1 : workers;
    auto result = aprob::run_session(problems, std::move(start), config);
    *out = wrap(aprob::session_report(result));
    if (model) {
      model->value = std::move(result.model);
    } else if (model_out) {
      *model_out = new aprob_model{std::move(result.model)};
    }
  });
}

aprob_status aprob_induce(const char* triples_text, const char* schema, size_t max_len, aprob_report** out) {
  APROB_REQUIRE(triples_text && out, "null argument");
  return guarded([&] {
    const auto examples = aprob::parse_triples(triples_text);
    if (examples.empty()) throw aprob::DomainError("no example triples");
    const auto s = schema ? aprob::parse_context_schema(schema) : aprob::ContextSchema::position_and_token;
    aprob::InductionLimits limits;
    if (max_len) limits.max_len = max_len;
    *out = wrap(aprob::induce_report(aprob::induce_by_operator(examples, aprob::expression_model(s), limits)));
  });
}

aprob_status aprob_analogy(const uint64_t* lengths_a, size_t count_a, const uint64_t* lengths_b, size_t count_b,
                           aprob_report** out) {
  APROB_REQUIRE(out && (lengths_a || count_a == 0) && (lengths_b || count_b == 0), "null argument");
  return guarded([&] {
    const std::vector<std::uint64_t> a(lengths_a, lengths_a + count_a);
    const std::vector<std::uint64_t> b(lengths_b, lengths_b + count_b);
    *out = wrap(aprob::analogy_report(aprob::analogy_score(a, b)));
  });
}

aprob_status aprob_cluster(const char* points_text, double delta, size_t max_centers, uint64_t seed,
                           unsigned workers, aprob_report** out) {
  APROB_REQUIRE(points_text && out, "null argument");
  return guarded([&] {
    const auto points = aprob::parse_points(points_text);
    const auto best = aprob::mdl_cluster(points, max_centers, delta, seed, workers == 0 ? 1 : workers);
    const auto one = aprob::cluster_with(points, 1, delta, seed);
    *out = wrap(aprob::cluster_report(best, points, one.total_bits));
  });
}

aprob_status aprob_plan(const char* spec_json, size_t limit, aprob_report** out) {
  APROB_REQUIRE(spec_json && out, "null argument");
  return guarded([&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(spec_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw aprob::FormatError(std::string("malformed planner spec: ") + e.what());
    }
    const std::string root = doc.contains("root") && doc["root"].is_string() ? doc["root"].get<std::string>() : "root";
    aprob::PlannerStream stream(aprob::parse_planner_spec(doc), root);
    std::vector<aprob::Candidate> plans;
    while (plans.size() < limit) {
      auto c = stream.next();
      if (!c) break;
      plans.push_back(std::move(*c));
    }
    *out = wrap(aprob::plan_report(plans));
  });
}

}  // extern "C"
