#ifndef APROB_APROB_H
#define APROB_APROB_H

/*
 * C interface to the aprob library.
 *
 * Every operation returns an aprob_status. On failure the message is
 * available from aprob_last_error() until the next call on the same thread.
 * Handles are opaque; free them with the matching *_free function. Strings
 * returned through char** are heap copies owned by the caller
 * (aprob_string_free); strings returned as const char* belong to the handle.
 *
 * Exact probabilities cross the boundary as "num/den" text.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define APROB_API __declspec(dllexport)
#elif defined(__GNUC__)
#define APROB_API __attribute__((visibility("default")))
#else
#define APROB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aprob_status {
  APROB_OK = 0,
  APROB_E_ARGUMENT = 1, /* null pointer or malformed argument */
  APROB_E_DOMAIN = 2,
  APROB_E_CONTRACT = 3,
  APROB_E_DEPTH = 4,    /* enumeration depth too small to predict */
  APROB_E_FORMAT = 5,   /* malformed or unsupported document */
  APROB_E_IO = 6,
  APROB_E_INTERNAL = 7
} aprob_status;

typedef struct aprob_model aprob_model;
typedef struct aprob_report aprob_report;

APROB_API const char* aprob_version(void);
APROB_API const char* aprob_status_name(aprob_status status);
APROB_API const char* aprob_last_error(void);
APROB_API void aprob_string_free(char* text);

/* ---- models ---- */

/* schema: "position" or "position+token"; smoothing: rational text, NULL for 1. */
APROB_API aprob_status aprob_model_create(const char* const* alphabet, size_t count, const char* smoothing,
                                          const char* schema, aprob_model** out);
APROB_API aprob_status aprob_model_load(const char* path, aprob_model** out);
APROB_API aprob_status aprob_model_from_json(const char* text, aprob_model** out);
APROB_API aprob_status aprob_model_save(const aprob_model* model, const char* path);
APROB_API aprob_status aprob_model_to_json(const aprob_model* model, char** out);
APROB_API aprob_status aprob_model_clone(const aprob_model* model, aprob_model** out);
APROB_API void aprob_model_free(aprob_model* model);

/* Appends tokens to the model's corpus; context may be NULL. */
APROB_API aprob_status aprob_model_observe(aprob_model* model, const char* const* tokens, size_t count,
                                           const char* context);
APROB_API aprob_status aprob_model_symbol_count(const aprob_model* model, size_t* out);
APROB_API aprob_status aprob_model_description_length(const aprob_model* model, double* out);
APROB_API aprob_status aprob_model_probability(const aprob_model* model, const char* symbol, char** out);
/* Positional probability of a base symbol; token may be NULL. */
APROB_API aprob_status aprob_model_context_probability(const aprob_model* model, const char* symbol,
                                                       size_t position, const char* token, char** out);
/* Expanded corpus, space-joined. */
APROB_API aprob_status aprob_model_expanded_corpus(const aprob_model* model, char** out);

/* ---- reports ---- */

APROB_API const char* aprob_report_text(const aprob_report* report);
/* All records, one key=value line each. */
APROB_API const char* aprob_report_records(const aprob_report* report);
APROB_API size_t aprob_report_record_count(const aprob_report* report);
APROB_API const char* aprob_report_record(const aprob_report* report, size_t index);
/* Value of key in record index, or NULL. */
APROB_API const char* aprob_report_get(const aprob_report* report, size_t index, const char* key);
/* First record of the given kind, or (size_t)-1. */
APROB_API size_t aprob_report_find(const aprob_report* report, const char* kind);
APROB_API void aprob_report_free(aprob_report* report);

/* ---- operations ---- */

APROB_API aprob_status aprob_pm(const char* x, unsigned depth, uint64_t step_budget, unsigned workers,
                                aprob_report** out);
APROB_API aprob_status aprob_predict(const char* x, unsigned depth, uint64_t step_budget, unsigned workers,
                                     aprob_report** out);
/* source: constant-ones, constant-zeros, fair-coin, biased-coin, period-2 */
APROB_API aprob_status aprob_convergence(const char* source, size_t horizon, unsigned depth, uint64_t step_budget,
                                         uint64_t seed, aprob_report** out);

/* problem_json: a problem document; model may be NULL unless the stream kind is "model". */
APROB_API aprob_status aprob_search_invert(const char* problem_json, const aprob_model* model, unsigned workers,
                                           aprob_report** out);
APROB_API aprob_status aprob_optimize(const char* problem_json, const aprob_model* model, unsigned workers,
                                      aprob_report** out);

/* Both update the model in place. */
APROB_API aprob_status aprob_compress(aprob_model* model, uint64_t step_budget, aprob_report** out);
APROB_API aprob_status aprob_incorporate(aprob_model* model, const char* const* tokens, size_t count,
                                         const char* context, uint64_t step_budget, aprob_report** out);

/* With a model, the session updates it in place. Without one, a model is
 * built from the session's alphabet and returned through model_out when
 * that is non-NULL. */
APROB_API aprob_status aprob_session(const char* session_json, aprob_model* model, unsigned workers,
                                     aprob_model** model_out, aprob_report** out);

APROB_API aprob_status aprob_induce(const char* triples_text, const char* schema, size_t max_len,
                                    aprob_report** out);
APROB_API aprob_status aprob_analogy(const uint64_t* lengths_a, size_t count_a, const uint64_t* lengths_b,
                                     size_t count_b, aprob_report** out);
APROB_API aprob_status aprob_cluster(const char* points_text, double delta, size_t max_centers, uint64_t seed,
                                     unsigned workers, aprob_report** out);
/* Emits the first `limit` plans of a planner spec document. */
APROB_API aprob_status aprob_plan(const char* spec_json, size_t limit, aprob_report** out);

#ifdef __cplusplus
}
#endif

#endif
