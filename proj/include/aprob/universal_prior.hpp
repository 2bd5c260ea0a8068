#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aprob/rational.hpp"

namespace aprob {

/// Lower bound on the prior mass of a bit string on the reference machine,
/// certified by enumerating every program up to max_length bits.
struct PriorEstimate {
  std::string target;
  unsigned max_length = 0;
  std::uint64_t step_budget = 0;
  Rational mass;
  std::vector<std::string> programs;  // minimal programs, ordered by (length, value)
};

/// All programs s with |s| <= max_length whose run reads exactly s and emits
/// an output starting with x, minus those extending another such program.
/// The result is prefix-free. `workers` > 1 splits the search by the first
/// opcode; the result does not depend on it.
std::vector<std::string> minimal_programs(std::string_view x, unsigned max_length, std::uint64_t step_budget,
                                          unsigned workers = 1);

PriorEstimate pm_estimate(std::string_view x, unsigned max_length, std::uint64_t step_budget, unsigned workers = 1);

struct Prediction {
  Rational p_one;  // mass(x1) / (mass(x0) + mass(x1))
  Rational mass_zero;
  Rational mass_one;
};

/// Throws InsufficientDepth when neither continuation has any program.
Prediction predict_next(std::string_view x, unsigned max_length, std::uint64_t step_budget, unsigned workers = 1);

enum class BitSource { constant_ones, constant_zeros, fair_coin, biased_coin, period_two };

std::string_view to_string(BitSource source);
BitSource parse_bit_source(std::string_view text);

/// True P(next bit = 1 | history) for a named source. biased_coin emits 1
/// with probability 3/4; period_two emits 0101...
double true_probability_of_one(BitSource source, std::string_view history);

struct TrialStep {
  std::string history;      // bits before this step
  char bit = '0';           // bit drawn from the source
  double predicted_one = 0.0;
  double true_one = 0.0;
  double squared_error = 0.0;
  double cumulative_error = 0.0;
  double predicted_actual = 0.0;  // predicted probability of the drawn bit
};

struct ConvergenceTrial {
  BitSource source = BitSource::fair_coin;
  std::size_t horizon = 0;
  unsigned max_length = 0;
  std::vector<TrialStep> steps;

  double cumulative_error() const { return steps.empty() ? 0.0 : steps.back().cumulative_error; }
};

ConvergenceTrial convergence_trial(BitSource source, std::size_t horizon, unsigned max_length,
                                   std::uint64_t step_budget, std::uint64_t seed);

}  // namespace aprob
