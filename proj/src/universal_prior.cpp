#include "aprob/universal_prior.hpp"

#include <algorithm>
#include <future>
#include <random>

#include "aprob/errors.hpp"
#include "aprob/machines.hpp"

namespace aprob {
namespace {

struct Enumerator {
  std::string_view target;
  unsigned max_length;
  std::uint64_t step_budget;
  std::vector<std::string> found;

  // `program` has been read completely, after `steps` opcodes producing
  // `output`, which is a proper prefix of the target.
  void extend(std::string& program, std::string& output, std::uint64_t steps) {
    if (program.size() + 2 > max_length || steps == step_budget) return;
    for (const char* opcode : {"00", "01", "10"}) {
      char bit = opcode[1];
      if (opcode[0] == '1') {
        if (output.empty()) continue;
        bit = output.back();
      }
      if (bit != target[output.size()]) continue;
      program.append(opcode);
      output.push_back(bit);
      if (output.size() == target.size()) {
        found.push_back(program);
      } else {
        extend(program, output, steps + 1);
      }
      output.pop_back();
      program.resize(program.size() - 2);
    }
    // 11 halts without output, so it never leads to a program for the target.
  }
};

bool program_order(const std::string& a, const std::string& b) {
  return a.size() != b.size() ? a.size() < b.size() : a < b;
}

}  // namespace

std::vector<std::string> minimal_programs(std::string_view x, unsigned max_length, std::uint64_t step_budget,
                                          unsigned workers) {
  if (max_length == 0) throw DomainError("enumeration depth must be at least 1");
  if (step_budget == 0) throw DomainError("step budget must be at least 1");
  if (!is_bit_string(x)) throw DomainError("target must be a bit string");
  if (x.empty()) return {""};

  std::vector<std::string> programs;
  if (workers <= 1) {
    Enumerator e{x, max_length, step_budget, {}};
    std::string program;
    std::string output;
    e.extend(program, output, 0);
    programs = std::move(e.found);
  } else {
    // The first opcode must emit x[0]; after it every branch is independent.
    std::vector<std::future<std::vector<std::string>>> parts;
    for (const char* first : {"00", "01"}) {
      if (first[1] != x[0] || max_length < 2) continue;
      parts.push_back(std::async(std::launch::async, [=] {
        Enumerator e{x, max_length, step_budget, {}};
        std::string program = first;
        std::string output(1, first[1]);
        if (output.size() == x.size()) return std::vector<std::string>{program};
        e.extend(program, output, 1);
        return std::move(e.found);
      }));
    }
    for (auto& part : parts) {
      auto chunk = part.get();
      programs.insert(programs.end(), chunk.begin(), chunk.end());
    }
  }
  std::sort(programs.begin(), programs.end(), program_order);
  return programs;
}

PriorEstimate pm_estimate(std::string_view x, unsigned max_length, std::uint64_t step_budget, unsigned workers) {
  PriorEstimate estimate{std::string(x), max_length, step_budget, 0,
                         minimal_programs(x, max_length, step_budget, workers)};
  for (const auto& p : estimate.programs) estimate.mass += dyadic(p.size());
  return estimate;
}

Prediction predict_next(std::string_view x, unsigned max_length, std::uint64_t step_budget, unsigned workers) {
  const std::string base(x);
  Prediction prediction;
  prediction.mass_zero = pm_estimate(base + "0", max_length, step_budget, workers).mass;
  prediction.mass_one = pm_estimate(base + "1", max_length, step_budget, workers).mass;
  const Rational total = prediction.mass_zero + prediction.mass_one;
  if (total == 0) {
    throw InsufficientDepth("insufficient enumeration depth: no program of length <= " + std::to_string(max_length) +
                                " emits any continuation of '" + base + "'",
                            max_length);
  }
  prediction.p_one = prediction.mass_one / total;
  return prediction;
}

// ------------------------------------------------------------ sources

std::string_view to_string(BitSource source) {
  switch (source) {
    case BitSource::constant_ones: return "constant-ones";
    case BitSource::constant_zeros: return "constant-zeros";
    case BitSource::fair_coin: return "fair-coin";
    case BitSource::biased_coin: return "biased-coin";
    case BitSource::period_two: return "period-2";
  }
  return "?";
}

BitSource parse_bit_source(std::string_view text) {
  for (const auto s : {BitSource::constant_ones, BitSource::constant_zeros, BitSource::fair_coin,
                       BitSource::biased_coin, BitSource::period_two}) {
    if (to_string(s) == text) return s;
  }
  throw DomainError("unknown bit source '" + std::string(text) + "'");
}

double true_probability_of_one(BitSource source, std::string_view history) {
  switch (source) {
    case BitSource::constant_ones: return 1.0;
    case BitSource::constant_zeros: return 0.0;
    case BitSource::fair_coin: return 0.5;
    case BitSource::biased_coin: return 0.75;
    case BitSource::period_two: return history.size() % 2 == 1 ? 1.0 : 0.0;
  }
  return 0.5;
}

ConvergenceTrial convergence_trial(BitSource source, std::size_t horizon, unsigned max_length,
                                   std::uint64_t step_budget, std::uint64_t seed) {
  if (horizon == 0) throw DomainError("trial horizon must be at least 1");
  std::mt19937_64 rng(seed);
  ConvergenceTrial trial{source, horizon, max_length, {}};
  std::string history;
  double cumulative = 0.0;
  for (std::size_t m = 0; m < horizon; ++m) {
    const double truth = true_probability_of_one(source, history);
    // 53 random bits -> uniform in [0, 1); identical on every platform.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const char bit = u < truth ? '1' : '0';
    const double predicted = to_double(predict_next(history, max_length, step_budget).p_one);
    const double error = (predicted - truth) * (predicted - truth);
    cumulative += error;
    trial.steps.push_back(
        TrialStep{history, bit, predicted, truth, error, cumulative, bit == '1' ? predicted : 1.0 - predicted});
    history.push_back(bit);
  }
  return trial;
}

}  // namespace aprob
