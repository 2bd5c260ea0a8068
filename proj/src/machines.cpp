#include "aprob/machines.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "aprob/errors.hpp"
#include "aprob/rational.hpp"

namespace aprob {

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::halted: return "halted";
    case RunStatus::out_of_input: return "out-of-input";
    case RunStatus::budget_exhausted: return "budget-exhausted";
    case RunStatus::invalid: return "invalid";
  }
  return "?";
}

bool is_bit_string(std::string_view text) noexcept {
  for (const char c : text) {
    if (c != '0' && c != '1') return false;
  }
  return true;
}

MonotoneRun run_monotone(std::string_view program, std::uint64_t max_steps) {
  if (max_steps == 0) throw DomainError("step budget must be at least 1");
  if (!is_bit_string(program)) throw DomainError("program must consist of '0' and '1' only");

  MonotoneRun run;
  while (true) {
    if (run.consumed == program.size()) {
      run.status = RunStatus::out_of_input;
      return run;
    }
    if (run.steps == max_steps) {
      run.status = RunStatus::budget_exhausted;
      return run;
    }
    const char high = program[run.consumed++];
    if (run.consumed == program.size()) {
      run.status = RunStatus::out_of_input;
      return run;
    }
    const char low = program[run.consumed++];
    ++run.steps;
    if (high == '0') {
      run.output.push_back(low);
    } else if (low == '0') {
      if (run.output.empty()) {
        run.status = RunStatus::invalid;
        return run;
      }
      run.output.push_back(run.output.back());
    } else {
      run.status = RunStatus::halted;
      return run;
    }
  }
}

// ------------------------------------------------------------ expressions

std::string_view to_string(ExprToken token) { return kExprTokenNames[static_cast<std::size_t>(token)]; }

std::optional<ExprToken> parse_expr_token(std::string_view text) {
  for (std::size_t i = 0; i < kExprTokenNames.size(); ++i) {
    if (kExprTokenNames[i] == text) return static_cast<ExprToken>(i);
  }
  return std::nullopt;
}

ExprProgram parse_expr_program(std::string_view text) {
  ExprProgram program;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    const auto token = parse_expr_token(word);
    if (!token) throw DomainError("unknown expression token '" + word + "'");
    program.push_back(*token);
  }
  return program;
}

std::string to_string(const ExprProgram& program) {
  std::string out;
  for (const auto token : program) {
    if (!out.empty()) out += ' ';
    out += to_string(token);
  }
  return out;
}

std::string_view to_string(ExprFailure failure) {
  switch (failure) {
    case ExprFailure::empty_program: return "empty-program";
    case ExprFailure::stack_underflow: return "stack-underflow";
    case ExprFailure::non_numeric_operand: return "non-numeric-operand";
    case ExprFailure::division_by_zero: return "division-by-zero";
    case ExprFailure::overflow: return "overflow";
    case ExprFailure::bad_final_stack: return "bad-final-stack";
    case ExprFailure::non_numeric_result: return "non-numeric-result";
  }
  return "?";
}

ExprOutcome run_expr(const ExprProgram& program, const ExprInput& input) {
  if (program.empty()) return {ExprFailure::empty_program};
  std::vector<ExprOperand> stack;
  for (const auto token : program) {
    switch (token) {
      case ExprToken::R1: stack.emplace_back(input.r1); continue;
      case ExprToken::R2: stack.emplace_back(input.r2); continue;
      case ExprToken::R3: stack.push_back(input.r3); continue;
      default: break;
    }
    if (stack.size() < 2) return {ExprFailure::stack_underflow};
    const ExprOperand right = std::move(stack.back());
    stack.pop_back();
    const ExprOperand left = std::move(stack.back());
    stack.pop_back();
    const auto* a = std::get_if<std::int64_t>(&left);
    const auto* b = std::get_if<std::int64_t>(&right);
    if (a == nullptr || b == nullptr) return {ExprFailure::non_numeric_operand};
    std::int64_t result = 0;
    bool overflowed = false;
    switch (token) {
      case ExprToken::Add: overflowed = __builtin_add_overflow(*a, *b, &result); break;
      case ExprToken::Sub: overflowed = __builtin_sub_overflow(*a, *b, &result); break;
      case ExprToken::Mul: overflowed = __builtin_mul_overflow(*a, *b, &result); break;
      case ExprToken::Div:
        if (*b == 0) return {ExprFailure::division_by_zero};
        if (*a == std::numeric_limits<std::int64_t>::min() && *b == -1) return {ExprFailure::overflow};
        result = *a / *b;
        break;
      default: break;
    }
    if (overflowed) return {ExprFailure::overflow};
    stack.emplace_back(result);
  }
  if (stack.size() != 1) return {ExprFailure::bad_final_stack};
  if (const auto* v = std::get_if<std::int64_t>(&stack.front())) return {*v};
  return {ExprFailure::non_numeric_result};
}

// ------------------------------------------------------------- harness

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::solved: return "solved";
    case Verdict::failed: return "failed";
    case Verdict::capped: return "capped";
  }
  return "?";
}

Evaluation evaluate_candidate(const Machine& machine, std::string_view candidate, std::uint64_t step_cap,
                              const std::optional<std::string>& target) {
  if (step_cap == 0) throw DomainError("step cap must be at least 1");
  MachineRun run = machine.run(candidate, step_cap);
  Evaluation e;
  e.cost = run.cost;
  e.output = std::move(run.output);
  e.value = run.value;
  if (!run.completed) {
    e.verdict = Verdict::capped;
  } else if (target) {
    e.verdict = e.output == *target ? Verdict::solved : Verdict::failed;
  } else {
    e.verdict = e.value ? Verdict::solved : Verdict::failed;
  }
  return e;
}

namespace {

MachineRun capped(std::uint64_t step_cap) { return MachineRun{false, {}, std::nullopt, step_cap}; }

// Digits of an optionally signed decimal numeral, or nullopt.
std::optional<std::string_view> numeral_digits(std::string_view candidate) {
  std::string_view digits = candidate;
  if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
  if (digits.empty()) return std::nullopt;
  for (const char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  }
  return digits;
}

}  // namespace

MachineRun SquareMachine::run(std::string_view candidate, std::uint64_t step_cap) const {
  const auto digits = numeral_digits(candidate);
  const std::uint64_t cost = digits ? digits->size() + 1 : 1;
  if (cost > step_cap) return capped(step_cap);
  if (!digits) return MachineRun{true, {}, std::nullopt, cost};
  BigInt n{std::string(*digits)};
  n *= n;
  return MachineRun{true, n.str(), std::nullopt, cost};
}

MachineRun ConcatTargetMachine::run(std::string_view candidate, std::uint64_t step_cap) const {
  const std::uint64_t cost = std::max<std::uint64_t>(1, candidate.size());
  if (cost > step_cap) return capped(step_cap);
  return MachineRun{true, std::string(candidate), std::nullopt, cost};
}

ExprCheckMachine::ExprCheckMachine(std::vector<ExprInput> inputs) : inputs_(std::move(inputs)) {
  if (inputs_.empty()) throw DomainError("expr-check needs at least one input triple");
}

MachineRun ExprCheckMachine::run(std::string_view candidate, std::uint64_t step_cap) const {
  std::vector<ExprToken> program;
  std::istringstream in{std::string(candidate)};
  std::string word;
  bool well_formed = true;
  while (in >> word) {
    if (const auto token = parse_expr_token(word)) {
      program.push_back(*token);
    } else {
      well_formed = false;
      break;
    }
  }
  const std::uint64_t cost = std::max<std::uint64_t>(1, program.size()) * inputs_.size();
  if (cost > step_cap) return capped(step_cap);
  if (!well_formed) return MachineRun{true, "!malformed", std::nullopt, cost};
  std::string output;
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    const auto outcome = run_expr(program, inputs_[i]);
    if (i) output += ',';
    output += outcome.ok() ? std::to_string(outcome.value()) : "!" + std::string(to_string(outcome.failure()));
  }
  return MachineRun{true, std::move(output), std::nullopt, cost};
}

MachineRun MonotoneMachine::run(std::string_view candidate, std::uint64_t step_cap) const {
  if (!is_bit_string(candidate)) return MachineRun{true, "!malformed", std::nullopt, 1};
  const MonotoneRun r = run_monotone(candidate, step_cap);
  if (r.status == RunStatus::budget_exhausted) return capped(step_cap);
  return MachineRun{true, r.output, std::nullopt, std::max<std::uint64_t>(1, r.steps)};
}

MachineRun PeakMachine::run(std::string_view candidate, std::uint64_t step_cap) const {
  const auto digits = numeral_digits(candidate);
  const std::uint64_t cost = digits ? digits->size() + 1 : 1;
  if (cost > step_cap) return capped(step_cap);
  if (!digits || digits->size() > 18) return MachineRun{true, {}, std::nullopt, cost};
  const std::int64_t x = std::stoll(std::string(candidate));
  const double distance = std::fabs(static_cast<double>(x) - static_cast<double>(center_));
  const double value = 1.0 / (1.0 + distance);
  return MachineRun{true, fmt::format("{}", value), value, cost};
}

// ------------------------------------------------------------ registry

namespace {

ExprOperand operand_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  throw DomainError("expr-check register must be an integer or a token string");
}

}  // namespace

std::shared_ptr<const Machine> make_machine(std::string_view name, const nlohmann::json& params) {
  if (name == "square") return std::make_shared<SquareMachine>();
  if (name == "concat-target") return std::make_shared<ConcatTargetMachine>();
  if (name == "monotone") return std::make_shared<MonotoneMachine>();
  if (name == "peak") {
    if (!params.is_object() || !params.contains("center") || !params["center"].is_number_integer()) {
      throw DomainError("peak machine needs an integer 'center'");
    }
    return std::make_shared<PeakMachine>(params["center"].get<std::int64_t>());
  }
  if (name == "expr-check") {
    if (!params.is_object() || !params.contains("inputs") || !params["inputs"].is_array()) {
      throw DomainError("expr-check machine needs an 'inputs' array");
    }
    std::vector<ExprInput> inputs;
    for (const auto& row : params["inputs"]) {
      if (!row.is_array() || row.size() != 3 || !row[0].is_number_integer() || !row[1].is_number_integer()) {
        throw DomainError("expr-check input must be [r1, r2, r3] with integer r1 and r2");
      }
      inputs.push_back(ExprInput{row[0].get<std::int64_t>(), row[1].get<std::int64_t>(), operand_from_json(row[2])});
    }
    return std::make_shared<ExprCheckMachine>(std::move(inputs));
  }
  throw DomainError("unknown machine '" + std::string(name) + "'");
}

std::vector<std::string> machine_names() { return {"concat-target", "expr-check", "monotone", "peak", "square"}; }

}  // namespace aprob
