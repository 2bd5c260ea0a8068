#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace aprob {

// ------------------------------------------------------ monotone bit machine

enum class RunStatus { halted, out_of_input, budget_exhausted, invalid };

std::string_view to_string(RunStatus status);

struct MonotoneRun {
  std::size_t consumed = 0;  // input bits read, including a half-read opcode
  std::string output;        // '0'/'1' characters
  RunStatus status = RunStatus::out_of_input;
  std::uint64_t steps = 0;   // opcodes executed

  friend bool operator==(const MonotoneRun&, const MonotoneRun&) = default;
};

bool is_bit_string(std::string_view text) noexcept;

/// Reference machine. Opcodes are read two bits at a time:
///   00 emit 0, 01 emit 1, 10 repeat the last emitted bit, 11 halt.
/// Repeating with nothing emitted yet is invalid. One opcode is one step.
MonotoneRun run_monotone(std::string_view program, std::uint64_t max_steps);

// --------------------------------------------------- expression machine

enum class ExprToken : std::uint8_t { R1, R2, R3, Add, Sub, Mul, Div };

inline constexpr std::array<std::string_view, 7> kExprTokenNames = {"R1", "R2", "R3", "Add", "Sub", "Mul", "Div"};

std::string_view to_string(ExprToken token);
std::optional<ExprToken> parse_expr_token(std::string_view text);

using ExprProgram = std::vector<ExprToken>;

/// Whitespace-separated token names. Throws DomainError on unknown tokens.
ExprProgram parse_expr_program(std::string_view text);
std::string to_string(const ExprProgram& program);

/// A register holds a number, or an operator token copied from the input.
using ExprOperand = std::variant<std::int64_t, std::string>;

struct ExprInput {
  std::int64_t r1 = 0;
  std::int64_t r2 = 0;
  ExprOperand r3;
};

enum class ExprFailure {
  empty_program,
  stack_underflow,
  non_numeric_operand,
  division_by_zero,
  overflow,
  bad_final_stack,
  non_numeric_result,
};

std::string_view to_string(ExprFailure failure);

struct ExprOutcome {
  std::variant<std::int64_t, ExprFailure> result;

  bool ok() const noexcept { return std::holds_alternative<std::int64_t>(result); }
  std::int64_t value() const { return std::get<std::int64_t>(result); }
  ExprFailure failure() const { return std::get<ExprFailure>(result); }
};

/// Stack evaluation. Operators pop the right operand first; division
/// truncates toward zero.
ExprOutcome run_expr(const ExprProgram& program, const ExprInput& input);

// ----------------------------------------------------- machine harness

struct MachineRun {
  bool completed = false;  // false: stopped at the step cap
  std::string output;
  std::optional<double> value;  // numeric score, for optimization machines
  std::uint64_t cost = 0;       // steps actually consumed, never above the cap
};

/// A named deterministic map from candidate strings to outputs with an
/// integer step cost. Implementations must be pure.
class Machine {
 public:
  virtual ~Machine() = default;
  virtual std::string name() const = 0;
  virtual MachineRun run(std::string_view candidate, std::uint64_t step_cap) const = 0;
};

enum class Verdict { solved, failed, capped };

std::string_view to_string(Verdict verdict);

struct Evaluation {
  Verdict verdict = Verdict::failed;
  std::uint64_t cost = 0;
  std::string output;
  std::optional<double> value;
};

/// With a target, solved means the output equals it. Without one
/// (optimization), solved means the run completed and produced a value.
Evaluation evaluate_candidate(const Machine& machine, std::string_view candidate, std::uint64_t step_cap,
                              const std::optional<std::string>& target);

/// Decimal numeral -> its square. Cost: digits + 1.
class SquareMachine final : public Machine {
 public:
  std::string name() const override { return "square"; }
  MachineRun run(std::string_view candidate, std::uint64_t step_cap) const override;
};

/// Output equals the candidate. Cost: max(1, length).
class ConcatTargetMachine final : public Machine {
 public:
  std::string name() const override { return "concat-target"; }
  MachineRun run(std::string_view candidate, std::uint64_t step_cap) const override;
};

/// Candidate is an ExprProgram; output is run_expr on each bound input,
/// comma-joined. Cost: tokens x inputs.
class ExprCheckMachine final : public Machine {
 public:
  explicit ExprCheckMachine(std::vector<ExprInput> inputs);
  std::string name() const override { return "expr-check"; }
  MachineRun run(std::string_view candidate, std::uint64_t step_cap) const override;
  const std::vector<ExprInput>& inputs() const noexcept { return inputs_; }

 private:
  std::vector<ExprInput> inputs_;
};

/// Candidate is a bit program for run_monotone. Cost: opcodes executed.
class MonotoneMachine final : public Machine {
 public:
  std::string name() const override { return "monotone"; }
  MachineRun run(std::string_view candidate, std::uint64_t step_cap) const override;
};

/// Decimal numeral x -> value 1/(1+|x-center|). Cost: digits + 1.
class PeakMachine final : public Machine {
 public:
  explicit PeakMachine(std::int64_t center) : center_(center) {}
  std::string name() const override { return "peak"; }
  MachineRun run(std::string_view candidate, std::uint64_t step_cap) const override;

 private:
  std::int64_t center_;
};

/// Builds a machine from its registry name and parameters:
///   square, concat-target, monotone: no parameters
///   expr-check: {"inputs": [[r1, r2, r3], ...]} (r3 a number or a token)
///   peak: {"center": n}
/// Throws DomainError for unknown names or bad parameters.
std::shared_ptr<const Machine> make_machine(std::string_view name, const nlohmann::json& params = {});

std::vector<std::string> machine_names();

}  // namespace aprob
