#include "aprob/report.hpp"

#include <fmt/format.h>

#include "aprob/errors.hpp"

namespace aprob {
namespace {

bool needs_quotes(std::string_view value) {
  if (value.empty()) return true;
  for (const char c : value) {
    if (c == ' ' || c == '"' || c == '=' || c == '\\' || c == '\t' || c == '\n') return true;
  }
  return false;
}

std::string quote_value(std::string_view value) {
  if (!needs_quotes(value)) return std::string(value);
  std::string out = "\"";
  for (const char c : value) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& parts, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += separator;
    out += parts[i];
  }
  return out;
}

std::string display(std::string_view payload) { return payload.empty() ? "(empty)" : std::string(payload); }

}  // namespace

Record& Record::add(std::string_view key, std::string_view value) {
  fields_.emplace_back(std::string(key), std::string(value));
  return *this;
}

Record& Record::add(std::string_view key, const Rational& value) { return add(key, to_string(value)); }

Record& Record::add(std::string_view key, double value) { return add(key, fmt::format("{:.17g}", value)); }

Record& Record::add(std::string_view key, std::uint64_t value) { return add(key, std::to_string(value)); }

Record& Record::add(std::string_view key, std::int64_t value) { return add(key, std::to_string(value)); }

const std::string* Record::get(std::string_view key) const {
  for (const auto& [k, v] : fields_) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string Record::str() const {
  std::string out;
  for (const auto& [k, v] : fields_) {
    if (!out.empty()) out += ' ';
    out += k;
    out += '=';
    out += quote_value(v);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_record(std::string_view line) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i == line.size()) break;
    const auto eq = line.find('=', i);
    if (eq == std::string_view::npos) throw FormatError("record field without '='");
    std::string key(line.substr(i, eq - i));
    i = eq + 1;
    std::string value;
    if (i < line.size() && line[i] == '"') {
      ++i;
      while (i < line.size() && line[i] != '"') {
        if (line[i] == '\\' && i + 1 < line.size()) {
          ++i;
          value += line[i] == 'n' ? '\n' : line[i];
        } else {
          value += line[i];
        }
        ++i;
      }
      if (i == line.size()) throw FormatError("unterminated quoted value");
      ++i;
    } else {
      const auto end = line.find(' ', i);
      value = std::string(line.substr(i, end == std::string_view::npos ? std::string_view::npos : end - i));
      i = end == std::string_view::npos ? line.size() : end;
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::string Report::records_text() const {
  std::string out;
  for (const auto& r : records) {
    out += r.str();
    out += '\n';
  }
  return out;
}

std::string short_number(double value) { return fmt::format("{:.6g}", value); }

Report pm_report(const PriorEstimate& estimate) {
  Report report;
  report.text = fmt::format("pm({}) >= {} ({}) at depth {}, step budget {}\nminimal programs ({}): {{{}}}\n",
                            display(estimate.target), to_string(estimate.mass),
                            short_number(to_double(estimate.mass)), estimate.max_length, estimate.step_budget,
                            estimate.programs.size(), join(estimate.programs, ", "));
  report.records.push_back(Record("pm")
                               .add("x", estimate.target)
                               .add("depth", estimate.max_length)
                               .add("budget", estimate.step_budget)
                               .add("mass", estimate.mass)
                               .add("mass_value", to_double(estimate.mass))
                               .add("programs", static_cast<std::uint64_t>(estimate.programs.size())));
  for (const auto& program : estimate.programs) {
    report.records.push_back(Record("program")
                                 .add("x", estimate.target)
                                 .add("program", program)
                                 .add("length", static_cast<std::uint64_t>(program.size())));
  }
  return report;
}

Report predict_report(std::string_view x, unsigned depth, std::uint64_t budget, const Prediction& prediction) {
  Report report;
  const double p = to_double(prediction.p_one);
  report.text = fmt::format(
      "P(next = 1 | {}) = {} ({})\n  pm({}0) >= {}\n  pm({}1) >= {}\n  depth {}, step budget {}\n", display(x),
      to_string(prediction.p_one), short_number(p), x, to_string(prediction.mass_zero), x,
      to_string(prediction.mass_one), depth, budget);
  report.records.push_back(Record("predict")
                               .add("x", x)
                               .add("depth", depth)
                               .add("budget", budget)
                               .add("p_one", prediction.p_one)
                               .add("p_one_value", p)
                               .add("mass_zero", prediction.mass_zero)
                               .add("mass_one", prediction.mass_one));
  return report;
}

Report trial_report(const ConvergenceTrial& trial) {
  Report report;
  report.text = fmt::format("convergence on {} (depth {}, {} steps)\n", to_string(trial.source), trial.max_length,
                            trial.steps.size());
  report.text += "  step  bit  P(1)      true     P(actual)  cum.sq.err\n";
  for (std::size_t i = 0; i < trial.steps.size(); ++i) {
    const auto& s = trial.steps[i];
    report.text += fmt::format("  {:>4}  {:>3}  {:<8.6f}  {:<7.4f}  {:<9.6f}  {:.6f}\n", i + 1, s.bit,
                               s.predicted_one, s.true_one, s.predicted_actual, s.cumulative_error);
    report.records.push_back(Record("trial_step")
                                 .add("step", static_cast<std::uint64_t>(i + 1))
                                 .add("history", s.history)
                                 .add("bit", std::string(1, s.bit))
                                 .add("predicted_one", s.predicted_one)
                                 .add("true_one", s.true_one)
                                 .add("predicted_actual", s.predicted_actual)
                                 .add("squared_error", s.squared_error)
                                 .add("cumulative_error", s.cumulative_error));
  }
  report.records.push_back(Record("trial")
                               .add("source", to_string(trial.source))
                               .add("depth", trial.max_length)
                               .add("steps", static_cast<std::uint64_t>(trial.steps.size()))
                               .add("cumulative_error", trial.cumulative_error()));
  return report;
}

namespace {

void append_search(Report& report, std::string_view id, std::string_view mode, const SearchReport& search) {
  Record summary("search");
  if (!id.empty()) summary.add("id", id);
  summary.add("mode", mode)
      .add("outcome", to_string(search.outcome))
      .add("total_steps", search.total_steps)
      .add("phases", static_cast<std::uint64_t>(search.phases.size()));

  report.text += fmt::format("{}{}: {}\n", id.empty() ? "" : fmt::format("[{}] ", id), mode,
                             to_string(search.outcome));
  if (search.solution) {
    const auto& s = *search.solution;
    summary.add("solution", s.payload).add("p", s.p).add("index", static_cast<std::uint64_t>(s.index));
    report.text += fmt::format("  solution: {}\n  p = {} ({}), emitted #{}\n", display(s.payload), to_string(s.p),
                               short_number(to_double(s.p)), s.index);
    if (mode == "invert") {
      summary.add("solve_steps", search.solve_steps);
      report.text += fmt::format("  t_j = {} steps\n", search.solve_steps);
    }
  }
  if (search.best_value) {
    summary.add("best_value", *search.best_value);
    report.text += fmt::format("  best value = {}\n", short_number(*search.best_value));
  }
  report.text += fmt::format("  total steps = {} over {} phase(s)\n", search.total_steps, search.phases.size());
  if (search.bound_ratio) {
    summary.add("bound_ratio", *search.bound_ratio);
    report.text += fmt::format("  total / (t_j / p_j) = {}\n", short_number(*search.bound_ratio));
  }
  report.records.push_back(std::move(summary));
  for (const auto& phase : search.phases) {
    Record r("phase");
    if (!id.empty()) r.add("id", id);
    report.records.push_back(r.add("budget", phase.budget)
                                 .add("tested", static_cast<std::uint64_t>(phase.tested))
                                 .add("steps", phase.steps));
    report.text += fmt::format("    T = {:<8} tested {:<6} steps {}\n", phase.budget, phase.tested, phase.steps);
  }
}

void append_ledger(Report& report, std::string_view kind, std::string_view id, const CompressionLedger& ledger,
                   bool with_ps) {
  Record r(kind);
  if (!id.empty()) r.add("id", id);
  r.add("l0", ledger.l0);
  if (with_ps) r.add("l_ps", ledger.l_ps);
  r.add("l_after", ledger.l_after)
      .add("accepted", ledger.accepted)
      .add("defined", join(ledger.defined, " "))
      .add("steps_used", ledger.steps_used);
  report.records.push_back(std::move(r));

  report.text += fmt::format("  L0 = {} bits", short_number(ledger.l0));
  if (with_ps) report.text += fmt::format(", L_PS = {} bits", short_number(ledger.l_ps));
  report.text += fmt::format(", L_after = {} bits ({})\n", short_number(ledger.l_after),
                             ledger.accepted ? "accepted" : "rejected");
  if (!ledger.defined.empty()) report.text += fmt::format("  new composites: {}\n", join(ledger.defined, " "));
  report.text += fmt::format("  compression steps = {}\n", ledger.steps_used);
}

void append_composites(Report& report, const ProbabilityModel& model) {
  for (const auto& d : model.composites().definitions()) {
    report.records.push_back(Record("composite").add("symbol", d.symbol).add("body", join(d.body, " ")));
  }
}

}  // namespace

Report search_report(std::string_view id, std::string_view mode, const SearchReport& search) {
  Report report;
  append_search(report, id, mode, search);
  return report;
}

Report compress_report(const CompressionLedger& ledger, const ProbabilityModel& model) {
  Report report;
  report.text = "compress:\n";
  append_ledger(report, "compress", {}, ledger, false);
  if (ledger.l0 > 0) {
    report.text += fmt::format("  reduction = {}%\n", short_number(100.0 * (1.0 - ledger.l_after / ledger.l0)));
  }
  append_composites(report, model);
  return report;
}

Report incorporate_report(const CompressionLedger& ledger, const ProbabilityModel& model) {
  Report report;
  report.text = "incorporate:\n";
  append_ledger(report, "incorporate", {}, ledger, true);
  append_composites(report, model);
  return report;
}

Report session_report(const SessionResult& result) {
  Report report;
  for (const auto& entry : result.trace) {
    if (!entry.error.empty()) {
      report.text += fmt::format("[{}] error: {}\n", entry.id, entry.error);
      report.records.push_back(Record("session_error").add("id", entry.id).add("error", entry.error));
      continue;
    }
    if (entry.search) append_search(report, entry.id, "solve", *entry.search);
    if (entry.ledger) append_ledger(report, "update", entry.id, *entry.ledger, true);
  }
  report.text += fmt::format("final model: {} symbols, {} composites, L = {} bits\n", result.model.alphabet().size(),
                             result.model.composites().size(), short_number(result.model.description_length()));
  report.records.push_back(Record("session")
                               .add("problems", static_cast<std::uint64_t>(result.trace.size()))
                               .add("symbols", static_cast<std::uint64_t>(result.model.alphabet().size()))
                               .add("composites", static_cast<std::uint64_t>(result.model.composites().size()))
                               .add("description_length", result.model.description_length()));
  append_composites(report, result.model);
  return report;
}

Report induce_report(const std::vector<std::pair<std::string, std::vector<InducedProgram>>>& groups) {
  Report report;
  for (const auto& [op, programs] : groups) {
    report.text += fmt::format("operator {}: {} consistent program(s)\n", op, programs.size());
    for (std::size_t i = 0; i < programs.size(); ++i) {
      const auto& p = programs[i];
      const std::string text = to_string(p.program);
      report.text += fmt::format("  {:>2}. {:<16} prior {} posterior {} ({})\n", i + 1, text, to_string(p.prior),
                                 to_string(p.posterior), short_number(to_double(p.posterior)));
      report.records.push_back(Record("induced")
                                   .add("op", op)
                                   .add("rank", static_cast<std::uint64_t>(i + 1))
                                   .add("program", text)
                                   .add("prior", p.prior)
                                   .add("posterior", p.posterior)
                                   .add("posterior_value", to_double(p.posterior)));
    }
  }
  return report;
}

Report analogy_report(const AnalogyScore& score) {
  Report report;
  report.text = fmt::format("mass(a) = {} x 2^-{} ({})\nmass(b) = {} x 2^-{} ({})\nratio a/b = {}\n",
                            to_string(score.mass_a), score.common_length, short_number(to_double(score.mass_a)),
                            to_string(score.mass_b), score.common_length, short_number(to_double(score.mass_b)),
                            short_number(score.ratio));
  report.records.push_back(Record("analogy")
                               .add("scale_exponent", score.common_length)
                               .add("mass_a", score.mass_a)
                               .add("mass_b", score.mass_b)
                               .add("mass_a_value", to_double(score.mass_a))
                               .add("mass_b_value", to_double(score.mass_b))
                               .add("ratio", score.ratio));
  return report;
}

Report cluster_report(const ClusterCoding& coding, std::span<const Point> points, std::uint64_t one_center_bits) {
  Report report;
  report.text = fmt::format("{} center(s), delta {}: {} bits (one center: {} bits)\n", coding.centers.size(),
                            short_number(coding.delta), coding.total_bits, one_center_bits);
  report.records.push_back(Record("cluster")
                               .add("centers", static_cast<std::uint64_t>(coding.centers.size()))
                               .add("delta", coding.delta)
                               .add("total_bits", coding.total_bits)
                               .add("one_center_bits", one_center_bits));
  for (std::size_t c = 0; c < coding.centers.size(); ++c) {
    std::vector<std::string> coords;
    for (const auto q : coding.centers[c]) coords.push_back(short_number(static_cast<double>(q) * coding.delta));
    report.text += fmt::format("  center {}: ({})\n", c, join(coords, ", "));
    std::vector<std::string> quanta;
    for (const auto q : coding.centers[c]) quanta.push_back(std::to_string(q));
    report.records.push_back(
        Record("center").add("index", static_cast<std::uint64_t>(c)).add("quantized", join(quanta, ",")));
  }
  for (std::size_t i = 0; i < points.size() && i < coding.assignments.size(); ++i) {
    std::vector<std::string> coords;
    for (const double v : points[i]) coords.push_back(short_number(v));
    report.text += fmt::format("  point {} ({}) -> center {}\n", i, join(coords, ", "), coding.assignments[i]);
    report.records.push_back(Record("assignment")
                                 .add("point", static_cast<std::uint64_t>(i))
                                 .add("center", static_cast<std::uint64_t>(coding.assignments[i])));
  }
  return report;
}

Report plan_report(std::span<const Candidate> plans) {
  Report report;
  for (const auto& plan : plans) {
    report.text += fmt::format("{:>4}  {:<12} {}\n", plan.index + 1, to_string(plan.p), plan.payload);
    report.records.push_back(Record("plan")
                                 .add("rank", static_cast<std::uint64_t>(plan.index + 1))
                                 .add("p", plan.p)
                                 .add("p_value", to_double(plan.p))
                                 .add("plan", plan.payload));
  }
  return report;
}

}  // namespace aprob
