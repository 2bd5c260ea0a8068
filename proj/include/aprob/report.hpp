#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aprob/applications.hpp"
#include "aprob/rational.hpp"
#include "aprob/search.hpp"
#include "aprob/universal_prior.hpp"
#include "aprob/update.hpp"

namespace aprob {

/// One machine-readable line: space-separated key=value pairs in insertion
/// order. Values that are empty or contain spaces, quotes or '=' are
/// double-quoted with backslash escapes.
class Record {
 public:
  explicit Record(std::string_view kind) { add("kind", kind); }

  Record& add(std::string_view key, std::string_view value);
  Record& add(std::string_view key, const char* value) { return add(key, std::string_view(value)); }
  Record& add(std::string_view key, const std::string& value) { return add(key, std::string_view(value)); }
  Record& add(std::string_view key, const Rational& value);
  Record& add(std::string_view key, double value);  // %.17g
  Record& add(std::string_view key, std::uint64_t value);
  Record& add(std::string_view key, std::int64_t value);
  Record& add(std::string_view key, unsigned value) { return add(key, static_cast<std::uint64_t>(value)); }
  Record& add(std::string_view key, bool value) { return add(key, value ? "true" : "false"); }

  const std::vector<std::pair<std::string, std::string>>& fields() const noexcept { return fields_; }
  const std::string* get(std::string_view key) const;
  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

/// Parses a line produced by Record::str back into pairs.
std::vector<std::pair<std::string, std::string>> parse_record(std::string_view line);

struct Report {
  std::string text;  // human-readable
  std::vector<Record> records;

  std::string records_text() const;  // one line per record
};

/// Short human form of a double: 6 significant digits.
std::string short_number(double value);

Report pm_report(const PriorEstimate& estimate);
Report predict_report(std::string_view x, unsigned depth, std::uint64_t budget, const Prediction& prediction);
Report trial_report(const ConvergenceTrial& trial);
Report search_report(std::string_view id, std::string_view mode, const SearchReport& report);
Report compress_report(const CompressionLedger& ledger, const ProbabilityModel& model);
Report incorporate_report(const CompressionLedger& ledger, const ProbabilityModel& model);
Report session_report(const SessionResult& result);
Report induce_report(const std::vector<std::pair<std::string, std::vector<InducedProgram>>>& groups);
Report analogy_report(const AnalogyScore& score);
Report cluster_report(const ClusterCoding& coding, std::span<const Point> points, std::uint64_t one_center_bits);
Report plan_report(std::span<const Candidate> plans);

}  // namespace aprob
