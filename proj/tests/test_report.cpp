#include <string>
#include <vector>

#include "aprob/report.hpp"
#include "doctest.h"

using namespace aprob;

TEST_CASE("records round trip through their text form") {
  Record r("probe");
  r.add("plain", "abc")
      .add("empty", "")
      .add("spaced", "R1 R2 Add")
      .add("quoted", "say \"hi\"")
      .add("equals", "a=b")
      .add("slash", "back\\slash")
      .add("lines", "one\ntwo\tthree")
      .add("fraction", Rational(3, 7))
      .add("real", 0.1)
      .add("count", std::uint64_t{18446744073709551615ULL})
      .add("signed", std::int64_t{-5})
      .add("flag", true);
  const auto line = r.str();
  CHECK(line.find('\n') == std::string::npos);
  CHECK(parse_record(line) == r.fields());
  CHECK(*r.get("fraction") == "3/7");
  CHECK(std::stod(*r.get("real")) == 0.1);
  CHECK(*r.get("flag") == "true");
  CHECK(r.get("absent") == nullptr);
  CHECK(line.rfind("kind=probe plain=abc empty=\"\"", 0) == 0);
}

TEST_CASE("report lines") {
  AnalogyScore s;
  s.common_length = 100;
  s.mass_a = Rational(41, 32);
  s.mass_b = Rational(11, 256);
  s.ratio = 328.0 / 11;
  const auto report = analogy_report(s);
  REQUIRE(report.records.size() == 1);
  CHECK(*report.records[0].get("mass_a") == "41/32");
  CHECK(report.records_text() == report.records[0].str() + "\n");
  CHECK(short_number(328.0 / 11) == "29.8182");
}
