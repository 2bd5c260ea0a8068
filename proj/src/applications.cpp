#include "aprob/applications.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>
#include <variant>

#include "aprob/errors.hpp"

namespace aprob {

// ------------------------------------------------------ expression induction

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view text, std::string_view line) {
  text = trim(text);
  std::int64_t value = 0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw FormatError("bad integer '" + std::string(text) + "' in triple '" + std::string(line) + "'");
  }
  return value;
}

}  // namespace

ExampleTriple parse_triple(std::string_view line) {
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) throw FormatError("triple '" + std::string(line) + "' has no ':'");
  const std::string_view left = line.substr(0, colon);
  const auto c1 = left.find(',');
  const auto c2 = c1 == std::string_view::npos ? c1 : left.find(',', c1 + 1);
  if (c2 == std::string_view::npos) {
    throw FormatError("triple '" + std::string(line) + "' needs 'a, b, op' before ':'");
  }
  ExampleTriple t;
  t.a = parse_int(left.substr(0, c1), line);
  t.b = parse_int(left.substr(c1 + 1, c2 - c1 - 1), line);
  t.op = std::string(trim(left.substr(c2 + 1)));
  if (t.op.empty() || t.op.find_first_of(" \t") != std::string::npos) {
    throw FormatError("triple '" + std::string(line) + "' has a malformed operator token");
  }
  t.result = parse_int(line.substr(colon + 1), line);
  return t;
}

std::vector<ExampleTriple> parse_triples(std::string_view text) {
  std::vector<ExampleTriple> triples;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    if (trim(view).empty()) continue;
    triples.push_back(parse_triple(view));
  }
  return triples;
}

ConditionalModel expression_model(ContextSchema schema) {
  return ConditionalModel(Alphabet({kExprTokenNames.begin(), kExprTokenNames.end()}), schema);
}

std::vector<InducedProgram> induce_expr(std::span<const ExampleTriple> examples, const ConditionalModel& model,
                                        const InductionLimits& limits) {
  if (examples.empty()) throw DomainError("induction needs at least one example");
  for (const auto name : kExprTokenNames) {
    if (!model.alphabet().contains(name)) {
      throw DomainError("model alphabet lacks expression token '" + std::string(name) + "'");
    }
  }
  std::string token = examples.front().op;
  for (const auto& e : examples) {
    if (e.op != token) token.clear();
  }

  auto stream = stream_from_model(model, token, limits.max_len);
  std::vector<InducedProgram> found;
  for (std::size_t n = 0; n < limits.max_candidates; ++n) {
    const auto candidate = stream->next();
    if (!candidate) break;
    ExprProgram program;
    bool expression_only = true;
    for (const auto s : stream->last_sequence()) {
      const auto t = parse_expr_token(model.alphabet().symbol(s));
      if (!t) {
        expression_only = false;
        break;
      }
      program.push_back(*t);
    }
    if (!expression_only) continue;
    const bool consistent = std::all_of(examples.begin(), examples.end(), [&](const ExampleTriple& e) {
      const auto outcome = run_expr(program, ExprInput{e.a, e.b, e.op});
      return outcome.ok() && outcome.value() == e.result;
    });
    if (consistent) found.push_back(InducedProgram{std::move(program), candidate->p, 0});
  }
  Rational total = 0;
  for (const auto& f : found) total += f.prior;
  for (auto& f : found) f.posterior = f.prior / total;
  // The stream is already in prior order with deterministic ties.
  return found;
}

std::vector<std::pair<std::string, std::vector<InducedProgram>>> induce_by_operator(
    std::span<const ExampleTriple> examples, const ConditionalModel& model, const InductionLimits& limits) {
  std::vector<std::pair<std::string, std::vector<ExampleTriple>>> groups;
  for (const auto& e : examples) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == e.op; });
    if (it == groups.end()) {
      groups.push_back({e.op, {e}});
    } else {
      it->second.push_back(e);
    }
  }
  std::vector<std::pair<std::string, std::vector<InducedProgram>>> out;
  for (const auto& [op, group] : groups) out.emplace_back(op, induce_expr(group, model, limits));
  return out;
}

// ------------------------------------------------------------- planning

void validate(const PlannerSpec& spec) {
  Rational sum = 0;
  for (const auto& p : spec.p) {
    if (p < 0) throw DomainError("planner probabilities must be non-negative");
    sum += p;
  }
  if (sum > 1) throw DomainError("planner probabilities sum to more than 1");
  if (spec.max_depth < 1) throw DomainError("planner depth must be at least 1");
  if (spec.split_arity < 1 || spec.alternatives < 1) throw DomainError("planner fan-out must be at least 1");
}

struct PlannerStream::Partial {
  struct Hole {
    std::string label;
    std::size_t depth;
  };
  using Piece = std::variant<std::string, Hole>;

  Rational p;
  std::uint64_t serial = 0;
  std::vector<Piece> pieces;
};

namespace {

using Partial = PlannerStream::Partial;

bool lower_priority(const std::shared_ptr<const Partial>& a, const std::shared_ptr<const Partial>& b) {
  if (a->p != b->p) return a->p < b->p;
  return a->serial > b->serial;
}

}  // namespace

PlannerStream::PlannerStream(PlannerSpec spec, std::string root) : spec_(std::move(spec)) {
  validate(spec_);
  auto start = std::make_shared<Partial>();
  start->p = 1;
  start->serial = serial_++;
  start->pieces.emplace_back(Partial::Hole{std::move(root), 1});
  heap_.push_back(std::move(start));
}

std::optional<Candidate> PlannerStream::next() {
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), lower_priority);
    auto top = std::move(heap_.back());
    heap_.pop_back();

    const auto hole_at = std::find_if(top->pieces.begin(), top->pieces.end(),
                                      [](const Partial::Piece& piece) { return piece.index() == 1; });
    if (hole_at == top->pieces.end()) {
      std::string payload;
      for (const auto& piece : top->pieces) payload += std::get<std::string>(piece);
      return Candidate{std::move(payload), top->p, emitted_++};
    }

    const auto hole = std::get<Partial::Hole>(*hole_at);
    const auto position = static_cast<std::size_t>(hole_at - top->pieces.begin());
    auto push = [&](const Rational& factor, std::vector<Partial::Piece> replacement) {
      if (factor == 0) return;
      auto child = std::make_shared<Partial>();
      child->p = top->p * factor;
      child->serial = serial_++;
      child->pieces.reserve(top->pieces.size() + replacement.size());
      child->pieces.insert(child->pieces.end(), top->pieces.begin(),
                           top->pieces.begin() + static_cast<std::ptrdiff_t>(position));
      for (auto& r : replacement) child->pieces.push_back(std::move(r));
      child->pieces.insert(child->pieces.end(), top->pieces.begin() + static_cast<std::ptrdiff_t>(position) + 1,
                           top->pieces.end());
      heap_.push_back(std::move(child));
      std::push_heap(heap_.begin(), heap_.end(), lower_priority);
    };

    push(spec_.p[2], {std::string("M3(" + hole.label + ")")});
    push(spec_.p[3], {std::string("M4(" + hole.label + ")")});
    if (hole.depth < spec_.max_depth) {
      std::vector<Partial::Piece> split{std::string("M1(")};
      for (std::size_t i = 1; i <= spec_.split_arity; ++i) {
        if (i > 1) split.emplace_back(std::string(","));
        split.emplace_back(Partial::Hole{hole.label + "." + std::to_string(i), hole.depth + 1});
      }
      split.emplace_back(std::string(")"));
      push(spec_.p[0], std::move(split));
      const Rational share = spec_.p[1] / spec_.alternatives;
      for (std::size_t i = 1; i <= spec_.alternatives; ++i) {
        push(share, {std::string("M2("), Partial::Hole{hole.label + "~" + std::to_string(i), hole.depth + 1},
                     std::string(")")});
      }
    }
  }
  return std::nullopt;
}

// --------------------------------------------------------------- analogy

AnalogyScore analogy_score(std::span<const std::uint64_t> lengths_a, std::span<const std::uint64_t> lengths_b) {
  if (lengths_a.empty() || lengths_b.empty()) throw DomainError("analogy needs code lengths on both sides");
  AnalogyScore score;
  score.common_length = std::min(*std::min_element(lengths_a.begin(), lengths_a.end()),
                                 *std::min_element(lengths_b.begin(), lengths_b.end()));
  auto scaled = [&](std::span<const std::uint64_t> lengths) {
    std::vector<std::uint64_t> shifted;
    shifted.reserve(lengths.size());
    for (const auto l : lengths) shifted.push_back(l - score.common_length);
    return kraft_sum(shifted);
  };
  score.mass_a = scaled(lengths_a);
  score.mass_b = scaled(lengths_b);
  score.ratio = to_double(Rational(score.mass_a / score.mass_b));
  return score;
}

// ------------------------------------------------------------ clustering

std::uint64_t signed_gamma_length(std::int64_t value) {
  const std::uint64_t magnitude =
      value < 0 ? static_cast<std::uint64_t>(-(value + 1)) + 1 : static_cast<std::uint64_t>(value);
  if (magnitude >= (std::uint64_t{1} << 62)) throw DomainError("value too large for the signed gamma code");
  const std::uint64_t mapped = value > 0 ? 2 * magnitude : 2 * magnitude + 1;
  return elias_gamma_length(mapped);
}

std::int64_t quantize(double value, double delta) {
  if (!(delta > 0.0)) throw DomainError("quantization step must be positive");
  const double scaled = value / delta;
  if (!std::isfinite(scaled) || std::fabs(scaled) > 1e15) throw DomainError("coordinate out of quantizable range");
  return std::llround(scaled);
}

namespace {

std::uint64_t name_bits(std::size_t centers) {
  return centers <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(centers - 1));
}

std::uint64_t residual_bits(const Point& point, const std::vector<std::int64_t>& center, double delta) {
  std::uint64_t bits = 0;
  for (std::size_t d = 0; d < point.size(); ++d) {
    bits += signed_gamma_length(quantize(point[d] - static_cast<double>(center[d]) * delta, delta));
  }
  return bits;
}

void check_points(std::span<const Point> points, double delta) {
  if (points.empty()) throw DomainError("clustering needs at least one point");
  if (!(delta > 0.0)) throw DomainError("quantization step must be positive");
  const std::size_t dims = points.front().size();
  if (dims == 0) throw DomainError("points need at least one coordinate");
  for (const auto& p : points) {
    if (p.size() != dims) throw DomainError("points have differing dimensions");
  }
}

double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::uint64_t coding_bits(std::span<const Point> points, const std::vector<std::vector<std::int64_t>>& centers,
                          std::span<const std::size_t> assignments, double delta) {
  if (assignments.size() != points.size()) throw DomainError("one assignment per point is required");
  std::uint64_t bits = 0;
  for (const auto& c : centers) {
    for (const auto q : c) bits += signed_gamma_length(q);
  }
  bits += points.size() * name_bits(centers.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (assignments[i] >= centers.size()) throw DomainError("assignment names a missing center");
    bits += residual_bits(points[i], centers[assignments[i]], delta);
  }
  return bits;
}

ClusterCoding cluster_with(std::span<const Point> points, std::size_t k, double delta, std::uint64_t seed) {
  check_points(points, delta);
  if (k == 0) throw DomainError("need at least one center");
  k = std::min(k, points.size());
  const std::size_t dims = points.front().size();
  std::mt19937_64 rng(seed);

  // k-means++ seeding.
  std::vector<Point> means{points[rng() % points.size()]};
  while (means.size() < k) {
    std::vector<double> weight(points.size());
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& m : means) best = std::min(best, squared_distance(points[i], m));
      weight[i] = best;
      total += best;
    }
    if (total == 0.0) break;
    double pick = uniform01(rng) * total;
    std::size_t chosen = points.size() - 1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (pick < weight[i]) {
        chosen = i;
        break;
      }
      pick -= weight[i];
    }
    means.push_back(points[chosen]);
  }

  std::vector<std::size_t> assignment(points.size(), 0);
  for (int iteration = 0; iteration < 100; ++iteration) {
    bool changed = iteration == 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < means.size(); ++c) {
        if (squared_distance(points[i], means[c]) < squared_distance(points[i], means[best])) best = c;
      }
      if (best != assignment[i]) changed = true;
      assignment[i] = best;
    }
    if (!changed) break;
    std::vector<Point> sums(means.size(), Point(dims, 0.0));
    std::vector<std::size_t> sizes(means.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t d = 0; d < dims; ++d) sums[assignment[i]][d] += points[i][d];
      ++sizes[assignment[i]];
    }
    for (std::size_t c = 0; c < means.size(); ++c) {
      if (sizes[c] == 0) continue;
      for (std::size_t d = 0; d < dims; ++d) means[c][d] = sums[c][d] / static_cast<double>(sizes[c]);
    }
  }

  // Quantize, then give each point the center with the cheapest residual.
  std::vector<std::vector<std::int64_t>> quantized;
  for (const auto& m : means) {
    std::vector<std::int64_t> q;
    for (const double v : m) q.push_back(quantize(v, delta));
    if (std::find(quantized.begin(), quantized.end(), q) == quantized.end()) quantized.push_back(std::move(q));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t best = 0;
    std::uint64_t best_bits = residual_bits(points[i], quantized[0], delta);
    for (std::size_t c = 1; c < quantized.size(); ++c) {
      const auto bits = residual_bits(points[i], quantized[c], delta);
      if (bits < best_bits) {
        best = c;
        best_bits = bits;
      }
    }
    assignment[i] = best;
  }
  // Drop centers nobody uses.
  std::vector<std::size_t> renumber(quantized.size(), quantized.size());
  ClusterCoding coding;
  coding.delta = delta;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& slot = renumber[assignment[i]];
    if (slot == quantized.size()) {
      slot = coding.centers.size();
      coding.centers.push_back(quantized[assignment[i]]);
    }
    coding.assignments.push_back(slot);
  }
  coding.total_bits = coding_bits(points, coding.centers, coding.assignments, delta);
  return coding;
}

ClusterCoding mdl_cluster(std::span<const Point> points, std::size_t max_centers, double delta, std::uint64_t seed,
                          unsigned workers) {
  check_points(points, delta);
  if (max_centers == 0) throw DomainError("max centers must be at least 1");
  const std::size_t top = std::max<std::size_t>(1, std::min(max_centers, points.size()));
  std::vector<ClusterCoding> codings(top);
  if (workers > 1) {
    std::vector<std::future<ClusterCoding>> pending;
    for (std::size_t k = 1; k <= top; ++k) {
      pending.push_back(std::async(std::launch::async, [&, k] { return cluster_with(points, k, delta, seed); }));
    }
    for (std::size_t k = 0; k < top; ++k) codings[k] = pending[k].get();
  } else {
    for (std::size_t k = 1; k <= top; ++k) codings[k - 1] = cluster_with(points, k, delta, seed);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < codings.size(); ++i) {
    const auto& a = codings[i];
    const auto& b = codings[best];
    if (a.total_bits < b.total_bits || (a.total_bits == b.total_bits && a.centers.size() < b.centers.size())) best = i;
  }
  return std::move(codings[best]);
}

std::vector<Point> parse_points(std::string_view text) {
  std::vector<Point> points;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::istringstream fields(line);
    Point p;
    std::string word;
    while (fields >> word) {
      try {
        std::size_t used = 0;
        const double v = std::stod(word, &used);
        if (used != word.size() || !std::isfinite(v)) throw std::invalid_argument(word);
        p.push_back(v);
      } catch (const std::exception&) {
        throw FormatError("line " + std::to_string(number) + ": bad coordinate '" + word + "'");
      }
    }
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace aprob
