#include "aprob/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "aprob/errors.hpp"

namespace aprob {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& problem) {
  throw FormatError("field '" + path + "': " + problem);
}

const json& field(const json& object, const char* key, const std::string& path) {
  if (!object.is_object()) bad_field(path, "expected an object");
  const auto it = object.find(key);
  if (it == object.end()) bad_field(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string child(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

std::string element(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad_field(path, "expected a string");
  return j.get<std::string>();
}

std::uint64_t as_count(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    bad_field(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::vector<std::string> as_strings(const json& j, const std::string& path) {
  if (!j.is_array()) bad_field(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], element(path, i)));
  return out;
}

std::vector<std::uint64_t> as_counts(const json& j, const std::string& path) {
  if (!j.is_array()) bad_field(path, "expected an array of counts");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_count(j[i], element(path, i)));
  return out;
}

Rational as_rational(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (!j.is_string()) bad_field(path, "expected an exact rational such as \"1/2\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const FormatError& e) {
    bad_field(path, e.what());
  }
}

template <class Build>
auto rethrow_as_format(const std::string& path, Build build) {
  try {
    return build();
  } catch (const DomainError& e) {
    bad_field(path, e.what());
  }
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("malformed " + std::string(what) + ": " + e.what());
  }
}

}  // namespace

// ------------------------------------------------------------------ model

std::string model_to_json(const ProbabilityModel& model) {
  json doc;
  doc["format"] = "aprob-model";
  doc["version"] = kModelFormatVersion;
  doc["alphabet"] = model.alphabet().symbols();
  doc["counts"] = model.symbols().counts();
  doc["smoothing"] = to_string(model.symbols().smoothing());

  const ConditionalModel& contexts = model.contexts();
  json c;
  c["schema"] = std::string(to_string(contexts.schema()));
  c["alphabet"] = contexts.alphabet().symbols();
  c["fallback"] = contexts.fallback().counts();
  c["entries"] = json::array();
  for (const auto& [key, m] : contexts.contexts()) {
    c["entries"].push_back({{"position", key.position}, {"token", key.token}, {"counts", m.counts()}});
  }
  doc["contexts"] = std::move(c);

  doc["composites"] = json::array();
  for (const auto& d : model.composites().definitions()) {
    doc["composites"].push_back({{"symbol", d.symbol}, {"body", d.body}});
  }
  doc["corpus"] = model.corpus();
  return doc.dump(2) + "\n";
}

ProbabilityModel model_from_json(std::string_view text) {
  const json doc = parse_json(text, "model document");
  if (!doc.is_object()) throw FormatError("model document must be a JSON object");
  if (as_string(field(doc, "format", ""), "format") != "aprob-model") bad_field("format", "expected \"aprob-model\"");
  const json& version = field(doc, "version", "");
  if (!version.is_number_integer() || version.get<std::int64_t>() != kModelFormatVersion) {
    throw FormatError("unsupported model version " + version.dump() + " (this build reads version " +
                      std::to_string(kModelFormatVersion) + ")");
  }

  const auto alphabet_symbols = as_strings(field(doc, "alphabet", ""), "alphabet");
  const auto counts = as_counts(field(doc, "counts", ""), "counts");
  const Rational smoothing = as_rational(field(doc, "smoothing", ""), "smoothing");
  const Alphabet alphabet = rethrow_as_format("alphabet", [&] { return Alphabet(alphabet_symbols); });
  const SymbolModel symbols =
      rethrow_as_format("counts", [&] { return SymbolModel(alphabet, counts, smoothing); });

  const json& c = field(doc, "contexts", "");
  const ContextSchema schema = [&] {
    try {
      return parse_context_schema(as_string(field(c, "schema", "contexts"), "contexts.schema"));
    } catch (const FormatError& e) {
      bad_field("contexts.schema", e.what());
    }
  }();
  const Alphabet base = rethrow_as_format(
      "contexts.alphabet", [&] { return Alphabet(as_strings(field(c, "alphabet", "contexts"), "contexts.alphabet")); });
  const SymbolModel fallback = rethrow_as_format("contexts.fallback", [&] {
    return SymbolModel(base, as_counts(field(c, "fallback", "contexts"), "contexts.fallback"), smoothing);
  });
  std::map<ContextKey, SymbolModel> entries;
  const json& list = field(c, "entries", "contexts");
  if (!list.is_array()) bad_field("contexts.entries", "expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = element("contexts.entries", i);
    ContextKey key{as_count(field(list[i], "position", path), child(path, "position")),
                   as_string(field(list[i], "token", path), child(path, "token"))};
    SymbolModel m = rethrow_as_format(child(path, "counts"), [&] {
      return SymbolModel(base, as_counts(field(list[i], "counts", path), child(path, "counts")), smoothing);
    });
    if (!entries.emplace(std::move(key), std::move(m)).second) bad_field(path, "duplicate context");
  }
  ConditionalModel contexts =
      rethrow_as_format("contexts", [&] { return ConditionalModel(schema, fallback, std::move(entries)); });

  CompositeTable table;
  const json& composites = field(doc, "composites", "");
  if (!composites.is_array()) bad_field("composites", "expected an array");
  for (std::size_t i = 0; i < composites.size(); ++i) {
    const std::string path = element("composites", i);
    CompositeDefinition d{as_string(field(composites[i], "symbol", path), child(path, "symbol")),
                          as_strings(field(composites[i], "body", path), child(path, "body"))};
    table = rethrow_as_format(path, [&] { return table.with(std::move(d)); });
  }
  auto corpus = as_strings(field(doc, "corpus", ""), "corpus");
  return rethrow_as_format("model", [&] {
    return ProbabilityModel(symbols, std::move(contexts), std::move(table), std::move(corpus));
  });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void save_model(const ProbabilityModel& model, const std::filesystem::path& path) {
  write_file(path, model_to_json(model));
}

ProbabilityModel load_model(const std::filesystem::path& path) { return model_from_json(read_file(path)); }

std::vector<std::string> parse_corpus(std::string_view text) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) tokens.push_back(word);
  return tokens;
}

std::vector<std::string> distinct_tokens(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  }
  return out;
}

// --------------------------------------------------------------- problems

namespace {

std::uint64_t positive(const json& j, const std::string& path) {
  const auto v = as_count(j, path);
  if (v == 0) bad_field(path, "must be at least 1");
  return v;
}

}  // namespace

ProblemSpec parse_problem(const json& doc) {
  if (!doc.is_object()) throw FormatError("problem must be a JSON object");
  ProblemSpec spec;
  if (doc.contains("id")) spec.id = as_string(doc["id"], "id");

  const json& machine = field(doc, "machine", "");
  if (machine.is_string()) {
    spec.machine_name = machine.get<std::string>();
    spec.machine_params = json::object();
  } else if (machine.is_object()) {
    spec.machine_name = as_string(field(machine, "name", "machine"), "machine.name");
    spec.machine_params = machine;
  } else {
    bad_field("machine", "expected a name or an object with 'name'");
  }

  const bool has_target = doc.contains("target");
  const bool has_tau = doc.contains("tau");
  if (has_target == has_tau) throw FormatError("problem needs exactly one of 'target' and 'tau'");
  if (has_target) spec.target = as_string(doc["target"], "target");
  if (has_tau) spec.tau = positive(doc["tau"], "tau");

  spec.stream = field(doc, "stream", "");
  if (!spec.stream.is_object()) bad_field("stream", "expected an object");
  as_string(field(spec.stream, "kind", "stream"), "stream.kind");
  if (spec.stream.contains("separator")) spec.separator = as_string(spec.stream["separator"], "stream.separator");

  if (doc.contains("T0")) spec.initial_budget = positive(doc["T0"], "T0");
  if (doc.contains("max_total")) spec.max_total = positive(doc["max_total"], "max_total");
  if (doc.contains("seed")) spec.seed = as_count(doc["seed"], "seed");
  if (doc.contains("context")) spec.context = as_string(doc["context"], "context");

  rethrow_as_format("machine", [&] { return make_machine(spec.machine_name, spec.machine_params); });
  return spec;
}

ProblemSpec parse_problem_text(std::string_view text) { return parse_problem(parse_json(text, "problem document")); }

PlannerSpec parse_planner_spec(const json& doc) {
  PlannerSpec spec;
  const json& p = field(doc, "p", "");
  if (!p.is_array() || p.size() != 4) bad_field("p", "expected four probabilities");
  for (std::size_t i = 0; i < 4; ++i) spec.p[i] = as_rational(p[i], element("p", i));
  if (doc.contains("split")) spec.split_arity = as_count(doc["split"], "split");
  if (doc.contains("alternatives")) spec.alternatives = as_count(doc["alternatives"], "alternatives");
  if (doc.contains("max_depth")) spec.max_depth = as_count(doc["max_depth"], "max_depth");
  rethrow_as_format("planner", [&] {
    validate(spec);
    return 0;
  });
  return spec;
}

std::unique_ptr<CandidateStream> make_stream(const json& spec, const ProbabilityModel* model) {
  const std::string kind = as_string(field(spec, "kind", "stream"), "stream.kind");
  const std::string separator = spec.contains("separator") ? as_string(spec["separator"], "stream.separator") : " ";
  auto max_len = [&] { return positive(field(spec, "max_len", "stream"), "stream.max_len"); };

  if (kind == "list") {
    const json& items = field(spec, "candidates", "stream");
    if (!items.is_array()) bad_field("stream.candidates", "expected an array");
    std::vector<std::pair<std::string, Rational>> list;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string path = element("stream.candidates", i);
      if (!items[i].is_array() || items[i].size() != 2) bad_field(path, "expected [payload, probability]");
      list.emplace_back(as_string(items[i][0], path + "[0]"), as_rational(items[i][1], path + "[1]"));
    }
    std::optional<Rational> mass;
    if (spec.contains("mass")) mass = as_rational(spec["mass"], "stream.mass");
    return std::make_unique<ListStream>(std::move(list), std::move(mass));
  }
  if (kind == "uniform") {
    const auto symbols = as_strings(field(spec, "alphabet", "stream"), "stream.alphabet");
    const auto len = max_len();
    return rethrow_as_format("stream.alphabet", [&] {
      return std::unique_ptr<CandidateStream>(stream_from_model(SymbolModel(Alphabet(symbols)), len, separator));
    });
  }
  if (kind == "model") {
    if (model == nullptr) throw DomainError("stream kind 'model' needs a probability model");
    return stream_from_model(*model, max_len(), separator);
  }
  if (kind == "planner") {
    const std::string root = spec.contains("root") ? as_string(spec["root"], "stream.root") : "root";
    return std::make_unique<PlannerStream>(parse_planner_spec(spec), root);
  }
  bad_field("stream.kind", "unknown stream kind '" + kind + "'");
}

SessionProblem to_session_problem(const ProblemSpec& spec) {
  SessionProblem problem;
  problem.id = spec.id;
  problem.machine = make_machine(spec.machine_name, spec.machine_params);
  problem.target = spec.target;
  problem.tau = spec.tau;
  problem.make_stream = [stream = spec.stream](const ProbabilityModel& model) { return make_stream(stream, &model); };
  problem.separator = spec.separator;
  problem.context = spec.context;
  problem.search.initial_budget = spec.initial_budget;
  problem.search.max_total = spec.max_total;
  return problem;
}

SessionSpec parse_session_text(std::string_view text) {
  const json doc = parse_json(text, "session document");
  SessionSpec spec;
  const json* problems = &doc;
  if (doc.is_object()) {
    if (doc.contains("alphabet")) spec.alphabet = as_strings(doc["alphabet"], "alphabet");
    if (doc.contains("smoothing")) spec.smoothing = as_rational(doc["smoothing"], "smoothing");
    if (doc.contains("compression_factor")) {
      if (!doc["compression_factor"].is_number() || doc["compression_factor"].get<double>() < 0) {
        bad_field("compression_factor", "expected a non-negative number");
      }
      spec.compression_factor = doc["compression_factor"].get<double>();
    }
    problems = &field(doc, "problems", "");
  }
  if (!problems->is_array() || problems->empty()) bad_field("problems", "expected a non-empty array");
  for (std::size_t i = 0; i < problems->size(); ++i) {
    try {
      spec.problems.push_back(parse_problem((*problems)[i]));
    } catch (const FormatError& e) {
      throw FormatError(element("problems", i) + ": " + e.what());
    }
    if (spec.problems.back().id.empty()) spec.problems.back().id = "problem-" + std::to_string(i + 1);
  }
  return spec;
}

}  // namespace aprob
