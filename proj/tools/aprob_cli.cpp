// Command-line front end. Talks to the library only through aprob.h.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aprob/aprob.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int code;
  std::string message;
};

struct ReportDeleter {
  void operator()(aprob_report* r) const { aprob_report_free(r); }
};
struct ModelDeleter {
  void operator()(aprob_model* m) const { aprob_model_free(m); }
};
using ReportPtr = std::unique_ptr<aprob_report, ReportDeleter>;
using ModelPtr = std::unique_ptr<aprob_model, ModelDeleter>;

void check(aprob_status status) {
  if (status == APROB_OK) return;
  const int code = status == APROB_E_ARGUMENT ? kExitUsage : kExitFailure;
  throw Failure{code, std::string(aprob_status_name(status)) + ": " + aprob_last_error()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitFailure, "io: cannot open '" + path + "'"};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::vector<const char*> c_strings(const std::vector<std::string>& items) {
  std::vector<const char*> out;
  for (const auto& s : items) out.push_back(s.c_str());
  return out;
}

std::vector<std::uint64_t> length_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || item.front() == '-') {
      throw Failure{kExitUsage, "bad length '" + item + "' in list '" + text + "'"};
    }
    out.push_back(v);
  }
  if (out.empty()) throw Failure{kExitUsage, "empty length list"};
  return out;
}

ModelPtr load(const std::string& path) {
  aprob_model* m = nullptr;
  check(aprob_model_load(path.c_str(), &m));
  return ModelPtr(m);
}

ModelPtr maybe_load(const std::string& path) { return path.empty() ? nullptr : load(path); }

struct Options {
  std::string out;
  unsigned workers = 1;
};

void emit(const ReportPtr& report, const Options& options) {
  std::cout << aprob_report_text(report.get());
  if (!options.out.empty()) {
    std::ofstream file(options.out, std::ios::binary | std::ios::trunc);
    if (!file) throw Failure{kExitFailure, "io: cannot write '" + options.out + "'"};
    file << aprob_report_records(report.get());
  }
}

void save_if(const aprob_model* model, const std::string& path) {
  if (path.empty() || model == nullptr) return;
  check(aprob_model_save(model, path.c_str()));
  std::cout << "model saved to " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Algorithmic probability toolkit: universal prior estimates, Levin search, model compression"};
  app.require_subcommand(1);
  app.fallthrough();
  Options options;
  app.add_option("--out", options.out, "Write machine-readable key=value records to this file");
  app.add_option("--workers", options.workers, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  std::function<void()> action;

  // pm / predict
  std::string x;
  unsigned depth = 12;
  std::uint64_t budget = 1'000'000;
  auto* pm = app.add_subcommand("pm", "Lower bound on the universal prior mass of a bit string");
  pm->add_option("--x", x, "Target bit string (may be empty)")->required();
  pm->add_option("--depth", depth, "Maximum program length in bits")->check(CLI::Range(0u, 40u));
  pm->add_option("--budget", budget, "Step budget per program")->check(CLI::PositiveNumber);
  pm->callback([&] {
    action = [&] {
      aprob_report* r = nullptr;
      check(aprob_pm(x.c_str(), depth, budget, options.workers, &r));
      emit(ReportPtr(r), options);
    };
  });

  std::string source;
  std::size_t steps = 20;
  std::uint64_t seed = 0;
  auto* predict = app.add_subcommand("predict", "Probability that the next bit is 1, or a convergence trial");
  predict->add_option("--x", x, "Observed bit string");
  predict->add_option("--depth", depth, "Maximum program length in bits")->check(CLI::Range(0u, 40u));
  predict->add_option("--budget", budget, "Step budget per program")->check(CLI::PositiveNumber);
  predict
      ->add_option("--source", source,
                   "Run a trial on a source: constant-ones, constant-zeros, fair-coin, biased-coin, period-2")
      ->excludes("--x");
  predict->add_option("--steps", steps, "Trial length")->check(CLI::PositiveNumber);
  predict->add_option("--seed", seed, "Trial seed");
  predict->callback([&] {
    action = [&] {
      aprob_report* r = nullptr;
      if (!source.empty()) {
        check(aprob_convergence(source.c_str(), steps, depth, budget, seed, &r));
      } else {
        check(aprob_predict(x.c_str(), depth, budget, options.workers, &r));
      }
      emit(ReportPtr(r), options);
    };
  });

  // search
  std::string problem_path;
  std::string model_path;
  std::string save_path;
  auto add_model_option = [&](CLI::App* sub, const char* help) {
    return sub->add_option("--model", model_path, help)->envname("APROB_MODEL");
  };
  auto* invert = app.add_subcommand("search-invert", "Levin search for a candidate whose output matches the target");
  invert->add_option("--problem", problem_path, "Problem document (JSON)")->required()->check(CLI::ExistingFile);
  add_model_option(invert, "Model for 'model' streams");
  auto* optimize = app.add_subcommand("optimize", "Time-limited optimization over a candidate stream");
  optimize->add_option("--problem", problem_path, "Problem document (JSON)")->required()->check(CLI::ExistingFile);
  add_model_option(optimize, "Model for 'model' streams");
  auto search_action = [&](bool is_invert) {
    return [&, is_invert] {
      action = [&, is_invert] {
        const std::string doc = slurp(problem_path);
        const ModelPtr model = maybe_load(model_path);
        aprob_report* r = nullptr;
        check(is_invert ? aprob_search_invert(doc.c_str(), model.get(), options.workers, &r)
                        : aprob_optimize(doc.c_str(), model.get(), options.workers, &r));
        emit(ReportPtr(r), options);
      };
    };
  };
  invert->callback(search_action(true));
  optimize->callback(search_action(false));

  // compress / incorporate
  std::string corpus_path;
  std::string smoothing = "1";
  auto* compress = app.add_subcommand("compress", "Define composite symbols while they shorten the description");
  add_model_option(compress, "Model to compress");
  compress->add_option("--corpus", corpus_path, "Corpus file to observe first (whitespace-separated tokens)")
      ->check(CLI::ExistingFile);
  compress->add_option("--smoothing", smoothing, "Smoothing for a model built from the corpus alone");
  compress->add_option("--budget", budget, "Compression step budget")->check(CLI::PositiveNumber);
  compress->add_option("--save", save_path, "Write the compressed model here");
  compress->callback([&] {
    action = [&] {
      ModelPtr model = maybe_load(model_path);
      if (!model && corpus_path.empty()) throw Failure{kExitUsage, "compress needs --model or --corpus"};
      if (!corpus_path.empty()) {
        const auto tokens = words(slurp(corpus_path));
        const auto ptrs = c_strings(tokens);
        if (!model) {
          std::vector<std::string> alphabet;
          for (const auto& t : tokens) {
            if (std::find(alphabet.begin(), alphabet.end(), t) == alphabet.end()) alphabet.push_back(t);
          }
          const auto symbols = c_strings(alphabet);
          aprob_model* m = nullptr;
          check(aprob_model_create(symbols.data(), symbols.size(), smoothing.c_str(), "position", &m));
          model.reset(m);
        }
        check(aprob_model_observe(model.get(), ptrs.data(), ptrs.size(), nullptr));
      }
      aprob_report* r = nullptr;
      check(aprob_compress(model.get(), budget, &r));
      emit(ReportPtr(r), options);
      save_if(model.get(), save_path);
    };
  });

  std::string tokens_text;
  std::string context;
  auto* incorporate = app.add_subcommand("incorporate", "Add a solved problem to the model, then compress");
  add_model_option(incorporate, "Model to update")->required();
  incorporate->add_option("--tokens", tokens_text, "Solution tokens, space-separated")->required();
  incorporate->add_option("--context", context, "Conditioning token for positional statistics");
  incorporate->add_option("--budget", budget, "Compression step budget")->check(CLI::PositiveNumber);
  incorporate->add_option("--save", save_path, "Write the updated model here");
  incorporate->callback([&] {
    action = [&] {
      ModelPtr model = load(model_path);
      const auto tokens = words(tokens_text);
      const auto ptrs = c_strings(tokens);
      aprob_report* r = nullptr;
      check(aprob_incorporate(model.get(), ptrs.data(), ptrs.size(), context.c_str(), budget, &r));
      emit(ReportPtr(r), options);
      save_if(model.get(), save_path);
    };
  });

  std::string session_path;
  auto* session = app.add_subcommand("session", "Solve a sequence of problems, updating the model after each");
  session->add_option("--session", session_path, "Session document (JSON)")->required()->check(CLI::ExistingFile);
  add_model_option(session, "Starting model (default: uniform over the session alphabet)");
  session->add_option("--save", save_path, "Write the final model here");
  session->callback([&] {
    action = [&] {
      const std::string doc = slurp(session_path);
      ModelPtr model = maybe_load(model_path);
      aprob_model* created = nullptr;
      aprob_report* r = nullptr;
      check(aprob_session(doc.c_str(), model.get(), options.workers, &created, &r));
      if (created) model.reset(created);
      emit(ReportPtr(r), options);
      save_if(model.get(), save_path);
    };
  });

  // applications
  std::string examples_path;
  std::string schema = "position+token";
  std::size_t max_len = 3;
  auto* induce = app.add_subcommand("induce", "Rank expression programs consistent with example triples");
  induce->add_option("--examples", examples_path, "Triples file, one 'a, b, op : result' per line")
      ->required()
      ->check(CLI::ExistingFile);
  induce->add_option("--schema", schema, "Context schema: position or position+token");
  induce->add_option("--max-len", max_len, "Longest program in tokens")->check(CLI::PositiveNumber);
  induce->callback([&] {
    action = [&] {
      const std::string text = slurp(examples_path);
      aprob_report* r = nullptr;
      check(aprob_induce(text.c_str(), schema.c_str(), max_len, &r));
      emit(ReportPtr(r), options);
    };
  });

  std::string list_a;
  std::string list_b;
  auto* analogy = app.add_subcommand("analogy", "Compare candidate answers by the mass of their descriptions");
  analogy->add_option("--a", list_a, "Code lengths of the descriptions supporting answer a, comma-separated")
      ->required();
  analogy->add_option("--b", list_b, "Code lengths for answer b")->required();
  analogy->callback([&] {
    action = [&] {
      const auto a = length_list(list_a);
      const auto b = length_list(list_b);
      aprob_report* r = nullptr;
      check(aprob_analogy(a.data(), a.size(), b.data(), b.size(), &r));
      emit(ReportPtr(r), options);
    };
  });

  std::string points_path;
  double delta = 1.0;
  std::size_t max_centers = 4;
  auto* cluster = app.add_subcommand("cluster", "Choose the number of clusters by total code length");
  cluster->add_option("--points", points_path, "Points file, one point per line")
      ->required()
      ->check(CLI::ExistingFile);
  cluster->add_option("--delta", delta, "Quantization step")->check(CLI::PositiveNumber);
  cluster->add_option("--max", max_centers, "Largest number of centers to try")->check(CLI::PositiveNumber);
  cluster->add_option("--seed", seed, "Seed for center initialization");
  cluster->callback([&] {
    action = [&] {
      const std::string text = slurp(points_path);
      aprob_report* r = nullptr;
      check(aprob_cluster(text.c_str(), delta, max_centers, seed, options.workers, &r));
      emit(ReportPtr(r), options);
    };
  });

  std::string spec_path;
  std::size_t limit = 10;
  auto* plan = app.add_subcommand("plan", "List the most probable solution plans of a planner spec");
  plan->add_option("--spec", spec_path, "Planner spec (JSON)")->required()->check(CLI::ExistingFile);
  plan->add_option("--limit", limit, "Number of plans to list")->check(CLI::PositiveNumber);
  plan->callback([&] {
    action = [&] {
      const std::string text = slurp(spec_path);
      aprob_report* r = nullptr;
      check(aprob_plan(text.c_str(), limit, &r));
      emit(ReportPtr(r), options);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    if (f.code == kExitUsage) std::cerr << "\n" << app.help();
    return f.code;
  }
}
