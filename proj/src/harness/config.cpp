#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bshift/error.hpp"
#include "bshift/harness.hpp"

namespace bshift::harness {

namespace {

using nlohmann::json;

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

const std::vector<std::string>& solver_ids() {
  static const std::vector<std::string> ids{"gd",   "nag",       "g-tm",  "bs-svrg",  "bs-saga",   "bs-point-saga",
                                            "saga", "svrg",      "katyusha", "point-saga"};
  return ids;
}

bool is_point_method(const std::string& s) { return s == "bs-point-saga" || s == "point-saga"; }
bool is_epoch_method(const std::string& s) { return s == "bs-svrg" || s == "svrg" || s == "katyusha"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_config_json(const std::string& text, ExperimentConfig& cfg) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kParse, "config must be a JSON object");
  static const std::vector<std::string> known{"problem", "data",  "preprocess",   "n",     "d",      "mu",
                                             "L",       "solver", "choice",      "m",     "steps",  "passes",
                                             "seed",    "output", "output_point", "every", "ref_tol", "stop_below"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw Error(ErrorCode::kParse, "config: unknown key '" + it.key() + "'");
  try {
    take(j, "problem", cfg.problem);
    take(j, "data", cfg.data);
    take(j, "preprocess", cfg.preprocess);
    take(j, "n", cfg.n);
    take(j, "d", cfg.d);
    take(j, "mu", cfg.mu);
    take(j, "L", cfg.L);
    take(j, "solver", cfg.solver);
    take(j, "choice", cfg.choice);
    take(j, "m", cfg.m);
    take(j, "steps", cfg.steps);
    take(j, "passes", cfg.passes);
    take(j, "seed", cfg.seed);
    take(j, "output", cfg.output);
    take(j, "output_point", cfg.output_point);
    take(j, "every", cfg.every);
    take(j, "ref_tol", cfg.ref_tol);
    if (j.contains("stop_below")) cfg.stop_below = j.at("stop_below").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BOOST_SHIFT_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
  }
  return 1;
}

void validate(const ExperimentConfig& cfg) {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (cfg.problem != "logistic" && cfg.problem != "ridge" && cfg.problem != "quadratic")
    bad("unknown problem '" + cfg.problem + "'");
  if (std::find(solver_ids().begin(), solver_ids().end(), cfg.solver) == solver_ids().end())
    bad("unknown solver '" + cfg.solver + "'");
  if (!(cfg.mu > 0.0)) bad("mu must be positive");
  if (cfg.passes < 0.0) bad("passes must be >= 0");
  if (cfg.every == 0) bad("every must be >= 1");
  if (is_point_method(cfg.solver) && cfg.problem == "logistic")
    bad(cfg.solver + " needs a prox-capable problem (ridge or quadratic)");
  if (cfg.output_point != "iterate" && cfg.output_point != "anchor") bad("output_point must be iterate or anchor");
  if (cfg.output_point == "anchor" && cfg.solver != "bs-svrg") bad("anchor output is only defined for bs-svrg");
  if (cfg.solver == "g-tm" && !cfg.choice.empty() && cfg.choice != "constant" && cfg.choice != "nag" &&
      cfg.choice != "tm")
    bad("g-tm choice must be constant, nag or tm");
  if (cfg.solver == "bs-svrg" && !cfg.choice.empty() && cfg.choice != "ill" && cfg.choice != "well" &&
      cfg.choice != "numerical")
    bad("bs-svrg choice must be ill, well or numerical");
}

Problem build_problem(const ExperimentConfig& cfg) {
  if (cfg.problem == "quadratic") return make_diag_quadratic(cfg.L, cfg.mu, cfg.d);
  const Task task = cfg.problem == "ridge" ? Task::kRegression : Task::kClassification;
  Dataset ds;
  if (cfg.data.empty()) {
    ds = synth_dataset(cfg.seed, cfg.n, cfg.d, task);
  } else {
    ds = parse_libsvm_file(cfg.data);
    if (cfg.preprocess) ds = preprocess(ds);
  }
  return cfg.problem == "ridge" ? make_ridge(ds, cfg.mu) : make_logistic_l2(ds, cfg.mu);
}

}  // namespace bshift::harness
