// boost_shift: run solvers, verify contractions, print parameter choices.

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <vector>

#include <CLI11.hpp>

#include "bshift/dataset.hpp"
#include "bshift/error.hpp"
#include "bshift/harness.hpp"
#include "bshift/report.hpp"

namespace hs = bshift::harness;

namespace {

constexpr int kUsageError = 2;

// Flag values live in `flags`; only flags given on the command line are copied
// over the file-derived config.
struct RunFlags {
  hs::ExperimentConfig flags;
  double stop_below = 0.0;
  std::vector<std::pair<CLI::Option*, std::function<void(hs::ExperimentConfig&)>>> copies;

  template <class T>
  void add(CLI::App* app, const std::string& name, T hs::ExperimentConfig::*field, const std::string& help) {
    CLI::Option* opt = app->add_option("--" + name, flags.*field, help);
    copies.emplace_back(opt, [this, field](hs::ExperimentConfig& c) { c.*field = flags.*field; });
  }

  void overlay(hs::ExperimentConfig& cfg) const {
    for (const auto& [opt, copy] : copies)
      if (opt->count() > 0) copy(cfg);
  }
};

std::ostream* open_out(const std::string& path, std::unique_ptr<std::ofstream>& holder) {
  if (path.empty() || path == "-") return &std::cout;
  holder = std::make_unique<std::ofstream>(path);
  if (!*holder) throw bshift::Error(bshift::ErrorCode::kIo, "cannot write '" + path + "'");
  return holder.get();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shifted-objective accelerated solvers and their Lyapunov verification"};
  app.require_subcommand(1);

  // run
  CLI::App* run = app.add_subcommand("run", "Run one or more experiments and write CSV traces");
  RunFlags rf;
  std::vector<std::string> config_files;
  std::size_t jobs = 1;
  run->add_option("--config", config_files, "JSON config file(s); one job per file");
  run->add_option("--jobs", jobs, "Parallel jobs")->check(CLI::PositiveNumber);
  rf.add(run, "problem", &hs::ExperimentConfig::problem, "logistic | ridge | quadratic");
  rf.add(run, "data", &hs::ExperimentConfig::data, "LIBSVM file (default: synthetic)");
  rf.add(run, "preprocess", &hs::ExperimentConfig::preprocess, "Add bias and normalize rows of --data");
  rf.add(run, "n", &hs::ExperimentConfig::n, "Synthetic sample count");
  rf.add(run, "d", &hs::ExperimentConfig::d, "Synthetic feature count (quadratic: dimension)");
  rf.add(run, "mu", &hs::ExperimentConfig::mu, "Strong convexity constant");
  rf.add(run, "L", &hs::ExperimentConfig::L, "Smoothness constant (quadratic only)");
  rf.add(run, "solver", &hs::ExperimentConfig::solver, "Solver id");
  rf.add(run, "choice", &hs::ExperimentConfig::choice, "Parameter choice (g-tm: constant|nag|tm; bs-svrg: ill|well|numerical)");
  rf.add(run, "m", &hs::ExperimentConfig::m, "Epoch length");
  rf.add(run, "steps", &hs::ExperimentConfig::steps, "Iterations (epochs for epoch methods)");
  rf.add(run, "passes", &hs::ExperimentConfig::passes, "Budget in data passes for stochastic solvers");
  rf.add(run, "seed", &hs::ExperimentConfig::seed, "Seed (default: BOOST_SHIFT_SEED or 1)");
  rf.add(run, "output", &hs::ExperimentConfig::output, "CSV path, - for stdout");
  rf.add(run, "output_point", &hs::ExperimentConfig::output_point, "iterate | anchor");
  rf.add(run, "every", &hs::ExperimentConfig::every, "Keep every k-th trace record");
  rf.add(run, "ref_tol", &hs::ExperimentConfig::ref_tol, "Reference-solve gradient tolerance");
  CLI::Option* stop_opt = run->add_option("--stop_below", rf.stop_below, "Stop once f_subopt <= value");
  // `--output anchor` is accepted as shorthand for --output_point anchor.
  bool anchor_flag = false;
  run->add_flag("--anchor", anchor_flag, "Trace the anchor instead of z (bs-svrg)");

  // verify
  CLI::App* verify = app.add_subcommand("verify", "Run a verification suite; exit 0 iff every check passes");
  std::string suite;
  std::uint64_t vseed = hs::default_seed();
  std::size_t trials = 10000;
  std::string report_path = "-";
  verify->add_option("--suite", suite, "lemmas|gtm|nag|bs-svrg|bs-saga|bs-point-saga|params|all")->required();
  verify->add_option("--seed", vseed, "Seed");
  verify->add_option("--trials", trials, "Random configurations per lemma sweep");
  verify->add_option("--report", report_path, "Report path, - for stdout");

  // params
  CLI::App* params = app.add_subcommand("params", "Print a parameter choice");
  hs::ParamsQuery pq;
  double pL = 0, pmu = 0, pkappa = 0;
  params->add_option("--solver", pq.solver, "g-tm|nag|bs-svrg|bs-saga|bs-point-saga|point-saga");
  params->add_option("--choice", pq.choice, "bs-svrg: ill|well|numerical");
  CLI::Option* oL = params->add_option("--L", pL);
  CLI::Option* omu = params->add_option("--mu", pmu);
  CLI::Option* okappa = params->add_option("--kappa", pkappa);
  params->add_option("--n", pq.n);
  params->add_option("--m", pq.m, "Epoch length (default 2n)");

  // rates
  CLI::App* rates = app.add_subcommand("rates", "Rate factors of Point-SAGA and BS-Point-SAGA");
  std::size_t rn = 1000;
  std::vector<double> kappas{1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
  std::string rates_out = "-";
  rates->add_option("--n", rn);
  rates->add_option("--kappa", kappas, "Kappa grid");
  rates->add_option("--output", rates_out);

  // gen-data
  CLI::App* gen = app.add_subcommand("gen-data", "Write a seeded synthetic dataset in LIBSVM format");
  std::string task = "classification", gen_out = "-";
  std::size_t gn = 1000, gd = 20;
  std::uint64_t gseed = hs::default_seed();
  gen->add_option("--task", task, "classification | regression");
  gen->add_option("--n", gn);
  gen->add_option("--d", gd);
  gen->add_option("--seed", gseed);
  gen->add_option("--output", gen_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*run) {
      std::vector<hs::ExperimentConfig> cfgs;
      auto finish = [&](hs::ExperimentConfig cfg) {
        rf.overlay(cfg);
        if (stop_opt->count() > 0) cfg.stop_below = rf.stop_below;
        if (anchor_flag) cfg.output_point = "anchor";
        if (cfg.output == "anchor") {
          cfg.output_point = "anchor";
          cfg.output = "-";
        }
        hs::validate(cfg);
        cfgs.push_back(std::move(cfg));
      };
      hs::ExperimentConfig base;
      base.seed = hs::default_seed();
      if (config_files.empty()) {
        finish(base);
      } else {
        for (const auto& f : config_files) {
          hs::ExperimentConfig cfg = base;
          hs::apply_config_json(hs::read_file(f), cfg);
          finish(cfg);
        }
      }
      const auto errors = hs::run_all(cfgs, jobs);
      for (const auto& e : errors) std::cerr << "error: " << e << '\n';
      return errors.empty() ? 0 : 1;
    }
    if (*verify) {
      const auto& ids = hs::suite_ids();
      if (std::find(ids.begin(), ids.end(), suite) == ids.end()) {
        std::cerr << "unknown suite '" << suite << "'\n" << verify->help();
        return kUsageError;
      }
      const auto results = hs::run_suite(suite, vseed, trials);
      std::unique_ptr<std::ofstream> holder;
      bshift::write_report(*open_out(report_path, holder), results);
      return bshift::all_pass(results) ? 0 : 1;
    }
    if (*params) {
      if (oL->count()) pq.L = pL;
      if (omu->count()) pq.mu = pmu;
      if (okappa->count()) pq.kappa = pkappa;
      hs::print_params(std::cout, pq);
      return 0;
    }
    if (*rates) {
      std::unique_ptr<std::ofstream> holder;
      hs::print_rates(*open_out(rates_out, holder), rn, kappas);
      return 0;
    }
    if (*gen) {
      bshift::Task t;
      if (task == "classification") {
        t = bshift::Task::kClassification;
      } else if (task == "regression") {
        t = bshift::Task::kRegression;
      } else {
        std::cerr << "unknown task '" << task << "'\n";
        return kUsageError;
      }
      std::unique_ptr<std::ofstream> holder;
      bshift::write_libsvm(*open_out(gen_out, holder), bshift::synth_dataset(gseed, gn, gd, t));
      return 0;
    }
  } catch (const bshift::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == bshift::ErrorCode::kInvalidArgument ? kUsageError : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
