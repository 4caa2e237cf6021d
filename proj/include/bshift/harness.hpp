#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bshift/lyapunov.hpp"
#include "bshift/problem.hpp"
#include "bshift/solvers.hpp"

namespace bshift::harness {

/// One experiment. Field names double as CLI flag names and config-file keys.
struct ExperimentConfig {
  std::string problem = "logistic";  // logistic | ridge | quadratic
  std::string data;                  // LIBSVM path; empty means synthetic
  bool preprocess = true;            // bias + row normalization for data files
  std::size_t n = 1000;              // synthetic size
  std::size_t d = 20;
  double mu = 1e-3;
  double L = 1.0;                    // quadratic only
  std::string solver = "g-tm";
  std::string choice;                // g-tm: constant|nag|tm; bs-svrg: ill|well|numerical
  std::size_t m = 0;                 // epoch length; 0 picks 2n (3 kappa / 4 for bs-svrg ill when smaller)
  std::size_t steps = 0;             // iterations, or epochs for epoch methods; 0 uses the default budget
  double passes = 0.0;               // alternative budget in data passes for stochastic solvers
  std::uint64_t seed = 0;
  std::string output = "-";          // CSV path; "-" is stdout
  std::string output_point = "iterate";  // iterate | anchor (bs-svrg)
  std::size_t every = 1;             // keep every k-th trace record (the last one is always kept)
  double ref_tol = 1e-12;            // reference-solve gradient tolerance
  std::optional<double> stop_below;
};

const std::vector<std::string>& solver_ids();
bool is_point_method(const std::string& solver);
bool is_epoch_method(const std::string& solver);

/// Overlays keys of a JSON object onto cfg; unknown keys are an error.
void apply_config_json(const std::string& json_text, ExperimentConfig& cfg);
std::string read_file(const std::string& path);

/// Seed fallback: BOOST_SHIFT_SEED when set and parseable, otherwise 1.
std::uint64_t default_seed();

void validate(const ExperimentConfig& cfg);
Problem build_problem(const ExperimentConfig& cfg);

struct RunOutcome {
  RunResult result;
  bool point_method = false;
};
RunOutcome run_experiment(const ExperimentConfig& cfg);
/// Runs and writes the CSV to cfg.output.
void run_to_file(const ExperimentConfig& cfg);
/// Runs configs on up to `jobs` threads. Returns the error messages of failed jobs.
std::vector<std::string> run_all(const std::vector<ExperimentConfig>& cfgs, std::size_t jobs);

const std::vector<std::string>& suite_ids();
/// Throws kInvalidArgument for an unknown suite. trials sizes the random
/// lemma sweeps.
std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed, std::size_t trials);

struct ParamsQuery {
  std::string solver = "g-tm";
  std::string choice;
  std::optional<double> L, mu, kappa;
  std::size_t n = 1;
  std::size_t m = 0;
};
/// Two-line CSV table: solver,choice,alpha,alpha_over_mu,tau_x,tau_z,rate_factor,residual.
void print_params(std::ostream& out, const ParamsQuery& q);
void print_rates(std::ostream& out, std::size_t n, const std::vector<double>& kappas);

}  // namespace bshift::harness
