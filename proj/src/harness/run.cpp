#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "bshift/error.hpp"
#include "bshift/harness.hpp"
#include "bshift/report.hpp"

namespace bshift::harness {

namespace {

constexpr std::size_t kDefaultIterations = 1000;
constexpr double kDefaultPasses = 100.0;

std::size_t epoch_length(const ExperimentConfig& cfg, const Problem& p) {
  if (cfg.m > 0) return cfg.m;
  std::size_t m = 2 * p.n();
  // The ill-conditioned choice needs m / kappa <= 3/4.
  if (cfg.solver == "bs-svrg" && (cfg.choice.empty() || cfg.choice == "ill")) {
    const auto cap = static_cast<std::size_t>(std::floor(0.75 * p.kappa()));
    if (cap < m) m = cap;
  }
  return m;
}

BsSvrgParams svrg_choice(const ExperimentConfig& cfg, const Problem& p, std::size_t m) {
  const std::string c = cfg.choice.empty() ? "numerical" : cfg.choice;
  if (c == "ill") return bs_svrg_ill(p.L(), p.mu(), m);
  if (c == "well") return bs_svrg_well(p.L(), p.mu(), m);
  return bs_svrg_numerical(p.L(), p.mu(), m);
}

// Iterations (or epochs) implied by the budget fields.
std::size_t budget(const ExperimentConfig& cfg, const Problem& p, std::size_t m) {
  if (cfg.steps > 0) return cfg.steps;
  const bool stochastic = cfg.solver != "gd" && cfg.solver != "nag" && cfg.solver != "g-tm";
  if (!stochastic) return kDefaultIterations;
  const double passes = cfg.passes > 0.0 ? cfg.passes : kDefaultPasses;
  const double evals = passes * static_cast<double>(p.n());
  if (is_epoch_method(cfg.solver))
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(evals / static_cast<double>(p.n() + 2 * m))));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(evals)));
}

Trace thin(Trace t, std::size_t every) {
  if (every <= 1 || t.empty()) return t;
  Trace out;
  for (std::size_t i = 0; i < t.size(); ++i)
    if ((i + 1) % every == 0 || i + 1 == t.size()) out.push_back(t[i]);
  return out;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const Problem p = build_problem(cfg);
  const ShiftedContext ctx = reference_solution(p, std::max(cfg.ref_tol, 1e-13 * p.L()));
  RunOptions opt;
  opt.ctx = &ctx;
  if (cfg.stop_below) opt.stop_below = *cfg.stop_below;
  opt.output_anchor = cfg.output_point == "anchor";

  const Vector x0 = p.kind() == ProblemKind::kDiagQuadratic ? Vector::Ones(static_cast<Eigen::Index>(p.d()))
                                                            : Vector::Zero(static_cast<Eigen::Index>(p.d()));
  const std::size_t m = epoch_length(cfg, p);
  const std::size_t k = budget(cfg, p, m);
  const std::string& s = cfg.solver;
  const double L = p.L(), mu = p.mu();

  RunOutcome out;
  out.point_method = is_point_method(s);
  if (s == "gd") {
    out.result = gd_run(p, x0, k, std::nullopt, opt);
  } else if (s == "nag") {
    out.result = nag_run(p, x0, x0, nag_constants(L, mu), k, opt);
  } else if (s == "g-tm") {
    const GtmParams params = cfg.choice == "nag"  ? nag_in_gtm_schedule(L, mu)
                             : cfg.choice == "tm" ? tm_in_gtm_schedule(L, mu)
                                                  : gtm_constants(L, mu);
    out.result = gtm_run(p, x0, x0, params, k, opt);
  } else if (s == "bs-svrg") {
    out.result = bs_svrg_run(p, x0, svrg_choice(cfg, p, m), k, cfg.seed, opt);
  } else if (s == "bs-saga") {
    out.result = bs_saga_run(p, x0, bs_saga_alpha(L, mu, p.n()), k, cfg.seed, opt);
  } else if (s == "bs-point-saga") {
    out.result = bs_point_saga_run(p, x0, bs_point_saga_alpha(L, mu, p.n()), k, cfg.seed, opt);
  } else if (s == "point-saga") {
    out.result = point_saga_run(p, x0, point_saga_baseline(L, mu, p.n()).gamma, k, cfg.seed, opt);
  } else if (s == "saga") {
    out.result = saga_run(p, x0, saga_baseline(L, mu, p.n()), k, cfg.seed, opt);
  } else if (s == "svrg") {
    SvrgBaseline b = svrg_baseline(L, p.n());
    if (cfg.m > 0) b.m = cfg.m;
    out.result = svrg_run(p, x0, b, k, cfg.seed, opt);
  } else if (s == "katyusha") {
    out.result = katyusha_run(p, x0, katyusha_baseline(L, mu, m), k, cfg.seed, opt);
  }
  out.result.trace = thin(std::move(out.result.trace), cfg.every);
  return out;
}

void run_to_file(const ExperimentConfig& cfg) {
  const RunOutcome r = run_experiment(cfg);
  if (cfg.output == "-") {
    write_trace_csv(std::cout, r.result.trace, r.point_method);
    return;
  }
  std::ofstream f(cfg.output);
  if (!f) throw Error(ErrorCode::kIo, "cannot write '" + cfg.output + "'");
  write_trace_csv(f, r.result.trace, r.point_method);
  if (!f) throw Error(ErrorCode::kIo, "write failed for '" + cfg.output + "'");
}

std::vector<std::string> run_all(const std::vector<ExperimentConfig>& cfgs, std::size_t jobs) {
  std::vector<std::string> errors(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      try {
        run_to_file(cfgs[i]);
      } catch (const std::exception& e) {
        errors[i] = "config " + std::to_string(i) + ": " + e.what();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, cfgs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<std::string> out;
  for (auto& e : errors)
    if (!e.empty()) out.push_back(std::move(e));
  return out;
}

}  // namespace bshift::harness
