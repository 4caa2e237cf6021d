#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bshift/params.hpp"
#include "bshift/problem.hpp"
#include "bshift/solvers.hpp"

namespace bshift {

enum class Method { kGtm, kNag, kBsSvrg, kBsSaga, kBsPointSaga };
const char* to_string(Method m);

/// Weights of a method's Lyapunov function T and its guaranteed ratio rho
/// (per iteration; per epoch for BS-SVRG).
struct LyapunovConstants {
  Method method = Method::kGtm;
  double lambda = 0.0;
  double rho = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double beta = 0.0;       // BS-SVRG second case only
  double gamma_aux = 0.0;  // BS-SVRG second case only
  double delta_aux = 0.0;  // BS-SVRG second case only
  bool case_two = false;
};

LyapunovConstants gtm_lyapunov_constants(const GtmStep& s, double L, double mu);
LyapunovConstants nag_lyapunov_constants(const NagParams& p, double L, double mu);
/// Ill and numerical choices: rho = (1 + mu/a)^{-2m}. Well choice: rho = 1/2 with
/// the doubled lambda. Throws constraint-violation if Delta < -1e-15.
LyapunovConstants bs_svrg_constants(const BsSvrgParams& p, double L, double mu);
LyapunovConstants bs_saga_lyapunov_constants(const ScalarParam& s, double L, double mu, std::size_t n);
LyapunovConstants bs_point_saga_lyapunov_constants(const ScalarParam& s, double L, double mu, std::size_t n);

double lyapunov_value(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx, const GtmSolver& s);
double lyapunov_value(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx, const NagSolver& s);
double lyapunov_value(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx, const BsSvrgSolver& s);
double lyapunov_value(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx, const BsSagaSolver& s);
double lyapunov_value(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx,
                      const BsPointSagaSolver& s);

/// x* with ||grad f(x*)|| <= grad_tol. Exact for the diagonal quadratic; G-TM
/// then Newton polish otherwise. Needs grad_tol >= 1e-13 L.
ShiftedContext reference_solution(const Problem& p, double grad_tol);

/// Additive slack max(rel |T|, abs) + extra, where extra carries the
/// reference-solution error.
struct SlackPolicy {
  double rel = 1e-10;
  double abs = 1e-12;
  double extra = 0.0;

  double at(double t) const;
};

/// Extra slack for an inexact x*: kappa * ||grad f(x*)|| * diameter.
double reference_slack(const Problem& p, const ShiftedContext& ctx, double diameter);

/// margin is the worst relative margin (bound - value) / bound; >= 0 passes.
struct CheckResult {
  std::string id;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

/// Asserts T[k+1] <= rho T[k] + slack(T[k]) for every k.
CheckResult check_contraction_deterministic(const std::string& id, const std::vector<double>& t, double rho,
                                            const SlackPolicy& slack);

/// T_k for k = 0..steps of a G-TM run with run_params, evaluated with constants c.
std::vector<double> gtm_lyapunov_series(const Problem& p, const ShiftedContext& ctx, const GtmParams& run_params,
                                        const LyapunovConstants& c, const Vector& y_minus1, const Vector& z0,
                                        std::size_t steps);
std::vector<double> nag_lyapunov_series(const Problem& p, const ShiftedContext& ctx, const NagParams& params,
                                        const LyapunovConstants& c, const Vector& x0, const Vector& z0,
                                        std::size_t steps);

/// Exact E_i[T_{k+1}] by running every branch i = 0..n-1 from a copy of the state.
struct EnumeratedExpectation {
  double t_now = 0.0;
  double t_next_mean = 0.0;
};
EnumeratedExpectation enumerate_expectation(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx,
                                            const BsSagaSolver& state);
EnumeratedExpectation enumerate_expectation(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx,
                                            const BsPointSagaSolver& state);

CheckResult check_contraction_enumerated(const std::string& id, const LyapunovConstants& c, const Problem& p,
                                         const ShiftedContext& ctx, const BsSagaSolver& state,
                                         const SlackPolicy& slack);
CheckResult check_contraction_enumerated(const std::string& id, const LyapunovConstants& c, const Problem& p,
                                         const ShiftedContext& ctx, const BsPointSagaSolver& state,
                                         const SlackPolicy& slack);

struct MonteCarloOutcome {
  double t_start = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;  // (mean - rho T_s) / SE
};

/// R seeded one-epoch replications from a fixed epoch-start state; passes when
/// mean T_{s+1} <= rho T_s + 3 SE. Needs R >= 200.
CheckResult check_contraction_monte_carlo(const std::string& id, const LyapunovConstants& c, const Problem& p,
                                          const ShiftedContext& ctx, const BsSvrgSolver& epoch_start,
                                          std::size_t replications, std::uint64_t seed,
                                          MonteCarloOutcome* outcome = nullptr);

/// Mirror-step identity, shifted firm non-expansiveness (prox-capable problems
/// only) and the function-value contraction on random configurations.
std::vector<CheckResult> check_lemma_identities(const Problem& p, const ShiftedContext& ctx, std::size_t trials,
                                                std::uint64_t seed);

}  // namespace bshift
