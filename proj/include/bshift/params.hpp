#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace bshift {

/// One named constraint in residual form: satisfied iff residual >= -slack * scale.
struct Constraint {
  std::string name;
  double residual = 0.0;
  double scale = 1.0;
};

struct ConstraintReport {
  std::vector<Constraint> items;

  bool satisfied(double slack = 1e-12) const;
  /// Smallest residual / scale; negative means violated.
  double worst_margin() const;
  std::string describe() const;
};

struct GtmStep {
  double alpha = 0.0;
  double tau_x = 0.0;
  double tau_z = 0.0;
};

/// G-TM constants, optionally with a different first step (k = 0).
struct GtmParams {
  GtmStep steady;
  std::optional<GtmStep> first;

  const GtmStep& at(std::size_t k) const { return (k == 0 && first) ? *first : steady; }
};

struct NagParams {
  double alpha = 0.0;
  double tau_y = 0.0;
  double tau_x = 0.0;
};

enum class SvrgChoice { kIll, kWell, kNumerical };
const char* to_string(SvrgChoice c);

struct BsSvrgParams {
  double alpha = 0.0;
  double tau_x = 0.0;
  double tau_z = 0.0;
  std::size_t m = 0;
  double omega_tilde = 0.0;      // may overflow to inf for very long epochs
  double log_omega_tilde = 0.0;  // always finite
  double rate_per_epoch = 0.0;   // (1 + mu/alpha)^{-2m}
  SvrgChoice choice = SvrgChoice::kNumerical;
};

/// Scalar choice found by root solving (BS-SAGA, BS-Point-SAGA).
struct ScalarParam {
  double alpha = 0.0;
  double rate_factor = 0.0;  // (1 + mu/alpha)^{-2}
  double residual = 0.0;     // relative residual of the defining equation
  double tau_x = 0.0;        // BS-SAGA only
  double tau_z = 0.0;        // BS-SAGA only
  double lambda = 0.0;       // Lyapunov weight attached for the verifier
};

GtmParams gtm_constants(double L, double mu);
GtmParams nag_in_gtm_schedule(double L, double mu);
GtmParams tm_in_gtm_schedule(double L, double mu);
NagParams nag_constants(double L, double mu);

BsSvrgParams bs_svrg_ill(double L, double mu, std::size_t m);
BsSvrgParams bs_svrg_well(double L, double mu, std::size_t m);
BsSvrgParams bs_svrg_numerical(double L, double mu, std::size_t m);
/// Builds a full parameter set from (alpha, tau_x); tau_z, omega and rate are derived.
BsSvrgParams bs_svrg_from(double L, double mu, std::size_t m, double alpha, double tau_x, SvrgChoice choice);

/// Residual of (1 + mu/a)^{2m}(1 - (a + mu)/(a + L)) - 1, evaluated via logs.
double bs_svrg_numerical_residual(double L, double mu, std::size_t m, double alpha);

ScalarParam bs_saga_alpha(double L, double mu, std::size_t n);
ScalarParam bs_point_saga_alpha(double L, double mu, std::size_t n);

/// Cubics in q = alpha/mu.
double bs_saga_cubic(double q, double n, double kappa);
double bs_point_saga_cubic(double q, double n, double kappa);

ConstraintReport check_gtm_constraints(const GtmStep& s, double L, double mu);
ConstraintReport check_nag_constraints(const NagParams& p, double L, double mu);
/// Both BS-SVRG constraints. For the well choice the first is replaced by the
/// regime conditions tau_x > 1/2 and (1 + mu/a)^{2m} >= 2.
ConstraintReport check_bs_svrg_constraints(const BsSvrgParams& p, double L, double mu);

struct SagaBaseline {
  double gamma = 0.0;
};
struct SvrgBaseline {
  double eta = 0.0;
  std::size_t m = 0;
};
struct KatyushaBaseline {
  double tau1 = 0.0;
  double tau2 = 0.5;
  double alpha = 0.0;
  std::size_t m = 0;
  bool clamped = false;  // tau1 was capped at 1/2
};
struct PointSagaBaseline {
  double gamma = 0.0;
  double rate_factor = 0.0;  // 1 / (1 + mu gamma)
  double bound = 0.0;        // 1 - 1/(n + sqrt(n kappa) + 1)
};

SagaBaseline saga_baseline(double L, double mu, std::size_t n);
SvrgBaseline svrg_baseline(double L, std::size_t n);
KatyushaBaseline katyusha_baseline(double L, double mu, std::size_t m);
PointSagaBaseline point_saga_baseline(double L, double mu, std::size_t n);

struct RateRow {
  double kappa = 0.0;
  double factor_point_saga = 0.0;
  double bound_point_saga = 0.0;
  double factor_bs_point_saga = 0.0;
};

/// Rate factors at mu = 1, L = kappa (all factors depend on kappa only).
std::vector<RateRow> rate_factor_table(std::size_t n, const std::vector<double>& kappas);

}  // namespace bshift
