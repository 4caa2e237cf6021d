#include "bshift/lyapunov.hpp"

#include <cmath>
#include <sstream>

#include "bshift/error.hpp"

namespace bshift {

const char* to_string(Method m) {
  switch (m) {
    case Method::kGtm: return "g-tm";
    case Method::kNag: return "nag";
    case Method::kBsSvrg: return "bs-svrg";
    case Method::kBsSaga: return "bs-saga";
    case Method::kBsPointSaga: return "bs-point-saga";
  }
  return "unknown";
}

LyapunovConstants gtm_lyapunov_constants(const GtmStep& s, double L, double mu) {
  (void)L;
  LyapunovConstants c;
  c.method = Method::kGtm;
  c.lambda = (s.tau_x - mu * s.tau_z) * (s.alpha + mu) * (s.alpha + mu) / s.alpha;
  const double r = s.alpha / (s.alpha + mu);
  c.rho = r * r;
  return c;
}

LyapunovConstants nag_lyapunov_constants(const NagParams& p, double L, double mu) {
  (void)L;
  LyapunovConstants c;
  c.method = Method::kNag;
  c.lambda = (p.alpha + mu) * p.tau_x;
  c.rho = p.alpha / (p.alpha + mu);
  return c;
}

LyapunovConstants bs_svrg_constants(const BsSvrgParams& p, double L, double mu) {
  LyapunovConstants c;
  c.method = Method::kBsSvrg;
  const double a = p.alpha, tx = p.tau_x;
  c.c2 = a * a * (1.0 - tx) / (L - mu);
  if (p.choice == SvrgChoice::kWell) {
    c.lambda = 2.0 * c.c2 * std::exp(-p.log_omega_tilde);
    c.rho = 0.5;
  } else {
    const double log_growth = 2.0 * static_cast<double>(p.m) * std::log1p(mu / a);
    c.lambda = c.c2 * std::exp(log_growth - p.log_omega_tilde);
    c.rho = p.rate_per_epoch;
  }
  const double gamma = std::abs(a + mu - (a + L) * tx) / ((L - mu) * mu);
  if (p.choice == SvrgChoice::kNumerical || gamma == 0.0) return c;  // c1 = 0

  c.case_two = true;
  c.gamma_aux = gamma;
  const double lm = L - mu;
  double delta = (1.0 + tx) * (1.0 + tx) / (lm * lm) - 4.0 * gamma * gamma / (1.0 - tx);
  if (delta * lm * lm < -1e-15) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Delta = " << delta << " < 0; the second constraint fails";
    throw Error(ErrorCode::kConstraintViolation, msg.str());
  }
  delta = std::max(delta, 0.0);
  c.delta_aux = delta;
  c.beta = (1.0 + tx) / (2.0 * gamma * lm) + std::sqrt(delta) / (2.0 * gamma);
  c.c1 = c.beta * gamma / 2.0 - tx / (2.0 * lm);
  return c;
}

LyapunovConstants bs_saga_lyapunov_constants(const ScalarParam& s, double L, double mu, std::size_t n) {
  LyapunovConstants c;
  c.method = Method::kBsSaga;
  c.lambda = (1.0 - s.tau_x) * (s.alpha + mu) * (s.alpha + mu) / ((L - mu) * static_cast<double>(n));
  c.rho = s.rate_factor;
  return c;
}

LyapunovConstants bs_point_saga_lyapunov_constants(const ScalarParam& s, double L, double mu, std::size_t n) {
  LyapunovConstants c;
  c.method = Method::kBsPointSaga;
  const double a = s.alpha, nd = static_cast<double>(n);
  c.lambda = nd / (a * a) + 2.0 * (a + mu) * (nd - 1.0) / (a * a * (L - mu));
  c.rho = s.rate_factor;
  return c;
}

namespace {

void expect(const LyapunovConstants& c, Method m) {
  if (c.method != m)
    throw Error(ErrorCode::kMethodMismatch,
                std::string("constants for ") + to_string(c.method) + " used with a " + to_string(m) + " state");
}

}  // namespace

double lyapunov_value(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx, const GtmSolver& s) {
  expect(c, Method::kGtm);
  return shifted_gap(p, ctx, s.y_prev()) + 0.5 * c.lambda * (s.z() - ctx.x_star).squaredNorm();
}

double lyapunov_value(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx, const NagSolver& s) {
  expect(c, Method::kNag);
  // f(x) - f* rebuilt from h so quadratic problems avoid cancellation.
  const Vector delta = s.x() - ctx.x_star;
  const double gap = shifted_value(p, ctx, s.x()) + ctx.grad_star.dot(delta) + 0.5 * p.mu() * delta.squaredNorm();
  return gap + 0.5 * c.lambda * (s.z() - ctx.x_star).squaredNorm();
}

double lyapunov_value(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx, const BsSvrgSolver& s) {
  expect(c, Method::kBsSvrg);
  const Vector& x = s.anchor();
  return shifted_value(p, ctx, x) - c.c1 * shifted_grad(p, ctx, x).squaredNorm() +
         0.5 * c.lambda * (s.z() - ctx.x_star).squaredNorm();
}

double lyapunov_value(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx, const BsSagaSolver& s) {
  expect(c, Method::kBsSaga);
  const Eigen::MatrixXd& points = s.table().points();
  double h_sum = 0.0;
  Vector g_sum = Vector::Zero(points.rows());
  for (std::size_t i = 0; i < p.n(); ++i) {
    const Vector phi = points.col(static_cast<Eigen::Index>(i));
    h_sum += shifted_component_value(p, ctx, i, phi);
    if (c.c1 != 0.0) g_sum += shifted_component_grad(p, ctx, i, phi);
  }
  const double nd = static_cast<double>(p.n());
  return h_sum / nd - c.c1 * (g_sum / nd).squaredNorm() + 0.5 * c.lambda * (s.z() - ctx.x_star).squaredNorm();
}

double lyapunov_value(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx,
                      const BsPointSagaSolver& s) {
  expect(c, Method::kBsPointSaga);
  const Eigen::MatrixXd& points = s.table().points();
  double sq = 0.0;
  for (std::size_t i = 0; i < p.n(); ++i)
    sq += shifted_component_grad(p, ctx, i, points.col(static_cast<Eigen::Index>(i))).squaredNorm();
  return c.lambda * sq / static_cast<double>(p.n()) + (s.x() - ctx.x_star).squaredNorm();
}

ShiftedContext reference_solution(const Problem& p, double grad_tol) {
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(p.d()));
  if (p.kind() == ProblemKind::kDiagQuadratic) return make_shifted_context(p, zero);
  if (!(grad_tol >= 1e-13 * p.L())) {
    std::ostringstream msg;
    msg << "grad_tol " << grad_tol << " is below 1e-13 L";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }

  // G-TM to moderate accuracy, then Newton on the exact Hessian; G-TM alone
  // stalls near the rounding floor of the gradient.
  GtmSolver gtm(p, gtm_constants(p.L(), p.mu()), zero, zero);
  Vector x = zero;
  double norm = p.full_grad(x).norm();
  const double switch_tol = std::max(grad_tol, 1e-9);
  const std::size_t cap = 200 + static_cast<std::size_t>(60.0 * std::sqrt(p.kappa()));
  for (std::size_t k = 0; k < cap && norm > switch_tol; ++k) {
    gtm.step();
    const double nz = p.full_grad(gtm.z()).norm();
    if (nz < norm) {
      norm = nz;
      x = gtm.z();
    }
  }
  for (int it = 0; it < 30 && norm > grad_tol; ++it) {
    const Vector g = p.full_grad(x);
    const Vector candidate = x - p.full_hessian(x).ldlt().solve(g);
    const double nc = p.full_grad(candidate).norm();
    if (!(nc < norm)) break;
    x = candidate;
    norm = nc;
  }
  if (norm > grad_tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "gradient norm " << norm << " above tolerance " << grad_tol;
    throw Error(ErrorCode::kReferenceSolve, msg.str());
  }
  return make_shifted_context(p, x);
}

}  // namespace bshift
