#include <cmath>

#include "bshift/error.hpp"
#include "bshift/lyapunov.hpp"
#include "bshift/solvers.hpp"
#include "trace_builder.hpp"

namespace bshift {

namespace {

void check_start(const Problem& p, const Vector& v, const char* name) {
  if (static_cast<std::size_t>(v.size()) != p.d())
    throw Error(ErrorCode::kDimensionMismatch, std::string(name) + " has the wrong dimension");
  if (!v.allFinite()) throw Error(ErrorCode::kInvalidArgument, std::string(name) + " is not finite");
}

}  // namespace

Vector mirror_step(const Vector& z, const Vector& y, const Vector& g, double alpha, double mu) {
  return (alpha * z + mu * y - g) / (alpha + mu);
}

GdSolver::GdSolver(const Problem& p, Vector x0, double eta) : oracle_(p), x_(std::move(x0)), eta_(eta) {
  check_start(p, x_, "x0");
}

void GdSolver::step() {
  x_ -= eta_ * oracle_.full_grad(x_);
  ++k_;
}

NagSolver::NagSolver(const Problem& p, const NagParams& params, Vector x0, Vector z0)
    : oracle_(p), params_(params), x_(std::move(x0)), z_(std::move(z0)) {
  check_start(p, x_, "x0");
  check_start(p, z_, "z0");
}

void NagSolver::step() {
  const double mu = oracle_.problem().mu();
  const Vector y = params_.tau_y * z_ + (1.0 - params_.tau_y) * x_;
  const Vector g = oracle_.full_grad(y);
  Vector z_next = mirror_step(z_, y, g, params_.alpha, mu);
  if (observer_) observer_(MirrorStep{z_, y, g, z_next, params_.alpha});
  x_ = params_.tau_x * z_next + (1.0 - params_.tau_x) * x_;
  z_ = std::move(z_next);
  ++k_;
}

NagTextbookSolver::NagTextbookSolver(const Problem& p, Vector x0) : oracle_(p), x_(std::move(x0)) {
  check_start(p, x_, "x0");
  y_ = x_;
  const double sk = std::sqrt(p.kappa());
  beta_ = (sk - 1.0) / (sk + 1.0);
}

void NagTextbookSolver::step() {
  const Vector x_next = y_ - oracle_.full_grad(y_) / oracle_.problem().L();
  y_ = x_next + beta_ * (x_next - x_);
  x_ = x_next;
}

GtmSolver::GtmSolver(const Problem& p, const GtmParams& params, Vector y_minus1, Vector z0)
    : oracle_(p), params_(params), z_(std::move(z0)), y_prev_(std::move(y_minus1)) {
  check_start(p, y_prev_, "y_-1");
  check_start(p, z_, "z0");
  grad_y_prev_ = oracle_.full_grad(y_prev_);
}

void GtmSolver::step() {
  const double mu = oracle_.problem().mu();
  const GtmStep& s = params_.at(k_);
  Vector y = s.tau_x * z_ + (1.0 - s.tau_x) * y_prev_ + s.tau_z * (mu * (y_prev_ - z_) - grad_y_prev_);
  Vector g = oracle_.full_grad(y);
  Vector z_next = mirror_step(z_, y, g, s.alpha, mu);
  if (observer_) observer_(MirrorStep{z_, y, g, z_next, s.alpha});
  z_ = std::move(z_next);
  y_prev_ = std::move(y);
  grad_y_prev_ = std::move(g);
  ++k_;
}

RunResult gd_run(const Problem& p, const Vector& x0, std::size_t steps, std::optional<double> eta,
                 const RunOptions& opt) {
  GdSolver s(p, x0, eta.value_or(2.0 / (p.L() + p.mu())));
  detail::TraceBuilder tb(p, opt);
  for (std::size_t k = 1; k <= steps; ++k) {
    s.step();
    if (tb.record(k, s.counters(), s.x(), std::nullopt)) break;
  }
  return tb.finish(s.x(), s.counters());
}

RunResult nag_run(const Problem& p, const Vector& x0, const Vector& z0, const NagParams& params, std::size_t steps,
                  const RunOptions& opt) {
  NagSolver s(p, params, x0, z0);
  const LyapunovConstants c = nag_lyapunov_constants(params, p.L(), p.mu());
  detail::TraceBuilder tb(p, opt);
  for (std::size_t k = 1; k <= steps; ++k) {
    s.step();
    std::optional<double> t;
    if (tb.wants_lyapunov()) t = lyapunov_value(c, p, *opt.ctx, s);
    if (tb.record(k, s.counters(), s.x(), t)) break;
  }
  return tb.finish(s.x(), s.counters());
}

RunResult gtm_run(const Problem& p, const Vector& y_minus1, const Vector& z0, const GtmParams& params,
                  std::size_t steps, const RunOptions& opt) {
  GtmSolver s(p, params, y_minus1, z0);
  const LyapunovConstants c = gtm_lyapunov_constants(params.steady, p.L(), p.mu());
  detail::TraceBuilder tb(p, opt);
  for (std::size_t k = 1; k <= steps; ++k) {
    s.step();
    std::optional<double> t;
    if (tb.wants_lyapunov()) t = lyapunov_value(c, p, *opt.ctx, s);
    if (tb.record(k, s.counters(), s.z(), t)) break;
  }
  return tb.finish(s.z(), s.counters());
}

}  // namespace bshift
