#include "bshift/error.hpp"
#include "bshift/lyapunov.hpp"
#include "bshift/solvers.hpp"
#include "trace_builder.hpp"

namespace bshift {

namespace {

using Index = Eigen::Index;

void check_start(const Problem& p, const Vector& x0) {
  if (static_cast<std::size_t>(x0.size()) != p.d())
    throw Error(ErrorCode::kDimensionMismatch, "x0 has the wrong dimension");
}

// Gradient table at the given points; n component evaluations charged to the oracle.
Eigen::MatrixXd warm_start(Oracle& oracle, const Eigen::MatrixXd& points) {
  const Problem& p = oracle.problem();
  Eigen::MatrixXd grads(static_cast<Index>(p.d()), static_cast<Index>(p.n()));
  for (std::size_t i = 0; i < p.n(); ++i)
    grads.col(static_cast<Index>(i)) = oracle.component_grad(i, points.col(static_cast<Index>(i)));
  return grads;
}

Eigen::MatrixXd replicate(const Problem& p, const Vector& x0) {
  return x0.replicate(1, static_cast<Index>(p.n()));
}

template <class S>
RunResult run_table(S& s, const Problem& p, std::size_t steps, const RunOptions& opt,
                    const std::optional<LyapunovConstants>& c, const Vector& (S::*point)() const) {
  detail::TraceBuilder tb(p, opt);
  const std::size_t n = p.n();
  for (std::size_t k = 1; k <= steps; ++k) {
    s.step();
    if (k % n != 0 && k != steps) continue;
    std::optional<double> t;
    if (c) t = lyapunov_value(*c, p, *opt.ctx, s);
    if (tb.record(k, s.counters(), (s.*point)(), t)) break;
  }
  return tb.finish((s.*point)(), s.counters());
}

template <class S>
RunResult run_table(S& s, const Problem& p, std::size_t steps, const RunOptions& opt,
                    const Vector& (S::*point)() const) {
  detail::TraceBuilder tb(p, opt);
  const std::size_t n = p.n();
  for (std::size_t k = 1; k <= steps; ++k) {
    s.step();
    if (k % n != 0 && k != steps) continue;
    if (tb.record(k, s.counters(), (s.*point)(), std::nullopt)) break;
  }
  return tb.finish((s.*point)(), s.counters());
}

}  // namespace

Table::Table(Eigen::MatrixXd points, Eigen::MatrixXd grads) : points_(std::move(points)), grads_(std::move(grads)) {
  rebase();
}

void Table::rebase() {
  avg_grad_ = grads_.rowwise().mean();
  if (tracks_points()) avg_point_ = points_.rowwise().mean();
  updates_since_rebase_ = 0;
}

void Table::count_update() {
  if (++updates_since_rebase_ >= 10 * n()) rebase();
}

void Table::set(std::size_t i, const Vector& point, const Vector& grad) {
  const Index c = static_cast<Index>(i);
  const double inv_n = 1.0 / static_cast<double>(n());
  avg_point_ += (point - points_.col(c)) * inv_n;
  avg_grad_ += (grad - grads_.col(c)) * inv_n;
  points_.col(c) = point;
  grads_.col(c) = grad;
  count_update();
}

void Table::set_grad(std::size_t i, const Vector& grad) {
  const Index c = static_cast<Index>(i);
  avg_grad_ += (grad - grads_.col(c)) / static_cast<double>(n());
  grads_.col(c) = grad;
  count_update();
}

SagaSolver::SagaSolver(const Problem& p, const SagaBaseline& params, Vector x0, std::uint64_t seed)
    : oracle_(p), gamma_(params.gamma), x_(std::move(x0)), rng_(seed, Stream::kIndexSampling) {
  check_start(p, x_);
  table_ = Table(Eigen::MatrixXd(), warm_start(oracle_, replicate(p, x_)));
}

void SagaSolver::step() { step_with_index(rng_.index(oracle_.problem().n())); }

void SagaSolver::step_with_index(std::size_t i) {
  Vector g = oracle_.component_grad(i, x_);
  x_ -= gamma_ * (g - table_.grads().col(static_cast<Index>(i)) + table_.avg_grad());
  table_.set_grad(i, g);
  ++k_;
}

BsSagaSolver::BsSagaSolver(const Problem& p, const ScalarParam& params, Vector x0, std::uint64_t seed)
    : oracle_(p), params_(params), z_(std::move(x0)), rng_(seed, Stream::kIndexSampling) {
  check_start(p, z_);
  Eigen::MatrixXd points = replicate(p, z_);
  Eigen::MatrixXd grads = warm_start(oracle_, points);
  table_ = Table(std::move(points), std::move(grads));
}

void BsSagaSolver::step() { step_with_index(rng_.index(oracle_.problem().n())); }

void BsSagaSolver::step_with_index(std::size_t i) {
  const double mu = oracle_.problem().mu();
  const double tx = params_.tau_x, tz = params_.tau_z;
  const Index c = static_cast<Index>(i);
  const Vector phi_prev = table_.points().col(c);
  const Vector& avg_point = table_.avg_point();
  const Vector& avg_grad = table_.avg_grad();

  Vector phi = tx * z_ + (1.0 - tx) * phi_prev + tz * (mu * (avg_point - z_) - avg_grad);
  Vector g_new = oracle_.component_grad(i, phi);
  const Vector g = g_new - table_.grads().col(c) + avg_grad - mu * (avg_point - phi_prev);
  Vector z_next = mirror_step(z_, phi, g, params_.alpha, mu);
  if (observer_) {
    MirrorStep ev{z_, phi, g, z_next, params_.alpha};
    ev.index = i;
    ev.phi_prev = &phi_prev;
    ev.points = &table_.points();
    observer_(ev);
  }
  table_.set(i, phi, g_new);
  z_ = std::move(z_next);
  ++k_;
}

PointSagaSolver::PointSagaSolver(const Problem& p, double gamma, Vector x0, std::uint64_t seed)
    : oracle_(p), gamma_(gamma), x_(std::move(x0)), rng_(seed, Stream::kIndexSampling) {
  check_start(p, x_);
  if (!p.has_prox()) throw Error(ErrorCode::kNoClosedForm, "Point-SAGA needs a closed-form prox");
  table_ = Table(Eigen::MatrixXd(), warm_start(oracle_, replicate(p, x_)));
}

void PointSagaSolver::step() { step_with_index(rng_.index(oracle_.problem().n())); }

void PointSagaSolver::step_with_index(std::size_t i) {
  const Vector z = x_ + gamma_ * (table_.grads().col(static_cast<Index>(i)) - table_.avg_grad());
  Vector x_next = oracle_.component_prox(i, 1.0 / gamma_, z);
  table_.set_grad(i, (z - x_next) / gamma_);
  x_ = std::move(x_next);
  ++k_;
}

BsPointSagaSolver::BsPointSagaSolver(const Problem& p, const ScalarParam& params, Vector x0, std::uint64_t seed)
    : BsPointSagaSolver(p, params, x0, replicate(p, x0), seed) {}

BsPointSagaSolver::BsPointSagaSolver(const Problem& p, const ScalarParam& params, Vector x,
                                     const Eigen::MatrixXd& points, std::uint64_t seed)
    : oracle_(p), params_(params), x_(std::move(x)), rng_(seed, Stream::kIndexSampling) {
  check_start(p, x_);
  if (!p.has_prox()) throw Error(ErrorCode::kNoClosedForm, "BS-Point-SAGA needs a closed-form prox");
  if (points.rows() != static_cast<Index>(p.d()) || points.cols() != static_cast<Index>(p.n()))
    throw Error(ErrorCode::kDimensionMismatch, "point table must be d x n");
  table_ = Table(points, warm_start(oracle_, points));
}

void BsPointSagaSolver::step() { step_with_index(rng_.index(oracle_.problem().n())); }

void BsPointSagaSolver::step_with_index(std::size_t i) {
  const double a = params_.alpha;
  const Index c = static_cast<Index>(i);
  const Vector z = x_ + (table_.grads().col(c) - table_.avg_grad() +
                         oracle_.problem().mu() * (table_.avg_point() - table_.points().col(c))) / a;
  Vector x_next = oracle_.component_prox(i, a, z);
  // grad f_i(x_next) = a (z - x_next) by prox optimality; no fresh gradient call.
  const Vector g_new = a * (z - x_next);
  if (observer_) observer_(ProxStep{i, z, x_next, a});
  table_.set(i, x_next, g_new);
  x_ = std::move(x_next);
  ++k_;
}

RunResult saga_run(const Problem& p, const Vector& x0, const SagaBaseline& params, std::size_t steps,
                   std::uint64_t seed, const RunOptions& opt) {
  SagaSolver s(p, params, x0, seed);
  return run_table(s, p, steps, opt, &SagaSolver::x);
}

RunResult bs_saga_run(const Problem& p, const Vector& x0, const ScalarParam& params, std::size_t steps,
                      std::uint64_t seed, const RunOptions& opt) {
  BsSagaSolver s(p, params, x0, seed);
  std::optional<LyapunovConstants> c;
  if (opt.ctx) c = bs_saga_lyapunov_constants(params, p.L(), p.mu(), p.n());
  return run_table(s, p, steps, opt, c, &BsSagaSolver::z);
}

RunResult point_saga_run(const Problem& p, const Vector& x0, double gamma, std::size_t steps, std::uint64_t seed,
                         const RunOptions& opt) {
  PointSagaSolver s(p, gamma, x0, seed);
  return run_table(s, p, steps, opt, &PointSagaSolver::x);
}

RunResult bs_point_saga_run(const Problem& p, const Vector& x0, const ScalarParam& params, std::size_t steps,
                            std::uint64_t seed, const RunOptions& opt) {
  BsPointSagaSolver s(p, params, x0, seed);
  std::optional<LyapunovConstants> c;
  if (opt.ctx) c = bs_point_saga_lyapunov_constants(params, p.L(), p.mu(), p.n());
  return run_table(s, p, steps, opt, c, &BsPointSagaSolver::x);
}

}  // namespace bshift
