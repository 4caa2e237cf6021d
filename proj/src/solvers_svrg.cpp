#include <cmath>

#include "bshift/error.hpp"
#include "bshift/lyapunov.hpp"
#include "bshift/solvers.hpp"
#include "trace_builder.hpp"

namespace bshift {

BsSvrgSolver::BsSvrgSolver(const Problem& p, const BsSvrgParams& params, Vector x0, std::uint64_t seed)
    : BsSvrgSolver(p, params, x0, x0, seed) {}

BsSvrgSolver::BsSvrgSolver(const Problem& p, const BsSvrgParams& params, Vector z0, Vector anchor,
                           std::uint64_t seed)
    : oracle_(p),
      params_(params),
      z_(std::move(z0)),
      anchor_(std::move(anchor)),
      index_rng_(seed, Stream::kIndexSampling),
      anchor_rng_(seed, Stream::kAnchorSelection) {
  if (static_cast<std::size_t>(z_.size()) != p.d() || static_cast<std::size_t>(anchor_.size()) != p.d())
    throw Error(ErrorCode::kDimensionMismatch, "BS-SVRG start state has the wrong dimension");
  if (params_.m == 0) throw Error(ErrorCode::kInvalidArgument, "epoch length m must be >= 1");
}

void BsSvrgSolver::reseed(Rng index_rng, Rng anchor_rng) {
  index_rng_ = std::move(index_rng);
  anchor_rng_ = std::move(anchor_rng);
}

void BsSvrgSolver::run_epoch() {
  const Problem& p = oracle_.problem();
  const double mu = p.mu();
  const double a = params_.alpha, tx = params_.tau_x, tz = params_.tau_z;
  const Vector g_anchor = oracle_.full_grad(anchor_);
  // Weighted streaming selection: y_k replaces the candidate with probability
  // w_k / (w_0 + ... + w_k), w_k = r^k, r = (1 + mu/a)^2.
  const double lr = 2.0 * std::log1p(mu / a);
  const double em1 = std::expm1(-lr);
  Vector candidate;
  for (std::size_t k = 0; k < params_.m; ++k) {
    Vector y = tx * z_ + (1.0 - tx) * anchor_ + tz * (mu * (anchor_ - z_) - g_anchor);
    const std::size_t i = index_rng_.index(p.n());
    const Vector g = oracle_.component_grad(i, y) - oracle_.component_grad(i, anchor_) + g_anchor;
    Vector z_next = mirror_step(z_, y, g, a, mu);
    if (observer_) {
      MirrorStep ev{z_, y, g, z_next, a};
      ev.index = i;
      ev.anchor = &anchor_;
      observer_(ev);
    }
    const bool take = k == 0 || anchor_rng_.uniform01() < em1 / std::expm1(-static_cast<double>(k + 1) * lr);
    if (take) {
      candidate = std::move(y);
      last_anchor_index_ = k;
    }
    z_ = std::move(z_next);
  }
  anchor_ = std::move(candidate);
  ++epoch_;
}

SvrgSolver::SvrgSolver(const Problem& p, const SvrgBaseline& params, Vector x0, std::uint64_t seed)
    : oracle_(p), params_(params), anchor_(std::move(x0)), rng_(seed, Stream::kIndexSampling) {
  if (static_cast<std::size_t>(anchor_.size()) != p.d())
    throw Error(ErrorCode::kDimensionMismatch, "x0 has the wrong dimension");
}

void SvrgSolver::run_epoch() {
  const Problem& p = oracle_.problem();
  const Vector g_anchor = oracle_.full_grad(anchor_);
  Vector x = anchor_;
  for (std::size_t k = 0; k < params_.m; ++k) {
    const std::size_t i = rng_.index(p.n());
    x -= params_.eta * (oracle_.component_grad(i, x) - oracle_.component_grad(i, anchor_) + g_anchor);
  }
  anchor_ = std::move(x);
}

KatyushaSolver::KatyushaSolver(const Problem& p, const KatyushaBaseline& params, Vector x0, std::uint64_t seed)
    : oracle_(p), params_(params), y_(x0), z_(x0), anchor_(std::move(x0)), rng_(seed, Stream::kIndexSampling) {
  if (static_cast<std::size_t>(anchor_.size()) != p.d())
    throw Error(ErrorCode::kDimensionMismatch, "x0 has the wrong dimension");
}

void KatyushaSolver::run_epoch() {
  const Problem& p = oracle_.problem();
  const double t1 = params_.tau1, t2 = params_.tau2, a = params_.alpha;
  const Vector g_anchor = oracle_.full_grad(anchor_);
  // Weights (1 + a mu)^j, scaled by the last one so nothing overflows.
  const double lw = std::log1p(a * p.mu());
  const double last = static_cast<double>(params_.m) - 1.0;
  Vector acc = Vector::Zero(anchor_.size());
  double weight_sum = 0.0;
  for (std::size_t j = 0; j < params_.m; ++j) {
    const Vector x = t1 * z_ + t2 * anchor_ + (1.0 - t1 - t2) * y_;
    const std::size_t i = rng_.index(p.n());
    const Vector g = g_anchor + oracle_.component_grad(i, x) - oracle_.component_grad(i, anchor_);
    z_ -= a * g;
    y_ = x - g / (3.0 * p.L());
    const double w = std::exp((static_cast<double>(j) - last) * lw);
    acc += w * y_;
    weight_sum += w;
  }
  anchor_ = acc / weight_sum;
}

RunResult bs_svrg_run(const Problem& p, const Vector& x0, const BsSvrgParams& params, std::size_t epochs,
                      std::uint64_t seed, const RunOptions& opt) {
  BsSvrgSolver s(p, params, x0, seed);
  detail::TraceBuilder tb(p, opt);
  std::optional<LyapunovConstants> c;
  if (tb.wants_lyapunov()) c = bs_svrg_constants(params, p.L(), p.mu());
  for (std::size_t e = 1; e <= epochs; ++e) {
    s.run_epoch();
    std::optional<double> t;
    if (c) t = lyapunov_value(*c, p, *opt.ctx, s);
    if (tb.record(e, s.counters(), opt.output_anchor ? s.anchor() : s.z(), t)) break;
  }
  return tb.finish(opt.output_anchor ? s.anchor() : s.z(), s.counters());
}

RunResult svrg_run(const Problem& p, const Vector& x0, const SvrgBaseline& params, std::size_t epochs,
                   std::uint64_t seed, const RunOptions& opt) {
  SvrgSolver s(p, params, x0, seed);
  detail::TraceBuilder tb(p, opt);
  for (std::size_t e = 1; e <= epochs; ++e) {
    s.run_epoch();
    if (tb.record(e, s.counters(), s.anchor(), std::nullopt)) break;
  }
  return tb.finish(s.anchor(), s.counters());
}

RunResult katyusha_run(const Problem& p, const Vector& x0, const KatyushaBaseline& params, std::size_t epochs,
                       std::uint64_t seed, const RunOptions& opt) {
  KatyushaSolver s(p, params, x0, seed);
  detail::TraceBuilder tb(p, opt);
  for (std::size_t e = 1; e <= epochs; ++e) {
    s.run_epoch();
    if (tb.record(e, s.counters(), s.anchor(), std::nullopt)) break;
  }
  return tb.finish(s.anchor(), s.counters());
}

}  // namespace bshift
