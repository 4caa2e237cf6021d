#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bshift/error.hpp"
#include "bshift/lyapunov.hpp"
#include "bshift/rng.hpp"

namespace bshift {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

Vector gaussian(Rng& rng, std::size_t d, double scale) {
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = scale * rng.normal();
  return v;
}

// Log-uniform draw on [10^lo, 10^hi].
double log_uniform(Rng& rng, double lo, double hi) {
  return std::pow(10.0, lo + (hi - lo) * rng.uniform01());
}

template <class S>
EnumeratedExpectation enumerate_impl(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx,
                                     const S& state) {
  EnumeratedExpectation e;
  e.t_now = lyapunov_value(c, p, ctx, state);
  // Branches are summed in index order so the result is reproducible bit for bit.
  double sum = 0.0;
  for (std::size_t i = 0; i < p.n(); ++i) {
    S branch = state;
    branch.step_with_index(i);
    sum += lyapunov_value(c, p, ctx, branch);
  }
  e.t_next_mean = sum / static_cast<double>(p.n());
  return e;
}

CheckResult enumerated_result(const std::string& id, const EnumeratedExpectation& e, double rho,
                              const SlackPolicy& slack) {
  const double bound = rho * e.t_now + slack.at(e.t_now);
  CheckResult r;
  r.id = id;
  r.pass = e.t_next_mean <= bound;
  r.margin = (bound - e.t_next_mean) / bound;
  r.detail = "T_k=" + fmt(e.t_now) + ",E[T_k+1]=" + fmt(e.t_next_mean) + ",rho=" + fmt(rho);
  return r;
}

}  // namespace

double SlackPolicy::at(double t) const { return std::max(rel * std::abs(t), abs) + extra; }

double reference_slack(const Problem& p, const ShiftedContext& ctx, double diameter) {
  return p.kappa() * ctx.residual_norm * diameter;
}

CheckResult check_contraction_deterministic(const std::string& id, const std::vector<double>& t, double rho,
                                            const SlackPolicy& slack) {
  CheckResult r;
  r.id = id;
  r.pass = true;
  r.margin = std::numeric_limits<double>::infinity();
  std::size_t worst_k = 0;
  std::size_t first_violation = t.size();
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double bound = rho * t[k] + slack.at(t[k]);
    const double m = (bound - t[k + 1]) / bound;
    const bool ok = t[k + 1] <= bound && t[k] >= -slack.at(t[k]);
    if (!ok && first_violation == t.size()) first_violation = k;
    r.pass = r.pass && ok;
    if (m < r.margin) {
      r.margin = m;
      worst_k = k;
    }
  }
  std::ostringstream d;
  d.precision(17);
  d << "steps=" << (t.empty() ? 0 : t.size() - 1) << ",worst_k=" << worst_k << ",rho=" << rho;
  if (worst_k + 1 < t.size()) d << ",T_k=" << t[worst_k] << ",T_k+1=" << t[worst_k + 1];
  if (first_violation < t.size()) d << ",first_violation_k=" << first_violation;
  r.detail = d.str();
  return r;
}

std::vector<double> gtm_lyapunov_series(const Problem& p, const ShiftedContext& ctx, const GtmParams& run_params,
                                        const LyapunovConstants& c, const Vector& y_minus1, const Vector& z0,
                                        std::size_t steps) {
  GtmSolver s(p, run_params, y_minus1, z0);
  std::vector<double> t{lyapunov_value(c, p, ctx, s)};
  for (std::size_t k = 0; k < steps; ++k) {
    s.step();
    t.push_back(lyapunov_value(c, p, ctx, s));
  }
  return t;
}

std::vector<double> nag_lyapunov_series(const Problem& p, const ShiftedContext& ctx, const NagParams& params,
                                        const LyapunovConstants& c, const Vector& x0, const Vector& z0,
                                        std::size_t steps) {
  NagSolver s(p, params, x0, z0);
  std::vector<double> t{lyapunov_value(c, p, ctx, s)};
  for (std::size_t k = 0; k < steps; ++k) {
    s.step();
    t.push_back(lyapunov_value(c, p, ctx, s));
  }
  return t;
}

EnumeratedExpectation enumerate_expectation(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx,
                                            const BsSagaSolver& state) {
  return enumerate_impl(c, p, ctx, state);
}

EnumeratedExpectation enumerate_expectation(const LyapunovConstants& c, const Problem& p, const ShiftedContext& ctx,
                                            const BsPointSagaSolver& state) {
  return enumerate_impl(c, p, ctx, state);
}

CheckResult check_contraction_enumerated(const std::string& id, const LyapunovConstants& c, const Problem& p,
                                         const ShiftedContext& ctx, const BsSagaSolver& state,
                                         const SlackPolicy& slack) {
  return enumerated_result(id, enumerate_impl(c, p, ctx, state), c.rho, slack);
}

CheckResult check_contraction_enumerated(const std::string& id, const LyapunovConstants& c, const Problem& p,
                                         const ShiftedContext& ctx, const BsPointSagaSolver& state,
                                         const SlackPolicy& slack) {
  return enumerated_result(id, enumerate_impl(c, p, ctx, state), c.rho, slack);
}

CheckResult check_contraction_monte_carlo(const std::string& id, const LyapunovConstants& c, const Problem& p,
                                          const ShiftedContext& ctx, const BsSvrgSolver& epoch_start,
                                          std::size_t replications, std::uint64_t seed,
                                          MonteCarloOutcome* outcome) {
  if (replications < 200) throw Error(ErrorCode::kInvalidArgument, "Monte Carlo check needs >= 200 replications");
  MonteCarloOutcome o;
  o.t_start = lyapunov_value(c, p, ctx, epoch_start);
  std::vector<double> values(replications);
  const auto base = static_cast<std::uint64_t>(Stream::kMonteCarlo);
  for (std::size_t r = 0; r < replications; ++r) {
    BsSvrgSolver run = epoch_start;
    run.reseed(Rng(seed, base + 2 * r), Rng(seed, base + 2 * r + 1));
    run.run_epoch();
    values[r] = lyapunov_value(c, p, ctx, run);
  }
  const double rd = static_cast<double>(replications);
  double sum = 0.0;
  for (double v : values) sum += v;
  o.mean = sum / rd;
  double ss = 0.0;
  for (double v : values) ss += (v - o.mean) * (v - o.mean);
  o.std_error = std::sqrt(ss / (rd - 1.0) / rd);
  const double target = c.rho * o.t_start;
  o.z_score = o.std_error > 0.0 ? (o.mean - target) / o.std_error : 0.0;
  const double bound = target + 3.0 * o.std_error + 1e-12;
  if (outcome) *outcome = o;

  CheckResult res;
  res.id = id;
  res.pass = o.mean <= bound;
  res.margin = (bound - o.mean) / bound;
  res.detail = "T_s=" + fmt(o.t_start) + ",mean_T_s+1=" + fmt(o.mean) + ",se=" + fmt(o.std_error) +
               ",rho=" + fmt(c.rho) + ",z=" + fmt(o.z_score) + ",R=" + std::to_string(replications);
  return res;
}

std::vector<CheckResult> check_lemma_identities(const Problem& p, const ShiftedContext& ctx, std::size_t trials,
                                                std::uint64_t seed) {
  Rng rng(seed, Stream::kVerification);
  const double mu = p.mu(), L = p.L();
  const std::size_t d = p.d();
  const Vector& xs = ctx.x_star;

  double worst_identity = 0.0;  // relative error
  double worst_firm = std::numeric_limits<double>::infinity();
  double worst_fvc = std::numeric_limits<double>::infinity();
  std::size_t firm_fail = 0, fvc_fail = 0;

  for (std::size_t t = 0; t < trials; ++t) {
    // Mirror-descent identity for an arbitrary estimator G.
    {
      const double alpha = mu * log_uniform(rng, -1.0, 4.0);
      const Vector z_prev = xs + gaussian(rng, d, 1.0);
      const Vector y = xs + gaussian(rng, d, 1.0);
      const Vector g = gaussian(rng, d, log_uniform(rng, -2.0, 1.0));
      const Vector z_next = mirror_step(z_prev, y, g, alpha, mu);
      const Vector h = g - mu * (y - xs);
      const double r = 1.0 + mu / alpha;
      const double a1 = 0.5 * alpha * (z_prev - xs).squaredNorm();
      const double a2 = 0.5 * alpha * r * r * (z_next - xs).squaredNorm();
      const double a3 = h.squaredNorm() / (2.0 * alpha);
      const double lhs = h.dot(z_prev - xs);
      const double err = std::abs(lhs - (a1 - a2 + a3)) / (std::abs(lhs) + a1 + a2 + a3);
      worst_identity = std::max(worst_identity, err);
    }
    // Shifted firm non-expansiveness of the component prox.
    if (p.has_prox()) {
      const std::size_t i = rng.index(p.n());
      const double alpha = mu * log_uniform(rng, -1.0, 4.0);
      const Vector z_minus = xs + gaussian(rng, d, 1.0);
      // Alternate between arbitrary pairs and the pair anchored at x* (prox of y- is x*).
      const Vector y_minus = (t % 2 == 0) ? Vector(xs + ctx.grad_star_components[i] / alpha)
                                          : Vector(xs + gaussian(rng, d, 1.0));
      const Vector z_plus = p.component_prox(i, alpha, z_minus);
      const Vector y_plus = p.component_prox(i, alpha, y_minus);
      const Vector dh = shifted_component_grad(p, ctx, i, z_plus) - shifted_component_grad(p, ctx, i, y_plus);
      const double r = 1.0 + mu / alpha;
      const double lhs = (1.0 + 2.0 * (alpha + mu) / (L - mu)) * dh.squaredNorm() / (alpha * alpha) +
                         r * r * (z_plus - y_plus).squaredNorm();
      const double rhs = (z_minus - y_minus).squaredNorm();
      const double bound = rhs * (1.0 + 1e-10);
      const double m = (bound - lhs) / bound;
      if (lhs > bound) ++firm_fail;
      worst_firm = std::min(worst_firm, m);
    }
    // Function-value contraction with a residual term (R = 0 on every fourth draw).
    {
      const double tau = 0.01 + 0.98 * rng.uniform01();
      const Vector x_minus = xs + gaussian(rng, d, 1.0);
      const Vector z = xs + gaussian(rng, d, 1.0);
      const Vector res = (t % 4 == 0) ? Vector::Zero(static_cast<Eigen::Index>(d))
                                      : gaussian(rng, d, log_uniform(rng, -3.0, 0.0));
      const Vector x_plus = tau * z + (1.0 - tau) * x_minus + res;
      const Vector g = p.full_grad(x_plus);
      const double lhs = p.full_value(x_plus) - ctx.f_star;
      const double t1 = (1.0 - tau) * (p.full_value(x_minus) - ctx.f_star);
      const double t2 = g.dot(res);
      const double t3 = tau * g.dot(z - xs);
      const double rhs = t1 + t2 + t3;
      const double scale = std::max({1.0, std::abs(lhs), std::abs(t1), std::abs(t2), std::abs(t3)});
      const double m = (rhs - lhs) / scale + 1e-10;
      if (m < 0.0) ++fvc_fail;
      worst_fvc = std::min(worst_fvc, m);
    }
  }

  std::vector<CheckResult> out;
  const std::string n_str = "trials=" + std::to_string(trials);
  out.push_back({"mirror-descent-identity", worst_identity <= 1e-11, 1.0 - worst_identity / 1e-11,
                 n_str + ",max_rel_err=" + fmt(worst_identity)});
  if (p.has_prox())
    out.push_back({"shifted-firm-nonexpansive", firm_fail == 0, worst_firm,
                   n_str + ",violations=" + std::to_string(firm_fail)});
  out.push_back({"function-value-contraction", fvc_fail == 0, worst_fvc,
                 n_str + ",violations=" + std::to_string(fvc_fail)});
  return out;
}

}  // namespace bshift
