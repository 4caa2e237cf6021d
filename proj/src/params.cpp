#include "bshift/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bshift/error.hpp"
#include "bshift/root_finding.hpp"

namespace bshift {

namespace {

void check_constants(double L, double mu) {
  if (!(mu > 0.0) || !(L > mu) || !std::isfinite(L)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "need L > mu > 0 (got L=" << L << ", mu=" << mu << ")";
    throw Error(ErrorCode::kInvalidConstants, msg.str());
  }
}

void require(const ConstraintReport& r, const char* what) {
  if (!r.satisfied()) throw Error(ErrorCode::kConstraintViolation, std::string(what) + ": " + r.describe());
}

// log of (1 + mu/a)^{2k} (1 - tau)
double log_c1(double mu, double a, double two_k, double tau) {
  return two_k * std::log1p(mu / a) + std::log1p(-tau);
}

}  // namespace

bool ConstraintReport::satisfied(double slack) const {
  return std::all_of(items.begin(), items.end(),
                     [slack](const Constraint& c) { return c.residual >= -slack * c.scale; });
}

double ConstraintReport::worst_margin() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const Constraint& c : items) worst = std::min(worst, c.residual / c.scale);
  return worst;
}

std::string ConstraintReport::describe() const {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out << ';';
    out << items[i].name << '=' << items[i].residual;
  }
  return out.str();
}

const char* to_string(SvrgChoice c) {
  switch (c) {
    case SvrgChoice::kIll: return "ill";
    case SvrgChoice::kWell: return "well";
    case SvrgChoice::kNumerical: return "numerical";
  }
  return "unknown";
}

ConstraintReport check_gtm_constraints(const GtmStep& s, double L, double mu) {
  ConstraintReport r;
  r.items.push_back({"2a>=L*tx-mu", 2.0 * s.alpha - (L * s.tau_x - mu), L});
  r.items.push_back({"(1+mu/a)^2(1-tx)<=1", -std::expm1(log_c1(mu, s.alpha, 2.0, s.tau_x)), 1.0});
  // tau_z is pinned by the other two; an equality shows up as a nonpositive residual.
  r.items.push_back({"tz=(1-tx)/(L-mu)", -std::abs(s.tau_z - (1.0 - s.tau_x) / (L - mu)) * L, 1.0});
  return r;
}

ConstraintReport check_nag_constraints(const NagParams& p, double L, double mu) {
  ConstraintReport r;
  r.items.push_back({"a>=L(1-tx)ty/(1-ty)", p.alpha - L * (1.0 - p.tau_x) * p.tau_y / (1.0 - p.tau_y), L});
  r.items.push_back({"tx>=ty", p.tau_x - p.tau_y, 1.0});
  r.items.push_back({"mu>=L(tx-ty)/(1-ty)", mu - L * (p.tau_x - p.tau_y) / (1.0 - p.tau_y), L});
  r.items.push_back({"(1+mu/a)(1-tx)<=1", -std::expm1(log_c1(mu, p.alpha, 1.0, p.tau_x)), 1.0});
  return r;
}

ConstraintReport check_bs_svrg_constraints(const BsSvrgParams& p, double L, double mu) {
  ConstraintReport r;
  const double two_m = 2.0 * static_cast<double>(p.m);
  if (p.choice == SvrgChoice::kWell) {
    r.items.push_back({"tx>1/2", p.tau_x - 0.5, 1.0});
    r.items.push_back({"(1+mu/a)^2m>=2", two_m * std::log1p(mu / p.alpha) - std::log(2.0), 1.0});
  } else {
    r.items.push_back({"C1:(1+mu/a)^2m(1-tx)<=1", -std::expm1(log_c1(mu, p.alpha, two_m, p.tau_x)), 1.0});
  }
  const double q = p.alpha / mu;
  const double kappa = L / mu;
  const double v = (q + 1.0) - (q + kappa) * p.tau_x;
  const double lhs = (1.0 + p.tau_x) * (1.0 + p.tau_x) * (1.0 - p.tau_x);
  // v is a difference of O(q + kappa) terms; its rounding error is scaled accordingly.
  const double scale = std::max(1.0, 8.0 * (q + kappa) * std::max(std::abs(v), 1.0));
  r.items.push_back({"C2:(1+tx)^2(1-tx)>=4v^2", lhs - 4.0 * v * v, scale});
  return r;
}

GtmParams gtm_constants(double L, double mu) {
  check_constants(L, mu);
  const double kappa = L / mu;
  const double sk = std::sqrt(kappa);
  GtmParams p;
  p.steady.alpha = mu * (sk - 1.0);
  p.steady.tau_x = (2.0 * sk - 1.0) / kappa;
  p.steady.tau_z = (sk - 1.0) / (L * (sk + 1.0));
  require(check_gtm_constraints(p.steady, L, mu), "gtm constants");
  return p;
}

GtmParams nag_in_gtm_schedule(double L, double mu) {
  check_constants(L, mu);
  const double sk = std::sqrt(L / mu);
  GtmParams p;
  const double alpha = mu * (sk - 1.0);
  p.first = GtmStep{alpha, 1.0 / (sk + 1.0), 0.0};
  p.steady = GtmStep{alpha, 1.0 / sk, 1.0 / (L + std::sqrt(L * mu))};
  return p;
}

GtmParams tm_in_gtm_schedule(double L, double mu) {
  GtmParams p = gtm_constants(L, mu);
  p.first = GtmStep{p.steady.alpha, 1.0 / (std::sqrt(L / mu) + 1.0), 0.0};
  return p;
}

NagParams nag_constants(double L, double mu) {
  check_constants(L, mu);
  const double sk = std::sqrt(L / mu);
  NagParams p{mu * (sk - 1.0), 1.0 / (sk + 1.0), 1.0 / sk};
  require(check_nag_constraints(p, L, mu), "nag constants");
  return p;
}

BsSvrgParams bs_svrg_from(double L, double mu, std::size_t m, double alpha, double tau_x, SvrgChoice choice) {
  check_constants(L, mu);
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "epoch length m must be >= 1");
  if (!(alpha > 0.0) || !(tau_x > 0.0 && tau_x < 1.0))
    throw Error(ErrorCode::kInvalidConstants, "need alpha > 0 and 0 < tau_x < 1");
  BsSvrgParams p;
  p.alpha = alpha;
  p.tau_x = tau_x;
  p.m = m;
  p.choice = choice;
  // With tau_x = (a + mu)/(a + L) the tau_z relation simplifies to 1/(a + L).
  p.tau_z = choice == SvrgChoice::kNumerical ? 1.0 / (alpha + L)
                                             : tau_x / mu - alpha * (1.0 - tau_x) / (mu * (L - mu));
  const double lr = 2.0 * std::log1p(mu / alpha);
  const double md = static_cast<double>(m);
  p.log_omega_tilde = (md - 1.0) * lr + std::log(std::expm1(-md * lr) / std::expm1(-lr));
  p.omega_tilde = std::exp(p.log_omega_tilde);
  p.rate_per_epoch = std::exp(-md * lr);
  return p;
}

BsSvrgParams bs_svrg_ill(double L, double mu, std::size_t m) {
  check_constants(L, mu);
  const double kappa = L / mu;
  const double md = static_cast<double>(m);
  if (m < 2 || md / kappa > 0.75) {
    std::ostringstream msg;
    msg << "ill-conditioned choice needs m >= 2 and m/kappa <= 3/4 (m=" << m << ", kappa=" << kappa << ")";
    throw Error(ErrorCode::kWrongRegime, msg.str());
  }
  const double c = 2.0 + std::sqrt(3.0);
  const double s = std::sqrt(c * md * kappa);
  const double alpha = std::sqrt(c * md * mu * L) - mu;
  const double tau_x = (1.0 - 1.0 / (c * kappa)) * s / (s + kappa - 1.0);
  BsSvrgParams p = bs_svrg_from(L, mu, m, alpha, tau_x, SvrgChoice::kIll);
  require(check_bs_svrg_constraints(p, L, mu), "ill-conditioned choice");
  return p;
}

BsSvrgParams bs_svrg_well(double L, double mu, std::size_t m) {
  check_constants(L, mu);
  const double kappa = L / mu;
  const double md = static_cast<double>(m);
  if (m == 0 || md / kappa <= 0.75) {
    std::ostringstream msg;
    msg << "well-conditioned choice needs m/kappa > 3/4 (m=" << m << ", kappa=" << kappa << ")";
    throw Error(ErrorCode::kWrongRegime, msg.str());
  }
  const double alpha = 1.5 * L - mu;
  const double tau_x = (1.0 - 1.0 / (6.0 * md)) * 3.0 * kappa / (5.0 * kappa - 2.0);
  BsSvrgParams p = bs_svrg_from(L, mu, m, alpha, tau_x, SvrgChoice::kWell);
  require(check_bs_svrg_constraints(p, L, mu), "well-conditioned choice");
  return p;
}

double bs_svrg_numerical_residual(double L, double mu, std::size_t m, double alpha) {
  const double g = 2.0 * static_cast<double>(m) * std::log1p(mu / alpha) + std::log((L - mu) / (alpha + L));
  return std::expm1(g);
}

BsSvrgParams bs_svrg_numerical(double L, double mu, std::size_t m) {
  check_constants(L, mu);
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "epoch length m must be >= 1");
  const double two_m = 2.0 * static_cast<double>(m);
  // Log form of (1 + mu/a)^{2m}(1 - (a + mu)/(a + L)) = 1; the power overflows for small a.
  auto g = [&](double a) { return two_m * std::log1p(mu / a) + std::log((L - mu) / (a + L)); };
  const double alpha = solve_bracketed_root(g, 1e-12 * mu, 10.0 * L * static_cast<double>(m), 1e-15);
  BsSvrgParams p = bs_svrg_from(L, mu, m, alpha, (alpha + mu) / (alpha + L), SvrgChoice::kNumerical);
  require(check_bs_svrg_constraints(p, L, mu), "numerical choice");
  return p;
}

double bs_saga_cubic(double q, double n, double kappa) {
  return ((q - (2.0 * n - 3.0)) * q - (2.0 * n * kappa + n - 3.0)) * q - (n * kappa - 1.0);
}

double bs_point_saga_cubic(double q, double n, double kappa) {
  return ((2.0 * q - (4.0 * n - 6.0)) * q - (2.0 * n * kappa + 4.0 * n - 6.0)) * q - (n * kappa + n - 2.0);
}

ScalarParam bs_saga_alpha(double L, double mu, std::size_t n) {
  check_constants(L, mu);
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  const double nd = static_cast<double>(n);
  const double kappa = L / mu;
  // (1 + 1/q)^2 (1 - (q + 1)/((q + kappa) n)) = 1 in log form; decreasing through zero.
  auto g = [&](double q) { return 2.0 * std::log1p(1.0 / q) + std::log1p(-(q + 1.0) / ((q + kappa) * nd)); };
  double hi = 2.0 * nd + std::sqrt(nd * kappa);
  while (g(hi) > 0.0) hi *= 2.0;
  const double q = solve_bracketed_root(g, 1e-12, hi, 1e-15);
  ScalarParam s;
  s.alpha = q * mu;
  s.rate_factor = (q / (q + 1.0)) * (q / (q + 1.0));
  s.residual = std::abs(std::expm1(g(q)));
  s.tau_x = (s.alpha + mu) / (s.alpha + L);
  s.tau_z = 1.0 / (s.alpha + L);
  s.lambda = (1.0 - s.tau_x) * (s.alpha + mu) * (s.alpha + mu) / ((L - mu) * nd);
  return s;
}

ScalarParam bs_point_saga_alpha(double L, double mu, std::size_t n) {
  check_constants(L, mu);
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  const double nd = static_cast<double>(n);
  const double kappa = L / mu;
  auto s_fn = [&](double q) { return bs_point_saga_cubic(q, nd, kappa); };
  const double q = solve_bracketed_root(s_fn, 0.0, 2.0 * nd + std::sqrt(nd * kappa), 1e-15);
  const double size = 2.0 * q * q * q + std::abs(4.0 * nd - 6.0) * q * q +
                      std::abs(2.0 * nd * kappa + 4.0 * nd - 6.0) * q + std::abs(nd * kappa + nd - 2.0);
  ScalarParam s;
  s.alpha = q * mu;
  s.rate_factor = (q / (q + 1.0)) * (q / (q + 1.0));
  s.residual = std::abs(s_fn(q)) / size;
  s.lambda = nd / (s.alpha * s.alpha) + 2.0 * (s.alpha + mu) * (nd - 1.0) / (s.alpha * s.alpha * (L - mu));
  return s;
}

SagaBaseline saga_baseline(double L, double mu, std::size_t n) {
  check_constants(L, mu);
  return {1.0 / (2.0 * (mu * static_cast<double>(n) + L))};
}

SvrgBaseline svrg_baseline(double L, std::size_t n) {
  return {1.0 / (10.0 * L), 2 * n};
}

KatyushaBaseline katyusha_baseline(double L, double mu, std::size_t m) {
  check_constants(L, mu);
  KatyushaBaseline k;
  k.m = m;
  k.tau1 = std::sqrt(static_cast<double>(m) / (3.0 * L / mu));
  if (k.tau1 > 0.5) {
    k.tau1 = 0.5;
    k.clamped = true;
  }
  k.alpha = 1.0 / (3.0 * k.tau1 * L);
  return k;
}

PointSagaBaseline point_saga_baseline(double L, double mu, std::size_t n) {
  check_constants(L, mu);
  const double nd = static_cast<double>(n);
  const double kappa = L / mu;
  PointSagaBaseline p;
  p.gamma = std::sqrt((nd - 1.0) * (nd - 1.0) + 4.0 * nd * kappa) / (2.0 * L * nd) - (1.0 - 1.0 / nd) / (2.0 * L);
  p.rate_factor = 1.0 / (1.0 + mu * p.gamma);
  p.bound = 1.0 - 1.0 / (nd + std::sqrt(nd * kappa) + 1.0);
  return p;
}

std::vector<RateRow> rate_factor_table(std::size_t n, const std::vector<double>& kappas) {
  std::vector<RateRow> rows;
  rows.reserve(kappas.size());
  for (double kappa : kappas) {
    const PointSagaBaseline ps = point_saga_baseline(kappa, 1.0, n);
    rows.push_back({kappa, ps.rate_factor, ps.bound, bs_point_saga_alpha(kappa, 1.0, n).rate_factor});
  }
  return rows;
}

}  // namespace bshift
