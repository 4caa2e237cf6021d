#include <cmath>

#include "bshift/error.hpp"
#include "bshift/harness.hpp"
#include "bshift/report.hpp"

namespace bshift::harness {

namespace {

struct Row {
  double alpha = 0.0, tau_x = 0.0, tau_z = 0.0, rate = 0.0, residual = 0.0;
};

}  // namespace

void print_params(std::ostream& out, const ParamsQuery& q) {
  // Any two of L, mu, kappa fix the third; mu defaults to 1.
  double mu = q.mu.value_or(1.0);
  double L = 0.0;
  if (q.L && q.kappa) {
    L = *q.L;
    mu = q.mu ? *q.mu : L / *q.kappa;
  } else if (q.L) {
    L = *q.L;
  } else if (q.kappa) {
    L = *q.kappa * mu;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "params needs --L or --kappa");
  }
  const std::size_t n = q.n;
  const std::size_t m = q.m > 0 ? q.m : 2 * n;
  std::string choice = q.choice;
  Row r;
  const std::string& s = q.solver;
  if (s == "g-tm" || s == "nag") {
    if (s == "g-tm") {
      const GtmStep st = gtm_constants(L, mu).steady;
      r = {st.alpha, st.tau_x, st.tau_z, std::pow(1.0 + mu / st.alpha, -2.0),
           std::abs(st.tau_z - (1.0 - st.tau_x) / (L - mu)) * (L - mu)};
    } else {
      const NagParams np = nag_constants(L, mu);
      // The y-coupling weight is reported in the tau_z column.
      r = {np.alpha, np.tau_x, np.tau_y, 1.0 / (1.0 + mu / np.alpha), 0.0};
    }
  } else if (s == "bs-svrg") {
    if (choice.empty()) choice = "numerical";
    const BsSvrgParams bp = choice == "ill"    ? bs_svrg_ill(L, mu, m)
                            : choice == "well" ? bs_svrg_well(L, mu, m)
                            : choice == "numerical"
                                ? bs_svrg_numerical(L, mu, m)
                                : throw Error(ErrorCode::kInvalidArgument, "unknown bs-svrg choice '" + choice + "'");
    r = {bp.alpha, bp.tau_x, bp.tau_z, bp.rate_per_epoch,
         choice == "numerical" ? std::abs(bs_svrg_numerical_residual(L, mu, m, bp.alpha)) : 0.0};
  } else if (s == "bs-saga" || s == "bs-point-saga") {
    const ScalarParam sp = s == "bs-saga" ? bs_saga_alpha(L, mu, n) : bs_point_saga_alpha(L, mu, n);
    r = {sp.alpha, sp.tau_x, sp.tau_z, sp.rate_factor, sp.residual};
  } else if (s == "point-saga") {
    const PointSagaBaseline b = point_saga_baseline(L, mu, n);
    r = {1.0 / b.gamma, 0.0, 0.0, b.rate_factor, 0.0};
  } else {
    throw Error(ErrorCode::kInvalidArgument, "params: unsupported solver '" + s + "'");
  }
  out << "solver,choice,L,mu,n,m,alpha,alpha_over_mu,tau_x,tau_z,rate_factor,residual\n";
  out << s << ',' << choice << ',' << format_double(L) << ',' << format_double(mu) << ',' << n << ',' << m << ','
      << format_double(r.alpha) << ',' << format_double(r.alpha / mu) << ',' << format_double(r.tau_x) << ','
      << format_double(r.tau_z) << ',' << format_double(r.rate) << ',' << format_double(r.residual) << '\n';
}

void print_rates(std::ostream& out, std::size_t n, const std::vector<double>& kappas) {
  out << "# boost-shift-rates v1\n";
  out << "n,kappa,factor_point_saga,bound_point_saga,factor_bs_point_saga\n";
  for (const RateRow& r : rate_factor_table(n, kappas))
    out << n << ',' << format_double(r.kappa) << ',' << format_double(r.factor_point_saga) << ','
        << format_double(r.bound_point_saga) << ',' << format_double(r.factor_bs_point_saga) << '\n';
}

}  // namespace bshift::harness
