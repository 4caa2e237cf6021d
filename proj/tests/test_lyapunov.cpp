#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bshift/dataset.hpp"
#include "bshift/error.hpp"
#include "bshift/lyapunov.hpp"
#include "bshift/params.hpp"
#include "bshift/protocols.hpp"
#include "bshift/solvers.hpp"

using namespace bshift;

namespace {

Problem ridge(std::uint64_t seed, std::size_t n, std::size_t d, double mu) {
  return make_ridge(synth_dataset(seed, n, d, Task::kRegression), mu);
}

Eigen::MatrixXd columns_at(const Vector& x, std::size_t n) {
  Eigen::MatrixXd m(x.size(), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.cols(); ++i) m.col(i) = x;
  return m;
}

}  // namespace

TEST(Reference, QuadraticIsExact) {
  const Problem p = make_diag_quadratic(1.0, 1e-3, 4);
  const ShiftedContext ctx = reference_solution(p, 1e-13);
  EXPECT_EQ(ctx.x_star.norm(), 0.0);
  EXPECT_EQ(ctx.f_star, 0.0);
}

TEST(Reference, LogisticMeetsTolerance) {
  const Problem p = make_logistic_l2(synth_dataset(1, 50, 5, Task::kClassification), 1e-3);
  const ShiftedContext ctx = reference_solution(p, 1e-13);
  EXPECT_LE(p.full_grad(ctx.x_star).norm(), 1e-13);
  EXPECT_LE(ctx.residual_norm, 1e-13);
  double mean = 0.0;
  for (double v : ctx.f_star_components) mean += v;
  mean /= static_cast<double>(ctx.f_star_components.size());
  EXPECT_NEAR(mean, p.full_value(ctx.x_star), 1e-14);
  EXPECT_THROW(reference_solution(p, 1e-16), Error);
}

TEST(LyapunovValue, GtmOnWorstCaseQuadraticIsDistanceOnly) {
  const double L = 1.0, mu = 0.01;
  const Problem p = make_diag_quadratic(L, mu, 2);
  const ShiftedContext ctx = reference_solution(p, 2e-13);
  const GtmParams params = gtm_constants(L, mu);
  const LyapunovConstants c = gtm_lyapunov_constants(params.steady, L, mu);
  const double a = params.steady.alpha, tx = params.steady.tau_x, tz = params.steady.tau_z;
  EXPECT_NEAR(c.lambda, (tx - mu * tz) * (a + mu) * (a + mu) / a, 1e-15);
  GtmSolver s(p, params, Vector::Ones(2), (Vector(2) << 2.0, -1.0).finished());
  for (int k = 0; k < 30; ++k) {
    EXPECT_NEAR(lyapunov_value(c, p, ctx, s), 0.5 * c.lambda * s.z().squaredNorm(), 1e-14);
    s.step();
  }
}

TEST(LyapunovValue, ZeroAtOptimum) {
  const Problem p = ridge(2, 10, 3, 0.05);
  const ShiftedContext ctx = reference_solution(p, 2e-13);
  const ScalarParam sp = bs_point_saga_alpha(p.L(), p.mu(), p.n());
  const LyapunovConstants c = bs_point_saga_lyapunov_constants(sp, p.L(), p.mu(), p.n());
  const BsPointSagaSolver s(p, sp, ctx.x_star, columns_at(ctx.x_star, p.n()), 1);
  EXPECT_LE(std::abs(lyapunov_value(c, p, ctx, s)), 1e-24);
  const EnumeratedExpectation e = enumerate_expectation(c, p, ctx, s);
  EXPECT_LE(std::abs(e.t_now), 1e-24);
  EXPECT_LE(std::abs(e.t_next_mean), 1e-24);
  EXPECT_TRUE(check_contraction_enumerated("at-optimum", c, p, ctx, s, SlackPolicy{}).pass);

  const GtmParams gp = gtm_constants(p.L(), p.mu());
  const GtmSolver g(p, gp, ctx.x_star, ctx.x_star);
  EXPECT_LE(std::abs(lyapunov_value(gtm_lyapunov_constants(gp.steady, p.L(), p.mu()), p, ctx, g)), 1e-24);
}

TEST(LyapunovValue, MethodMismatch) {
  const Problem p = make_diag_quadratic(1.0, 0.1, 2);
  const ShiftedContext ctx = reference_solution(p, 2e-13);
  const GtmParams gp = gtm_constants(1.0, 0.1);
  const LyapunovConstants nag = nag_lyapunov_constants(nag_constants(1.0, 0.1), 1.0, 0.1);
  const GtmSolver g(p, gp, Vector::Ones(2), Vector::Ones(2));
  try {
    lyapunov_value(nag, p, ctx, g);
    FAIL() << "expected a method-mismatch error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMethodMismatch);
  }
}

TEST(Enumeration, IndependentOfSeed) {
  const Problem p = ridge(3, 9, 3, 0.02);
  const ShiftedContext ctx = reference_solution(p, 2e-13);
  const ScalarParam sp = bs_point_saga_alpha(p.L(), p.mu(), p.n());
  const LyapunovConstants c = bs_point_saga_lyapunov_constants(sp, p.L(), p.mu(), p.n());
  Eigen::MatrixXd pts = columns_at(ctx.x_star, p.n());
  pts += Eigen::MatrixXd::Constant(pts.rows(), pts.cols(), 0.3);
  const Vector x = ctx.x_star + Vector::Constant(ctx.x_star.size(), -0.5);
  const BsPointSagaSolver a(p, sp, x, pts, 1), b(p, sp, x, pts, 999);
  const EnumeratedExpectation ea = enumerate_expectation(c, p, ctx, a), eb = enumerate_expectation(c, p, ctx, b);
  EXPECT_EQ(ea.t_now, eb.t_now);
  EXPECT_EQ(ea.t_next_mean, eb.t_next_mean);
  EXPECT_LE(ea.t_next_mean, c.rho * ea.t_now);
}

TEST(Enumeration, MatchesManualAverage) {
  const Problem p = ridge(4, 6, 3, 0.05);
  const ShiftedContext ctx = reference_solution(p, 2e-13);
  const ScalarParam sp = bs_saga_alpha(p.L(), p.mu(), p.n());
  const LyapunovConstants c = bs_saga_lyapunov_constants(sp, p.L(), p.mu(), p.n());
  BsSagaSolver s(p, sp, Vector::Ones(static_cast<Eigen::Index>(p.d())), 3);
  for (int k = 0; k < 7; ++k) s.step();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.n(); ++i) {
    BsSagaSolver copy = s;
    copy.step_with_index(i);
    sum += lyapunov_value(c, p, ctx, copy);
  }
  const EnumeratedExpectation e = enumerate_expectation(c, p, ctx, s);
  EXPECT_NEAR(e.t_next_mean, sum / static_cast<double>(p.n()), 1e-15 * std::abs(sum));
  EXPECT_EQ(e.t_now, lyapunov_value(c, p, ctx, s));
}

TEST(DeterministicCheck, DetectsViolationAndPassesContraction) {
  const std::vector<double> good{1.0, 0.5, 0.25, 0.125};
  EXPECT_TRUE(check_contraction_deterministic("good", good, 0.5, SlackPolicy{}).pass);
  const std::vector<double> bad{1.0, 0.5, 0.26, 0.13};
  const CheckResult r = check_contraction_deterministic("bad", bad, 0.5, SlackPolicy{});
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.margin, 0.0);
  EXPECT_NE(r.detail.find("first_violation_k=1"), std::string::npos) << r.detail;
}

TEST(DeterministicCheck, GtmEqualityOnWorstCaseQuadratic) {
  const double L = 1.0, mu = 0.01;
  const Problem p = make_diag_quadratic(L, mu, 2);
  const ShiftedContext ctx = reference_solution(p, 2e-13);
  const GtmParams gp = gtm_constants(L, mu);
  const LyapunovConstants c = gtm_lyapunov_constants(gp.steady, L, mu);
  const Vector z0 = (Vector(2) << 1.0, 1.0).finished();
  const auto t = gtm_lyapunov_series(p, ctx, gp, c, z0, z0, 100);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) EXPECT_NEAR(t[k + 1] / t[k], c.rho, 1e-11);
}

TEST(DeterministicCheck, CorruptedAlphaIsCaught) {
  const CheckResult r = protocols::gtm_corrupted_alpha_probe(100.0, 2.0, 50);
  EXPECT_TRUE(r.pass) << r.detail;
}

TEST(MonteCarlo, NeedsEnoughReplications) {
  const Problem p = make_logistic_l2(synth_dataset(5, 20, 5, Task::kClassification), 1e-2);
  const ShiftedContext ctx = reference_solution(p, 2e-13);
  const BsSvrgParams params = bs_svrg_numerical(p.L(), p.mu(), 40);
  const LyapunovConstants c = bs_svrg_constants(params, p.L(), p.mu());
  const BsSvrgSolver s(p, params, Vector::Ones(static_cast<Eigen::Index>(p.d())), 1);
  EXPECT_THROW(check_contraction_monte_carlo("r1", c, p, ctx, s, 1, 1), Error);
  MonteCarloOutcome out;
  const CheckResult r = check_contraction_monte_carlo("r300", c, p, ctx, s, 300, 1, &out);
  EXPECT_TRUE(r.pass) << r.detail;
  EXPECT_LE(out.mean, c.rho * out.t_start + 3.0 * out.std_error);
}

TEST(Identities, HoldOnRidgeAndLogistic) {
  const Problem rd = ridge(6, 15, 4, 0.01);
  const Problem lg = make_logistic_l2(synth_dataset(6, 15, 4, Task::kClassification), 0.01);
  for (const Problem* p : {&rd, &lg}) {
    const ShiftedContext ctx = reference_solution(*p, 2e-13);
    const auto results = check_lemma_identities(*p, ctx, 2000, 6);
    EXPECT_EQ(results.size(), p->has_prox() ? 3u : 2u);
    for (const CheckResult& r : results) EXPECT_TRUE(r.pass) << r.id << ' ' << r.detail;
  }
}

TEST(SlackPolicy, RelativeAbsoluteAndExtra) {
  SlackPolicy s;
  s.extra = 0.5;
  EXPECT_DOUBLE_EQ(s.at(0.0), 1e-12 + 0.5);
  EXPECT_DOUBLE_EQ(s.at(1e6), 1e-4 + 0.5);
}
