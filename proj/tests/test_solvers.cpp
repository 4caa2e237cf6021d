#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bshift/dataset.hpp"
#include "bshift/error.hpp"
#include "bshift/lyapunov.hpp"
#include "bshift/params.hpp"
#include "bshift/problem.hpp"
#include "bshift/rng.hpp"
#include "bshift/solvers.hpp"

using namespace bshift;

namespace {

Problem logistic(std::uint64_t seed, std::size_t n, std::size_t d, double mu) {
  return make_logistic_l2(synth_dataset(seed, n, d, Task::kClassification), mu);
}

Problem ridge(std::uint64_t seed, std::size_t n, std::size_t d, double mu) {
  return make_ridge(synth_dataset(seed, n, d, Task::kRegression), mu);
}

Vector random_vec(std::uint64_t seed, std::size_t d) {
  Rng rng(seed, 91);
  Vector v(static_cast<Eigen::Index>(d));
  for (auto& x : v) x = rng.normal();
  return v;
}

void expect_same_trace(const Trace& a, const Trace& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].step, b[k].step);
    EXPECT_EQ(a[k].oracle_calls, b[k].oracle_calls);
    EXPECT_EQ(a[k].f_subopt, b[k].f_subopt);
    EXPECT_EQ(a[k].dist_sq, b[k].dist_sq);
  }
}

}  // namespace

TEST(MirrorStep, ClosedForm) {
  const Vector z = (Vector(2) << 1.0, 2.0).finished(), y = (Vector(2) << 0.0, -1.0).finished();
  const Vector g = (Vector(2) << 0.5, 0.5).finished();
  // Stationarity of <g, x> + a/2 |x - z|^2 + mu/2 |x - y|^2.
  const Vector x = mirror_step(z, y, g, 2.0, 0.5);
  EXPECT_LT((g + 2.0 * (x - z) + 0.5 * (x - y)).norm(), 1e-15);
}

TEST(Gd, WorstCaseQuadraticStep) {
  const Problem p = make_diag_quadratic(1.0, 0.25, 2);
  const RunResult r = gd_run(p, Vector::Ones(2), 1, 1.6);
  EXPECT_NEAR(r.final_point(0), -0.6, 1e-15);
  EXPECT_NEAR(r.final_point(1), 0.6, 1e-15);
  EXPECT_NEAR(r.final_point.squaredNorm(), 0.36 * 2.0, 1e-15);

  const RunResult fixed = gd_run(p, Vector::Zero(2), 10, std::nullopt);
  EXPECT_EQ(fixed.final_point.norm(), 0.0);
}

TEST(Gd, MonotoneOnLogistic) {
  const Problem p = logistic(3, 50, 5, 1e-2);
  const ShiftedContext ctx = reference_solution(p, 1e-12);
  RunOptions opt;
  opt.ctx = &ctx;
  const RunResult r = gd_run(p, Vector::Zero(static_cast<Eigen::Index>(p.d())), 200, std::nullopt, opt);
  for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LE(r.trace[k].f_subopt, r.trace[k - 1].f_subopt + 1e-15);
}

TEST(Nag, MatchesTwoLineScheme) {
  const Problem p = logistic(5, 30, 4, 1e-3);
  const double L = p.L(), sk = std::sqrt(p.kappa());
  const double beta = (sk - 1.0) / (sk + 1.0);
  const Vector x0 = random_vec(5, p.d());
  NagSolver alg(p, nag_constants(L, p.mu()), x0, x0);
  // Independent transcription of the two-line scheme.
  Vector x = x0, y = x0;
  for (int k = 0; k < 100; ++k) {
    const Vector x_next = y - p.full_grad(y) / L;
    y = x_next + beta * (x_next - x);
    x = x_next;
    alg.step();
    EXPECT_LT((alg.x() - x).norm(), 1e-12 * std::max(1.0, x.norm())) << "k=" << k;
  }
}

TEST(Nag, StationaryAtOptimum) {
  const Problem p = make_diag_quadratic(1.0, 0.01, 3);
  NagSolver s(p, nag_constants(1.0, 0.01), Vector::Zero(3), Vector::Zero(3));
  for (int k = 0; k < 20; ++k) s.step();
  EXPECT_EQ(s.x().norm(), 0.0);
  EXPECT_EQ(s.z().norm(), 0.0);
}

TEST(Gtm, NagScheduleReproducesNag) {
  const Problem p = logistic(6, 25, 4, 1e-2);
  const Vector x0 = random_vec(6, p.d());
  GtmSolver g(p, nag_in_gtm_schedule(p.L(), p.mu()), x0, x0);
  NagSolver n(p, nag_constants(p.L(), p.mu()), x0, x0);
  for (int k = 0; k < 100; ++k) {
    g.step();
    n.step();
    EXPECT_LT((g.z() - n.z()).norm(), 1e-12 * std::max(1.0, n.z().norm())) << "k=" << k;
  }
}

TEST(Gtm, ReflectionRecursionOnWorstCaseQuadratic) {
  const double kappa = 100.0;
  const Problem p = make_diag_quadratic(1.0, 1.0 / kappa, 2);
  const Vector z0 = (Vector(2) << 0.3, -1.2).finished();
  GtmSolver s(p, gtm_constants(1.0, 1.0 / kappa), z0, z0);
  const double q = 1.0 - 1.0 / std::sqrt(kappa);
  Vector z = z0;
  for (int k = 0; k < 200; ++k) {
    s.step();
    z = q * (Vector(2) << -z(0), z(1)).finished();
    EXPECT_LT((s.z() - z).norm(), 1e-12 * z.norm()) << "k=" << k;
  }
}

TEST(Gtm, TwoGradientsOnFirstStep) {
  const Problem p = make_diag_quadratic(1.0, 0.1, 2);
  GtmSolver s(p, gtm_constants(1.0, 0.1), Vector::Ones(2), Vector::Ones(2));
  s.step();
  EXPECT_EQ(s.counters().component_grad_evals, 2u);
  s.step();
  EXPECT_EQ(s.counters().component_grad_evals, 3u);
}

TEST(BsSvrg, SingleStepEpochTakesFirstPoint) {
  const Problem p = ridge(7, 10, 3, 0.1);
  const BsSvrgParams params = bs_svrg_from(p.L(), p.mu(), 1, 0.5, 0.4, SvrgChoice::kIll);
  const Vector z0 = random_vec(7, p.d()), anchor = random_vec(8, p.d());
  BsSvrgSolver s(p, params, z0, anchor, 3);
  s.run_epoch();
  const double mu = p.mu();
  const Vector y0 = params.tau_x * z0 + (1 - params.tau_x) * anchor +
                    params.tau_z * (mu * (anchor - z0) - p.full_grad(anchor));
  EXPECT_EQ(s.last_anchor_index(), 0u);
  EXPECT_LT((s.anchor() - y0).norm(), 1e-14);
}

TEST(BsSvrg, AnchorDistribution) {
  const Problem p = ridge(9, 5, 2, 0.1);
  // r = (1 + mu/a)^2 = 4, so the weights are 1 : 4 : 16.
  const BsSvrgParams params = bs_svrg_from(p.L(), 0.1, 3, 0.1, 0.4, SvrgChoice::kIll);
  BsSvrgSolver s(p, params, Vector::Zero(static_cast<Eigen::Index>(p.d())), 17);
  const int epochs = 21000;
  std::vector<int> counts(3, 0);
  for (int e = 0; e < epochs; ++e) {
    s.run_epoch();
    ++counts[s.last_anchor_index()];
  }
  const double w[3] = {1.0 / 21.0, 4.0 / 21.0, 16.0 / 21.0};
  for (int k = 0; k < 3; ++k) {
    const double sd = std::sqrt(epochs * w[k] * (1 - w[k]));
    EXPECT_NEAR(counts[k], epochs * w[k], 4.0 * sd) << "k=" << k;
  }
}

TEST(BsSvrg, EpochCostAndDeterminism) {
  const Problem p = logistic(10, 40, 4, 1e-2);
  const std::size_t m = 80;
  const BsSvrgParams params = bs_svrg_numerical(p.L(), p.mu(), m);
  BsSvrgSolver s(p, params, Vector::Zero(static_cast<Eigen::Index>(p.d())), 1);
  s.run_epoch();
  EXPECT_EQ(s.counters().component_grad_evals, p.n() + 2 * m);
  EXPECT_EQ(s.counters().full_grad_evals, 1u);

  const ShiftedContext ctx = reference_solution(p, 1e-12);
  RunOptions opt;
  opt.ctx = &ctx;
  const Vector x0 = Vector::Zero(static_cast<Eigen::Index>(p.d()));
  expect_same_trace(bs_svrg_run(p, x0, params, 10, 4, opt).trace, bs_svrg_run(p, x0, params, 10, 4, opt).trace);
}

TEST(Table, RunningAveragesStayExact) {
  const Problem p = logistic(11, 30, 4, 1e-2);
  const Vector x0 = random_vec(11, p.d());
  SagaSolver saga(p, saga_baseline(p.L(), p.mu(), p.n()), x0, 2);
  BsSagaSolver bs(p, bs_saga_alpha(p.L(), p.mu(), p.n()), x0, 2);
  for (int k = 0; k < 10000; ++k) {
    saga.step();
    bs.step();
  }
  const Table& t = saga.table();
  EXPECT_LT((t.avg_grad() - t.grads().rowwise().mean()).norm(), 1e-10);
  const Table& u = bs.table();
  EXPECT_LT((u.avg_grad() - u.grads().rowwise().mean()).norm(), 1e-10);
  EXPECT_LT((u.avg_point() - u.points().rowwise().mean()).norm(), 1e-10);
  // Stored gradients belong to the stored points.
  for (std::size_t i = 0; i < p.n(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    EXPECT_LT((u.grads().col(c) - p.component_grad(i, u.points().col(c))).norm(), 1e-12);
  }
}

TEST(BsSaga, ShiftedEstimatorIsUnbiased) {
  const Problem p = ridge(12, 8, 3, 0.05);
  const ShiftedContext ctx = reference_solution(p, 2e-13);
  BsSagaSolver s(p, bs_saga_alpha(p.L(), p.mu(), p.n()), random_vec(12, p.d()), 5);
  for (int k = 0; k < 30; ++k) s.step();
  const Table& t = s.table();
  const Vector x = random_vec(13, p.d());
  const double mu = p.mu();
  Vector mean = Vector::Zero(x.size());
  for (std::size_t i = 0; i < p.n(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const Vector phi = t.points().col(c);
    const Vector g = p.component_grad(i, x) - t.grads().col(c) + t.avg_grad() - mu * (t.avg_point() - phi);
    mean += (g - mu * (x - ctx.x_star)) / static_cast<double>(p.n());
  }
  EXPECT_LT((mean - shifted_grad(p, ctx, x)).norm(), 1e-12);
}

TEST(BsPointSaga, ProxResidualFeedsTable) {
  const Problem p = ridge(14, 12, 4, 0.05);
  BsPointSagaSolver s(p, bs_point_saga_alpha(p.L(), p.mu(), p.n()), random_vec(14, p.d()), 6);
  double worst = 0.0, table_worst = 0.0;
  std::size_t calls = 0;
  s.set_prox_observer([&](const ProxStep& st) {
    ++calls;
    const Vector residual = st.alpha * (st.z - st.x_next);
    worst = std::max(worst, (p.component_grad(st.index, st.x_next) - residual).norm());
  });
  for (int k = 0; k < 500; ++k) {
    s.step();
    for (std::size_t i = 0; i < p.n(); ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      table_worst = std::max(table_worst, (s.table().grads().col(c) - p.component_grad(i, s.table().points().col(c))).norm());
    }
  }
  EXPECT_EQ(calls, 500u);
  EXPECT_LE(worst, 1e-10);
  EXPECT_LE(table_worst, 1e-10);
  EXPECT_EQ(s.counters().prox_evals, 500u);
}

TEST(BsPointSaga, FixedPointAtOptimum) {
  const Problem p = ridge(15, 6, 3, 0.05);
  const ShiftedContext ctx = reference_solution(p, 2e-13);
  Eigen::MatrixXd pts(p.d(), p.n());
  for (Eigen::Index i = 0; i < pts.cols(); ++i) pts.col(i) = ctx.x_star;
  BsPointSagaSolver s(p, bs_point_saga_alpha(p.L(), p.mu(), p.n()), ctx.x_star, pts, 1);
  for (int k = 0; k < 100; ++k) s.step();
  EXPECT_LT((s.x() - ctx.x_star).norm(), 1e-12);
}

TEST(Baselines, ReachHighAccuracyOnEasyInstances) {
  const Problem lg = logistic(16, 200, 5, 0.1);
  const Problem rd = ridge(16, 200, 5, 0.1);
  const ShiftedContext lctx = reference_solution(lg, 1e-12), rctx = reference_solution(rd, 1e-12);
  RunOptions lo, ro;
  lo.ctx = &lctx;
  ro.ctx = &rctx;
  const Vector x0 = Vector::Zero(static_cast<Eigen::Index>(lg.d()));
  const std::size_t n = lg.n();
  const std::size_t passes = 50;

  const RunResult saga = saga_run(lg, x0, saga_baseline(lg.L(), lg.mu(), n), passes * n, 1, lo);
  EXPECT_LT(saga.trace.back().f_subopt, 1e-6);

  const SvrgBaseline sv = svrg_baseline(lg.L(), n);
  const std::size_t epochs = passes * n / (n + 2 * sv.m);
  EXPECT_LT(svrg_run(lg, x0, sv, epochs, 1, lo).trace.back().f_subopt, 1e-6);

  const KatyushaBaseline ky = katyusha_baseline(lg.L(), lg.mu(), 2 * n);
  EXPECT_LT(katyusha_run(lg, x0, ky, epochs, 1, lo).trace.back().f_subopt, 1e-6);

  const PointSagaBaseline ps = point_saga_baseline(rd.L(), rd.mu(), n);
  EXPECT_LT(point_saga_run(rd, x0, ps.gamma, passes * n, 1, ro).trace.back().f_subopt, 1e-6);
}

TEST(Solvers, RejectWrongDimensions) {
  const Problem p = make_diag_quadratic(1.0, 0.1, 3);
  EXPECT_THROW(GtmSolver(p, gtm_constants(1.0, 0.1), Vector::Zero(2), Vector::Zero(2)), Error);
  const Problem lg = logistic(1, 5, 2, 0.1);
  EXPECT_THROW(bs_point_saga_run(lg, Vector::Zero(3), bs_point_saga_alpha(lg.L(), lg.mu(), 5), 5, 1), Error);
}
