#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "bshift/dataset.hpp"
#include "bshift/error.hpp"
#include "bshift/problem.hpp"
#include "bshift/rng.hpp"

using namespace bshift;

namespace {

Dataset one_row(std::vector<std::pair<std::size_t, double>> row, double label, std::size_t d) {
  Dataset ds;
  ds.rows.push_back(std::move(row));
  ds.labels.push_back(label);
  ds.d = d;
  return ds;
}

Vector random_vec(Rng& rng, std::size_t d) {
  Vector v(static_cast<Eigen::Index>(d));
  for (auto& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST(Rng, SameSeedAndStreamRepeat) {
  Rng a(42, Stream::kIndexSampling), b(42, Stream::kIndexSampling), c(42, Stream::kAnchorSelection);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs = differs || x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, IndexIsRoughlyUniform) {
  Rng r(3, Stream::kIndexSampling);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) ++counts[r.index(7)];
  for (int c : counts) EXPECT_NEAR(c, draws / 7.0, 5.0 * std::sqrt(draws / 7.0));
}

TEST(Libsvm, ParsesSparseRow) {
  std::istringstream in("+1 1:0.5 3:2\n");
  const Dataset ds = parse_libsvm(in);
  ASSERT_EQ(ds.n(), 1u);
  EXPECT_EQ(ds.labels[0], 1.0);
  EXPECT_GE(ds.d, 3u);
  ASSERT_EQ(ds.rows[0].size(), 2u);
  EXPECT_EQ(ds.rows[0][0], (std::pair<std::size_t, double>{1, 0.5}));
  EXPECT_EQ(ds.rows[0][1], (std::pair<std::size_t, double>{3, 2.0}));
}

TEST(Libsvm, EmptyRowAndEmptyInput) {
  std::istringstream in("-1\n+1 2:1\n");
  const Dataset ds = parse_libsvm(in);
  ASSERT_EQ(ds.n(), 2u);
  EXPECT_TRUE(ds.rows[0].empty());
  EXPECT_EQ(ds.d, 2u);

  std::istringstream empty("");
  const Dataset e = parse_libsvm(empty);
  EXPECT_EQ(e.n(), 0u);
  EXPECT_THROW(make_logistic_l2(e, 1e-3), Error);
}

TEST(Libsvm, RejectsBadInput) {
  std::istringstream bad_idx("+1 3:1 2:1\n");
  EXPECT_THROW(parse_libsvm(bad_idx), Error);
  std::istringstream bad_tok("+1 x\n");
  EXPECT_THROW(parse_libsvm(bad_tok), Error);
}

TEST(Libsvm, RoundTrip) {
  const Dataset ds = synth_dataset(5, 30, 4, Task::kClassification);
  std::stringstream buf;
  write_libsvm(buf, ds);
  const Dataset back = parse_libsvm(buf);
  ASSERT_EQ(back.n(), ds.n());
  EXPECT_EQ(back.d, ds.d);
  EXPECT_EQ(back.labels, ds.labels);
  for (std::size_t i = 0; i < ds.n(); ++i) EXPECT_EQ(back.rows[i], ds.rows[i]);
}

TEST(Preprocess, BiasThenNormalize) {
  const Dataset out = preprocess(one_row({{1, 0.6}, {2, 0.8}}, 1.0, 2));
  EXPECT_EQ(out.d, 3u);
  const Eigen::MatrixXd a = out.dense();
  EXPECT_NEAR(a(0, 0), 0.6 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(a(0, 1), 0.8 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(a(0, 2), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(a.row(0).norm(), 1.0, 1e-15);
  EXPECT_THROW(preprocess(out), Error);
}

TEST(Preprocess, ZeroRowBecomesBias) {
  const Dataset out = preprocess(one_row({}, -1.0, 3));
  const Eigen::MatrixXd a = out.dense();
  EXPECT_EQ(a.row(0).head(3).norm(), 0.0);
  EXPECT_EQ(a(0, 3), 1.0);
}

TEST(Synth, DeterministicAndUnitNorm) {
  const Dataset a = synth_dataset(1, 100, 5, Task::kClassification);
  const Dataset b = synth_dataset(1, 100, 5, Task::kClassification);
  EXPECT_EQ(a.labels, b.labels);
  for (std::size_t i = 0; i < a.n(); ++i) EXPECT_EQ(a.rows[i], b.rows[i]);
  const Eigen::MatrixXd m = a.dense();
  for (Eigen::Index i = 0; i < m.rows(); ++i) EXPECT_NEAR(m.row(i).norm(), 1.0, 1e-12);
}

TEST(Synth, PlantedLabelsBeforeFlips) {
  const std::size_t n = 200, d = 5;
  const Dataset ds = synth_dataset(9, n, d, Task::kClassification);
  const PlantedModel pm = synth_planted_model(9, n, d);
  const Eigen::MatrixXd a = ds.dense();
  std::size_t flips = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double margin = a.row(static_cast<Eigen::Index>(i)).head(static_cast<Eigen::Index>(d)).dot(pm.weights);
    // Recompute the clean label from the planted predictor.
    EXPECT_EQ(margin >= 0 ? 1.0 : -1.0, pm.clean_labels[i]);
    EXPECT_EQ(ds.labels[i], pm.flipped[i] ? -pm.clean_labels[i] : pm.clean_labels[i]);
    flips += pm.flipped[i];
  }
  EXPECT_NEAR(static_cast<double>(flips) / n, 0.1, 0.06);
}

TEST(DiagQuadratic, ValuesAndGradients) {
  const Problem q = make_diag_quadratic(1.0, 1e-3, 2);
  EXPECT_EQ(q.diagonal()(0), 1.0);
  EXPECT_EQ(q.diagonal()(1), 1e-3);
  EXPECT_DOUBLE_EQ(q.kappa(), 1000.0);

  const Problem p = make_diag_quadratic(1.0, 0.25, 2);
  const Vector x = Vector::Ones(2);
  EXPECT_DOUBLE_EQ(p.full_value(x), 0.625);
  EXPECT_EQ(p.full_grad(x), (Vector(2) << 1.0, 0.25).finished());
  EXPECT_THROW(make_diag_quadratic(1.0, 1.0, 2), Error);
}

TEST(Logistic, ConstantsAndOrigin) {
  const Dataset ds = synth_dataset(2, 10, 3, Task::kClassification);
  const Problem p = make_logistic_l2(ds, 1e-3);
  EXPECT_DOUBLE_EQ(p.L(), 0.251);
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(p.d()));
  const Eigen::MatrixXd a = ds.dense();
  for (std::size_t i = 0; i < p.n(); ++i) {
    EXPECT_NEAR(p.component_value(i, zero), std::log(2.0), 1e-15);
    const Vector expected = -ds.labels[i] * a.row(static_cast<Eigen::Index>(i)).transpose() / 2.0;
    EXPECT_LT((p.component_grad(i, zero) - expected).norm(), 1e-15);
  }
}

TEST(Logistic, GradientMatchesCentralDifferences) {
  const Problem p = make_logistic_l2(synth_dataset(4, 15, 4, Task::kClassification), 1e-2);
  Rng rng(4, 77);
  const double h = 1e-6;
  for (int t = 0; t < 5; ++t) {
    const Vector x = random_vec(rng, p.d());
    const Vector g = p.full_grad(x);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      Vector xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      EXPECT_NEAR((p.full_value(xp) - p.full_value(xm)) / (2 * h), g(j), 1e-8);
    }
  }
}

TEST(Logistic, RejectsBadLabelsAndUnnormalizedRows) {
  Dataset ds = preprocess(one_row({{1, 1.0}}, 0.5, 1));
  EXPECT_THROW(make_logistic_l2(ds, 1e-3), Error);
  const Dataset raw = one_row({{1, 3.0}}, 1.0, 1);
  EXPECT_THROW(make_logistic_l2(raw, 1e-3), Error);
}

TEST(Ridge, ConstantsValuesGradients) {
  const Problem p = make_ridge(synth_dataset(2, 10, 3, Task::kRegression), 5e-7);
  EXPECT_DOUBLE_EQ(p.L(), 1.0000005);

  const double mu = 1e-3;
  const Problem e1 = make_ridge(one_row({{1, 1.0}}, 0.0, 2), mu);
  const Vector x = (Vector(2) << 1.0, 0.0).finished();
  EXPECT_DOUBLE_EQ(e1.component_value(0, x), 0.5 + mu / 2);
  EXPECT_LT((e1.component_grad(0, x) - (1 + mu) * x).norm(), 1e-15);

  const Problem b1 = make_ridge(one_row({{1, 1.0}}, 1.0, 2), mu);
  EXPECT_LT((b1.full_grad(Vector::Zero(2)) - (Vector(2) << -1.0, 0.0).finished()).norm(), 1e-15);
}

TEST(Prox, RidgeClosedForms) {
  const double mu = 1e-3;
  const Problem e1 = make_ridge(one_row({{1, 1.0}}, 0.0, 2), mu);
  const Vector z = (Vector(2) << 1.0, 0.0).finished();
  // (1 + mu + 1) x1 = 1
  EXPECT_NEAR(e1.component_prox(0, 1.0, z)(0), 1.0 / (2.0 + mu), 1e-15);
}

TEST(Prox, RidgeMatchesDenseSolve) {
  const Dataset ds = synth_dataset(11, 12, 4, Task::kRegression);
  const Problem p = make_ridge(ds, 0.05);
  const Eigen::MatrixXd a = ds.dense();
  Rng rng(11, 78);
  for (std::size_t i = 0; i < p.n(); ++i) {
    const double alpha = 0.1 + 3.0 * rng.uniform01();
    const Vector z = random_vec(rng, p.d());
    const Vector ai = a.row(static_cast<Eigen::Index>(i)).transpose();
    const Eigen::MatrixXd m = ai * ai.transpose() + (p.mu() + alpha) * Eigen::MatrixXd::Identity(ai.size(), ai.size());
    const Vector expected = m.fullPivLu().solve(alpha * z + ds.labels[i] * ai);
    EXPECT_LT((p.component_prox(i, alpha, z) - expected).norm(), 1e-12);
  }
}

TEST(Prox, FixedPointAtShiftedOptimum) {
  const Problem p = make_ridge(synth_dataset(12, 8, 3, Task::kRegression), 0.05);
  Rng rng(12, 79);
  const Vector xs = random_vec(rng, p.d());
  for (std::size_t i = 0; i < p.n(); ++i) {
    const double alpha = 0.7;
    const Vector z = xs + p.component_grad(i, xs) / alpha;
    EXPECT_LT((p.component_prox(i, alpha, z) - xs).norm(), 1e-13);
  }
  const Problem lg = make_logistic_l2(synth_dataset(12, 8, 3, Task::kClassification), 0.05);
  EXPECT_FALSE(lg.has_prox());
  EXPECT_THROW(lg.component_prox(0, 1.0, xs), Error);
}

TEST(Oracle, CountsEvaluations) {
  const Problem p = make_ridge(synth_dataset(3, 10, 3, Task::kRegression), 0.1);
  Oracle o(p);
  const Vector x = Vector::Zero(static_cast<Eigen::Index>(p.d()));
  o.full_grad(x);
  o.component_grad(2, x);
  o.component_prox(1, 1.0, x);
  EXPECT_EQ(o.counters().component_grad_evals, 11u);
  EXPECT_EQ(o.counters().full_grad_evals, 1u);
  EXPECT_EQ(o.counters().prox_evals, 1u);
}

TEST(Problem, SmoothnessSandwichAndInterpolation) {
  const Problem lg = make_logistic_l2(synth_dataset(6, 20, 4, Task::kClassification), 1e-2);
  const Problem rd = make_ridge(synth_dataset(6, 20, 4, Task::kRegression), 1e-2);
  Rng rng(6, 80);
  for (const Problem* p : {&lg, &rd}) {
    const ShiftedContext ctx = make_shifted_context(*p, random_vec(rng, p->d()));
    for (int t = 0; t < 200; ++t) {
      const Vector x = 2.0 * random_vec(rng, p->d()), y = 2.0 * random_vec(rng, p->d());
      const double bregman = p->full_value(x) - p->full_value(y) - p->full_grad(y).dot(x - y);
      EXPECT_GE(bregman, 0.5 * p->mu() * (x - y).squaredNorm() - 1e-10);
      EXPECT_LE(bregman, 0.5 * p->L() * (x - y).squaredNorm() + 1e-10);
      for (std::size_t i : {std::size_t{0}, p->n() - 1}) {
        const Vector gx = shifted_component_grad(*p, ctx, i, x), gy = shifted_component_grad(*p, ctx, i, y);
        const double lhs = shifted_component_value(*p, ctx, i, x) - shifted_component_value(*p, ctx, i, y) -
                           gy.dot(x - y);
        EXPECT_GE(lhs, (gx - gy).squaredNorm() / (2.0 * (p->L() - p->mu())) - 1e-10);
      }
    }
  }
}

TEST(Shifted, ZeroAtOptimumAndOneDimensionalForm) {
  const Problem q = make_diag_quadratic(4.0, 1.0, 2);
  const ShiftedContext ctx = make_shifted_context(q, Vector::Zero(2));
  EXPECT_EQ(shifted_value(q, ctx, Vector::Zero(2)), 0.0);
  EXPECT_EQ(shifted_grad(q, ctx, Vector::Zero(2)).norm(), 0.0);
  // h(x) = (L - mu) x1^2 / 2 along the first axis, 0 along the mu axis.
  const Vector x = (Vector(2) << 3.0, 5.0).finished();
  EXPECT_DOUBLE_EQ(shifted_value(q, ctx, x), 0.5 * 3.0 * 9.0);
  Rng rng(1, 81);
  for (int t = 0; t < 50; ++t) EXPECT_NEAR(shifted_gap(q, ctx, 10.0 * random_vec(rng, 2)), 0.0, 1e-12);
}
