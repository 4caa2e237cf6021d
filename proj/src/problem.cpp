#include "bshift/problem.hpp"

#include <cmath>
#include <string>

#include "bshift/error.hpp"

namespace bshift {

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kDiagQuadratic: return "quadratic";
    case ProblemKind::kLogisticL2: return "logistic";
    case ProblemKind::kRidge: return "ridge";
  }
  return "unknown";
}

namespace {

using Index = Eigen::Index;

// log(1 + exp(-t)) without overflow.
double softplus_neg(double t) {
  return t >= 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

// sigma(-t) = 1 / (1 + exp(t)).
double sigmoid_neg(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

void check_constants(double L, double mu) {
  if (!(mu > 0.0) || !(L > mu) || !std::isfinite(L))
    throw Error(ErrorCode::kInvalidConstants,
                "need L > mu > 0 (got L=" + std::to_string(L) + ", mu=" + std::to_string(mu) + ")");
}

Eigen::MatrixXd checked_rows(const Dataset& ds) {
  if (ds.n() == 0) throw Error(ErrorCode::kInvalidArgument, "dataset has no rows");
  if (ds.d == 0) throw Error(ErrorCode::kInvalidArgument, "dataset has no features");
  Eigen::MatrixXd a = ds.dense();
  for (Index i = 0; i < a.rows(); ++i) {
    const double norm = a.row(i).norm();
    if (std::abs(norm - 1.0) > 1e-12)
      throw Error(ErrorCode::kNormalizationRequired,
                  "row " + std::to_string(i + 1) + " has norm " + std::to_string(norm));
  }
  return a;
}

}  // namespace

Problem make_diag_quadratic(double L, double mu, std::size_t d) {
  check_constants(L, mu);
  if (d < 2) throw Error(ErrorCode::kInvalidArgument, "diagonal quadratic needs d >= 2");
  Problem p;
  p.kind_ = ProblemKind::kDiagQuadratic;
  p.n_ = 1;
  p.d_ = d;
  p.L_ = L;
  p.mu_ = mu;
  p.diagonal_ = Vector::Constant(static_cast<Index>(d), mu);
  p.diagonal_(0) = L;
  return p;
}

Problem make_logistic_l2(const Dataset& ds, double mu) {
  check_constants(0.25 + mu, mu);
  Eigen::MatrixXd a = checked_rows(ds);
  for (std::size_t i = 0; i < ds.n(); ++i)
    if (ds.labels[i] != 1.0 && ds.labels[i] != -1.0)
      throw Error(ErrorCode::kInvalidLabel,
                  "row " + std::to_string(i + 1) + " has label " + std::to_string(ds.labels[i]));
  Problem p;
  p.kind_ = ProblemKind::kLogisticL2;
  p.n_ = ds.n();
  p.d_ = ds.d;
  p.L_ = 0.25 + mu;
  p.mu_ = mu;
  p.rows_ = std::move(a);
  p.labels_ = Eigen::Map<const Vector>(ds.labels.data(), static_cast<Index>(ds.n()));
  return p;
}

Problem make_ridge(const Dataset& ds, double mu) {
  check_constants(1.0 + mu, mu);
  Problem p;
  p.kind_ = ProblemKind::kRidge;
  p.rows_ = checked_rows(ds);
  p.n_ = ds.n();
  p.d_ = ds.d;
  p.L_ = 1.0 + mu;
  p.mu_ = mu;
  p.labels_ = Eigen::Map<const Vector>(ds.labels.data(), static_cast<Index>(ds.n()));
  return p;
}

void Problem::check_index(std::size_t i) const {
  if (i >= n_)
    throw Error(ErrorCode::kIndexOutOfRange, "component " + std::to_string(i) + " of " + std::to_string(n_));
}

void Problem::check_dim(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != d_)
    throw Error(ErrorCode::kDimensionMismatch,
                "vector of size " + std::to_string(x.size()) + ", expected " + std::to_string(d_));
}

double Problem::component_value(std::size_t i, const Vector& x) const {
  check_index(i);
  check_dim(x);
  switch (kind_) {
    case ProblemKind::kDiagQuadratic:
      return 0.5 * x.dot(diagonal_.cwiseProduct(x));
    case ProblemKind::kLogisticL2: {
      const double margin = labels_(static_cast<Index>(i)) * rows_.row(static_cast<Index>(i)).dot(x);
      return softplus_neg(margin) + 0.5 * mu_ * x.squaredNorm();
    }
    case ProblemKind::kRidge: {
      const double r = rows_.row(static_cast<Index>(i)).dot(x) - labels_(static_cast<Index>(i));
      return 0.5 * r * r + 0.5 * mu_ * x.squaredNorm();
    }
  }
  return 0.0;
}

Vector Problem::component_grad(std::size_t i, const Vector& x) const {
  check_index(i);
  check_dim(x);
  const Index ii = static_cast<Index>(i);
  switch (kind_) {
    case ProblemKind::kDiagQuadratic:
      return diagonal_.cwiseProduct(x);
    case ProblemKind::kLogisticL2: {
      const double b = labels_(ii);
      const double s = sigmoid_neg(b * rows_.row(ii).dot(x));
      return (-b * s) * rows_.row(ii).transpose() + mu_ * x;
    }
    case ProblemKind::kRidge: {
      const double r = rows_.row(ii).dot(x) - labels_(ii);
      return r * rows_.row(ii).transpose() + mu_ * x;
    }
  }
  return x;
}

double Problem::full_value(const Vector& x) const {
  check_dim(x);
  if (kind_ == ProblemKind::kDiagQuadratic) return component_value(0, x);
  const Vector ax = rows_ * x;
  double sum = 0.0;
  for (Index i = 0; i < ax.size(); ++i) {
    if (kind_ == ProblemKind::kLogisticL2) {
      sum += softplus_neg(labels_(i) * ax(i));
    } else {
      const double r = ax(i) - labels_(i);
      sum += 0.5 * r * r;
    }
  }
  return sum / static_cast<double>(n_) + 0.5 * mu_ * x.squaredNorm();
}

Vector Problem::full_grad(const Vector& x) const {
  check_dim(x);
  if (kind_ == ProblemKind::kDiagQuadratic) return component_grad(0, x);
  Vector coef = rows_ * x;
  for (Index i = 0; i < coef.size(); ++i) {
    if (kind_ == ProblemKind::kLogisticL2)
      coef(i) = -labels_(i) * sigmoid_neg(labels_(i) * coef(i));
    else
      coef(i) -= labels_(i);
  }
  return rows_.transpose() * coef / static_cast<double>(n_) + mu_ * x;
}

Eigen::MatrixXd Problem::full_hessian(const Vector& x) const {
  check_dim(x);
  const Index d = static_cast<Index>(d_);
  if (kind_ == ProblemKind::kDiagQuadratic) return diagonal_.asDiagonal();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d, d) * mu_;
  if (kind_ == ProblemKind::kRidge) {
    h.noalias() += rows_.transpose() * rows_ / static_cast<double>(n_);
    return h;
  }
  const Vector ax = rows_ * x;
  Vector w(ax.size());
  for (Index i = 0; i < ax.size(); ++i) {
    const double s = sigmoid_neg(labels_(i) * ax(i));
    w(i) = s * (1.0 - s);
  }
  h.noalias() += rows_.transpose() * w.asDiagonal() * rows_ / static_cast<double>(n_);
  return h;
}

Vector Problem::component_prox(std::size_t i, double alpha, const Vector& z) const {
  check_index(i);
  check_dim(z);
  if (!(alpha > 0.0)) throw Error(ErrorCode::kInvalidArgument, "prox needs alpha > 0");
  switch (kind_) {
    case ProblemKind::kDiagQuadratic:
      return (alpha * z.array() / (diagonal_.array() + alpha)).matrix();
    case ProblemKind::kRidge: {
      // (a a^T + c I) x = r with c = mu + alpha; Sherman-Morrison.
      const Index ii = static_cast<Index>(i);
      const auto a = rows_.row(ii).transpose();
      const double c = mu_ + alpha;
      const Vector r = alpha * z + labels_(ii) * a;
      return (r - a * (a.dot(r) / (c + a.squaredNorm()))) / c;
    }
    case ProblemKind::kLogisticL2:
      break;
  }
  throw Error(ErrorCode::kNoClosedForm, std::string(to_string(kind_)) + " components have no closed-form prox");
}

ShiftedContext make_shifted_context(const Problem& p, const Vector& x_star) {
  if (static_cast<std::size_t>(x_star.size()) != p.d())
    throw Error(ErrorCode::kDimensionMismatch, "x_star has the wrong dimension");
  ShiftedContext ctx;
  ctx.x_star = x_star;
  ctx.f_star_components.resize(p.n());
  ctx.grad_star_components.resize(p.n());
  ctx.grad_star = Vector::Zero(x_star.size());
  double f_sum = 0.0;
  for (std::size_t i = 0; i < p.n(); ++i) {
    ctx.f_star_components[i] = p.component_value(i, x_star);
    ctx.grad_star_components[i] = p.component_grad(i, x_star);
    f_sum += ctx.f_star_components[i];
    ctx.grad_star += ctx.grad_star_components[i];
  }
  ctx.f_star = f_sum / static_cast<double>(p.n());
  ctx.grad_star /= static_cast<double>(p.n());
  ctx.residual_norm = ctx.grad_star.norm();
  return ctx;
}

namespace {

void check_ctx(const Problem& p, const ShiftedContext& ctx, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != p.d() || static_cast<std::size_t>(ctx.x_star.size()) != p.d() ||
      ctx.f_star_components.size() != p.n())
    throw Error(ErrorCode::kDimensionMismatch, "shifted context does not match the problem");
}

}  // namespace

// Quadratic components use the exact Bregman form (x - x*)^T (H_i - mu I) (x - x*) / 2,
// which equals the definition but avoids cancellation.
double shifted_component_value(const Problem& p, const ShiftedContext& ctx, std::size_t i, const Vector& x) {
  check_ctx(p, ctx, x);
  const Vector delta = x - ctx.x_star;
  switch (p.kind()) {
    case ProblemKind::kDiagQuadratic:
      return 0.5 * delta.dot((p.diagonal().array() - p.mu()).matrix().cwiseProduct(delta));
    case ProblemKind::kRidge: {
      const double t = p.rows().row(static_cast<Index>(i)).dot(delta);
      return 0.5 * t * t;
    }
    case ProblemKind::kLogisticL2:
      break;
  }
  return p.component_value(i, x) - ctx.f_star_components[i] - ctx.grad_star_components[i].dot(delta) -
         0.5 * p.mu() * delta.squaredNorm();
}

Vector shifted_component_grad(const Problem& p, const ShiftedContext& ctx, std::size_t i, const Vector& x) {
  check_ctx(p, ctx, x);
  const Vector delta = x - ctx.x_star;
  switch (p.kind()) {
    case ProblemKind::kDiagQuadratic:
      return (p.diagonal().array() - p.mu()).matrix().cwiseProduct(delta);
    case ProblemKind::kRidge: {
      const auto a = p.rows().row(static_cast<Index>(i)).transpose();
      return a * a.dot(delta);
    }
    case ProblemKind::kLogisticL2:
      break;
  }
  return p.component_grad(i, x) - ctx.grad_star_components[i] - p.mu() * delta;
}

double shifted_value(const Problem& p, const ShiftedContext& ctx, const Vector& x) {
  check_ctx(p, ctx, x);
  const Vector delta = x - ctx.x_star;
  switch (p.kind()) {
    case ProblemKind::kDiagQuadratic:
      return shifted_component_value(p, ctx, 0, x);
    case ProblemKind::kRidge:
      return 0.5 * (p.rows() * delta).squaredNorm() / static_cast<double>(p.n());
    case ProblemKind::kLogisticL2:
      break;
  }
  return p.full_value(x) - ctx.f_star - ctx.grad_star.dot(delta) - 0.5 * p.mu() * delta.squaredNorm();
}

Vector shifted_grad(const Problem& p, const ShiftedContext& ctx, const Vector& x) {
  check_ctx(p, ctx, x);
  const Vector delta = x - ctx.x_star;
  switch (p.kind()) {
    case ProblemKind::kDiagQuadratic:
      return shifted_component_grad(p, ctx, 0, x);
    case ProblemKind::kRidge:
      return p.rows().transpose() * (p.rows() * delta) / static_cast<double>(p.n());
    case ProblemKind::kLogisticL2:
      break;
  }
  return p.full_grad(x) - ctx.grad_star - p.mu() * delta;
}

double shifted_gap(const Problem& p, const ShiftedContext& ctx, const Vector& x) {
  return shifted_value(p, ctx, x) - shifted_grad(p, ctx, x).squaredNorm() / (2.0 * (p.L() - p.mu()));
}

}  // namespace bshift
