#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bshift/dataset.hpp"

namespace bshift {

using Vector = Eigen::VectorXd;

enum class ProblemKind { kDiagQuadratic, kLogisticL2, kRidge };

const char* to_string(ProblemKind kind);

/// Finite-sum objective f = (1/n) sum_i f_i with every f_i L-smooth and
/// mu-strongly convex. Immutable after construction; oracle calls are pure.
class Problem {
 public:
  ProblemKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  double L() const { return L_; }
  double mu() const { return mu_; }
  double kappa() const { return L_ / mu_; }

  double component_value(std::size_t i, const Vector& x) const;
  Vector component_grad(std::size_t i, const Vector& x) const;
  double full_value(const Vector& x) const;
  Vector full_grad(const Vector& x) const;

  /// Exact Hessian of f; used only by the reference solver's Newton polish.
  Eigen::MatrixXd full_hessian(const Vector& x) const;

  bool has_prox() const { return kind_ != ProblemKind::kLogisticL2; }

  /// argmin_x f_i(x) + (alpha/2)||x - z||^2 in closed form.
  Vector component_prox(std::size_t i, double alpha, const Vector& z) const;

  const Vector& diagonal() const { return diagonal_; }
  const Eigen::MatrixXd& rows() const { return rows_; }
  const Vector& labels() const { return labels_; }

  friend Problem make_diag_quadratic(double L, double mu, std::size_t d);
  friend Problem make_logistic_l2(const Dataset& ds, double mu);
  friend Problem make_ridge(const Dataset& ds, double mu);

 private:
  Problem() = default;
  void check_index(std::size_t i) const;
  void check_dim(const Vector& x) const;

  ProblemKind kind_ = ProblemKind::kDiagQuadratic;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  double L_ = 0.0;
  double mu_ = 0.0;
  Vector diagonal_;       // DiagQuadratic
  Eigen::MatrixXd rows_;  // n x d, row i is a_i
  Vector labels_;
};

/// f(x) = 0.5 <D x, x> with D = diag(L, mu, ..., mu); n = 1, x* = 0.
Problem make_diag_quadratic(double L, double mu, std::size_t d);
/// f_i(x) = log(1 + exp(-b_i <a_i, x>)) + (mu/2)||x||^2 with L = 0.25 + mu.
Problem make_logistic_l2(const Dataset& ds, double mu);
/// f_i(x) = 0.5(<a_i, x> - b_i)^2 + (mu/2)||x||^2 with L = 1 + mu.
Problem make_ridge(const Dataset& ds, double mu);

struct OracleCounters {
  std::uint64_t component_grad_evals = 0;
  std::uint64_t component_value_evals = 0;
  std::uint64_t full_grad_evals = 0;
  std::uint64_t prox_evals = 0;
};

/// Counting front end over a shared Problem. One Oracle per solver run.
class Oracle {
 public:
  explicit Oracle(const Problem& problem) : problem_(&problem) {}

  const Problem& problem() const { return *problem_; }
  const OracleCounters& counters() const { return counters_; }

  double component_value(std::size_t i, const Vector& x) {
    ++counters_.component_value_evals;
    return problem_->component_value(i, x);
  }
  Vector component_grad(std::size_t i, const Vector& x) {
    ++counters_.component_grad_evals;
    return problem_->component_grad(i, x);
  }
  double full_value(const Vector& x) {
    counters_.component_value_evals += problem_->n();
    return problem_->full_value(x);
  }
  Vector full_grad(const Vector& x) {
    counters_.component_grad_evals += problem_->n();
    ++counters_.full_grad_evals;
    return problem_->full_grad(x);
  }
  Vector component_prox(std::size_t i, double alpha, const Vector& z) {
    ++counters_.prox_evals;
    return problem_->component_prox(i, alpha, z);
  }

 private:
  const Problem* problem_;
  OracleCounters counters_;
};

/// Data defining the shifted objective h. Verification-only: solvers never
/// receive one.
struct ShiftedContext {
  Vector x_star;
  double f_star = 0.0;
  std::vector<double> f_star_components;
  std::vector<Vector> grad_star_components;
  Vector grad_star;  // (1/n) sum of grad_star_components; ~0 up to solve residual
  double residual_norm = 0.0;
};

ShiftedContext make_shifted_context(const Problem& p, const Vector& x_star);

double shifted_component_value(const Problem& p, const ShiftedContext& ctx, std::size_t i, const Vector& x);
Vector shifted_component_grad(const Problem& p, const ShiftedContext& ctx, std::size_t i, const Vector& x);
double shifted_value(const Problem& p, const ShiftedContext& ctx, const Vector& x);
Vector shifted_grad(const Problem& p, const ShiftedContext& ctx, const Vector& x);

/// h(x) - ||grad h(x)||^2 / (2(L - mu)), nonnegative by the interpolation condition.
double shifted_gap(const Problem& p, const ShiftedContext& ctx, const Vector& x);

}  // namespace bshift
