#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bshift/params.hpp"
#include "bshift/problem.hpp"
#include "bshift/rng.hpp"

namespace bshift {

/// One z-step z+ = argmin <g, x> + (alpha/2)||x - z-||^2 + (mu/2)||x - y||^2.
/// The optional fields identify the estimator that produced g, so an observer
/// holding x* can rebuild the shifted estimator H.
struct MirrorStep {
  const Vector& z_prev;
  const Vector& y;
  const Vector& g;
  const Vector& z_next;
  double alpha;
  std::size_t index = 0;                       // sampled component (stochastic methods)
  const Vector* anchor = nullptr;              // BS-SVRG: x~ of the epoch
  const Vector* phi_prev = nullptr;            // BS-SAGA: phi_i before the update
  const Eigen::MatrixXd* points = nullptr;     // BS-SAGA: table before the update (d x n)
};
using MirrorObserver = std::function<void(const MirrorStep&)>;

/// One BS-Point-SAGA step: x_next = prox_i^alpha(z).
struct ProxStep {
  std::size_t index;
  const Vector& z;
  const Vector& x_next;
  double alpha;
};
using ProxObserver = std::function<void(const ProxStep&)>;

/// Closed-form z-step shared by NAG, G-TM, BS-SVRG and BS-SAGA.
Vector mirror_step(const Vector& z, const Vector& y, const Vector& g, double alpha, double mu);

class GdSolver {
 public:
  GdSolver(const Problem& p, Vector x0, double eta);

  void step();
  const Vector& x() const { return x_; }
  std::size_t k() const { return k_; }
  const OracleCounters& counters() const { return oracle_.counters(); }

 private:
  Oracle oracle_;
  Vector x_;
  double eta_;
  std::size_t k_ = 0;
};

/// Mirror-descent form: y from (z, x), mirror z-step, x as a convex combination.
class NagSolver {
 public:
  NagSolver(const Problem& p, const NagParams& params, Vector x0, Vector z0);

  void step();
  const Vector& x() const { return x_; }
  const Vector& z() const { return z_; }
  std::size_t k() const { return k_; }
  const NagParams& params() const { return params_; }
  const OracleCounters& counters() const { return oracle_.counters(); }
  void set_mirror_observer(MirrorObserver obs) { observer_ = std::move(obs); }

 private:
  Oracle oracle_;
  NagParams params_;
  Vector x_, z_;
  std::size_t k_ = 0;
  MirrorObserver observer_;
};

/// Two-line constant-momentum scheme: x+ = y - grad f(y)/L, y+ = x+ + beta (x+ - x).
class NagTextbookSolver {
 public:
  NagTextbookSolver(const Problem& p, Vector x0);

  void step();
  const Vector& x() const { return x_; }
  const Vector& y() const { return y_; }

 private:
  Oracle oracle_;
  Vector x_, y_;
  double beta_;
};

class GtmSolver {
 public:
  /// Evaluates grad f(y_{-1}) immediately, so the first step costs two gradients overall.
  GtmSolver(const Problem& p, const GtmParams& params, Vector y_minus1, Vector z0);

  void step();
  const Vector& z() const { return z_; }
  const Vector& y_prev() const { return y_prev_; }
  const Vector& grad_y_prev() const { return grad_y_prev_; }
  std::size_t k() const { return k_; }
  const GtmParams& params() const { return params_; }
  const OracleCounters& counters() const { return oracle_.counters(); }
  void set_mirror_observer(MirrorObserver obs) { observer_ = std::move(obs); }

 private:
  Oracle oracle_;
  GtmParams params_;
  Vector z_, y_prev_, grad_y_prev_;
  std::size_t k_ = 0;
  MirrorObserver observer_;
};

class BsSvrgSolver {
 public:
  BsSvrgSolver(const Problem& p, const BsSvrgParams& params, Vector x0, std::uint64_t seed);
  /// Starts from an arbitrary epoch state (z^s_0, x~_s).
  BsSvrgSolver(const Problem& p, const BsSvrgParams& params, Vector z0, Vector anchor, std::uint64_t seed);

  /// Full gradient at the anchor, m inner steps, then weighted anchor draw.
  void run_epoch();
  /// Replaces both random streams, e.g. per Monte Carlo replication.
  void reseed(Rng index_rng, Rng anchor_rng);

  const Vector& z() const { return z_; }
  const Vector& anchor() const { return anchor_; }
  std::size_t epoch() const { return epoch_; }
  const BsSvrgParams& params() const { return params_; }
  const OracleCounters& counters() const { return oracle_.counters(); }
  /// Inner index k picked as the latest anchor (for distribution tests).
  std::size_t last_anchor_index() const { return last_anchor_index_; }
  void set_mirror_observer(MirrorObserver obs) { observer_ = std::move(obs); }

 private:
  Oracle oracle_;
  BsSvrgParams params_;
  Vector z_, anchor_;
  std::size_t epoch_ = 0;
  std::size_t last_anchor_index_ = 0;
  Rng index_rng_, anchor_rng_;
  MirrorObserver observer_;
};

/// Point and gradient tables with running means, re-based every 10 n updates.
class Table {
 public:
  Table() = default;
  Table(Eigen::MatrixXd points, Eigen::MatrixXd grads);

  std::size_t n() const { return static_cast<std::size_t>(grads_.cols()); }
  const Eigen::MatrixXd& points() const { return points_; }  // d x n; empty if not tracked
  const Eigen::MatrixXd& grads() const { return grads_; }    // d x n
  const Vector& avg_point() const { return avg_point_; }
  const Vector& avg_grad() const { return avg_grad_; }
  bool tracks_points() const { return points_.size() > 0; }

  void set(std::size_t i, const Vector& point, const Vector& grad);
  void set_grad(std::size_t i, const Vector& grad);
  void rebase();

 private:
  void count_update();

  Eigen::MatrixXd points_, grads_;
  Vector avg_point_, avg_grad_;
  std::size_t updates_since_rebase_ = 0;
};

class SagaSolver {
 public:
  SagaSolver(const Problem& p, const SagaBaseline& params, Vector x0, std::uint64_t seed);

  void step();
  void step_with_index(std::size_t i);
  const Vector& x() const { return x_; }
  std::size_t k() const { return k_; }
  const Table& table() const { return table_; }
  const OracleCounters& counters() const { return oracle_.counters(); }

 private:
  Oracle oracle_;
  double gamma_;
  Vector x_;
  Table table_;
  std::size_t k_ = 0;
  Rng rng_;
};

class BsSagaSolver {
 public:
  BsSagaSolver(const Problem& p, const ScalarParam& params, Vector x0, std::uint64_t seed);

  void step();
  void step_with_index(std::size_t i);
  const Vector& z() const { return z_; }
  std::size_t k() const { return k_; }
  const Table& table() const { return table_; }
  const ScalarParam& params() const { return params_; }
  const OracleCounters& counters() const { return oracle_.counters(); }
  void set_mirror_observer(MirrorObserver obs) { observer_ = std::move(obs); }

 private:
  Oracle oracle_;
  ScalarParam params_;
  Vector z_;
  Table table_;
  std::size_t k_ = 0;
  Rng rng_;
  MirrorObserver observer_;
};

/// Original Point-SAGA: z = x + gamma (g_i - avg g), x+ = prox_i^{1/gamma}(z).
class PointSagaSolver {
 public:
  PointSagaSolver(const Problem& p, double gamma, Vector x0, std::uint64_t seed);

  void step();
  void step_with_index(std::size_t i);
  const Vector& x() const { return x_; }
  std::size_t k() const { return k_; }
  const Table& table() const { return table_; }
  const OracleCounters& counters() const { return oracle_.counters(); }

 private:
  Oracle oracle_;
  double gamma_;
  Vector x_;
  Table table_;
  std::size_t k_ = 0;
  Rng rng_;
};

class BsPointSagaSolver {
 public:
  BsPointSagaSolver(const Problem& p, const ScalarParam& params, Vector x0, std::uint64_t seed);
  /// Starts from a given iterate and point table (gradients are evaluated at the table points).
  BsPointSagaSolver(const Problem& p, const ScalarParam& params, Vector x, const Eigen::MatrixXd& points,
                    std::uint64_t seed);

  void step();
  void step_with_index(std::size_t i);
  const Vector& x() const { return x_; }
  std::size_t k() const { return k_; }
  const Table& table() const { return table_; }
  const ScalarParam& params() const { return params_; }
  const OracleCounters& counters() const { return oracle_.counters(); }
  void set_prox_observer(ProxObserver obs) { observer_ = std::move(obs); }

 private:
  Oracle oracle_;
  ScalarParam params_;
  Vector x_;
  Table table_;
  std::size_t k_ = 0;
  Rng rng_;
  ProxObserver observer_;
};

class SvrgSolver {
 public:
  SvrgSolver(const Problem& p, const SvrgBaseline& params, Vector x0, std::uint64_t seed);

  void run_epoch();
  const Vector& anchor() const { return anchor_; }
  const OracleCounters& counters() const { return oracle_.counters(); }

 private:
  Oracle oracle_;
  SvrgBaseline params_;
  Vector anchor_;
  Rng rng_;
};

/// Katyusha with tau2 = 1/2, y-step x - grad/(3L), and the (1 + alpha mu)^j
/// weighted average of the epoch's y iterates as the next anchor.
class KatyushaSolver {
 public:
  KatyushaSolver(const Problem& p, const KatyushaBaseline& params, Vector x0, std::uint64_t seed);

  void run_epoch();
  const Vector& anchor() const { return anchor_; }
  const OracleCounters& counters() const { return oracle_.counters(); }

 private:
  Oracle oracle_;
  KatyushaBaseline params_;
  Vector y_, z_, anchor_;
  Rng rng_;
};

struct TraceRecord {
  std::uint64_t step = 0;
  std::uint64_t oracle_calls = 0;  // component gradients + prox evaluations
  std::uint64_t prox_evals = 0;
  double data_passes = 0.0;        // oracle_calls / n
  double f_subopt = std::numeric_limits<double>::quiet_NaN();
  double dist_sq = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> lyapunov;
};
using Trace = std::vector<TraceRecord>;

struct RunOptions {
  const ShiftedContext* ctx = nullptr;  // enables f_subopt, dist_sq and lyapunov columns
  /// Stop after the first record with f_subopt <= this (needs ctx).
  double stop_below = -std::numeric_limits<double>::infinity();
  bool output_anchor = false;  // BS-SVRG: report x~ instead of z
};

struct RunResult {
  Trace trace;
  Vector final_point;
  OracleCounters counters;
};

RunResult gd_run(const Problem& p, const Vector& x0, std::size_t steps, std::optional<double> eta,
                 const RunOptions& opt = {});
RunResult nag_run(const Problem& p, const Vector& x0, const Vector& z0, const NagParams& params,
                  std::size_t steps, const RunOptions& opt = {});
RunResult gtm_run(const Problem& p, const Vector& y_minus1, const Vector& z0, const GtmParams& params,
                  std::size_t steps, const RunOptions& opt = {});
RunResult bs_svrg_run(const Problem& p, const Vector& x0, const BsSvrgParams& params, std::size_t epochs,
                      std::uint64_t seed, const RunOptions& opt = {});
RunResult bs_saga_run(const Problem& p, const Vector& x0, const ScalarParam& params, std::size_t steps,
                      std::uint64_t seed, const RunOptions& opt = {});
RunResult point_saga_run(const Problem& p, const Vector& x0, double gamma, std::size_t steps, std::uint64_t seed,
                         const RunOptions& opt = {});
RunResult bs_point_saga_run(const Problem& p, const Vector& x0, const ScalarParam& params, std::size_t steps,
                            std::uint64_t seed, const RunOptions& opt = {});
RunResult saga_run(const Problem& p, const Vector& x0, const SagaBaseline& params, std::size_t steps,
                   std::uint64_t seed, const RunOptions& opt = {});
RunResult svrg_run(const Problem& p, const Vector& x0, const SvrgBaseline& params, std::size_t epochs,
                   std::uint64_t seed, const RunOptions& opt = {});
RunResult katyusha_run(const Problem& p, const Vector& x0, const KatyushaBaseline& params, std::size_t epochs,
                       std::uint64_t seed, const RunOptions& opt = {});

}  // namespace bshift
