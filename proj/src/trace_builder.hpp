#pragma once

#include <optional>

#include "bshift/solvers.hpp"

namespace bshift::detail {

/// Collects TraceRecords. Trace-only evaluations go straight to the Problem and
/// are not charged to the run's oracle counters.
class TraceBuilder {
 public:
  TraceBuilder(const Problem& p, const RunOptions& opt) : p_(p), opt_(opt) {}

  bool wants_lyapunov() const { return opt_.ctx != nullptr; }

  /// Returns true when the run should stop (stop_below reached).
  bool record(std::uint64_t step, const OracleCounters& c, const Vector& point, std::optional<double> lyapunov) {
    TraceRecord r;
    r.step = step;
    r.oracle_calls = c.component_grad_evals + c.prox_evals;
    r.prox_evals = c.prox_evals;
    r.data_passes = static_cast<double>(r.oracle_calls) / static_cast<double>(p_.n());
    if (opt_.ctx) {
      r.f_subopt = p_.full_value(point) - opt_.ctx->f_star;
      r.dist_sq = (point - opt_.ctx->x_star).squaredNorm();
    }
    r.lyapunov = lyapunov;
    trace_.push_back(r);
    return opt_.ctx && r.f_subopt <= opt_.stop_below;
  }

  RunResult finish(const Vector& final_point, const OracleCounters& c) {
    return RunResult{std::move(trace_), final_point, c};
  }

 private:
  const Problem& p_;
  const RunOptions& opt_;
  Trace trace_;
};

}  // namespace bshift::detail
