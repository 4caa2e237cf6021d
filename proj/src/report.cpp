#include "bshift/report.hpp"

#include <cmath>
#include <cstdio>

namespace bshift {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_check(const CheckResult& r) {
  return std::string(r.pass ? "PASS " : "FAIL ") + r.id + " margin=" + format_double(r.margin) +
         " detail=" + r.detail;
}

void write_report(std::ostream& out, const std::vector<CheckResult>& results) {
  for (const auto& r : results) out << format_check(r) << '\n';
}

bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

void write_trace_csv(std::ostream& out, const Trace& trace, bool with_prox_column) {
  out << "# boost-shift-trace v1\n";
  out << "step,oracle_calls,data_passes,f_subopt,dist_sq,lyapunov";
  if (with_prox_column) out << ",prox_evals";
  out << '\n';
  for (const auto& r : trace) {
    out << r.step << ',' << r.oracle_calls << ',' << format_double(r.data_passes) << ','
        << format_double(r.f_subopt) << ',' << format_double(r.dist_sq) << ','
        << (r.lyapunov ? format_double(*r.lyapunov) : std::string());
    if (with_prox_column) out << ',' << r.prox_evals;
    out << '\n';
  }
}

}  // namespace bshift
