#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "bshift/lyapunov.hpp"
#include "bshift/solvers.hpp"

namespace bshift {

/// `PASS|FAIL <id> margin=<%.17g> detail=<...>`
std::string format_check(const CheckResult& r);
void write_report(std::ostream& out, const std::vector<CheckResult>& results);
bool all_pass(const std::vector<CheckResult>& results);

/// 17 significant digits; nan/inf spelled as such.
std::string format_double(double v);

/// Trace CSV with the `# boost-shift-trace v1` header line. The prox_evals
/// column is added for point methods.
void write_trace_csv(std::ostream& out, const Trace& trace, bool with_prox_column);

}  // namespace bshift
