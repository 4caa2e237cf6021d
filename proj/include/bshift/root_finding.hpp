#pragma once

#include <functional>

namespace bshift {

/// Bisection on [lo, hi]; needs fn(lo) and fn(hi) of opposite sign. Stops once
/// hi - lo <= rel_tol * max(|lo|, |hi|), the midpoint stops moving, or after
/// 200 halvings. Throws bracket-error without a sign change or if lo >= hi.
double solve_bracketed_root(const std::function<double(double)>& fn, double lo, double hi,
                            double rel_tol = 1e-12);

}  // namespace bshift
