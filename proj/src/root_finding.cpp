#include "bshift/root_finding.hpp"

#include <cmath>
#include <sstream>

#include "bshift/error.hpp"

namespace bshift {

double solve_bracketed_root(const std::function<double(double)>& fn, double lo, double hi, double rel_tol) {
  if (!(lo < hi)) {
    std::ostringstream msg;
    msg << "empty bracket [" << lo << ", " << hi << "]";
    throw Error(ErrorCode::kBracket, msg.str());
  }
  double f_lo = fn(lo);
  const double f_hi = fn(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (!(f_lo * f_hi < 0.0) || std::isnan(f_lo) || std::isnan(f_hi)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "no sign change on [" << lo << ", " << hi << "]: f(lo)=" << f_lo << ", f(hi)=" << f_hi;
    throw Error(ErrorCode::kBracket, msg.str());
  }
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = fn(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace bshift
