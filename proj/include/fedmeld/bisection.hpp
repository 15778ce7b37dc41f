#pragma once

#include <cmath>
#include <cstddef>

namespace fedmeld {

struct BisectionResult {
  double root = 0.0;
  double value = 0.0;  // f(root)
  std::size_t iterations = 0;
};

/// Bisection for a monotone function with f(lo) and f(hi) of opposite sign.
/// Stops once |f| <= f_tol, the bracket is narrower than x_tol, or the
/// bracket cannot be split further in double precision. The returned root is
/// whichever evaluated point had the smallest |f|.
template <typename F>
BisectionResult bisect(F&& f, double lo, double hi, double x_tol, double f_tol,
                       std::size_t max_iter = 400) {
  double f_lo = f(lo);
  BisectionResult best{lo, f_lo, 0};
  const double f_hi = f(hi);
  if (std::abs(f_hi) < std::abs(best.value)) best = {hi, f_hi, 0};
  const bool increasing = f_lo < 0.0;

  for (std::size_t i = 0; i < max_iter; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    best.iterations = i + 1;
    if (std::abs(f_mid) < std::abs(best.value) || std::isnan(best.value)) {
      best.root = mid;
      best.value = f_mid;
    }
    if (std::abs(f_mid) <= f_tol) break;
    if ((f_mid < 0.0) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= x_tol) break;
  }
  return best;
}

}  // namespace fedmeld
