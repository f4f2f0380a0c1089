#include "dephasing/roots.hpp"

#include <algorithm>
#include <cmath>

#include "dephasing/errors.hpp"

namespace dephasing {

namespace {
bool same_sign(double a, double b) { return (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0); }
}  // namespace

double bisect(const std::function<double(double)>& f, Bracket bracket, double rel_tol) {
  double lo = bracket.lo;
  double hi = bracket.hi;
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::isnan(f_lo) || std::isnan(f_hi) || same_sign(f_lo, f_hi)) {
    throw Error(ErrorKind::InvalidParams, "bisection bracket does not straddle a root");
  }
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (rel_tol > 0.0 && hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (same_sign(f_mid, f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
}

SignChangeScan scan_sign_changes(const std::function<double(double)>& f, Bracket range,
                                 int cells) {
  SignChangeScan scan;
  const double width = (range.hi - range.lo) / cells;
  double prev_x = range.lo;
  double prev_f = f(prev_x);
  for (int i = 1; i <= cells; ++i) {
    const double x = i == cells ? range.hi : range.lo + i * width;
    const double fx = f(x);
    const bool opposite = (prev_f < 0.0 && fx > 0.0) || (prev_f > 0.0 && fx < 0.0);
    if (opposite || fx == 0.0) {
      if (!scan.found) {
        scan.found = true;
        scan.first = {prev_x, x};
      }
      ++scan.changes;
    }
    prev_x = x;
    prev_f = fx;
  }
  return scan;
}

}  // namespace dephasing
