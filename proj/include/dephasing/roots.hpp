#pragma once

#include <functional>

namespace dephasing {

struct Bracket {
  double lo;
  double hi;
};

/// Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs (or one
/// is zero). Runs until the interval stops shrinking or its width drops to
/// rel_tol * max(|lo|, |hi|), then returns whichever endpoint has the
/// smaller |f|.
double bisect(const std::function<double(double)>& f, Bracket bracket, double rel_tol = 0.0);

/// Scans [lo, hi] on `cells` equal cells for sign changes of f. Returns the
/// first cell holding one and the total number of sign changes seen.
struct SignChangeScan {
  bool found = false;
  Bracket first{0.0, 0.0};
  int changes = 0;
};

SignChangeScan scan_sign_changes(const std::function<double(double)>& f, Bracket range,
                                 int cells);

}  // namespace dephasing
