#pragma once

#include <cmath>
#include <functional>

namespace sideinfo::detail {

struct SweepResult {
  double argmax = 0.0;
  double value = 0.0;
};

// Golden-section maximization of a concave function on [lo, hi].  Stops
// when the bracket is narrower than rel_tol * max(1, |x|).
inline SweepResult golden_section_max(const std::function<double(double)>& f,
                                      double lo, double hi,
                                      double rel_tol = 1e-7) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  const double fb = f(b);
  while ((b - a) > rel_tol * std::max(1.0, std::abs(a))) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  SweepResult best{c, fc};
  if (fd > best.value) best = {d, fd};
  if (fb > best.value) best = {hi, fb};
  return best;
}

}  // namespace sideinfo::detail
