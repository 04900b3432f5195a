#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>

#include "error.hpp"

namespace horton {

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// phi2(e) = exp(-e) - 1 + e, accurate for small e.
inline double phi2(double e) {
  if (std::abs(e) < 0.1) {
    // alternating series e^2/2 - e^3/6 + ...
    double term = e * e / 2.0, s = 0.0;
    for (int k = 2; k < 30 && std::abs(term) > 1e-18 * std::abs(s); ++k) {
      s += term;
      term *= -e / (k + 1);
    }
    return s;
  }
  return std::expm1(-e) + e;
}

struct RootResult {
  double root = 0.0;
  int iterations = 0;
};

/// Bracketed root on [a,b]; secant steps when they stay inside the
/// bracket, bisection otherwise.
inline RootResult find_root_bracketed(const std::function<double(double)>& f, double a, double b,
                                      double tol = 1e-12, int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (std::isnan(fa) || std::isnan(fb)) throw NumericalError("root finder: NaN at bracket end");
  if (fa == 0.0) return {a, 0};
  if (fb == 0.0) return {b, 0};
  if ((fa > 0) == (fb > 0)) throw StructuralError("root finder: no sign change on bracket");
  int it = 0;
  bool last_bisect = true;
  while (it < max_iter) {
    ++it;
    double m;
    double s = b - fb * (b - a) / (fb - fa);
    double lo = std::min(a, b), hi = std::max(a, b);
    // alternate so that a stalled secant endpoint cannot freeze the bracket
    if (!last_bisect && std::isfinite(s) && s > lo && s < hi) {
      m = s;
      last_bisect = true;
    } else {
      m = 0.5 * (a + b);
      last_bisect = false;
    }
    double fm = f(m);
    if (fm == 0.0) return {m, it};
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
    if (std::abs(b - a) <= tol * std::max(1.0, std::abs(m))) break;
  }
  if (std::abs(b - a) > tol * std::max(1.0, std::abs(a)) * 10)
    throw NumericalError("root finder: iteration budget exhausted");
  return {std::abs(fa) < std::abs(fb) ? a : b, it};
}

inline double relative_difference(double x, double y) {
  double s = std::max(std::abs(x), std::abs(y));
  return s == 0.0 ? 0.0 : std::abs(x - y) / s;
}

}  // namespace horton
