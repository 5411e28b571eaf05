#pragma once

// Brute-force reference implementations used only by tests. These stay
// independent of the library's evaluation paths: plain partial sums,
// fixed-step trapezoid/Simpson rules and naive enumeration.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracles {

// Direct Gauss series of F(x, y) = 2F1(1, 1-2/x; 2-2/x; -y); converges for
// |y| < 1 only.
inline double series_F(double x, double y, int terms = 400) {
  const double b = 1.0 - 2.0 / x;
  double pow_my = 1.0, sum = 0.0;
  for (int n = 0; n < terms; ++n) {
    sum += pow_my / (b + n);
    pow_my *= -y;
  }
  return b * sum;
}

// Pfaff-transformed partial sum, usable for any y >= 0: literal term-by-term
// evaluation of (1+y)^{-1} 2F1(1, 1; 2-2/x; y/(1+y)).
inline double series_F_pfaff(double x, double y, int terms = 200000) {
  const double w = y / (1.0 + y);
  const double c = 2.0 - 2.0 / x;
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < terms; ++n) {
    term *= w * (n + 1.0) / (c + n);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum / (1.0 + y);
}

inline double trapezoid(const std::function<double(double)>& f, double a,
                        double b, long n) {
  const double h = (b - a) / static_cast<double>(n);
  double sum = 0.5 * (f(a) + f(b));
  for (long i = 1; i < n; ++i) sum += f(a + h * static_cast<double>(i));
  return sum * h;
}

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, long n) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double sum = f(a) + f(b);
  for (long i = 1; i < n; ++i)
    sum += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// Least-squares line fit; returns maximum absolute residual.
inline double max_line_fit_residual(const std::vector<double>& xs,
                                    const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double d = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / d;
  const double icpt = (sy - slope * sx) / n;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    worst = std::max(worst, std::abs(ys[i] - (icpt + slope * xs[i])));
  return worst;
}

}  // namespace oracles
