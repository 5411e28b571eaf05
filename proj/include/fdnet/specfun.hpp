#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fdnet {

/// F(x, y) = 2F1(1, 1 - 2/x; 2 - 2/x; -y) for x > 2, y >= 0.
///
/// Three regimes, all derived from the same function:
///  - y < 0.5   direct Gauss series, F = b * sum_n (-y)^n / (b + n)
///  - y < 8     Pfaff transform z -> z/(z-1), giving a positive-term series
///              in w = y/(1+y)
///  - y >= 8    expansion at infinity, F = b*pi/(sin(pi b) y^b)
///              - b * sum_j (-1)^j y^(-j-1)/(j + 1 - b)
/// The Pfaff series alone needs O(y) terms as y grows, which is not viable
/// inside nested quadrature, hence the third branch.
inline double hyp_F(double x, double y) {
  if (!(x > 2.0)) throw std::invalid_argument("hyp_F: requires x > 2");
  if (!(y >= 0.0)) throw std::invalid_argument("hyp_F: requires y >= 0");
  if (y == 0.0) return 1.0;
  const double b = 1.0 - 2.0 / x;  // in (0, 1)
  if (y < 0.5) {
    double pow_my = 1.0;  // (-y)^n
    double sum = 0.0;
    for (int n = 0; n < 200; ++n) {
      const double add = pow_my / (b + n);
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum) && n > 1) break;
      pow_my *= -y;
    }
    return b * sum;
  }
  if (y < 8.0) {
    // F = (1+y)^{-1} 2F1(1, 1; 2 - 2/x; w), w = y/(1+y)
    const double w = y / (1.0 + y);
    const double c = b + 1.0;
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 2000; ++n) {
      term *= w * (n + 1.0) / (c + n);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum / (1.0 + y);
  }
  const double lead =
      b * std::numbers::pi / (std::sin(std::numbers::pi * b) * std::pow(y, b));
  double pow_inv = 1.0 / y;  // y^{-(j+1)}
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 0; j < 200; ++j) {
    const double add = sign * pow_inv / (j + 1.0 - b);
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(lead)) break;
    pow_inv /= y;
    sign = -sign;
  }
  return lead - b * sum;
}

/// csc(2*pi/alpha) for alpha > 2; finite since 2*pi/alpha is in (0, pi).
inline double csc_2pi_over(double alpha) {
  if (!(alpha > 2.0)) throw std::invalid_argument("csc_2pi_over: alpha > 2");
  return 1.0 / std::sin(2.0 * std::numbers::pi / alpha);
}

}  // namespace fdnet
