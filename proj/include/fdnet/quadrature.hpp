#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdnet {

/// Tolerances and limits for adaptive quadrature. The error bound reported
/// on success satisfies bound <= max(rel_tol*|value|, abs_tol).
struct QuadratureSpec {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 200;

  QuadratureSpec tightened(double factor) const {
    return {rel_tol / factor, abs_tol / factor, max_subdivisions};
  }
};

struct IntegralResult {
  double value = 0.0;
  double error_bound = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

/// Thrown when an integral does not converge within the subdivision budget.
/// Carries the best estimate and its error bound.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double best, double bound)
      : std::runtime_error(what), best_estimate(best), error_bound(bound) {}
  double best_estimate;
  double error_bound;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss rule on [-1,1] (QUADPACK dqk15 constants).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGk15WeightsK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGk15WeightsG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;
};

// Kronrod estimate and |K-G| based error for one panel.
template <typename F>
Panel gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kGk15Nodes[i]);
    fv[14 - i] = f(c + h * kGk15Nodes[i]);
  }
  fv[7] = f(c);
  double kron = 0.0, gauss = 0.0, resabs = 0.0;
  for (int i = 0; i < 7; ++i) {
    kron += kGk15WeightsK[i] * (fv[i] + fv[14 - i]);
    resabs += kGk15WeightsK[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
  }
  kron += kGk15WeightsK[7] * fv[7];
  resabs += kGk15WeightsK[7] * std::abs(fv[7]);
  for (int i = 0; i < 3; ++i) {
    gauss += kGk15WeightsG[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  }
  gauss += kGk15WeightsG[3] * fv[7];

  const double mean = 0.5 * kron;
  double resasc = kGk15WeightsK[7] * std::abs(fv[7] - mean);
  for (int i = 0; i < 7; ++i) {
    resasc += kGk15WeightsK[i] *
              (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
  }
  double err = std::abs(kron - gauss) * h;
  resasc *= h;
  resabs *= h;
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * resabs);
  }
  return {a, b, kron * h, err};
}

template <typename F>
IntegralResult adaptive(F&& f, double a, double b, const QuadratureSpec& spec) {
  std::vector<Panel> panels;
  panels.reserve(static_cast<std::size_t>(spec.max_subdivisions) + 2);
  panels.push_back(gk15(f, a, b));
  int subdivisions = 0;
  for (;;) {
    double total = 0.0, err = 0.0;
    for (const Panel& p : panels) {
      total += p.value;
      err += p.error;
    }
    const double tol = std::max(spec.rel_tol * std::abs(total), spec.abs_tol);
    if (err <= tol) return {total, err, subdivisions, true};
    if (subdivisions >= spec.max_subdivisions)
      return {total, err, subdivisions, false};
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i) {
      if (panels[i].error > panels[worst].error) worst = i;
    }
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (mid <= p.a || mid >= p.b) {
      // Panel too narrow to split further; report best effort.
      return {total, err, subdivisions, false};
    }
    panels[worst] = gk15(f, p.a, mid);
    panels.push_back(gk15(f, mid, p.b));
    ++subdivisions;
  }
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over the finite interval [a, b].
template <typename F>
IntegralResult integrate(F&& f, double a, double b,
                         const QuadratureSpec& spec = {}) {
  if (!(a <= b)) throw std::invalid_argument("integrate: requires a <= b");
  if (a == b) return {0.0, 0.0, 0, true};
  return detail::adaptive(f, a, b, spec);
}

/// Integration over [a, infinity) via the rational map x = a + t/(1-t).
/// The integrand must decay fast enough for f(x)/(1-t)^2 -> 0 as t -> 1.
template <typename F>
IntegralResult integrate_to_infinity(F&& f, double a,
                                     const QuadratureSpec& spec = {}) {
  auto g = [&f, a](double t) {
    const double om = 1.0 - t;
    const double x = a + t / om;
    const double v = f(x);
    if (v == 0.0) return 0.0;
    return v / (om * om);
  };
  return detail::adaptive(g, 0.0, 1.0, spec);
}

/// Convenience wrappers that turn non-convergence into QuadratureError.
template <typename F>
double integrate_checked(F&& f, double a, double b,
                         const QuadratureSpec& spec = {},
                         const char* what = "integrate") {
  IntegralResult res = integrate(f, a, b, spec);
  if (!res.converged)
    throw QuadratureError(std::string(what) + ": no convergence after " +
                              std::to_string(res.subdivisions) +
                              " subdivisions",
                          res.value, res.error_bound);
  return res.value;
}

template <typename F>
double integrate_to_infinity_checked(F&& f, double a,
                                     const QuadratureSpec& spec = {},
                                     const char* what = "integrate") {
  IntegralResult res = integrate_to_infinity(f, a, spec);
  if (!res.converged)
    throw QuadratureError(std::string(what) + ": no convergence after " +
                              std::to_string(res.subdivisions) +
                              " subdivisions",
                          res.value, res.error_bound);
  return res.value;
}

}  // namespace fdnet
