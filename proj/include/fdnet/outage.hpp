#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fdnet/antenna.hpp"
#include "fdnet/config.hpp"
#include "fdnet/laplace.hpp"
#include "fdnet/quadrature.hpp"
#include "fdnet/specfun.hpp"

namespace fdnet {

struct AnalyticOptions {
  QuadratureSpec quad{};
  /// Inner (nested) integrals run at quad tightened by this factor.
  double inner_tol_factor = 10.0;
  bool clamp_li_suppression = true;
};

/// Equal-parameter regime of the special-case results: M_b = M_u = M,
/// gamma_b = gamma_u, P_b = P_u and an interference-limited network.
struct SpecialCaseParams {
  int m = 1;
  double gamma = 0.2;
  double theta_max = 2.0 * std::numbers::pi / 3.0;

  static SpecialCaseParams from(const NetworkConfig& cfg,
                                const AntennaSystem& ant) {
    if (ant.m_b != ant.m_u)
      throw std::invalid_argument("special case requires m_b == m_u");
    if (ant.gamma_b != ant.gamma_u)
      throw std::invalid_argument("special case requires gamma_b == gamma_u");
    if (cfg.p_b != cfg.p_u_tx)
      throw std::invalid_argument("special case requires p_b == p_u_tx");
    if (cfg.sigma_n2 != 0.0)
      throw std::invalid_argument("special case requires sigma_n2 == 0");
    return {ant.m_b, ant.gamma_b, ant.theta_max};
  }

  /// Density weights {1/M^2, (M-1)/M^2, (M-1)/M^2, (M-1)^2/M^2}.
  std::array<double, 4> lambda_weights() const {
    const double m2 = static_cast<double>(m) * m;
    return {1.0 / m2, (m - 1) / m2, (m - 1) / m2,
            static_cast<double>(m - 1) * (m - 1) / m2};
  }
  /// Gain factors {1, gamma, gamma, gamma^2}.
  std::array<double, 4> gamma_factors() const {
    return {1.0, gamma, gamma, gamma * gamma};
  }
};

namespace detail {

// Loopback factor in the equal-parameter regime, as a function of
// x = sigma_l2 * tau * r^alpha1.
inline double li_factor_equal_2node(double x) { return 1.0 / (1.0 + x); }

inline double li_factor_equal_3u_grid(double x, const SpecialCaseParams& sp,
                                      bool clamp) {
  double total = 1.0 / (1.0 + x);
  for (int k = 1; k < sp.m; ++k) {
    const double theta = sector_grid_angle(k, sp.m);
    const double f = clamp ? passive_suppression(theta, sp.theta_max)
                           : passive_suppression_raw(theta, sp.theta_max);
    total += 1.0 / (1.0 + sp.gamma * x * f);
  }
  return total / sp.m;
}

// Continuous angle average of the three-node loopback factor (M -> infinity).
inline double li_factor_equal_3u_average(double x, double gamma,
                                         double theta_max,
                                         const QuadratureSpec& spec) {
  if (x == 0.0) return 1.0;
  auto integrand = [&](double theta) {
    return 1.0 / (1.0 + gamma * x * passive_suppression(theta, theta_max));
  };
  const double v = integrate_checked(integrand, 0.0, std::numbers::pi, spec,
                                     "li_angle_average");
  return v / std::numbers::pi;  // symmetric in theta
}

}  // namespace detail

/// Outage probability by direct evaluation of the per-scenario theorem:
/// the radial integral over the serving distance of the noise factor times
/// the product of the scenario's Laplace factors.
inline OutageEstimate outage(Scenario scn, const NetworkConfig& cfg,
                             const AntennaSystem& ant,
                             const AnalyticOptions& opts = {}) {
  cfg.validate();
  ant.validate();
  const double tau = cfg.tau();
  if (tau == 0.0) return {0.0, Method::closed_form};
  const double gb = antenna_gains(ant.m_b, ant.gamma_b).main;
  const double gu = antenna_gains(ant.m_u, ant.gamma_u).main;
  const double p_sig = is_uplink(scn) ? cfg.p_u_tx : cfg.p_b;
  const QuadratureSpec inner = opts.quad.tightened(opts.inner_tol_factor);

  auto body = [&](double r, double u) {
    const double s = tau * std::pow(r, cfg.alpha1) / (p_sig * gb * gu);
    double expo = u * u + s * cfg.sigma_n2;
    if (expo > 700.0) return 0.0;
    double v = std::exp(-expo);
    switch (scn) {
      case Scenario::TwoD:
        v *= laplace_li_2node(s, cfg, ant, LinkEnd::user);
        v *= laplace_interference_bs_down(r, tau, cfg, ant);
        v *= laplace_interference_user_2d(s, cfg, ant, inner);
        break;
      case Scenario::ThreeD:
        v *= laplace_interference_bs_down(r, tau, cfg, ant);
        v *= laplace_interference_user_3d(s, cfg, ant);
        break;
      case Scenario::TwoU:
        v *= laplace_li_2node(s, cfg, ant, LinkEnd::bs);
        v *= laplace_interference_bs_up(s, cfg, ant, inner);
        v *= laplace_interference_user_3u(s, cfg, ant, inner);
        break;
      case Scenario::ThreeU:
        v *= laplace_li_3u(s, cfg, ant, opts.clamp_li_suppression);
        v *= laplace_interference_bs_up(s, cfg, ant, inner);
        v *= laplace_interference_user_3u(s, cfg, ant, inner);
        break;
    }
    return v;
  };
  IntegralResult res;
  const double scale = std::sqrt(cfg.lambda * std::numbers::pi);
  auto integrand = [&](double u) { return u * body(u / scale, u); };
  res = integrate_to_infinity(integrand, 0.0, opts.quad);
  if (!res.converged)
    throw QuadratureError("outage: outer integral did not converge", res.value,
                          res.error_bound);
  OutageEstimate est;
  est.value = clamp_probability(1.0 - 2.0 * res.value, "outage");
  est.method = Method::quadrature;
  est.error_bound = 2.0 * res.error_bound;
  return est;
}

namespace detail {

// Interference growth factors of the closest-interferer approximation.
inline double g_factor_2d(double r, double tau, const NetworkConfig& cfg,
                          const SpecialCaseParams& sp) {
  const auto lam = sp.lambda_weights();
  const auto gam = sp.gamma_factors();
  const double rd = std::pow(r, cfg.alpha1 - cfg.alpha2);
  double t = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (lam[i] == 0.0 || gam[i] == 0.0) continue;
    t += lam[i] * gam[i] *
         (hyp_F(cfg.alpha1, gam[i] * tau) / (cfg.alpha1 - 2.0) +
          rd * hyp_F(cfg.alpha2, rd * gam[i] * tau) / (cfg.alpha2 - 2.0));
  }
  return 1.0 + 2.0 * tau * t;
}

inline double g_factor_uplink(double r, double tau, const NetworkConfig& cfg,
                              const SpecialCaseParams& sp) {
  const auto lam = sp.lambda_weights();
  const auto gam = sp.gamma_factors();
  const double rd = std::pow(r, cfg.alpha1 - cfg.alpha2);
  double t = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (lam[i] == 0.0) continue;
    const double user_term =
        gam[i] == 0.0
            ? 0.0
            : (std::numbers::pi * std::pow(tau, 2.0 / cfg.alpha1) /
               cfg.alpha1) *
                  csc_2pi_over(cfg.alpha1) *
                  std::pow(gam[i], 2.0 / cfg.alpha1);
    const double bs_term =
        gam[i] == 0.0
            ? 0.0
            : (tau * rd / (cfg.alpha2 - 2.0)) * gam[i] *
                  hyp_F(cfg.alpha2, rd * gam[i] * tau);
    t += lam[i] * (user_term + bs_term);
  }
  return 1.0 + 2.0 * t;
}

inline double g_factor_3d(double r, double tau, const NetworkConfig& cfg,
                          const SpecialCaseParams& sp) {
  const auto lam = sp.lambda_weights();
  const auto gam = sp.gamma_factors();
  const double rd = std::pow(r, 2.0 * cfg.alpha1 / cfg.alpha2 - 2.0);
  double t = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (lam[i] == 0.0 || gam[i] == 0.0) continue;
    t += lam[i] * (hyp_F(cfg.alpha1, gam[i] * tau) * gam[i] * tau /
                       (cfg.alpha1 - 2.0) +
                   (std::numbers::pi * rd / cfg.alpha2) *
                       csc_2pi_over(cfg.alpha2) *
                       std::pow(gam[i] * tau, 2.0 / cfg.alpha2));
  }
  return 1.0 + 2.0 * t;
}

template <typename GFn, typename LiFn>
OutageEstimate special_case_integral(const NetworkConfig& cfg, GFn&& g_of_r,
                                     LiFn&& li_of_r,
                                     const AnalyticOptions& opts,
                                     const char* what) {
  const double scale = std::sqrt(cfg.lambda * std::numbers::pi);
  auto integrand = [&](double u) {
    const double r = u / scale;
    const double expo = u * u * g_of_r(r);
    if (expo > 700.0) return 0.0;
    return u * std::exp(-expo) * li_of_r(r);
  };
  IntegralResult res = integrate_to_infinity(integrand, 0.0, opts.quad);
  if (!res.converged)
    throw QuadratureError(std::string(what) + ": integral did not converge",
                          res.value, res.error_bound);
  OutageEstimate est;
  est.value = clamp_probability(1.0 - 2.0 * res.value, what);
  est.method = Method::quadrature;
  est.error_bound = 2.0 * res.error_bound;
  return est;
}

}  // namespace detail

/// Closest-interferer approximation of an FD-mode node's outage (upper bound
/// on the uplink). Valid under the equal-parameter regime.
inline OutageEstimate outage_approx_fd(Scenario scn, const NetworkConfig& cfg,
                                       const SpecialCaseParams& sp,
                                       const AnalyticOptions& opts = {}) {
  if (scn == Scenario::ThreeD)
    throw std::invalid_argument("outage_approx_fd: use outage_3d_special");
  const double tau = cfg.tau();
  if (tau == 0.0) return {0.0, Method::closed_form};
  const double sl2 = cfg.sigma_l2;
  auto g_of_r = [&](double r) {
    return scn == Scenario::TwoD ? detail::g_factor_2d(r, tau, cfg, sp)
                                 : detail::g_factor_uplink(r, tau, cfg, sp);
  };
  auto li_of_r = [&](double r) {
    if (sl2 == 0.0) return 1.0;
    const double x = sl2 * tau * std::pow(r, cfg.alpha1);
    return scn == Scenario::ThreeU
               ? detail::li_factor_equal_3u_grid(x, sp,
                                                 opts.clamp_li_suppression)
               : detail::li_factor_equal_2node(x);
  };
  return detail::special_case_integral(cfg, g_of_r, li_of_r, opts,
                                       "outage_approx_fd");
}

/// Three-node downlink outage in the equal-parameter regime; closed form
/// when alpha1 = alpha2 = 4, cross-checked against the quadrature path.
inline OutageEstimate outage_3d_special(const NetworkConfig& cfg,
                                        const SpecialCaseParams& sp,
                                        const AnalyticOptions& opts = {}) {
  const double tau = cfg.tau();
  if (tau == 0.0) return {0.0, Method::closed_form};
  auto g_of_r = [&](double r) { return detail::g_factor_3d(r, tau, cfg, sp); };
  auto one = [](double) { return 1.0; };
  OutageEstimate quad =
      detail::special_case_integral(cfg, g_of_r, one, opts, "outage_3d_special");
  if (cfg.alpha1 == 4.0 && cfg.alpha2 == 4.0) {
    const auto lam = sp.lambda_weights();
    const auto gam = sp.gamma_factors();
    double t = 0.0;
    for (int i = 0; i < 4; ++i) {
      if (lam[i] == 0.0 || gam[i] == 0.0) continue;
      t += lam[i] * (hyp_F(4.0, gam[i] * tau) * gam[i] * tau +
                     0.5 * std::numbers::pi * std::sqrt(gam[i] * tau));
    }
    OutageEstimate closed{1.0 - 1.0 / (1.0 + t), Method::closed_form};
    const double denom = std::max(std::abs(closed.value), 1e-12);
    if (std::abs(closed.value - quad.value) / denom > 1e-6)
      throw std::runtime_error(
          "outage_3d_special: closed form disagrees with quadrature");
    return closed;
  }
  return quad;
}

/// Large-M limit: side-lobe-only interference. The three-node loopback
/// factor becomes a continuous angle average; the two-node one is M-free.
inline OutageEstimate outage_asymptotic(Scenario scn, const NetworkConfig& cfg,
                                        const SpecialCaseParams& sp,
                                        const AnalyticOptions& opts = {}) {
  const double tau = cfg.tau();
  if (tau == 0.0) return {0.0, Method::closed_form};
  const double g2 = sp.gamma * sp.gamma;
  const double sl2 = cfg.sigma_l2;
  const QuadratureSpec inner = opts.quad.tightened(opts.inner_tol_factor);

  auto g_of_r = [&](double r) {
    const double rd = std::pow(r, cfg.alpha1 - cfg.alpha2);
    switch (scn) {
      case Scenario::TwoD:
        return 1.0 + 2.0 * tau * g2 *
                         (hyp_F(cfg.alpha1, g2 * tau) / (cfg.alpha1 - 2.0) +
                          rd * hyp_F(cfg.alpha2, rd * g2 * tau) /
                              (cfg.alpha2 - 2.0));
      case Scenario::TwoU:
      case Scenario::ThreeU:
        return 1.0 +
               (2.0 * std::numbers::pi * std::pow(tau, 2.0 / cfg.alpha1) /
                cfg.alpha1) *
                   csc_2pi_over(cfg.alpha1) *
                   std::pow(sp.gamma, 4.0 / cfg.alpha1) +
               (2.0 * rd * tau / (cfg.alpha2 - 2.0)) * g2 *
                   hyp_F(cfg.alpha2, rd * g2 * tau);
      case Scenario::ThreeD:
        return 1.0 +
               2.0 * (hyp_F(cfg.alpha1, g2 * tau) * g2 * tau /
                          (cfg.alpha1 - 2.0) +
                      (std::numbers::pi *
                       std::pow(r, 2.0 * cfg.alpha1 / cfg.alpha2 - 2.0) /
                       cfg.alpha2) *
                          csc_2pi_over(cfg.alpha2) *
                          std::pow(g2 * tau, 2.0 / cfg.alpha2));
    }
    return 1.0;
  };
  auto li_of_r = [&](double r) {
    if (sl2 == 0.0 || scn == Scenario::ThreeD) return 1.0;
    const double x = sl2 * tau * std::pow(r, cfg.alpha1);
    if (scn == Scenario::ThreeU)
      return detail::li_factor_equal_3u_average(x, sp.gamma, sp.theta_max,
                                                inner);
    return detail::li_factor_equal_2node(x);
  };
  return detail::special_case_integral(cfg, g_of_r, li_of_r, opts,
                                       "outage_asymptotic");
}

/// Equal path-loss exponent 4: exact closed form at sigma_l2 = 0; otherwise
/// the one-dimensional integral obtained by substituting r^2 for the radial
/// variable (equal to the special-function representation by construction).
inline OutageEstimate outage_alpha4_closed(Scenario scn,
                                           const NetworkConfig& cfg,
                                           const SpecialCaseParams& sp,
                                           const AnalyticOptions& opts = {}) {
  if (cfg.alpha1 != 4.0 || cfg.alpha2 != 4.0)
    throw std::invalid_argument("outage_alpha4_closed: requires alpha = 4");
  if (scn == Scenario::ThreeD)
    throw std::invalid_argument("outage_alpha4_closed: use outage_3d_special");
  const double tau = cfg.tau();
  if (tau == 0.0) return {0.0, Method::closed_form};
  const auto lam = sp.lambda_weights();
  const auto gam = sp.gamma_factors();
  double y = 1.0;
  for (int i = 0; i < 4; ++i) {
    if (lam[i] == 0.0 || gam[i] == 0.0) continue;
    if (scn == Scenario::TwoD) {
      y += 2.0 * tau * lam[i] * gam[i] * hyp_F(4.0, gam[i] * tau);
    } else {
      y += lam[i] * (0.5 * std::numbers::pi * std::sqrt(tau * gam[i]) +
                     tau * gam[i] * hyp_F(4.0, gam[i] * tau));
    }
  }
  if (cfg.sigma_l2 == 0.0)
    return {clamp_probability(1.0 - 1.0 / y, "outage_alpha4_closed"),
            Method::closed_form};
  // upsilon = r^2, then w = lambda pi Y upsilon:
  // P = 1 - (1/Y) int_0^inf e^-w L_li(w / (lambda pi Y)) dw
  const double sl2 = cfg.sigma_l2;
  const double denom = cfg.lambda * std::numbers::pi * y;
  auto integrand = [&](double w) {
    if (w > 700.0) return 0.0;
    const double ups = w / denom;
    const double x = sl2 * tau * ups * ups;  // sigma_l2 tau r^4
    const double li =
        scn == Scenario::ThreeU
            ? detail::li_factor_equal_3u_grid(x, sp, opts.clamp_li_suppression)
            : detail::li_factor_equal_2node(x);
    return std::exp(-w) * li;
  };
  IntegralResult res = integrate_to_infinity(integrand, 0.0, opts.quad);
  if (!res.converged)
    throw QuadratureError("outage_alpha4_closed: integral did not converge",
                          res.value, res.error_bound);
  OutageEstimate est;
  est.value = clamp_probability(1.0 - res.value / y, "outage_alpha4_closed");
  est.method = Method::quadrature;
  est.error_bound = res.error_bound / y;
  return est;
}

}  // namespace fdnet
