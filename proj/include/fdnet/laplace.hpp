#pragma once

#include <cmath>
#include <numbers>

#include "fdnet/antenna.hpp"
#include "fdnet/config.hpp"
#include "fdnet/quadrature.hpp"
#include "fdnet/specfun.hpp"

namespace fdnet {

enum class LinkEnd { user, bs };

/// Loopback transform of a two-node FD terminal: 1 / (1 + s P G^2 sigma_l2)
/// with (P, G) = (P_u, G_u) at the user and (P_b, G_b) at the BS.
inline double laplace_li_2node(double s, const NetworkConfig& cfg,
                               const AntennaSystem& ant, LinkEnd end) {
  if (cfg.sigma_l2 == 0.0) return 1.0;
  const double p =
      end == LinkEnd::user ? cfg.p_u_tx : cfg.li_power_at_bs();
  const double g = end == LinkEnd::user
                       ? antenna_gains(ant.m_u, ant.gamma_u).main
                       : antenna_gains(ant.m_b, ant.gamma_b).main;
  return 1.0 / (1.0 + s * p * g * g * cfg.sigma_l2);
}

/// Loopback transform at the three-node BS: average over the sector-offset
/// grid of the per-angle exponential MGFs. The offset theta = 0 keeps the
/// full G_b^2 gain; any other grid angle sees G_b H_b scaled by the passive
/// suppression fraction. `clamp` selects the model's min{1, .} form; the raw
/// exponential replicates the printed transform exactly.
inline double laplace_li_3u(double s, const NetworkConfig& cfg,
                            const AntennaSystem& ant, bool clamp = true) {
  if (cfg.sigma_l2 == 0.0) return 1.0;
  const AntennaGains g = antenna_gains(ant.m_b, ant.gamma_b);
  const double p = cfg.li_power_at_bs();
  double total = 1.0 / (1.0 + s * p * g.main * g.main * cfg.sigma_l2);
  for (int k = 1; k < ant.m_b; ++k) {
    const double theta = sector_grid_angle(k, ant.m_b);
    const double f = clamp ? passive_suppression(theta, ant.theta_max)
                           : passive_suppression_raw(theta, ant.theta_max);
    total += 1.0 / (1.0 + s * p * g.main * g.side * cfg.sigma_l2 * f);
  }
  return total / ant.m_b;
}

namespace detail {

// rho^2 * F(alpha, c / rho^alpha) * (c / rho^alpha), stable as rho -> 0.
// Uses alpha * (1 - b) = 2 with b = 1 - 2/alpha, so the leading term of the
// large-argument expansion is rho-free.
inline double fy_scaled(double alpha, double c, double rho) {
  if (c == 0.0) return 0.0;
  const double b = 1.0 - 2.0 / alpha;
  const double t = std::pow(rho, alpha);
  const double y = c / t;
  if (y < 1e12) return rho * rho * hyp_F(alpha, y) * y;
  const double q = b * std::numbers::pi / std::sin(std::numbers::pi * b);
  return q * std::pow(c, 1.0 - b) - (b / (1.0 - b)) * rho * rho;
}

// 2*pi*lam * int_0^inf rho exp{-pi rho^2 lam - pi sum_i (2 dens_i/(a-2)) *
//   F(a, s P gain_i / rho^a) * s P gain_i / rho^a * rho^2 / rho^2 ...} d rho
// i.e. the nearest-neighbour-protected PGFL transform shared by the downlink
// user-interference and uplink BS-interference expressions.
inline double protected_field_transform(double s, double p, double alpha,
                                        const NetworkConfig& cfg,
                                        const ThinningTable& table,
                                        const QuadratureSpec& spec) {
  if (s == 0.0) return 1.0;
  const double lam = cfg.lambda;
  const double scale = std::sqrt(lam * std::numbers::pi);
  auto integrand = [&](double v) {
    const double rho = v / scale;
    double expo = v * v;
    for (const auto& e : table.entries) {
      if (e.density == 0.0) continue;
      expo += std::numbers::pi * (2.0 * e.density / (alpha - 2.0)) *
              fy_scaled(alpha, s * p * e.power_gain, rho);
    }
    if (expo > 700.0) return 0.0;
    return v * std::exp(-expo);
  };
  // substitution v = rho * sqrt(lam pi): 2 pi lam rho drho = 2 v dv
  const double val = integrate_to_infinity_checked(
      integrand, 0.0, spec, "protected_field_transform");
  return 2.0 * val;
}

}  // namespace detail

/// BS-interference transform at a downlink receiver, nearest interferer
/// beyond the serving distance r.
inline double laplace_interference_bs_down(double r, double tau,
                                           const NetworkConfig& cfg,
                                           const AntennaSystem& ant) {
  if (tau == 0.0 || r == 0.0) return 1.0;
  const ThinningTable t = thinning_user_bs(cfg, ant);
  const double g1 = t.entries[0].power_gain;
  double expo = 0.0;
  for (const auto& e : t.entries) {
    if (e.density == 0.0) continue;
    const double ratio = e.power_gain / g1;
    expo += (2.0 * std::numbers::pi * e.density / (cfg.alpha1 - 2.0)) * ratio *
            hyp_F(cfg.alpha1, ratio * tau) * r * r * tau;
  }
  return std::exp(-expo);
}

/// Uplink-user interference transform at a two-node downlink receiver; the
/// closest same-channel user sits beyond a nearest-neighbour distributed
/// distance, integrated out by quadrature.
inline double laplace_interference_user_2d(double s, const NetworkConfig& cfg,
                                           const AntennaSystem& ant,
                                           const QuadratureSpec& spec = {}) {
  return detail::protected_field_transform(
      s, cfg.p_u_tx, cfg.alpha2, cfg, thinning_user_user(cfg, ant), spec);
}

/// Uplink-user interference transform at a three-node downlink receiver; the
/// intra-cell user makes the field unprotected, giving the closed form.
inline double laplace_interference_user_3d(double s, const NetworkConfig& cfg,
                                           const AntennaSystem& ant) {
  if (s == 0.0) return 1.0;
  const ThinningTable t = thinning_user_user(cfg, ant);
  double expo = 0.0;
  for (const auto& e : t.entries) {
    if (e.density == 0.0 || e.power_gain == 0.0) continue;
    expo += (2.0 * std::numbers::pi * std::numbers::pi * e.density /
             cfg.alpha2) *
            csc_2pi_over(cfg.alpha2) *
            std::pow(s * cfg.p_u_tx * e.power_gain, 2.0 / cfg.alpha2);
  }
  return std::exp(-expo);
}

/// BS-interference transform at an uplink BS; same protected-field structure
/// as the two-node downlink user interference with BS-BS thinning entries.
inline double laplace_interference_bs_up(double s, const NetworkConfig& cfg,
                                         const AntennaSystem& ant,
                                         const QuadratureSpec& spec = {}) {
  return detail::protected_field_transform(
      s, cfg.p_b, cfg.alpha2, cfg, thinning_bs_bs(cfg, ant), spec);
}

/// Uplink-user interference transform at an uplink BS. The out-of-cell user
/// field is an inhomogeneous process; the homogeneous-field exponent is
/// corrected by a density-deficit integral.
inline double laplace_interference_user_3u(double s, const NetworkConfig& cfg,
                                           const AntennaSystem& ant,
                                           const QuadratureSpec& spec = {}) {
  if (s == 0.0) return 1.0;
  const ThinningTable t = thinning_bs_user(cfg, ant);
  const double lam = cfg.lambda;
  double expo = 0.0;
  for (const auto& e : t.entries) {
    if (e.density == 0.0 || e.power_gain == 0.0) continue;
    const double c = s * cfg.p_u_tx * e.power_gain;
    const double homog = (2.0 * std::numbers::pi / cfg.alpha1) *
                         csc_2pi_over(cfg.alpha1) *
                         std::pow(c, 2.0 / cfg.alpha1);
    // substitution z = u / (pi lam) keeps the decay scale at O(1)
    auto integrand = [&](double u) {
      const double z = u / (std::numbers::pi * lam);
      return c / ((c + std::pow(z, 0.5 * cfg.alpha1)) *
                  (std::numbers::pi * lam)) *
             std::exp(-u);
    };
    const double corr = integrate_to_infinity_checked(
        integrand, 0.0, spec, "laplace_interference_user_3u");
    expo += std::numbers::pi * e.density * (homog - corr);
  }
  return std::exp(-expo);
}

}  // namespace fdnet
