#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fdnet/config.hpp"

namespace fdnet {

struct AntennaGains {
  double main;  // G = M / (1 + gamma (M - 1))
  double side;  // H = gamma G
};

/// Main and side lobe gains of an M-sector antenna with side-lobe ratio gamma.
inline AntennaGains antenna_gains(int m, double gamma) {
  if (m < 1) throw std::invalid_argument("antenna_gains: m must be >= 1");
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("antenna_gains: gamma must lie in [0, 1]");
  const double main = m / (1.0 + gamma * (m - 1));
  return {main, gamma * main};
}

/// One thinning case: sub-process density and link power gain.
struct ThinningEntry {
  double density;
  double power_gain;
};

/// The four orientation cases for an ordered (receiver i, transmitter j)
/// endpoint pair: k=1 both main lobes, k=2 transmitter side lobe only,
/// k=3 receiver side lobe only, k=4 both side lobes.
struct ThinningTable {
  std::array<ThinningEntry, 4> entries;

  double total_density() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.density;
    return s;
  }
  /// Mean power gain of a uniformly oriented interferer; equals 1 by the
  /// main-lobe gain normalization.
  double mean_gain(double lambda) const {
    double s = 0.0;
    for (const auto& e : entries) s += e.density * e.power_gain;
    return s / lambda;
  }
};

/// Table of densities lambda_{i,j,k} and power gains Gamma_{i,j,k} for a
/// receiver with (m_i, gamma_i) and a transmitter with (m_j, gamma_j).
/// Omnidirectional endpoints (M = 1) contribute gain factor 1; the side-lobe
/// formula value never applies because those cases carry zero density.
inline ThinningTable thinning_table(int m_i, double gamma_i, int m_j,
                                    double gamma_j, double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("thinning_table: lambda must be > 0");
  const AntennaGains gi = antenna_gains(m_i, gamma_i);
  const AntennaGains gj = antenna_gains(m_j, gamma_j);
  const double rx_main = m_i == 1 ? 1.0 : gi.main;
  const double rx_side = m_i == 1 ? 1.0 : gi.side;
  const double tx_main = m_j == 1 ? 1.0 : gj.main;
  const double tx_side = m_j == 1 ? 1.0 : gj.side;
  const double base = lambda / (static_cast<double>(m_i) * m_j);
  ThinningTable t;
  t.entries[0] = {base, rx_main * tx_main};
  t.entries[1] = {base * (m_j - 1), rx_main * tx_side};
  t.entries[2] = {base * (m_i - 1), rx_side * tx_main};
  t.entries[3] = {base * (m_i - 1) * (m_j - 1), rx_side * tx_side};
  return t;
}

inline ThinningTable thinning_user_bs(const NetworkConfig& cfg,
                                      const AntennaSystem& ant) {
  return thinning_table(ant.m_u, ant.gamma_u, ant.m_b, ant.gamma_b, cfg.lambda);
}
inline ThinningTable thinning_user_user(const NetworkConfig& cfg,
                                        const AntennaSystem& ant) {
  return thinning_table(ant.m_u, ant.gamma_u, ant.m_u, ant.gamma_u, cfg.lambda);
}
inline ThinningTable thinning_bs_bs(const NetworkConfig& cfg,
                                    const AntennaSystem& ant) {
  return thinning_table(ant.m_b, ant.gamma_b, ant.m_b, ant.gamma_b, cfg.lambda);
}
inline ThinningTable thinning_bs_user(const NetworkConfig& cfg,
                                      const AntennaSystem& ant) {
  return thinning_table(ant.m_b, ant.gamma_b, ant.m_u, ant.gamma_u, cfg.lambda);
}

/// Fraction of the loopback interference that survives passive suppression
/// when transmit and receive sectors are separated by angle theta:
/// min{1, exp(cos(theta_max) - cos(|theta| - theta_max))}. Symmetric in
/// theta, equal to 1 at theta = 0. The clamp binds on the outer arc when
/// theta_max < pi/2. Continuous in theta; the 2*pi/M_b grid restriction is
/// the caller's concern.
inline double passive_suppression(double theta, double theta_max) {
  if (!(theta_max > 0.0) || theta_max > std::numbers::pi)
    throw std::invalid_argument(
        "passive_suppression: theta_max must lie in (0, pi]");
  const double raw =
      std::exp(std::cos(theta_max) - std::cos(std::abs(theta) - theta_max));
  return raw < 1.0 ? raw : 1.0;
}

/// Unclamped variant replicating the uplink transform exactly as printed.
inline double passive_suppression_raw(double theta, double theta_max) {
  if (!(theta_max > 0.0) || theta_max > std::numbers::pi)
    throw std::invalid_argument(
        "passive_suppression_raw: theta_max must lie in (0, pi]");
  return std::exp(std::cos(theta_max) - std::cos(std::abs(theta) - theta_max));
}

/// Sector-offset grid angle 2*pi*k/m wrapped to [-pi, pi).
inline double sector_grid_angle(int k, int m) {
  double th = 2.0 * std::numbers::pi * k / m;
  if (th >= std::numbers::pi) th -= 2.0 * std::numbers::pi;
  return th;
}

}  // namespace fdnet
