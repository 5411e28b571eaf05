#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fdnet/antenna.hpp"
#include "fdnet/config.hpp"
#include "fdnet/rng.hpp"

namespace fdnet {

struct McOptions {
  /// 0 selects the default window sized for ~300 expected interferers.
  double window_radius = 0.0;
  /// Add the mean interference of the field beyond the window; required for
  /// window sufficiency when a path-loss exponent is close to 2.
  bool far_field_compensation = true;
  /// Sample the orientation case directly from its probability instead of
  /// testing sector geometry.
  bool direct_case_sampling = false;
  /// Build networks from a dense user process with nearest-BS association
  /// instead of the independent same-channel process.
  bool association_mode = false;
  double user_density_factor = 20.0;  // association mode: lambda' / lambda
  unsigned workers = 1;
};

inline double default_window_radius(double lambda) {
  return std::sqrt(300.0 / (lambda * std::numbers::pi));
}

inline double mc_window_radius(double lambda, const McOptions& opts) {
  return opts.window_radius > 0.0 ? opts.window_radius
                                  : default_window_radius(lambda);
}

struct PlacedNode {
  double x, y;
  double orientation;  // boresight angle, uniform
  double fading;       // |h|^2, unit-mean exponential
};

/// One sampled network as seen from the typical node at the origin. The
/// typical node's boresight points along +x; its serving counterpart sits at
/// (serving_distance, 0).
struct NetworkRealization {
  Scenario scenario = Scenario::TwoD;
  double window_radius = 0.0;
  double serving_distance = 0.0;
  double serving_fading = 1.0;
  std::vector<PlacedNode> bs_nodes;    // interfering BSs
  std::vector<PlacedNode> user_nodes;  // interfering same-channel users
  /// association map (user index -> serving BS index); filled in
  /// association mode only.
  std::vector<std::uint32_t> user_serving_bs;
  double li_fading = 0.0;      // unit-mean exponential, scaled by sigma_l2
  int sector_offset_index = 0; // three-node uplink: k, theta = 2 pi k / M_b
};

namespace detail {

inline void fill_annulus_field(std::vector<PlacedNode>& out, double lambda,
                               double r_min, double r_max,
                               RandomStream& stream) {
  out.clear();
  const double lo2 = r_min * r_min;
  const double hi2 = r_max * r_max;
  if (hi2 <= lo2) return;
  const std::uint64_t n =
      stream.poisson(lambda * std::numbers::pi * (hi2 - lo2));
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double d = std::sqrt(lo2 + stream.uniform() * (hi2 - lo2));
    const double phi = stream.angle();
    out.push_back(
        {d * std::cos(phi), d * std::sin(phi), stream.angle(),
         stream.exponential()});
  }
}

// Out-of-cell uplink users seen from the typical BS: a unit-density process
// thinned by the probability 1 - exp(-pi lambda d^2) that a user's own BS
// lies closer than the typical one.
inline void fill_thinned_user_field(std::vector<PlacedNode>& out,
                                    double lambda, double r_max,
                                    RandomStream& stream) {
  out.clear();
  const std::uint64_t n =
      stream.poisson(lambda * std::numbers::pi * r_max * r_max);
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double d2 = stream.uniform() * r_max * r_max;
    const double keep = stream.uniform();
    const double d = std::sqrt(d2);
    const double phi = stream.angle();
    const double orient = stream.angle();
    const double fade = stream.exponential();
    if (keep < 1.0 - std::exp(-std::numbers::pi * lambda * d2)) {
      out.push_back({d * std::cos(phi), d * std::sin(phi), orient, fade});
    }
  }
}

inline double wrap_angle(double a) {
  while (a >= std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a < -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

}  // namespace detail

/// Draws one network realization mirroring the geometry the analytic
/// expressions integrate over: the serving link distance follows the
/// nearest-point pdf, the interfering co-process keeps its analytical
/// exclusion (nearest-neighbour distributed for the fields the analysis
/// protects, none where intra-cell interference is possible) and the uplink
/// user field is thinned to out-of-cell members.
inline NetworkRealization sample_realization(const NetworkConfig& cfg,
                                             const AntennaSystem& ant,
                                             Scenario scn,
                                             double window_radius,
                                             RandomStream& stream) {
  NetworkRealization real;
  real.scenario = scn;
  real.window_radius = window_radius;
  real.serving_distance = stream.nearest_distance(cfg.lambda);
  real.serving_fading = stream.exponential();
  if (has_loopback(scn)) real.li_fading = stream.exponential();
  if (scn == Scenario::ThreeU)
    real.sector_offset_index =
        static_cast<int>(stream.uniform_index(ant.m_b));

  const double w = window_radius;
  if (!is_uplink(scn)) {
    // interfering BSs lie beyond the serving BS
    detail::fill_annulus_field(real.bs_nodes, cfg.lambda,
                               std::min(real.serving_distance, w), w, stream);
    const double rho = scn == Scenario::TwoD
                           ? stream.nearest_distance(cfg.lambda)
                           : 0.0;
    detail::fill_annulus_field(real.user_nodes, cfg.lambda, std::min(rho, w),
                               w, stream);
  } else {
    const double rho_b = stream.nearest_distance(cfg.lambda);
    detail::fill_annulus_field(real.bs_nodes, cfg.lambda, std::min(rho_b, w),
                               w, stream);
    detail::fill_thinned_user_field(real.user_nodes, cfg.lambda, w, stream);
  }
  return real;
}

/// Association-mode sampler: a dense user process is associated to nearest
/// BSs and one user per cell transmits on the channel under study.
inline NetworkRealization sample_realization_associated(
    const NetworkConfig& cfg, const AntennaSystem& ant, Scenario scn,
    double window_radius, double user_density_factor, RandomStream& stream) {
  NetworkRealization real;
  real.scenario = scn;
  real.window_radius = window_radius;
  real.serving_distance = stream.nearest_distance(cfg.lambda);
  real.serving_fading = stream.exponential();
  if (has_loopback(scn)) real.li_fading = stream.exponential();
  if (scn == Scenario::ThreeU)
    real.sector_offset_index =
        static_cast<int>(stream.uniform_index(ant.m_b));

  const double w = window_radius;
  // BS field: beyond the serving BS on the downlink, full window on the
  // uplink (the typical BS itself sits at the origin).
  const double bs_min = is_uplink(scn) ? 0.0 : real.serving_distance;
  detail::fill_annulus_field(real.bs_nodes, cfg.lambda, std::min(bs_min, w),
                             w, stream);

  // Dense user candidates; nearest-BS association over interfering BSs plus
  // the typical cell's BS.
  std::vector<PlacedNode> candidates;
  detail::fill_annulus_field(candidates, cfg.lambda * user_density_factor,
                             0.0, w, stream);
  // Cell anchors: index 0 is the typical cell's BS. On the downlink it sits
  // at (r, 0); on the uplink it is the origin itself.
  const double anchor_x = is_uplink(scn) ? 0.0 : real.serving_distance;
  std::vector<std::vector<std::uint32_t>> members(real.bs_nodes.size() + 1);
  std::vector<std::uint32_t> owner(candidates.size());
  for (std::uint32_t i = 0; i < candidates.size(); ++i) {
    const auto& u = candidates[i];
    double best = (u.x - anchor_x) * (u.x - anchor_x) + u.y * u.y;
    std::uint32_t arg = 0;
    for (std::uint32_t b = 0; b < real.bs_nodes.size(); ++b) {
      const double dx = u.x - real.bs_nodes[b].x;
      const double dy = u.y - real.bs_nodes[b].y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        arg = b + 1;
      }
    }
    owner[i] = arg;
    members[arg].push_back(i);
  }
  // One same-channel uplink user per interfering cell.
  for (std::uint32_t cell = 1; cell < members.size(); ++cell) {
    if (members[cell].empty()) continue;
    const std::uint32_t pick = static_cast<std::uint32_t>(
        stream.uniform_index(members[cell].size()));
    const auto& u = candidates[members[cell][pick]];
    real.user_nodes.push_back(u);
    real.user_serving_bs.push_back(cell - 1);
  }
  // The typical cell: a two-node cell's own FD user is the typical link
  // itself; a three-node downlink cell adds its intra-cell uplink user.
  if (scn == Scenario::ThreeD && !members[0].empty()) {
    const std::uint32_t pick = static_cast<std::uint32_t>(
        stream.uniform_index(members[0].size()));
    const auto& u = candidates[members[0][pick]];
    real.user_nodes.push_back(u);
    real.user_serving_bs.push_back(
        static_cast<std::uint32_t>(real.bs_nodes.size()));
  }
  return real;
}

namespace detail {

struct CasePair {
  int m_rx, m_tx;
  double g_rx_main, g_rx_side, g_tx_main, g_tx_side;
};

inline CasePair case_pair(int m_rx, double gamma_rx, int m_tx,
                          double gamma_tx) {
  const AntennaGains rx = antenna_gains(m_rx, gamma_rx);
  const AntennaGains tx = antenna_gains(m_tx, gamma_tx);
  return {m_rx,
          m_tx,
          m_rx == 1 ? 1.0 : rx.main,
          m_rx == 1 ? 1.0 : rx.side,
          m_tx == 1 ? 1.0 : tx.main,
          m_tx == 1 ? 1.0 : tx.side};
}

// Interference power gain of one interferer, by sector geometry or by
// direct case sampling from the node's already-drawn uniform angles.
inline double interferer_gain(const PlacedNode& node, const CasePair& cp,
                              bool direct_sampling) {
  bool rx_main, tx_main;
  if (direct_sampling) {
    const double u1 =
        (node.x == 0.0 && node.y == 0.0)
            ? 0.0
            : (std::atan2(node.y, node.x) + std::numbers::pi) /
                  (2.0 * std::numbers::pi);
    const double u2 =
        (node.orientation + std::numbers::pi) / (2.0 * std::numbers::pi);
    rx_main = u1 * cp.m_rx < 1.0;
    tx_main = u2 * cp.m_tx < 1.0;
  } else {
    const double bearing = std::atan2(node.y, node.x);  // receiver boresight +x
    rx_main = std::abs(bearing) <= std::numbers::pi / cp.m_rx;
    const double to_origin = wrap_angle(bearing + std::numbers::pi);
    tx_main = std::abs(wrap_angle(to_origin - node.orientation)) <=
              std::numbers::pi / cp.m_tx;
  }
  return (rx_main ? cp.g_rx_main : cp.g_rx_side) *
         (tx_main ? cp.g_tx_main : cp.g_tx_side);
}

inline double field_power(const std::vector<PlacedNode>& nodes,
                          const CasePair& cp, double alpha, double power,
                          bool direct_sampling) {
  double acc = 0.0;
  for (const PlacedNode& n : nodes) {
    const double d2 = n.x * n.x + n.y * n.y;
    if (d2 == 0.0) continue;
    acc += interferer_gain(n, cp, direct_sampling) * n.fading *
           power * std::pow(d2, -0.5 * alpha);
  }
  return acc;
}

// Mean interference of the unit-mean-gain field beyond the window.
inline double far_field_mean(double lambda, double power, double alpha,
                             double w) {
  return power * 2.0 * std::numbers::pi * lambda /
         ((alpha - 2.0) * std::pow(w, alpha - 2.0));
}

}  // namespace detail

/// SINR at the typical node of a sampled realization.
inline double sinr_sample(const NetworkRealization& real,
                          const NetworkConfig& cfg, const AntennaSystem& ant,
                          const McOptions& opts = {}) {
  const double gb = antenna_gains(ant.m_b, ant.gamma_b).main;
  const double gu = antenna_gains(ant.m_u, ant.gamma_u).main;
  const Scenario scn = real.scenario;
  const double p_sig = is_uplink(scn) ? cfg.p_u_tx : cfg.p_b;
  const double desired = p_sig * gb * gu * real.serving_fading *
                         std::pow(real.serving_distance, -cfg.alpha1);

  detail::CasePair bs_pair, user_pair;
  double bs_alpha, user_alpha;
  if (!is_uplink(scn)) {
    bs_pair = detail::case_pair(ant.m_u, ant.gamma_u, ant.m_b, ant.gamma_b);
    user_pair = detail::case_pair(ant.m_u, ant.gamma_u, ant.m_u, ant.gamma_u);
    bs_alpha = cfg.alpha1;
    user_alpha = cfg.alpha2;
  } else {
    bs_pair = detail::case_pair(ant.m_b, ant.gamma_b, ant.m_b, ant.gamma_b);
    user_pair = detail::case_pair(ant.m_b, ant.gamma_b, ant.m_u, ant.gamma_u);
    bs_alpha = cfg.alpha2;
    user_alpha = cfg.alpha1;
  }

  double denom = cfg.sigma_n2;
  denom += detail::field_power(real.bs_nodes, bs_pair, bs_alpha, cfg.p_b,
                               opts.direct_case_sampling);
  denom += detail::field_power(real.user_nodes, user_pair, user_alpha,
                               cfg.p_u_tx, opts.direct_case_sampling);
  if (opts.far_field_compensation && real.window_radius > 0.0) {
    denom += detail::far_field_mean(cfg.lambda, cfg.p_b, bs_alpha,
                                    real.window_radius);
    denom += detail::far_field_mean(cfg.lambda, cfg.p_u_tx, user_alpha,
                                    real.window_radius);
  }
  if (cfg.sigma_l2 > 0.0 && has_loopback(scn)) {
    double gain;
    double p_li;
    if (scn == Scenario::TwoD) {
      gain = gu * gu;
      p_li = cfg.p_u_tx;
    } else if (scn == Scenario::TwoU) {
      gain = gb * gb;
      p_li = cfg.li_power_at_bs();
    } else {  // ThreeU
      p_li = cfg.li_power_at_bs();
      if (real.sector_offset_index == 0) {
        gain = gb * gb;
      } else {
        const double theta =
            sector_grid_angle(real.sector_offset_index, ant.m_b);
        gain = gb * antenna_gains(ant.m_b, ant.gamma_b).side *
               passive_suppression(theta, ant.theta_max);
      }
    }
    denom += p_li * gain * cfg.sigma_l2 * real.li_fading;
  }
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return desired / denom;
}

namespace detail {

/// Counts indicator outcomes over realization indices [0, n) on a fixed
/// number of workers. The per-index streams make the integer total
/// independent of scheduling.
template <typename Fn>
std::uint64_t count_parallel(std::uint64_t n, unsigned workers, Fn&& body) {
  workers = std::max(1u, workers);
  if (workers == 1) {
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i < n; ++i) count += body(i) ? 1 : 0;
    return count;
  }
  std::vector<std::uint64_t> partial(workers, 0);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&, t]() {
      std::uint64_t local = 0;
      for (std::uint64_t i = t; i < n; i += workers)
        local += body(i) ? 1 : 0;
      partial[t] = local;
    });
  }
  for (auto& th : pool) th.join();
  std::uint64_t count = 0;
  for (std::uint64_t c : partial) count += c;
  return count;
}

}  // namespace detail

/// Monte Carlo outage estimate: the fraction of realizations whose
/// instantaneous rate falls short of the target.
inline OutageEstimate estimate_outage_mc(Scenario scn,
                                         const NetworkConfig& cfg,
                                         const AntennaSystem& ant,
                                         std::uint64_t n_realizations,
                                         const SeedPolicy& seed,
                                         const McOptions& opts = {}) {
  cfg.validate();
  ant.validate();
  if (n_realizations < 100)
    throw std::invalid_argument("estimate_outage_mc: need >= 100 realizations");
  const double tau = cfg.tau();
  if (tau == 0.0) return {0.0, Method::monte_carlo, 0.0, n_realizations};
  const double w = mc_window_radius(cfg.lambda, opts);

  const std::uint64_t outages = detail::count_parallel(
      n_realizations, opts.workers, [&](std::uint64_t index) {
        RandomStream stream = realization_stream(seed, index);
        const NetworkRealization real =
            opts.association_mode
                ? sample_realization_associated(cfg, ant, scn, w,
                                                opts.user_density_factor,
                                                stream)
                : sample_realization(cfg, ant, scn, w, stream);
        return sinr_sample(real, cfg, ant, opts) < tau;
      });

  OutageEstimate est;
  est.value = static_cast<double>(outages) / n_realizations;
  est.method = Method::monte_carlo;
  est.n_realizations = n_realizations;
  est.std_error =
      std::sqrt(est.value * (1.0 - est.value) / n_realizations);
  return est;
}

/// Point-list dump of one realization for debugging.
inline void dump_realization_csv(const NetworkRealization& real,
                                 std::ostream& os) {
  os << "kind,x,y,orientation,fading\n";
  os << "typical,0,0,0," << real.serving_fading << "\n";
  os << "serving," << real.serving_distance << ",0,0,0\n";
  for (const auto& n : real.bs_nodes)
    os << "bs," << n.x << "," << n.y << "," << n.orientation << ","
       << n.fading << "\n";
  for (const auto& n : real.user_nodes)
    os << "user," << n.x << "," << n.y << "," << n.orientation << ","
       << n.fading << "\n";
}

}  // namespace fdnet
