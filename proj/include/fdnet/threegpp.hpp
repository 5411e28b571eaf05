#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "fdnet/antenna.hpp"
#include "fdnet/config.hpp"
#include "fdnet/montecarlo.hpp"
#include "fdnet/rng.hpp"

namespace fdnet {

/// Pico-cell validation model: distance-dependent LOS probability,
/// dual-slope LOS / single-slope NLOS path loss and lognormal shadowing.
/// Distances are in kilometers; dB-valued fields are converted to linear
/// once when the estimator builds its internal state.
struct ThreeGppParams {
  double lambda = 0.1;  // BSs per km^2
  double rate = 1.0;
  double p_b_dbm = 24.0;
  double p_u_dbm = 23.0;
  double sigma_n2_db = 5.0;
  double sigma_l2_db = -30.0;

  // p_los(r) = 0.5 - min{0.5, a e^{-b/r}} + min{0.5, a e^{-r/c}}
  double los_a = 5.0;
  double los_b = 0.156;
  double los_c = 0.03;

  // peer links (BS-BS; also applied user-user): dual-slope LOS, NLOS
  double peer_break_km = 2.0 / 3.0;
  double peer_los_exp_db_near = -98.4;   // 10^(db/10) r^-2 below the break
  double peer_los_exp_db_far = -101.9;   // 10^(db/10) r^-4 above the break
  double peer_nlos_db = -169.4;          // 10^(db/10) r^-4
  // access links (BS-user)
  double access_los_db = -103.8;         // 10^(db/10) r^-2.09
  double access_los_exponent = 2.09;
  double access_nlos_db = -145.4;        // 10^(db/10) r^-3.75
  double access_nlos_exponent = 3.75;

  double shadow_peer_db = 6.0;
  double shadow_access_los_db = 3.0;
  double shadow_access_nlos_db = 4.0;

  bool force_los = false;       // degenerate probe: every link LOS
  bool disable_shadowing = false;

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    if (!(rate > 0.0)) throw std::invalid_argument("rate must be > 0");
  }

  double tau() const { return std::exp2(rate) - 1.0; }

  /// LOS probability at distance r (km); clamp semantics give p = 1 as
  /// r -> 0 and p -> 0 at large distance.
  double p_los(double r) const {
    if (r <= 0.0) return 1.0;
    const double near = std::min(0.5, los_a * std::exp(-los_b / r));
    const double far = std::min(0.5, los_a * std::exp(-r / los_c));
    return 0.5 - near + far;
  }

  double pathloss_peer(double r, bool los) const {
    if (!los) return db_to_linear(peer_nlos_db) * std::pow(r, -4.0);
    if (r < peer_break_km)
      return db_to_linear(peer_los_exp_db_near) * std::pow(r, -2.0);
    return db_to_linear(peer_los_exp_db_far) * std::pow(r, -4.0);
  }

  double pathloss_access(double r, bool los) const {
    return los ? db_to_linear(access_los_db) *
                     std::pow(r, -access_los_exponent)
               : db_to_linear(access_nlos_db) *
                     std::pow(r, -access_nlos_exponent);
  }
};

namespace detail {

struct ThreeGppLinear {
  double p_b, p_u, sigma_n2, sigma_l2, tau;
};

inline ThreeGppLinear threegpp_linear(const ThreeGppParams& p) {
  return {dbm_to_mw(p.p_b_dbm), dbm_to_mw(p.p_u_dbm),
          db_to_linear(p.sigma_n2_db), db_to_linear(p.sigma_l2_db), p.tau()};
}

enum class GppLink { access, peer };

// Sampled large-scale gain of one link: LOS draw, shadowing and path loss.
inline double gpp_link_gain(const ThreeGppParams& p, GppLink kind, double r,
                            RandomStream& stream) {
  const bool los = p.force_los || stream.uniform() < p.p_los(r);
  double shadow_db = 0.0;
  if (!p.disable_shadowing) {
    const double sigma = kind == GppLink::peer
                             ? p.shadow_peer_db
                             : (los ? p.shadow_access_los_db
                                    : p.shadow_access_nlos_db);
    shadow_db = sigma * stream.normal();
  } else {
    stream.normal();  // keep the stream layout fixed across probe modes
  }
  const double pl = kind == GppLink::peer ? p.pathloss_peer(r, los)
                                          : p.pathloss_access(r, los);
  return db_to_linear(shadow_db) * pl;
}

// Mean far-field interference beyond the window; out there the links are
// NLOS (p_los ~ 0 beyond a few km) with lognormal shadowing averaged out.
inline double gpp_far_field_mean(const ThreeGppParams& p, GppLink kind,
                                 double power, double w) {
  const double e = kind == GppLink::peer ? 4.0 : p.access_nlos_exponent;
  const double c = kind == GppLink::peer ? db_to_linear(p.peer_nlos_db)
                                         : db_to_linear(p.access_nlos_db);
  const double sigma = kind == GppLink::peer ? p.shadow_peer_db
                                             : p.shadow_access_nlos_db;
  const double ln10_10 = std::numbers::ln10 / 10.0;
  const double shadow_mean =
      p.disable_shadowing ? 1.0
                          : std::exp(0.5 * sigma * sigma * ln10_10 * ln10_10);
  return power * shadow_mean * c * 2.0 * std::numbers::pi * p.lambda /
         ((e - 2.0) * std::pow(w, e - 2.0));
}

}  // namespace detail

/// Monte Carlo outage estimate under the pico-cell model. The network
/// geometry mirrors estimate_outage_mc; only the per-link large-scale gain
/// changes, and noise is active.
inline OutageEstimate estimate_outage_3gpp(Scenario scn,
                                           const ThreeGppParams& params,
                                           const AntennaSystem& ant,
                                           std::uint64_t n_realizations,
                                           const SeedPolicy& seed,
                                           const McOptions& opts = {}) {
  params.validate();
  ant.validate();
  if (n_realizations < 100)
    throw std::invalid_argument("estimate_outage_3gpp: need >= 100 realizations");
  const auto lin = detail::threegpp_linear(params);
  const double lam = params.lambda;
  const double w = mc_window_radius(lam, opts);
  const double gb = antenna_gains(ant.m_b, ant.gamma_b).main;
  const double gu = antenna_gains(ant.m_u, ant.gamma_u).main;
  const bool uplink = is_uplink(scn);

  const std::uint64_t outages = detail::count_parallel(
      n_realizations, opts.workers, [&](std::uint64_t index) {
        RandomStream stream = realization_stream(seed, index);
        const double r = stream.nearest_distance(lam);
        const double h = stream.exponential();
        const double sig = (uplink ? lin.p_u : lin.p_b) * gb * gu * h *
                           detail::gpp_link_gain(params, detail::GppLink::access,
                                                 r, stream);
        double denom = lin.sigma_n2;
        if (has_loopback(scn) && lin.sigma_l2 > 0.0) {
          const double li_fade = stream.exponential();
          double gain, p_li;
          if (scn == Scenario::TwoD) {
            gain = gu * gu;
            p_li = lin.p_u;
          } else if (scn == Scenario::TwoU) {
            gain = gb * gb;
            p_li = lin.p_b;
          } else {
            p_li = lin.p_b;
            const int k = static_cast<int>(stream.uniform_index(ant.m_b));
            gain = k == 0 ? gb * gb
                          : gb * antenna_gains(ant.m_b, ant.gamma_b).side *
                                passive_suppression(
                                    sector_grid_angle(k, ant.m_b),
                                    ant.theta_max);
          }
          denom += p_li * gain * lin.sigma_l2 * li_fade;
        }

        detail::CasePair bs_pair, user_pair;
        if (!uplink) {
          bs_pair = detail::case_pair(ant.m_u, ant.gamma_u, ant.m_b,
                                      ant.gamma_b);
          user_pair = detail::case_pair(ant.m_u, ant.gamma_u, ant.m_u,
                                        ant.gamma_u);
        } else {
          bs_pair = detail::case_pair(ant.m_b, ant.gamma_b, ant.m_b,
                                      ant.gamma_b);
          user_pair = detail::case_pair(ant.m_b, ant.gamma_b, ant.m_u,
                                        ant.gamma_u);
        }
        // BS field: beyond the serving BS on the downlink, beyond the
        // nearest-neighbour distance on the uplink.
        const double bs_excl =
            uplink ? stream.nearest_distance(lam) : r;
        const detail::GppLink bs_link =
            uplink ? detail::GppLink::peer : detail::GppLink::access;
        {
          const double lo2 = std::min(bs_excl, w) * std::min(bs_excl, w);
          const std::uint64_t n =
              stream.poisson(lam * std::numbers::pi * (w * w - lo2));
          for (std::uint64_t i = 0; i < n; ++i) {
            const double d =
                std::sqrt(lo2 + stream.uniform() * (w * w - lo2));
            const double phi = stream.angle();
            const double orient = stream.angle();
            PlacedNode node{d * std::cos(phi), d * std::sin(phi), orient,
                            stream.exponential()};
            denom += detail::interferer_gain(node, bs_pair,
                                             opts.direct_case_sampling) *
                     node.fading * lin.p_b *
                     detail::gpp_link_gain(params, bs_link, d, stream);
          }
        }
        // user field: nearest-neighbour protected on the two-node downlink,
        // unprotected on the three-node downlink, thinned on the uplink.
        {
          const detail::GppLink u_link =
              uplink ? detail::GppLink::access : detail::GppLink::peer;
          const double excl = scn == Scenario::TwoD
                                  ? stream.nearest_distance(lam)
                                  : 0.0;
          const double lo2 = std::min(excl, w) * std::min(excl, w);
          const std::uint64_t n =
              stream.poisson(lam * std::numbers::pi * (w * w - lo2));
          for (std::uint64_t i = 0; i < n; ++i) {
            const double d2 = lo2 + stream.uniform() * (w * w - lo2);
            const double d = std::sqrt(d2);
            const double phi = stream.angle();
            const double orient = stream.angle();
            const double fade = stream.exponential();
            const double keep = stream.uniform();
            const double gain_draw =
                detail::gpp_link_gain(params, u_link, d, stream);
            if (uplink &&
                keep >= 1.0 - std::exp(-std::numbers::pi * lam * d2))
              continue;
            PlacedNode node{d * std::cos(phi), d * std::sin(phi), orient,
                            fade};
            denom += detail::interferer_gain(node, user_pair,
                                             opts.direct_case_sampling) *
                     fade * lin.p_u * gain_draw;
          }
        }
        if (opts.far_field_compensation) {
          denom += detail::gpp_far_field_mean(params, bs_link, lin.p_b, w);
          denom += detail::gpp_far_field_mean(
              params,
              uplink ? detail::GppLink::access : detail::GppLink::peer,
              lin.p_u, w);
        }
        if (denom == 0.0) return false;
        return sig / denom < lin.tau;
      });

  OutageEstimate est;
  est.value = static_cast<double>(outages) / n_realizations;
  est.method = Method::monte_carlo;
  est.n_realizations = n_realizations;
  est.std_error = std::sqrt(est.value * (1.0 - est.value) / n_realizations);
  return est;
}

}  // namespace fdnet
