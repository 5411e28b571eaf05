#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fdnet/config.hpp"
#include "fdnet/montecarlo.hpp"
#include "fdnet/outage.hpp"

namespace fdnet {

/// Architecture mix of a composite network: a cell runs the two-node
/// architecture with probability p_2n, and FD users spend a fraction p_u of
/// their time in bidirectional mode. Active uplink FD users then form a
/// process of density p_u * p_2n * lambda.
struct CompositeMix {
  double p_2n = 0.5;
  double p_u = 1.0;

  double p_3n() const { return 1.0 - p_2n; }
  /// Density factor of same-channel uplink transmitters.
  double uplink_user_fraction() const { return p_u * p_2n + p_3n(); }

  void validate() const {
    if (p_2n < 0.0 || p_2n > 1.0 || p_u < 0.0 || p_u > 1.0)
      throw std::invalid_argument("CompositeMix: fractions must lie in [0,1]");
  }
};

struct CompositeOutage {
  double two_node;    // P'_2D or P'_2U
  double three_node;  // P'_3D or P'_3U
  double mixed;       // Pi = p_2n * two_node + p_3n * three_node
};

struct ThroughputResult {
  double throughput;        // bpcu per unit area
  double downlink_success;  // 1 - Pi_d
  double uplink_success;    // 1 - Pi_u
  CompositeMix mix;
};

enum class LinkDirection { downlink, uplink };

namespace detail {

// Composite results live in the large-M regime: interference arrives on the
// side lobes only, with power gain gamma^2.

inline double g_composite_2d(double tau, double alpha, double gamma,
                             const CompositeMix& mix) {
  const double g2 = gamma * gamma;
  return 1.0 + (2.0 * tau * g2 / (alpha - 2.0)) * hyp_F(alpha, g2 * tau) *
                   (mix.uplink_user_fraction() + 1.0);
}

inline double g_composite_uplink(double r, double tau, double a1, double a2,
                                 double gamma, const CompositeMix& mix) {
  const double g2 = gamma * gamma;
  const double rd = std::pow(r, a1 - a2);
  return 1.0 +
         (2.0 * std::numbers::pi * std::pow(tau, 2.0 / a1) / a1) *
             csc_2pi_over(a1) * std::pow(gamma, 4.0 / a1) *
             mix.uplink_user_fraction() +
         (2.0 * rd * tau / (a2 - 2.0)) * g2 * hyp_F(a2, rd * g2 * tau);
}

inline void require_equal_alpha(const NetworkConfig& cfg, const char* what) {
  if (cfg.alpha1 != cfg.alpha2)
    throw std::invalid_argument(std::string(what) +
                                ": requires alpha1 == alpha2");
}

}  // namespace detail

/// Downlink outage split of a composite network: the FD-mode receiver's
/// outage, the HD-mode receiver's closed form and their mixture.
/// Requires the special-case assumptions with a single exponent alpha.
inline CompositeOutage composite_outage_downlink(
    const NetworkConfig& cfg, const SpecialCaseParams& sp,
    const CompositeMix& mix, const AnalyticOptions& opts = {}) {
  detail::require_equal_alpha(cfg, "composite_outage_downlink");
  mix.validate();
  const double tau = cfg.tau();
  const double alpha = cfg.alpha1;
  const double g2 = sp.gamma * sp.gamma;
  const double sl2 = cfg.sigma_l2;

  const double g_2d = detail::g_composite_2d(tau, alpha, sp.gamma, mix);
  double p_2d;
  if (sl2 == 0.0) {
    p_2d = 1.0 - 1.0 / g_2d;
  } else {
    auto g_of_r = [&](double) { return g_2d; };
    auto li = [&](double r) {
      return 1.0 / (1.0 + sl2 * tau * std::pow(r, alpha));
    };
    p_2d = detail::special_case_integral(cfg, g_of_r, li, opts,
                                         "composite_outage_downlink")
               .value;
  }

  const double fac = mix.uplink_user_fraction();
  const double denom =
      (alpha - 2.0) * (alpha + 2.0 * std::numbers::pi *
                                   std::pow(tau * g2, 2.0 / alpha) *
                                   csc_2pi_over(alpha) * fac) +
      2.0 * alpha * g2 * tau * hyp_F(alpha, g2 * tau);
  const double p_3d = 1.0 - alpha * (alpha - 2.0) / denom;

  return {p_2d, p_3d, mix.p_2n * p_2d + mix.p_3n() * p_3d};
}

/// Uplink outage split of a composite network; (alpha1, alpha2) free.
inline CompositeOutage composite_outage_uplink(const NetworkConfig& cfg,
                                               const SpecialCaseParams& sp,
                                               const CompositeMix& mix,
                                               const AnalyticOptions& opts = {}) {
  mix.validate();
  const double tau = cfg.tau();
  const double sl2 = cfg.sigma_l2;
  const QuadratureSpec inner = opts.quad.tightened(opts.inner_tol_factor);

  auto g_of_r = [&](double r) {
    return detail::g_composite_uplink(r, tau, cfg.alpha1, cfg.alpha2, sp.gamma,
                                      mix);
  };
  auto li_2u = [&](double r) {
    if (sl2 == 0.0) return 1.0;
    return 1.0 / (1.0 + sl2 * tau * std::pow(r, cfg.alpha1));
  };
  auto li_3u = [&](double r) {
    if (sl2 == 0.0) return 1.0;
    const double x = sl2 * tau * std::pow(r, cfg.alpha1);
    return detail::li_factor_equal_3u_average(x, sp.gamma, sp.theta_max,
                                              inner);
  };
  const double p_2u =
      detail::special_case_integral(cfg, g_of_r, li_2u, opts,
                                    "composite_outage_uplink")
          .value;
  const double p_3u =
      sl2 == 0.0 ? p_2u
                 : detail::special_case_integral(cfg, g_of_r, li_3u, opts,
                                                 "composite_outage_uplink")
                       .value;
  return {p_2u, p_3u, mix.p_2n * p_2u + mix.p_3n() * p_3u};
}

/// Network throughput of the composite mix. The downlink runs at the single
/// exponent alpha1 (the composite downlink regime); the uplink keeps its own
/// (alpha1, alpha2) pair, matching how the two links are reported together.
inline ThroughputResult throughput(const NetworkConfig& cfg,
                                   const SpecialCaseParams& sp,
                                   const CompositeMix& mix,
                                   const AnalyticOptions& opts = {}) {
  mix.validate();
  NetworkConfig down_cfg = cfg;
  down_cfg.alpha2 = cfg.alpha1;
  const CompositeOutage d =
      composite_outage_downlink(down_cfg, sp, mix, opts);
  const CompositeOutage u = composite_outage_uplink(cfg, sp, mix, opts);
  const double rate_factor = std::log2(1.0 + cfg.tau());
  const double t =
      cfg.lambda * (1.0 - d.mixed) * rate_factor +
      cfg.lambda * mix.uplink_user_fraction() * (1.0 - u.mixed) * rate_factor;
  return {t, 1.0 - d.mixed, 1.0 - u.mixed, mix};
}

struct OptimumPoint {
  double p_2n;
  double value;
};

/// Maximizes the chosen link's success probability over the two-node cell
/// fraction p_2n in [0,1]: coarse 201-point grid then golden-section
/// refinement to 1e-4. Bracketed search is used instead of a projected
/// gradient; the feasible set is one-dimensional.
inline OptimumPoint optimize_p2n_success(LinkDirection direction,
                                         const NetworkConfig& cfg,
                                         const SpecialCaseParams& sp,
                                         double p_u,
                                         const AnalyticOptions& opts = {}) {
  NetworkConfig link_cfg = cfg;
  if (direction == LinkDirection::downlink) link_cfg.alpha2 = cfg.alpha1;
  auto objective = [&](double p_2n) {
    CompositeMix mix{p_2n, p_u};
    const CompositeOutage out =
        direction == LinkDirection::downlink
            ? composite_outage_downlink(link_cfg, sp, mix, opts)
            : composite_outage_uplink(link_cfg, sp, mix, opts);
    return 1.0 - out.mixed;
  };
  const int grid_points = 201;
  int best_idx = 0;
  double best = -1.0;
  for (int i = 0; i < grid_points; ++i) {
    const double v = objective(i / 200.0);
    if (v > best) {
      best = v;
      best_idx = i;
    }
  }
  double lo = std::max(0, best_idx - 1) / 200.0;
  double hi = std::min(200, best_idx + 1) / 200.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = objective(c), fd = objective(d);
  while (hi - lo > 1e-4) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = objective(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = objective(d);
    }
  }
  // keep whichever of the refined point, bracket ends and grid best wins,
  // so boundary optima are returned exactly
  OptimumPoint result{best_idx / 200.0, best};
  for (double cand : {0.5 * (lo + hi), lo, hi}) {
    const double v = objective(cand);
    if (v > result.value) result = {cand, v};
  }
  return result;
}

/// Bang-bang throughput optimum at p_u = 1: evaluates the sign condition on
/// the derivative of the (linear) throughput in p_2n and returns the winning
/// boundary along with its throughput.
inline OptimumPoint optimize_p2n_throughput(const NetworkConfig& cfg,
                                            const SpecialCaseParams& sp,
                                            const AnalyticOptions& opts = {}) {
  const double tau = cfg.tau();
  const double alpha = cfg.alpha1;  // downlink exponent
  const double g2 = sp.gamma * sp.gamma;
  const double sl2 = cfg.sigma_l2;
  const CompositeMix full{1.0, 1.0};
  const QuadratureSpec inner = opts.quad.tightened(opts.inner_tol_factor);

  const double g_2d = detail::g_composite_2d(tau, alpha, sp.gamma, full);
  const double scale = std::sqrt(cfg.lambda * std::numbers::pi);
  auto integrand = [&](double u) {
    const double r = u / scale;
    const double ra = std::pow(r, cfg.alpha1);
    const double li_2d =
        sl2 == 0.0 ? 1.0 : 1.0 / (1.0 + sl2 * tau * std::pow(r, alpha));
    const double li_2u = sl2 == 0.0 ? 1.0 : 1.0 / (1.0 + sl2 * tau * ra);
    const double li_3u =
        sl2 == 0.0 ? 1.0
                   : detail::li_factor_equal_3u_average(
                         sl2 * tau * ra, sp.gamma, sp.theta_max, inner);
    const double gu =
        detail::g_composite_uplink(r, tau, cfg.alpha1, cfg.alpha2, sp.gamma,
                                   full);
    double acc = 0.0;
    const double e2d = u * u * g_2d;
    if (e2d < 700.0) acc += li_2d * std::exp(-e2d);
    const double eu = u * u * gu;
    if (eu < 700.0) acc += (li_2u - li_3u) * std::exp(-eu);
    return u * acc;
  };
  const double lhs = 2.0 * integrate_to_infinity_checked(
                               integrand, 0.0, opts.quad,
                               "optimize_p2n_throughput");
  const double rhs =
      2.0 / (1.0 +
             (4.0 * std::numbers::pi / alpha) *
                 std::pow(tau * g2, 2.0 / alpha) * csc_2pi_over(alpha) +
             g_2d);
  const double star = lhs > rhs ? 1.0 : 0.0;
  return {star, throughput(cfg, sp, CompositeMix{star, 1.0}, opts).throughput};
}

/// Monte Carlo estimator of the composite outage in the same large-M regime
/// the analytic split uses: side-lobe-only interference, per-cell
/// architecture mixed by a Bernoulli(p_2n) draw and the uplink user process
/// thinned to the active fraction.
inline OutageEstimate estimate_composite_outage_mc(
    LinkDirection direction, const NetworkConfig& cfg,
    const SpecialCaseParams& sp, const CompositeMix& mix,
    std::uint64_t n_realizations, const SeedPolicy& seed,
    const McOptions& opts = {}) {
  mix.validate();
  if (direction == LinkDirection::downlink)
    detail::require_equal_alpha(cfg, "estimate_composite_outage_mc");
  if (n_realizations < 100)
    throw std::invalid_argument(
        "estimate_composite_outage_mc: need >= 100 realizations");
  const double tau = cfg.tau();
  const double g2 = sp.gamma * sp.gamma;
  const double w = mc_window_radius(cfg.lambda, opts);
  const double lam = cfg.lambda;
  const double ud = mix.uplink_user_fraction();
  const double sl2 = cfg.sigma_l2;

  const std::uint64_t outages = detail::count_parallel(
      n_realizations, opts.workers, [&](std::uint64_t index) {
        RandomStream stream = realization_stream(seed, index);
        const bool two_node = stream.uniform() < mix.p_2n;
        const double r = stream.nearest_distance(lam);
        const double a_sig = cfg.alpha1;
        const double sig = stream.exponential() * std::pow(r, -a_sig);
        double interf = 0.0;
        auto add_field = [&](double density, double alpha, double r_min) {
          const double lo2 = std::min(r_min, w) * std::min(r_min, w);
          const std::uint64_t n =
              stream.poisson(density * std::numbers::pi * (w * w - lo2));
          for (std::uint64_t i = 0; i < n; ++i) {
            const double d2 = lo2 + stream.uniform() * (w * w - lo2);
            interf += g2 * stream.exponential() * std::pow(d2, -0.5 * alpha);
          }
          if (opts.far_field_compensation)
            interf += g2 * 2.0 * std::numbers::pi * density /
                      ((alpha - 2.0) * std::pow(w, alpha - 2.0));
        };
        if (direction == LinkDirection::downlink) {
          add_field(lam, cfg.alpha1, r);       // BSs beyond the serving BS
          // FD receivers are distance-protected; HD receivers see the
          // intra-cell uplink user.
          add_field(ud * lam, cfg.alpha1, two_node ? r : 0.0);
          if (two_node && sl2 > 0.0)
            interf += sl2 * stream.exponential();
        } else {
          add_field(lam, cfg.alpha2, r);       // out-of-cell BSs
          add_field(ud * lam, cfg.alpha1, 0.0);  // homogeneous user field
          if (sl2 > 0.0) {
            if (two_node) {
              interf += sl2 * stream.exponential();
            } else {
              const double theta = stream.angle();
              interf += sp.gamma * passive_suppression(theta, sp.theta_max) *
                        sl2 * stream.exponential();
            }
          }
        }
        if (interf == 0.0) return false;
        return sig / interf < tau;
      });

  OutageEstimate est;
  est.value = static_cast<double>(outages) / n_realizations;
  est.method = Method::monte_carlo;
  est.n_realizations = n_realizations;
  est.std_error = std::sqrt(est.value * (1.0 - est.value) / n_realizations);
  return est;
}

}  // namespace fdnet
