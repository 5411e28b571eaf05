#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fdnet/outage.hpp"
#include "oracles.hpp"

using namespace fdnet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
NetworkConfig cfg_default(double rate = 1.0, double sl2 = 0.0,
                          double a1 = 4.0, double a2 = 4.0,
                          double lambda = 0.01) {
  NetworkConfig c;
  c.lambda = lambda;
  c.alpha1 = a1;
  c.alpha2 = a2;
  c.rate = rate;
  c.sigma_l2 = sl2;
  return c;
}
AntennaSystem ant_m(int m, double gamma = 0.2) {
  AntennaSystem a;
  a.m_b = a.m_u = m;
  a.gamma_b = a.gamma_u = gamma;
  return a;
}
constexpr double kAnchor3D = 0.7020434891594469;  // 1 - 1/(1 + 3 pi / 4)
}  // namespace

TEST_CASE("vanishing threshold gives zero outage") {
  NetworkConfig cfg = cfg_default(1e-300);
  for (Scenario s :
       {Scenario::TwoD, Scenario::TwoU, Scenario::ThreeD, Scenario::ThreeU}) {
    auto est = outage(s, cfg, ant_m(4));
    CHECK(est.value == 0.0);
  }
  // uplink outage scales like sqrt(tau) through the cosecant term
  cfg = cfg_default(1e-6, 1e-3, 4.0, 3.0);
  for (Scenario s :
       {Scenario::TwoD, Scenario::TwoU, Scenario::ThreeD, Scenario::ThreeU}) {
    CHECK(outage(s, cfg, ant_m(4)).value < 1e-3);
  }
}

TEST_CASE("three-node downlink closed-form anchor via all routes") {
  NetworkConfig cfg = cfg_default(1.0);
  AntennaSystem omni = ant_m(1);
  const auto sp = SpecialCaseParams::from(cfg, omni);

  const double via_theorem = outage(Scenario::ThreeD, cfg, omni).value;
  const double via_closed = outage_3d_special(cfg, sp).value;
  CHECK_THAT(1.0 - 1.0 / (1.0 + 0.75 * std::numbers::pi),
             WithinAbs(kAnchor3D, 1e-15));
  CHECK_THAT(via_theorem, WithinRel(kAnchor3D, 1e-7));
  CHECK_THAT(via_closed, WithinRel(kAnchor3D, 1e-9));
}

TEST_CASE("theorem evaluations match an independent implementation") {
  // Values recorded from a scipy-based evaluation of the same expressions.
  struct Row {
    Scenario scn;
    double rate, a2, sl2;
    int m;
    double expected;
  };
  const Row rows[] = {
      {Scenario::TwoD, 1.0, 4.0, 1e-3, 1, 0.6559401595580368},
      {Scenario::TwoD, 1.0, 4.0, 0.0, 1, 0.6002242062913995},
      {Scenario::TwoD, 1.0, 4.0, 1e-3, 4, 0.4745334161393001},
      {Scenario::ThreeD, 4.0, 4.0, 0.0, 8, 0.7133981925530446},
      {Scenario::TwoU, 0.1, 3.0, 1e-3, 1, 0.4674530400738677},
      {Scenario::ThreeU, 1.0, 3.0, 1e-3, 4, 0.5749815007245547},
      {Scenario::TwoU, 1.0, 3.0, 1e-3, 4, 0.6152993475963943},
  };
  for (const Row& r : rows) {
    NetworkConfig cfg = cfg_default(r.rate, r.sl2, 4.0, r.a2);
    auto est = outage(r.scn, cfg, ant_m(r.m));
    INFO(scenario_name(r.scn) << " M=" << r.m << " R=" << r.rate);
    CHECK_THAT(est.value, WithinAbs(r.expected, 5e-7));
  }
}

TEST_CASE("closest-interferer approximation closed-form anchors") {
  NetworkConfig cfg = cfg_default(1.0);
  const auto sp = SpecialCaseParams::from(cfg, ant_m(1));
  CHECK_THAT(outage_approx_fd(Scenario::TwoD, cfg, sp).value,
             WithinRel(1.0 - 1.0 / (1.0 + std::numbers::pi / 2.0), 1e-8));
  CHECK_THAT(outage_approx_fd(Scenario::TwoU, cfg, sp).value,
             WithinRel(kAnchor3D, 1e-8));
  CHECK_THAT(outage_approx_fd(Scenario::ThreeU, cfg, sp).value,
             WithinRel(kAnchor3D, 1e-8));
}

TEST_CASE("uplink approximation upper-bounds the theorem outage") {
  // The homogeneous-field assumption dominates: the approximation
  // overstates interference, hence outage.
  for (int m : {2, 4, 8}) {
    for (double rate : {0.5, 1.0}) {
      NetworkConfig cfg = cfg_default(rate, 1e-3, 4.0, 3.0);
      const auto sp = SpecialCaseParams::from(cfg, ant_m(m));
      const double approx2u = outage_approx_fd(Scenario::TwoU, cfg, sp).value;
      const double thm2u = outage(Scenario::TwoU, cfg, ant_m(m)).value;
      CHECK(approx2u >= thm2u);
      const double approx3u = outage_approx_fd(Scenario::ThreeU, cfg, sp).value;
      const double thm3u = outage(Scenario::ThreeU, cfg, ant_m(m)).value;
      CHECK(approx3u >= thm3u);
    }
  }
}

TEST_CASE("three-node special case, quadrature vs closed form vs enumeration") {
  NetworkConfig cfg = cfg_default(1.0);
  const auto sp = SpecialCaseParams::from(cfg, ant_m(8));
  const double val = outage_3d_special(cfg, sp).value;

  // term enumeration over the four (weight, gain) pairs
  const double tau = 1.0, g = 0.2;
  const double lam_w[4] = {1.0 / 64, 7.0 / 64, 7.0 / 64, 49.0 / 64};
  const double gam_f[4] = {1.0, g, g, g * g};
  double t = 0.0;
  for (int i = 0; i < 4; ++i) {
    t += lam_w[i] * (oracles::series_F_pfaff(4.0, gam_f[i] * tau) * gam_f[i] *
                         tau +
                     0.5 * std::numbers::pi * std::sqrt(gam_f[i] * tau));
  }
  CHECK_THAT(val, WithinRel(1.0 - 1.0 / (1.0 + t), 1e-9));

  // interference-free limit: huge M with zero side lobes
  NetworkConfig cfg2 = cfg_default(1.0);
  SpecialCaseParams sp2{1024, 0.0, sp.theta_max};
  CHECK(outage_3d_special(cfg2, sp2).value < 1e-5);

  // general exponents run through the quadrature path
  NetworkConfig cfg3 = cfg_default(1.0, 0.0, 4.0, 3.0);
  const double q = outage_3d_special(cfg3, sp).value;
  CHECK(q > 0.0);
  CHECK(q < 1.0);
}

TEST_CASE("special-case parameter gate") {
  NetworkConfig cfg = cfg_default(1.0);
  AntennaSystem bad = ant_m(4);
  bad.m_u = 2;
  CHECK_THROWS_AS(SpecialCaseParams::from(cfg, bad), std::invalid_argument);
  bad = ant_m(4);
  bad.gamma_u = 0.3;
  CHECK_THROWS_AS(SpecialCaseParams::from(cfg, bad), std::invalid_argument);
  cfg.sigma_n2 = 0.1;
  CHECK_THROWS_AS(SpecialCaseParams::from(cfg, ant_m(4)), std::invalid_argument);
  cfg = cfg_default(1.0);
  cfg.p_b = 2.0;
  CHECK_THROWS_AS(SpecialCaseParams::from(cfg, ant_m(4)), std::invalid_argument);
}

TEST_CASE("asymptotic outage behaviour") {
  SECTION("side lobes to zero kills the three-node uplink outage") {
    NetworkConfig cfg = cfg_default(1.0, 0.1, 4.0, 3.0);
    SpecialCaseParams sp{1, 1e-4, 2 * std::numbers::pi / 3};
    CHECK(outage_asymptotic(Scenario::ThreeU, cfg, sp).value < 1e-2);
  }
  SECTION("side lobes to zero leaves only the loopback term on 2D") {
    NetworkConfig cfg = cfg_default(1.0, 0.05);
    SpecialCaseParams sp{1, 1e-7, 2 * std::numbers::pi / 3};
    const double val = outage_asymptotic(Scenario::TwoD, cfg, sp).value;
    // loopback-only integral: 1 - 2 int u e^-u^2 / (1 + sl2 tau r^4) du
    const double scale = std::sqrt(cfg.lambda * std::numbers::pi);
    auto f = [&](double u) {
      const double r = u / scale;
      return u * std::exp(-u * u) / (1.0 + 0.05 * std::pow(r, 4.0));
    };
    const double li_only =
        1.0 - 2.0 * oracles::simpson(f, 0.0, 8.0, 400000);
    CHECK_THAT(val, WithinAbs(li_only, 1e-6));
  }
  SECTION("finite-M approximation converges to the asymptotic value") {
    for (Scenario s : {Scenario::TwoD, Scenario::TwoU, Scenario::ThreeU}) {
      for (double sl2 : {0.0, 0.1}) {
        NetworkConfig cfg = cfg_default(0.5, sl2, 4.0,
                                        is_uplink(s) ? 3.0 : 4.0);
        SpecialCaseParams sp8{8, 0.2, 2 * std::numbers::pi / 3};
        SpecialCaseParams sp64{64, 0.2, 2 * std::numbers::pi / 3};
        const double asym = outage_asymptotic(s, cfg, sp8).value;
        const double at8 = outage_approx_fd(s, cfg, sp8).value;
        const double at64 = outage_approx_fd(s, cfg, sp64).value;
        INFO(scenario_name(s) << " sl2=" << sl2);
        CHECK(std::abs(at64 - asym) < std::abs(at8 - asym));
      }
    }
  }
}

TEST_CASE("equal-exponent closed form at alpha = 4") {
  SECTION("perfect cancellation closed forms and density independence") {
    for (double lambda : {1e-3, 1e-2, 1e-1}) {
      NetworkConfig cfg = cfg_default(1.0, 0.0, 4.0, 4.0, lambda);
      const auto sp = SpecialCaseParams::from(cfg, ant_m(1));
      CHECK(outage_alpha4_closed(Scenario::TwoD, cfg, sp).value ==
            outage_alpha4_closed(Scenario::TwoD, cfg_default(1.0), sp).value);
      CHECK_THAT(outage_alpha4_closed(Scenario::TwoU, cfg, sp).value,
                 WithinRel(kAnchor3D, 1e-12));
    }
  }
  SECTION("imperfect cancellation equals the approximation route") {
    for (int m : {1, 4}) {
      for (Scenario s : {Scenario::TwoD, Scenario::TwoU, Scenario::ThreeU}) {
        NetworkConfig cfg = cfg_default(1.0, 1e-3);
        const auto sp = SpecialCaseParams::from(cfg, ant_m(m));
        const double a = outage_alpha4_closed(s, cfg, sp).value;
        const double b = outage_approx_fd(s, cfg, sp).value;
        INFO(scenario_name(s) << " M=" << m);
        CHECK_THAT(a, WithinRel(b, 1e-8));
      }
    }
  }
  SECTION("domain gate") {
    NetworkConfig cfg = cfg_default(1.0, 0.0, 4.0, 3.0);
    const auto sp = SpecialCaseParams::from(cfg, ant_m(1));
    CHECK_THROWS_AS(outage_alpha4_closed(Scenario::TwoD, cfg, sp),
                    std::invalid_argument);
  }
}

TEST_CASE("probability clamp accepts rounding noise only") {
  CHECK(clamp_probability(-1e-10, "t") == 0.0);
  CHECK(clamp_probability(1.0 + 1e-10, "t") == 1.0);
  CHECK(clamp_probability(0.25, "t") == 0.25);
  CHECK_THROWS_AS(clamp_probability(-1e-8, "t"), std::range_error);
  CHECK_THROWS_AS(clamp_probability(1.0 + 1e-8, "t"), std::range_error);
}

TEST_CASE("outage monotone in the target rate") {
  for (Scenario s :
       {Scenario::TwoD, Scenario::ThreeD, Scenario::TwoU, Scenario::ThreeU}) {
    double prev = -1.0;
    for (double rate : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      NetworkConfig cfg = cfg_default(rate, 1e-3, 4.0,
                                      is_uplink(s) ? 3.0 : 4.0);
      const double v = outage(s, cfg, ant_m(4)).value;
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("perfect-cancellation equality of the uplink architectures") {
  for (int m : {2, 8}) {
    NetworkConfig cfg = cfg_default(1.0, 0.0, 4.0, 3.0);
    const double u2 = outage(Scenario::TwoU, cfg, ant_m(m)).value;
    const double u3 = outage(Scenario::ThreeU, cfg, ant_m(m)).value;
    CHECK_THAT(u2, WithinRel(u3, 1e-9));
  }
}

TEST_CASE("density drives the FD outage to the perfect-cancellation value") {
  NetworkConfig base = cfg_default(1.0, 1e-1, 4.0, 3.0);
  const auto sp = SpecialCaseParams::from(base, ant_m(8));
  double prev_gap = 1e9;
  for (double lambda : {0.01, 0.1, 0.5, 1.0}) {
    NetworkConfig cfg = base;
    cfg.lambda = lambda;
    NetworkConfig perfect = cfg;
    perfect.sigma_l2 = 0.0;
    const double gap = outage_approx_fd(Scenario::ThreeU, cfg, sp).value -
                       outage_approx_fd(Scenario::ThreeU, perfect, sp).value;
    CHECK(gap >= -1e-9);
    CHECK(gap < prev_gap + 1e-12);
    prev_gap = gap;
  }
}
