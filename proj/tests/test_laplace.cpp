#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fdnet/laplace.hpp"
#include "fdnet/specfun.hpp"
#include "oracles.hpp"

using namespace fdnet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
NetworkConfig base_cfg() {
  NetworkConfig c;
  c.lambda = 0.01;
  c.alpha1 = 4.0;
  c.alpha2 = 4.0;
  c.sigma_l2 = 1e-3;
  return c;
}
AntennaSystem omni() { return AntennaSystem{}; }
}  // namespace

TEST_CASE("two-node loopback transform") {
  NetworkConfig cfg = base_cfg();
  AntennaSystem ant = omni();
  cfg.sigma_l2 = 0.0;
  CHECK(laplace_li_2node(3.7, cfg, ant, LinkEnd::user) == 1.0);
  cfg.sigma_l2 = 0.5;
  CHECK(laplace_li_2node(0.0, cfg, ant, LinkEnd::user) == 1.0);
  cfg.sigma_l2 = 1e-3;
  cfg.p_u_tx = 1.0;
  CHECK_THAT(laplace_li_2node(1.0, cfg, ant, LinkEnd::user),
             WithinRel(1.0 / 1.001, 1e-14));
  // BS side uses the BS's own power unless overridden
  cfg.p_b = 2.0;
  CHECK_THAT(laplace_li_2node(1.0, cfg, ant, LinkEnd::bs),
             WithinRel(1.0 / 1.002, 1e-14));
  cfg.bs_li_power = 1.0;
  CHECK_THAT(laplace_li_2node(1.0, cfg, ant, LinkEnd::bs),
             WithinRel(1.0 / 1.001, 1e-14));
}

TEST_CASE("three-node BS loopback transform") {
  NetworkConfig cfg = base_cfg();
  AntennaSystem ant = omni();

  SECTION("single sector reduces to the two-node transform") {
    cfg.sigma_l2 = 0.37;
    for (double s : {0.0, 0.5, 2.0, 50.0}) {
      CHECK(laplace_li_3u(s, cfg, ant) ==
            laplace_li_2node(s, cfg, ant, LinkEnd::bs));
    }
  }
  SECTION("perfect cancellation") {
    cfg.sigma_l2 = 0.0;
    ant.m_b = 8;
    CHECK(laplace_li_3u(123.0, cfg, ant) == 1.0);
  }
  SECTION("eight-sector value vs angle enumeration") {
    cfg.sigma_l2 = 1.0;
    cfg.p_b = 1.0;
    ant.m_b = 8;
    ant.gamma_b = 0.2;
    // recorded from an independent eight-angle sum during bring-up
    CHECK_THAT(laplace_li_3u(1.0, cfg, ant),
               WithinAbs(0.5263950523794473, 1e-12));
    const double g = 8.0 / (1.0 + 0.2 * 7.0);
    double sum = 1.0 / (1.0 + g * g);
    for (int k = 1; k < 8; ++k) {
      double th = 2.0 * std::numbers::pi * k / 8.0;
      if (th >= std::numbers::pi) th -= 2.0 * std::numbers::pi;
      const double f = std::min(
          1.0, std::exp(std::cos(2 * std::numbers::pi / 3) -
                        std::cos(std::abs(th) - 2 * std::numbers::pi / 3)));
      sum += 1.0 / (1.0 + g * (0.2 * g) * f);
    }
    CHECK_THAT(laplace_li_3u(1.0, cfg, ant), WithinRel(sum / 8.0, 1e-14));
  }
}

TEST_CASE("downlink BS interference transform") {
  NetworkConfig cfg = base_cfg();
  AntennaSystem ant = omni();
  CHECK(laplace_interference_bs_down(5.0, 0.0, cfg, ant) == 1.0);
  CHECK(laplace_interference_bs_down(0.0, 1.0, cfg, ant) == 1.0);
  CHECK_THAT(laplace_interference_bs_down(5.0, 1.0, cfg, ant),
             WithinAbs(0.5396414858162972, 1e-12));
}

TEST_CASE("downlink BS interference vs point-process oracle") {
  // E[exp(-tau r^4 sum |g|^2 d^-4)] over a Poisson field beyond r = 5,
  // estimated by brute-force sampling.
  const double lam = 0.01, r = 5.0, tau = 1.0, w = 300.0;
  std::mt19937_64 eng(42);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double area = std::numbers::pi * (w * w - r * r);
  std::poisson_distribution<int> pois(lam * area);
  const int draws = 30000;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    int n = pois(eng);
    double I = 0.0;
    for (int j = 0; j < n; ++j) {
      const double d2 = r * r + uni(eng) * (w * w - r * r);
      I += -std::log(1.0 - uni(eng)) / (d2 * d2);
    }
    const double v = std::exp(-tau * r * r * r * r * I);
    acc += v;
    acc2 += v * v;
  }
  const double mean = acc / draws;
  const double se = std::sqrt((acc2 / draws - mean * mean) / draws);
  NetworkConfig cfg = base_cfg();
  AntennaSystem ant = omni();
  const double analytic = laplace_interference_bs_down(r, tau, cfg, ant);
  CHECK_THAT(analytic, WithinAbs(mean, 4.0 * se + 3e-4));
}

TEST_CASE("two-node downlink user interference transform") {
  NetworkConfig cfg = base_cfg();
  cfg.alpha2 = 3.0;
  cfg.p_u_tx = 1.0;
  AntennaSystem ant = omni();
  CHECK(laplace_interference_user_2d(0.0, cfg, ant) == 1.0);
  // recorded from a nested scipy integration during bring-up
  CHECK_THAT(laplace_interference_user_2d(10.0, cfg, ant),
             WithinAbs(0.8625090551837143, 1e-9));

  SECTION("monotone in s") {
    double prev = 1.0;
    for (double s : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
      const double v = laplace_interference_user_2d(s, cfg, ant);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("two-node downlink user interference vs nested trapezoid oracle") {
  // L = 2 pi lam int rho exp(-pi rho^2 lam - 2 pi lam inner(rho)) drho with
  // inner(rho) = int_rho^inf (1 - 1/(1 + c y^-3)) y dy, c = s P_u = 10.
  const double lam = 0.01, c = 10.0;
  const double ymax = 600.0, h = 0.01;
  const long ny = static_cast<long>(ymax / h);
  std::vector<double> cum(ny + 1, 0.0);
  auto g = [&](double y) {
    return y <= 0.0 ? 0.0 : c / (y * y * (1.0 + c / (y * y * y)));
  };
  for (long i = ny - 1; i >= 0; --i) {
    const double y0 = i * h, y1 = (i + 1) * h;
    cum[i] = cum[i + 1] + 0.5 * h * (g(y0) + g(y1));
  }
  const double tail = c / ymax;  // int_Y^inf c y^-2 dy, exact to O(c/Y^4)
  double outer = 0.0;
  const double rmax = 60.0;
  const long nr = static_cast<long>(rmax / h);
  for (long i = 0; i <= nr; ++i) {
    const double rho = i * h;
    const long idx = std::min(i, ny);
    const double inner = cum[idx] + tail;
    const double val =
        rho * std::exp(-std::numbers::pi * rho * rho * lam -
                       2.0 * std::numbers::pi * lam * (inner));
    outer += (i == 0 || i == nr) ? 0.5 * val : val;
  }
  outer *= h * 2.0 * std::numbers::pi * lam;

  NetworkConfig cfg = base_cfg();
  cfg.alpha2 = 3.0;
  AntennaSystem ant = omni();
  CHECK_THAT(laplace_interference_user_2d(10.0, cfg, ant),
             WithinAbs(outer, 2e-4));
}

TEST_CASE("three-node downlink user interference transform") {
  NetworkConfig cfg = base_cfg();
  AntennaSystem ant = omni();
  CHECK(laplace_interference_user_3d(0.0, cfg, ant) == 1.0);
  const double expo = (2.0 * std::numbers::pi * std::numbers::pi * 0.01 / 4.0);
  CHECK_THAT(laplace_interference_user_3d(1.0, cfg, ant),
             WithinRel(std::exp(-expo), 1e-12));
}

TEST_CASE("unprotected-field limit matches the closed form") {
  // Integrating the protected-field exponent from zero reproduces the
  // cosecant-form transform.
  const double s = 2.0, lam = 0.01;
  NetworkConfig cfg = base_cfg();
  AntennaSystem ant = omni();
  for (double a2 : {3.0, 4.0}) {
    cfg.alpha2 = a2;
    auto integrand = [&](double y) {
      return (1.0 - 1.0 / (1.0 + s * std::pow(y, -a2))) * y;
    };
    const double num =
        integrate_to_infinity_checked(integrand, 0.0, QuadratureSpec{});
    const double closed = (std::numbers::pi / a2) * csc_2pi_over(a2) *
                          std::pow(s, 2.0 / a2);
    CHECK_THAT(2.0 * std::numbers::pi * lam * num,
               WithinRel(2.0 * std::numbers::pi * lam * closed, 1e-8));
    CHECK_THAT(laplace_interference_user_3d(s, cfg, ant),
               WithinRel(std::exp(-2.0 * std::numbers::pi * lam * num), 1e-8));
  }
}

TEST_CASE("uplink BS interference transform mirrors the downlink form") {
  NetworkConfig cfg = base_cfg();
  cfg.alpha2 = 3.0;
  cfg.p_b = 10.0;
  cfg.p_u_tx = 123.0;  // must not enter
  AntennaSystem ant = omni();
  CHECK(laplace_interference_bs_up(0.0, cfg, ant) == 1.0);
  CHECK_THAT(laplace_interference_bs_up(1.0, cfg, ant),
             WithinAbs(0.8625090551837143, 1e-9));
  double prev = 1.0;
  for (double s : {0.1, 1.0, 10.0}) {
    const double v = laplace_interference_bs_up(s, cfg, ant);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("uplink user interference transform") {
  NetworkConfig cfg = base_cfg();
  cfg.alpha1 = 4.0;
  AntennaSystem ant = omni();
  CHECK(laplace_interference_user_3u(0.0, cfg, ant) == 1.0);
  // recorded during bring-up: exp(-pi lam (pi/2 - 1.4480505062662612))
  CHECK_THAT(laplace_interference_user_3u(1.0, cfg, ant),
             WithinAbs(0.9961512518096842, 1e-9));

  SECTION("correction integral vs trapezoid oracle") {
    const double lam = 0.01;
    auto f = [&](double z) {
      return std::exp(-std::numbers::pi * lam * z) / (1.0 + z * z);
    };
    const double corr = oracles::trapezoid(f, 0.0, 600.0, 600000);
    CHECK_THAT(corr, WithinAbs(1.4480505062662612, 1e-6));
  }

  SECTION("homogeneous field bounds the transform from below") {
    for (double s : {0.5, 2.0, 20.0}) {
      const double full = laplace_interference_user_3u(s, cfg, ant);
      const double homog = std::exp(
          -std::numbers::pi * cfg.lambda * (2.0 * std::numbers::pi / 4.0) *
          csc_2pi_over(4.0) * std::sqrt(s));
      CHECK(full >= homog);
    }
  }
}

TEST_CASE("all transforms lie in (0,1] and decrease in s") {
  NetworkConfig cfg = base_cfg();
  cfg.alpha2 = 3.5;
  AntennaSystem ant;
  ant.m_b = 4;
  ant.m_u = 2;
  ant.gamma_b = 0.3;
  ant.gamma_u = 0.1;
  const std::vector<double> ss = {0.0, 0.3, 3.0, 30.0, 300.0};
  auto check_dec = [&](auto&& f) {
    double prev = 1.0 + 1e-12;
    for (double s : ss) {
      const double v = f(s);
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
  };
  check_dec([&](double s) { return laplace_li_2node(s, cfg, ant, LinkEnd::user); });
  check_dec([&](double s) { return laplace_li_3u(s, cfg, ant); });
  check_dec([&](double s) { return laplace_interference_user_2d(s, cfg, ant); });
  check_dec([&](double s) { return laplace_interference_user_3d(s, cfg, ant); });
  check_dec([&](double s) { return laplace_interference_bs_up(s, cfg, ant); });
  check_dec([&](double s) { return laplace_interference_user_3u(s, cfg, ant); });
}
