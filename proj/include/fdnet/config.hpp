#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace fdnet {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

/// Which architecture/link a computation targets.
enum class Scenario { TwoD, TwoU, ThreeD, ThreeU };

inline bool is_uplink(Scenario s) {
  return s == Scenario::TwoU || s == Scenario::ThreeU;
}
/// The three-node downlink receiver is half-duplex: no loopback term.
inline bool has_loopback(Scenario s) { return s != Scenario::ThreeD; }

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::TwoD: return "2D";
    case Scenario::TwoU: return "2U";
    case Scenario::ThreeD: return "3D";
    case Scenario::ThreeU: return "3U";
  }
  return "?";
}

inline Scenario scenario_from_name(const std::string& name) {
  if (name == "2D") return Scenario::TwoD;
  if (name == "2U") return Scenario::TwoU;
  if (name == "3D") return Scenario::ThreeD;
  if (name == "3U") return Scenario::ThreeU;
  throw std::invalid_argument("unknown scenario '" + name +
                              "' (expected 2D, 2U, 3D or 3U)");
}

/// Physical parameters of the network. All quantities linear; dB conversion
/// happens at the configuration boundary only.
struct NetworkConfig {
  double lambda = 1e-2;    // BS density per unit area
  double alpha1 = 4.0;     // BS<->user path-loss exponent
  double alpha2 = 4.0;     // user<->user and BS<->BS path-loss exponent
  double p_b = 1.0;        // BS transmit power
  double p_u_tx = 1.0;     // user transmit power
  double sigma_n2 = 0.0;   // noise variance
  double sigma_l2 = 0.0;   // residual loopback variance after cancellation
  double rate = 1.0;       // target rate R in bpcu

  // The uplink loopback transform is printed with the BS power in the paper
  // but its interference definition carries the user power; we default to
  // the BS's own transmit power and let callers override.
  std::optional<double> bs_li_power{};

  /// SINR threshold tau = 2^R - 1, always consistent with rate.
  double tau() const { return std::exp2(rate) - 1.0; }

  double li_power_at_bs() const { return bs_li_power.value_or(p_b); }

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    if (!(alpha1 > 2.0)) throw std::invalid_argument("alpha1 must be > 2");
    if (!(alpha2 > 2.0)) throw std::invalid_argument("alpha2 must be > 2");
    if (!(p_b > 0.0)) throw std::invalid_argument("p_b must be > 0");
    if (!(p_u_tx > 0.0)) throw std::invalid_argument("p_u_tx must be > 0");
    if (!(sigma_n2 >= 0.0)) throw std::invalid_argument("sigma_n2 must be >= 0");
    if (!(sigma_l2 >= 0.0)) throw std::invalid_argument("sigma_l2 must be >= 0");
    if (!(rate > 0.0)) throw std::invalid_argument("rate must be > 0");
  }
};

/// Sectorized antenna setup at BSs and users.
struct AntennaSystem {
  int m_b = 1;             // BS sector count
  int m_u = 1;             // user sector count
  double gamma_b = 0.2;    // BS side-lobe to main-lobe ratio
  double gamma_u = 0.2;    // user side-lobe to main-lobe ratio
  double theta_max = 2.0 * std::numbers::pi / 3.0;  // max-suppression angle

  void validate() const {
    if (m_b < 1 || m_u < 1)
      throw std::invalid_argument("sector counts must be >= 1");
    if (gamma_b < 0.0 || gamma_b > 1.0 || gamma_u < 0.0 || gamma_u > 1.0)
      throw std::invalid_argument("gamma must lie in [0, 1]");
    if (!(theta_max > 0.0) || theta_max > std::numbers::pi)
      throw std::invalid_argument("theta_max must lie in (0, pi]");
  }
};

enum class Method { quadrature, closed_form, monte_carlo };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::quadrature: return "quadrature";
    case Method::closed_form: return "closed-form";
    case Method::monte_carlo: return "monte-carlo";
  }
  return "?";
}

/// An outage probability along with how it was obtained.
struct OutageEstimate {
  double value = 0.0;
  Method method = Method::quadrature;
  double std_error = 0.0;             // monte-carlo only
  std::uint64_t n_realizations = 0;   // monte-carlo only
  double error_bound = 0.0;           // quadrature only
};

/// Clamp a raw probability to [0,1], allowing only rounding-level excursions.
inline double clamp_probability(double raw, const char* what) {
  if (raw < -1e-9 || raw > 1.0 + 1e-9)
    throw std::range_error(std::string(what) + ": probability " +
                           std::to_string(raw) + " outside [0,1]");
  return raw < 0.0 ? 0.0 : (raw > 1.0 ? 1.0 : raw);
}

}  // namespace fdnet
