#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "bousslab/errors.hpp"

namespace bousslab {

/// Where the second-order damping terms are placed.
enum class Dissipation {
  Complete,    // (eta_xx, u_xx) on the right-hand side
  PartialU,    // (0, u_xx)
  PartialEta,  // (eta_xx, 0)
};

inline double nu_eta(Dissipation d) { return d == Dissipation::PartialU ? 0.0 : 1.0; }
inline double nu_u(Dissipation d) { return d == Dissipation::PartialEta ? 0.0 : 1.0; }

inline std::string_view to_string(Dissipation d) {
  switch (d) {
    case Dissipation::Complete: return "complete";
    case Dissipation::PartialU: return "partial-u";
    case Dissipation::PartialEta: return "partial-eta";
  }
  return "?";
}

inline std::optional<Dissipation> parse_dissipation(std::string_view s) {
  if (s == "complete") return Dissipation::Complete;
  if (s == "partial-u" || s == "partial") return Dissipation::PartialU;
  if (s == "partial-eta") return Dissipation::PartialEta;
  return std::nullopt;
}

enum class Family { C1, C2 };

inline constexpr double kConstraintTol = 1e-12;

/// Validated abcd system plus dissipation placement. Construct through
/// make_spec(); the fields are plain data so copies are cheap.
struct SystemSpec {
  double a = 0, b = 0, c = 0, d = 0;
  Dissipation diss = Dissipation::Complete;
  Family family = Family::C1;
  double theta_sq = 1.0;  // 1 - 2(c + d), informational only

  double nu_eta() const { return bousslab::nu_eta(diss); }
  double nu_u() const { return bousslab::nu_u(diss); }
  /// Proven nonlinear decay theory covers complete dissipation and (C1)
  /// systems with damping on u only.
  bool outside_proven_theory() const {
    return diss == Dissipation::PartialEta ||
           (diss == Dissipation::PartialU && family == Family::C2);
  }

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

inline SystemSpec make_spec(double a, double b, double c, double d,
                            Dissipation diss) {
  using W = ConstraintViolation::Which;
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d))
    throw ConstraintViolation(W::C0, "coefficients must be finite");

  const double sum = a + b + c + d;
  if (std::abs(sum - 1.0 / 3.0) > kConstraintTol) {
    std::ostringstream os;
    os.precision(17);
    os << "(C0) violated: a+b+c+d = " << sum << " != 1/3";
    throw ConstraintViolation(W::C0, os.str());
  }
  if (c + d < -kConstraintTol) {
    std::ostringstream os;
    os.precision(17);
    os << "(C0) violated: c+d = " << c + d << " < 0";
    throw ConstraintViolation(W::C0, os.str());
  }

  const bool c1 = b >= 0 && d >= 0 && a <= 0 && c <= 0;
  const bool c2 = b >= 0 && d >= 0 && a > 0 && std::abs(a - c) <= kConstraintTol;
  if (!c1 && !c2) {
    std::string why;
    if (b < 0) why = "b < 0";
    else if (d < 0) why = "d < 0";
    else if (a > 0 && c <= 0) why = "a > 0 with c <= 0";
    else if (c > 0 && a <= 0) why = "c > 0 with a <= 0";
    else why = "a, c > 0 but a != c";
    throw ConstraintViolation(W::C1C2, "neither (C1) nor (C2) holds: " + why);
  }

  SystemSpec s;
  s.a = a;
  s.b = b;
  s.c = c;
  s.d = d;
  s.diss = diss;
  s.family = c1 ? Family::C1 : Family::C2;
  s.theta_sq = 1.0 - 2.0 * (c + d);
  return s;
}

/// Re-validates an existing spec; a valid spec comes back unchanged.
inline SystemSpec validate(const SystemSpec& s) {
  return make_spec(s.a, s.b, s.c, s.d, s.diss);
}

/// Fourier-side scalars of the system at one wavenumber.
struct MultiplierValues {
  double xi = 0;
  double omega1 = 1, omega2 = 1;
  double sigma = 1;
  double alpha = 0, epsilon = 0;
  double h_hat = 1;
  int sign1 = 1, sign2 = 1;
};

namespace detail {
inline int sgn(double v) { return (v > 0) - (v < 0); }
}  // namespace detail

inline MultiplierValues multipliers(const SystemSpec& s, double xi) {
  const double x2 = xi * xi;
  const double den_b = 1.0 + s.b * x2;
  const double den_d = 1.0 + s.d * x2;
  MultiplierValues m;
  m.xi = xi;
  m.omega1 = (1.0 - s.a * x2) / den_b;
  m.omega2 = (1.0 - s.c * x2) / den_d;
  m.sigma = std::sqrt(std::max(0.0, m.omega1 * m.omega2));
  m.alpha = x2 / den_b;
  m.epsilon = x2 / den_d;
  m.sign1 = detail::sgn(m.omega1);
  m.sign2 = detail::sgn(m.omega2);
  if (s.family == Family::C2) {
    // a = c: the numerators cancel, including at the common zero.
    m.h_hat = std::sqrt(den_d / den_b);
  } else {
    m.h_hat = std::sqrt(m.omega1 / m.omega2);
  }
  return m;
}

/// Asymptotic orders of the multipliers as |xi| -> infinity.
struct OrderProfile {
  int order_sigma = 0;
  int order_epsilon = 0;
  int order_alpha = 0;
  int order_h = 0;
  friend bool operator==(const OrderProfile&, const OrderProfile&) = default;
};

inline OrderProfile orders(const SystemSpec& s) {
  auto ind = [](double r) { return r != 0.0 ? 1 : 0; };
  OrderProfile o;
  o.order_sigma = ind(s.a) + ind(s.c) - ind(s.b) - ind(s.d);
  o.order_epsilon = 2 - 2 * ind(s.d);
  o.order_alpha = 2 - 2 * ind(s.b);
  o.order_h = ind(s.a) + ind(s.d) - ind(s.c) - ind(s.b);
  return o;
}

struct Preset {
  std::string_view id;
  double a, b, c, d;
};

// kdv-bbm and bbm-kdv are the members of their sign families that satisfy
// (C0) together with (C1): a coupled KdV-BBM system (b = c = 0) needs
// a <= 0, and a BBM-KdV system (a = d = 0) is forced to c = 0, b = 1/3.
inline constexpr std::array<Preset, 7> kPresets{{
    {"bbm-bbm", 0.0, 1.0 / 6.0, 0.0, 1.0 / 6.0},
    {"bona-smith", 0.0, 1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0},
    {"kdv-kdv", 1.0 / 6.0, 0.0, 1.0 / 6.0, 0.0},
    {"classical-boussinesq", 0.0, 0.0, 0.0, 1.0 / 3.0},
    {"kdv-bbm", -1.0 / 6.0, 0.0, 0.0, 1.0 / 2.0},
    {"bbm-kdv", 0.0, 1.0 / 3.0, 0.0, 0.0},
    {"weakly-dispersive", -1.0 / 6.0, 1.0 / 3.0, -1.0 / 6.0, 1.0 / 3.0},
}};

inline std::optional<Preset> find_preset(std::string_view id) {
  for (const auto& p : kPresets)
    if (p.id == id) return p;
  return std::nullopt;
}

inline SystemSpec preset_spec(std::string_view id, Dissipation diss) {
  auto p = find_preset(id);
  if (!p) throw ConfigError("unknown preset '" + std::string(id) + "'");
  return make_spec(p->a, p->b, p->c, p->d, diss);
}

}  // namespace bousslab
