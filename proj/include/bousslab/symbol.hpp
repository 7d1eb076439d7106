#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include "bousslab/errors.hpp"
#include "bousslab/params.hpp"

namespace bousslab {

using cplx = std::complex<double>;

/// Dense complex 2x2 matrix, row major.
struct Mat2 {
  cplx m00{}, m01{}, m10{}, m11{};

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  std::array<cplx, 2> apply(cplx v0, cplx v1) const {
    return {m00 * v0 + m01 * v1, m10 * v0 + m11 * v1};
  }
  Mat2 operator*(const Mat2& o) const {
    return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
            m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
  }
  double frobenius_sq() const {
    return std::norm(m00) + std::norm(m01) + std::norm(m10) + std::norm(m11);
  }
};

/// Largest singular value, from the closed form of the eigenvalues of M*M.
inline double spectral_norm(const Mat2& m) {
  const double f = m.frobenius_sq();
  const double det = std::abs(m.m00 * m.m11 - m.m01 * m.m10);
  const double disc = std::max(0.0, f * f - 4.0 * det * det);
  return std::sqrt(0.5 * (f + std::sqrt(disc)));
}

/// A(xi) = D + U with D = diag(d11, d22) and U = [[0, i off12], [i off21, 0]].
struct SymbolMatrix {
  double xi = 0;
  double d11 = 0, d22 = 0;
  double off12 = 0, off21 = 0;

  Mat2 dense() const {
    return {d11, cplx(0.0, off12), cplx(0.0, off21), d22};
  }
};

inline SymbolMatrix symbol_matrix(const SystemSpec& s, const MultiplierValues& m) {
  SymbolMatrix a;
  a.xi = m.xi;
  a.d11 = s.nu_eta() * m.alpha;
  a.d22 = s.nu_u() * m.epsilon;
  a.off12 = m.sign1 * m.xi * m.sigma;
  a.off21 = m.sign2 * m.xi * m.sigma;
  return a;
}

inline SymbolMatrix symbol_matrix(const SystemSpec& s, double xi) {
  return symbol_matrix(s, multipliers(s, xi));
}

struct EigenData {
  double tr = 0, det = 0, delta = 0;
  cplx lambda1{}, lambda2{};  // Re(lambda1) <= Re(lambda2)
  double z_abs = 0;           // off-diagonal of the Schur form
  bool coincident = false;    // lambda1 == lambda2 branch taken
};

inline EigenData eigen(const SymbolMatrix& a) {
  EigenData e;
  e.tr = a.d11 + a.d22;
  // off12 * off21 = xi^2 sigma^2 >= 0 (the signs agree wherever sigma != 0)
  const double coupling = a.off12 * a.off21;
  e.det = a.d11 * a.d22 + coupling;
  const double gap = a.d11 - a.d22;
  e.delta = gap * gap - 4.0 * coupling;

  if (std::abs(e.delta) < 1e-14 * std::max(e.tr * e.tr, 1.0)) {
    e.coincident = true;
    e.lambda1 = e.lambda2 = 0.5 * e.tr;
    e.z_abs = std::abs(gap);
  } else if (e.delta > 0) {
    const double q = 0.5 * (e.tr + std::sqrt(e.delta));
    e.lambda2 = q;
    e.lambda1 = e.det / q;
    e.z_abs = 2.0 * std::sqrt(coupling);
  } else {
    const double im = 0.5 * std::sqrt(-e.delta);
    e.lambda1 = cplx(0.5 * e.tr, -im);
    e.lambda2 = cplx(0.5 * e.tr, im);
    e.z_abs = std::abs(gap);
  }
  return e;
}

inline EigenData eigen(const SystemSpec& s, double xi) {
  return eigen(symbol_matrix(s, xi));
}

namespace detail {

// (1 - exp(-x)) / x, finite at 0
inline double one_minus_exp_over(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

inline double sinc(double x) {
  if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Scalars (p, q) with exp(-tA) = p I - q (A - tr/2 I).
struct ExpCoeffs {
  double p, q;
};

inline ExpCoeffs exp_coeffs(const EigenData& e, double t) {
  if (e.coincident) {
    const double g = std::exp(-0.5 * t * e.tr);
    return {g, t * g};
  }
  if (e.delta > 0) {
    const double l1 = e.lambda1.real();
    const double gap = std::sqrt(e.delta);  // lambda2 - lambda1
    const double g1 = std::exp(-t * l1);
    const double g2 = std::exp(-t * e.lambda2.real());
    return {0.5 * (g1 + g2), g1 * t * one_minus_exp_over(t * gap)};
  }
  const double nu = -e.lambda1.imag();
  const double g = std::exp(-0.5 * t * e.tr);
  return {g * std::cos(t * nu), g * t * sinc(t * nu)};
}

// |(exp(-t l1) - exp(-t l2)) / (l1 - l2)|, with the coincident limit t exp(-t l).
inline double divided_difference_abs(const EigenData& e, double t) {
  return std::abs(exp_coeffs(e, t).q);
}

}  // namespace detail

/// exp(-tA(xi)) in closed form.
inline Mat2 semigroup(const SymbolMatrix& a, const EigenData& e, double t) {
  const auto [p, q] = detail::exp_coeffs(e, t);
  const double half = 0.5 * e.tr;
  Mat2 m{p - q * (a.d11 - half), -q * cplx(0.0, a.off12),
         -q * cplx(0.0, a.off21), p - q * (a.d22 - half)};
  const double s = std::sqrt(std::max(e.delta, 0.0));
  if (!e.coincident && e.delta > 0 && std::abs(t) * s > 1.0) {
    // Well separated real eigenvalues: spectral projectors, with the
    // eigenvalue-to-diagonal gaps formed without cancellation, keep the
    // diagonal accurate when exp(-t l2) << exp(-t l1).
    const double g = std::abs(a.d11 - a.d22);
    const double far = 0.5 * (g + s);                       // l2 - d_min = d_max - l1
    const double near = 2.0 * a.off12 * a.off21 / (g + s);  // d_max - l2 = l1 - d_min
    const double e1 = std::exp(-t * e.lambda1.real());
    const double e2 = std::exp(-t * e.lambda2.real());
    const double at_max = (e2 * far - e1 * near) / s;
    const double at_min = (e1 * far - e2 * near) / s;
    m.m00 = a.d11 >= a.d22 ? at_max : at_min;
    m.m11 = a.d11 >= a.d22 ? at_min : at_max;
  }
  return m;
}

inline Mat2 semigroup(const SystemSpec& s, double xi, double t) {
  const auto a = symbol_matrix(s, xi);
  return semigroup(a, eigen(a), t);
}

inline double semigroup_norm_exact(const SystemSpec& s, double xi, double t) {
  return spectral_norm(semigroup(s, xi, t));
}

/// Trace bound on ||exp(-tA)||^2 through the Schur form.
inline double semigroup_norm_bound(const EigenData& e, double t) {
  const double dd = detail::divided_difference_abs(e, t);
  const double r1 = std::exp(-2.0 * t * e.lambda1.real());
  const double r2 = std::exp(-2.0 * t * e.lambda2.real());
  return std::sqrt(r1 + r2 + e.z_abs * e.z_abs * dd * dd);
}

inline double semigroup_norm_bound(const SystemSpec& s, double xi, double t) {
  return semigroup_norm_bound(eigen(s, xi), t);
}

// ---------------------------------------------------------------------------
// Dichotomy classification

enum class DecayClass { KdVBurgers, BBMBurgers, SlowDecay };

inline std::string_view to_string(DecayClass k) {
  switch (k) {
    case DecayClass::KdVBurgers: return "KdVBurgers";
    case DecayClass::BBMBurgers: return "BBMBurgers";
    case DecayClass::SlowDecay: return "SlowDecay";
  }
  return "?";
}

struct Classification {
  DecayClass klass = DecayClass::BBMBurgers;
  double delta_m = 0;
  double delta_M = 0;
  std::optional<double> resonance;
};

/// Wavenumber where sigma and det(A) vanish under (C2).
inline std::optional<double> resonance_point(const SystemSpec& s) {
  if (s.family != Family::C2) return std::nullopt;
  return 1.0 / std::sqrt(s.a);
}

/// Class from the orders of sigma and of the damping multiplier.
inline DecayClass decay_class(const SystemSpec& s) {
  const auto o = orders(s);
  const int os = o.order_sigma;
  if (s.diss == Dissipation::Complete) return os <= 0 ? DecayClass::BBMBurgers : DecayClass::KdVBurgers;

  // one-sided damping: eta and u exchange roles for PartialEta
  const int od = s.diss == Dissipation::PartialU ? o.order_epsilon : o.order_alpha;
  const int half = od / 2;
  const bool kdv = os >= 2 - half;
  const bool bbm = std::abs(os) < 2 - half;
  const bool slow = os <= -2 + half;
  if (kdv + bbm + slow != 1)
    throw Unclassifiable("contradictory order conditions for order(sigma) = " +
                         std::to_string(os));
  return kdv ? DecayClass::KdVBurgers : bbm ? DecayClass::BBMBurgers : DecayClass::SlowDecay;
}

inline constexpr double kScanStep = 1e-3;
inline constexpr double kScanLowMax = 10.0;
inline constexpr double kScanHighMax = 1e3;

/// Largest scan wavenumber below which the low-frequency regime holds:
/// Delta <= 0 and Tr(A) within a factor 2 of (nu_eta + nu_u) xi^2.
/// Under (C2) the result is capped below the resonance point.
inline double low_freq_threshold(const SystemSpec& s) {
  const double nsum = s.nu_eta() + s.nu_u();
  const auto res = resonance_point(s);
  double last_ok = 0.0;
  const int n = static_cast<int>(std::lround(kScanLowMax / kScanStep));
  for (int k = 1; k <= n; ++k) {
    const double xi = k * kScanStep;
    if (res && xi >= *res) break;
    const auto e = eigen(s, xi);
    const double ratio = e.tr / (nsum * xi * xi);
    if (e.delta > 0 || ratio < 0.5 || ratio > 2.0) break;
    last_ok = xi;
  }
  if (last_ok == 0.0)
    throw NoThreshold("low-frequency regime fails already at xi = 1e-3");
  return last_ok;
}

namespace detail {

inline int class_power(DecayClass k) {
  switch (k) {
    case DecayClass::KdVBurgers: return 2;
    case DecayClass::BBMBurgers: return 0;
    case DecayClass::SlowDecay: return -2;
  }
  return 0;
}

inline std::vector<double> high_scan_grid(double from) {
  std::vector<double> g;
  double xi = std::max(from, kScanStep);
  while (xi < kScanLowMax) {
    g.push_back(xi);
    xi += kScanStep;
  }
  for (xi = kScanLowMax; xi < kScanHighMax; xi *= 1.0 + kScanStep) g.push_back(xi);
  g.push_back(kScanHighMax);
  return g;
}

}  // namespace detail

/// Smallest scan wavenumber beyond which the sign of Delta no longer changes
/// and Re(lambda1) / |xi|^p stays within a factor 2 of its value at the end
/// of the scan (p = 2, 0, -2 for the three classes).
inline double high_freq_threshold(const SystemSpec& s, DecayClass klass, double delta_m) {
  const auto grid = detail::high_scan_grid(delta_m);
  const int p = detail::class_power(klass);
  auto indicator = [&](double xi, const EigenData& e) {
    return e.lambda1.real() / std::pow(xi, p);
  };
  const auto e_end = eigen(s, grid.back());
  const double g_end = indicator(grid.back(), e_end);
  const bool pos_end = e_end.delta > 0 && !e_end.coincident;

  double threshold = grid.front();
  for (std::size_t i = grid.size(); i-- > 0;) {
    const auto e = eigen(s, grid[i]);
    const bool pos = e.delta > 0 && !e.coincident;
    const double g = indicator(grid[i], e);
    if (pos != pos_end || !(g >= 0.5 * g_end && g <= 2.0 * g_end)) {
      threshold = i + 1 < grid.size() ? grid[i + 1] : grid[i];
      break;
    }
  }
  double out = std::max(threshold, delta_m);
  if (auto r = resonance_point(s)) out = std::max(out, *r);
  return out;
}

inline Classification classify(const SystemSpec& s) {
  Classification c;
  c.klass = decay_class(s);
  c.delta_m = low_freq_threshold(s);
  c.delta_M = high_freq_threshold(s, c.klass, c.delta_m);
  c.resonance = resonance_point(s);
  return c;
}

}  // namespace bousslab
