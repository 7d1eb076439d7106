#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <span>
#include <vector>

#include "bousslab/field.hpp"
#include "bousslab/params.hpp"
#include "bousslab/symbol.hpp"

namespace bousslab {

/// Fourier-side pair (eta_hat, w_hat) with w_hat = H_hat * u_hat, sampled at
/// the grid wavenumbers. Coefficients approximate the continuous transform
/// int f(x) e^{-i x xi} dx, i.e. dx times the forward DFT.
struct SpectralPair {
  Grid grid;
  std::vector<cplx> eta_hat, w_hat;
};

/// Symbol at a grid mode. The Nyquist mode is its own mirror, so it carries
/// no odd-derivative coupling.
inline SymbolMatrix mode_symbol(const SystemSpec& s, const Grid& g, int k) {
  auto a = symbol_matrix(s, g.xi(k));
  if (g.is_nyquist(k)) a.off12 = a.off21 = 0.0;
  return a;
}

inline SpectralPair to_spectral_pair(const SystemSpec& s, const Grid& g, const FieldState& f) {
  SpectralPair y{g, std::vector<cplx>(g.N), std::vector<cplx>(g.N)};
  for (int k = 0; k < g.N; ++k) {
    const double h = multipliers(s, g.xi(k)).h_hat;
    y.eta_hat[k] = g.dx * f.eta_hat[k];
    y.w_hat[k] = g.dx * h * f.u_hat[k];
  }
  return y;
}

/// Inverse of to_spectral_pair, with physical mirrors filled in.
inline FieldState to_field_state(const SystemSpec& s, const FftPlan& fft,
                                 const SpectralPair& y, double t) {
  const auto& g = y.grid;
  FieldState f;
  f.t = t;
  f.eta_hat.resize(g.N);
  f.u_hat.resize(g.N);
  for (int k = 0; k < g.N; ++k) {
    const double h = multipliers(s, g.xi(k)).h_hat;
    f.eta_hat[k] = y.eta_hat[k] / g.dx;
    f.u_hat[k] = y.w_hat[k] / (g.dx * h);
  }
  sync_physical(fft, f);
  return f;
}

namespace detail {
inline SpectralPair apply_semigroup(const SystemSpec& s, const SpectralPair& y0, double t) {
  const auto& g = y0.grid;
  SpectralPair y{g, std::vector<cplx>(g.N), std::vector<cplx>(g.N)};
  for (int k = 0; k < g.N; ++k) {
    const auto a = mode_symbol(s, g, k);
    const auto m = semigroup(a, eigen(a), t);
    const auto v = m.apply(y0.eta_hat[k], y0.w_hat[k]);
    y.eta_hat[k] = v[0];
    y.w_hat[k] = v[1];
  }
  return y;
}
}  // namespace detail

/// Exact linear evolution, mode by mode: Y(t) = exp(-tA) Y0.
inline SpectralPair evolve_linear(const SystemSpec& s, const SpectralPair& y0, double t) {
  if (!(t >= 0)) throw std::invalid_argument("evolve_linear: t must be >= 0");
  return detail::apply_semigroup(s, y0, t);
}

/// Quadrature of int |Y|^2 dxi over the grid wavenumbers. Summed in mode order.
inline double energy(const SpectralPair& y) {
  double acc = 0;
  for (std::size_t k = 0; k < y.eta_hat.size(); ++k)
    acc += std::norm(y.eta_hat[k]) + std::norm(y.w_hat[k]);
  return acc * y.grid.dxi();
}

inline double dissipation_rate(const SystemSpec& s, const SpectralPair& y) {
  const auto& g = y.grid;
  double acc = 0;
  for (int k = 0; k < g.N; ++k) {
    const auto a = mode_symbol(s, g, k);
    acc += a.d11 * std::norm(y.eta_hat[k]) + a.d22 * std::norm(y.w_hat[k]);
  }
  return 2.0 * acc * g.dxi();
}

/// Defect of dE/dt = -2 sum (nu_eta alpha |eta|^2 + nu_u eps |w|^2) dxi, with
/// dE/dt replaced by a central difference of width 2 dt_probe around `y`.
inline double energy_identity_residual(const SystemSpec& s, const SpectralPair& y, double dt_probe) {
  if (!(dt_probe > 0)) throw std::invalid_argument("energy_identity_residual: dt_probe must be > 0");
  const double e_plus = energy(detail::apply_semigroup(s, y, dt_probe));
  const double e_minus = energy(detail::apply_semigroup(s, y, -dt_probe));
  return std::abs((e_plus - e_minus) / (2.0 * dt_probe) + dissipation_rate(s, y));
}

/// First time at which |exp(-tA(xi)) Y0| falls to |Y0| / e, by doubling and
/// bisection. Throws NoThreshold when it has not happened by t_max.
inline double efolding_time(const SystemSpec& s, double xi, cplx y_eta = 1.0, cplx y_w = 0.0,
                            double t_max = 1e6) {
  const auto a = symbol_matrix(s, xi);
  const auto e = eigen(a);
  const double target = std::sqrt(std::norm(y_eta) + std::norm(y_w)) / std::numbers::e;
  auto size_at = [&](double t) {
    const auto v = semigroup(a, e, t).apply(y_eta, y_w);
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  };
  double lo = 0.0, hi = 1e-3;
  while (size_at(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > t_max) throw NoThreshold("no e-folding before t = " + std::to_string(t_max));
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (size_at(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace bousslab
