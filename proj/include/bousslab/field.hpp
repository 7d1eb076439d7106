#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "bousslab/errors.hpp"
#include "bousslab/fft.hpp"

namespace bousslab {

/// Uniform periodic grid on [0, L) with N nodes. Mode index k is stored in
/// FFT order; index k >= N/2 carries the wavenumber 2 pi (k - N) / L, so the
/// represented range is {-N/2, ..., N/2 - 1}.
struct Grid {
  double L = 0;
  int N = 0;
  double dx = 0;

  static Grid make(double L, int N) {
    if (!(L > 0) || !std::isfinite(L)) throw ConfigError("grid length must be positive");
    if (N <= 0 || N % 2 != 0) throw ConfigError("grid size must be even and positive");
    return Grid{L, N, L / N};
  }

  double x(int j) const { return j * dx; }
  double dxi() const { return 2.0 * std::numbers::pi / L; }
  int wavenumber_index(int k) const { return k < N / 2 ? k : k - N; }
  double xi(int k) const { return dxi() * wavenumber_index(k); }
  bool is_nyquist(int k) const { return k == N / 2; }
  /// Mode mirrored at -xi.
  int mirror(int k) const { return k == 0 ? 0 : N - k; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

using cplx = std::complex<double>;

/// Snapshot of (eta, u) on the grid, physical and spectral. Spectral values
/// are raw forward DFT coefficients.
struct FieldState {
  double t = 0;
  std::vector<double> eta, u;
  std::vector<cplx> eta_hat, u_hat;
};

inline void spectral_to_physical(const FftPlan& fft, std::span<const cplx> hat,
                                 std::vector<cplx>& scratch, std::vector<double>& out) {
  scratch.resize(hat.size());
  fft.inverse(hat, scratch);
  out.resize(hat.size());
  for (std::size_t j = 0; j < hat.size(); ++j) out[j] = scratch[j].real();
}

inline void physical_to_spectral(const FftPlan& fft, std::span<const double> f,
                                 std::vector<cplx>& scratch, std::vector<cplx>& out) {
  scratch.assign(f.begin(), f.end());
  out.resize(f.size());
  fft.forward(scratch, out);
}

/// Builds a consistent state from physical samples.
inline FieldState make_state(const FftPlan& fft, std::vector<double> eta,
                             std::vector<double> u, double t) {
  FieldState s;
  s.t = t;
  s.eta = std::move(eta);
  s.u = std::move(u);
  std::vector<cplx> scratch;
  physical_to_spectral(fft, s.eta, scratch, s.eta_hat);
  physical_to_spectral(fft, s.u, scratch, s.u_hat);
  return s;
}

/// Recomputes the physical mirrors from the spectral coefficients.
inline void sync_physical(const FftPlan& fft, FieldState& s) {
  std::vector<cplx> scratch;
  spectral_to_physical(fft, s.eta_hat, scratch, s.eta);
  spectral_to_physical(fft, s.u_hat, scratch, s.u);
}

inline double mean(std::span<const double> f) {
  double acc = 0;
  for (double v : f) acc += v;
  return acc / static_cast<double>(f.size());
}

/// Largest deviation from conjugate symmetry hat[-k] = conj(hat[k]).
inline double conjugate_asymmetry(const Grid& g, std::span<const cplx> hat) {
  double worst = 0;
  for (int k = 0; k < g.N; ++k)
    worst = std::max(worst, std::abs(hat[g.mirror(k)] - std::conj(hat[k])));
  return worst;
}

}  // namespace bousslab
