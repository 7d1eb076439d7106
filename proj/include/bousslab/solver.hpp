#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "bousslab/decay.hpp"
#include "bousslab/errors.hpp"
#include "bousslab/fft.hpp"
#include "bousslab/field.hpp"
#include "bousslab/linprop.hpp"
#include "bousslab/params.hpp"

namespace bousslab {

struct SolverConfig {
  double dt = 0.05;
  double T = 50.0;
  bool dealias = true;     // 2/3 rule on the quadratic terms
  double asselin = 0.01;   // Robert-Asselin filter coefficient
  double sample_every = 1.0;
  bool nonlinear = true;   // false gives the linearized system

  void validate() const {
    if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (!(T >= 0) || !std::isfinite(T)) throw ConfigError("T must be >= 0");
    if (!(asselin >= 0 && asselin <= 0.2)) throw ConfigError("asselin must lie in [0, 0.2]");
    if (!(sample_every > dt)) throw ConfigError("sample_every must exceed dt");
    if (T > 0 && sample_every > T) throw ConfigError("sample_every must not exceed T");
    if (std::abs(sample_every / dt - std::round(sample_every / dt)) > 1e-9)
      throw ConfigError("sample_every must be a multiple of dt");
    if (std::abs(T / dt - std::round(T / dt)) > 1e-9) throw ConfigError("T must be a multiple of dt");
  }
};

inline constexpr double kBlowUpLimit = 1e6;
inline constexpr double kContaminationLimit = 1e-12;

/// eta0 = sech^2((sqrt 2 / 2)(x - x0)), u0 = eta0 - eta0^2 / 4.
inline FieldState initial_soliton(const FftPlan& fft, const Grid& g, double x0) {
  if (!(x0 >= 0 && x0 <= g.L)) throw ConfigError("x0 must lie in [0, L]");
  const double kappa = std::numbers::sqrt2 / 2.0;
  std::vector<double> eta(g.N), u(g.N);
  const double centre = x0 / g.dx;  // offsets in cells stay exactly symmetric
  for (int j = 0; j < g.N; ++j) {
    const double s = 1.0 / std::cosh(kappa * (j - centre) * g.dx);
    eta[j] = s * s;
    u[j] = eta[j] - 0.25 * eta[j] * eta[j];
  }
  return make_state(fft, std::move(eta), std::move(u), 0.0);
}

struct SpectralRhs {
  std::vector<cplx> deta_hat, du_hat;
};

/// Pseudo-spectral discretization of the damped nonlinear abcd system on a
/// periodic grid. Holds scratch buffers, so one instance serves one thread.
class PseudoSpectralSolver {
 public:
  PseudoSpectralSolver(const SystemSpec& spec, const Grid& grid, const SolverConfig& config)
      : spec_(spec), grid_(grid), config_(config), fft_(std::make_unique<FftPlan>(grid.N)) {
    const int n = grid.N;
    xi_odd_.resize(n);
    inv_b_.resize(n);
    inv_d_.resize(n);
    disp_eta_.resize(n);
    disp_u_.resize(n);
    mu_eta_.resize(n);
    mu_u_.resize(n);
    keep_.resize(n);
    const int cutoff = n / 3;
    for (int k = 0; k < n; ++k) {
      const double xi = grid.xi(k);
      const double x2 = xi * xi;
      xi_odd_[k] = grid.is_nyquist(k) ? 0.0 : xi;
      inv_b_[k] = 1.0 / (1.0 + spec.b * x2);
      inv_d_[k] = 1.0 / (1.0 + spec.d * x2);
      disp_eta_[k] = 1.0 - spec.a * x2;
      disp_u_[k] = 1.0 - spec.c * x2;
      mu_eta_[k] = spec.nu_eta() * x2 * inv_b_[k];
      mu_u_[k] = spec.nu_u() * x2 * inv_d_[k];
      keep_[k] = !config.dealias || std::abs(grid.wavenumber_index(k)) <= cutoff;
    }
  }

  const SystemSpec& spec() const { return spec_; }
  const Grid& grid() const { return grid_; }
  const SolverConfig& config() const { return config_; }
  const FftPlan& fft() const { return *fft_; }

  /// Time derivative of (eta_hat, u_hat), dissipation included.
  SpectralRhs rhs_spectral(const FieldState& s) const {
    SpectralRhs r;
    explicit_part(s, r);
    for (int k = 0; k < grid_.N; ++k) {
      r.deta_hat[k] -= mu_eta_[k] * s.eta_hat[k];
      r.du_hat[k] -= mu_u_[k] * s.u_hat[k];
    }
    return r;
  }

  /// One leap-frog step from (prev, curr) to the next level. Dispersion and
  /// nonlinearity are taken at the current level; damping is averaged over the
  /// outer levels and solved mode by mode. `curr` is Robert-Asselin filtered
  /// in place afterwards.
  FieldState step_leapfrog(const FieldState& prev, FieldState& curr, long step_index = 0) const {
    const double dt = config_.dt;
    if (std::abs(curr.t - prev.t - dt) > 1e-12 * std::max(1.0, std::abs(curr.t)))
      throw std::invalid_argument("step_leapfrog: levels are not dt apart");

    SpectralRhs n;
    explicit_part(curr, n);
    FieldState next;
    next.t = curr.t + dt;
    next.eta_hat.resize(grid_.N);
    next.u_hat.resize(grid_.N);
    for (int k = 0; k < grid_.N; ++k) {
      const double me = mu_eta_[k] * dt;
      const double mu = mu_u_[k] * dt;
      next.eta_hat[k] = ((1.0 - me) * prev.eta_hat[k] + 2.0 * dt * n.deta_hat[k]) / (1.0 + me);
      next.u_hat[k] = ((1.0 - mu) * prev.u_hat[k] + 2.0 * dt * n.du_hat[k]) / (1.0 + mu);
    }
    sync_physical(*fft_, next);
    check_growth(prev, next, step_index);

    if (config_.asselin > 0) {
      const double g = config_.asselin;
      for (int k = 0; k < grid_.N; ++k) {
        curr.eta_hat[k] += g * (prev.eta_hat[k] - 2.0 * curr.eta_hat[k] + next.eta_hat[k]);
        curr.u_hat[k] += g * (prev.u_hat[k] - 2.0 * curr.u_hat[k] + next.u_hat[k]);
      }
      sync_physical(*fft_, curr);
    }
    return next;
  }

  /// Classical RK4 step from t to t + dt; supplies the second leap-frog level.
  FieldState bootstrap_first_step(const FieldState& initial, double dt) const {
    const int n = grid_.N;
    auto stage = [&](const SpectralRhs& k, double h) {
      FieldState s;
      s.eta_hat.resize(n);
      s.u_hat.resize(n);
      for (int i = 0; i < n; ++i) {
        s.eta_hat[i] = initial.eta_hat[i] + h * k.deta_hat[i];
        s.u_hat[i] = initial.u_hat[i] + h * k.du_hat[i];
      }
      if (config_.nonlinear) sync_physical(*fft_, s);
      return s;
    };
    const auto k1 = rhs_spectral(initial);
    const auto k2 = rhs_spectral(stage(k1, 0.5 * dt));
    const auto k3 = rhs_spectral(stage(k2, 0.5 * dt));
    const auto k4 = rhs_spectral(stage(k3, dt));
    FieldState out;
    out.t = initial.t + dt;
    out.eta_hat.resize(n);
    out.u_hat.resize(n);
    for (int i = 0; i < n; ++i) {
      out.eta_hat[i] = initial.eta_hat[i] +
                       dt / 6.0 * (k1.deta_hat[i] + 2.0 * k2.deta_hat[i] + 2.0 * k3.deta_hat[i] + k4.deta_hat[i]);
      out.u_hat[i] = initial.u_hat[i] +
                     dt / 6.0 * (k1.du_hat[i] + 2.0 * k2.du_hat[i] + 2.0 * k3.du_hat[i] + k4.du_hat[i]);
    }
    sync_physical(*fft_, out);
    check_growth(initial, out, 1);
    return out;
  }

 private:
  // Dispersive and nonlinear terms only.
  void explicit_part(const FieldState& s, SpectralRhs& r) const {
    const int n = grid_.N;
    r.deta_hat.assign(n, cplx{});
    r.du_hat.assign(n, cplx{});
    if (config_.nonlinear) quadratic_terms(s);
    const cplx I(0.0, 1.0);
    for (int k = 0; k < n; ++k) {
      cplx fe = disp_eta_[k] * s.u_hat[k];
      cplx fu = disp_u_[k] * s.eta_hat[k];
      if (config_.nonlinear) {
        fe += prod_eu_[k];
        fu += prod_uu_[k];
      }
      r.deta_hat[k] = -I * xi_odd_[k] * fe * inv_b_[k];
      r.du_hat[k] = -I * xi_odd_[k] * fu * inv_d_[k];
    }
  }

  // Transforms of eta*u and u^2/2, truncated by the 2/3 rule when enabled.
  void quadratic_terms(const FieldState& s) const {
    const int n = grid_.N;
    const std::vector<double>* eta = &s.eta;
    const std::vector<double>* u = &s.u;
    if (config_.dealias) {
      masked_.resize(n);
      for (int k = 0; k < n; ++k) masked_[k] = keep_[k] ? s.eta_hat[k] : cplx{};
      spectral_to_physical(*fft_, masked_, scratch_, eta_f_);
      for (int k = 0; k < n; ++k) masked_[k] = keep_[k] ? s.u_hat[k] : cplx{};
      spectral_to_physical(*fft_, masked_, scratch_, u_f_);
      eta = &eta_f_;
      u = &u_f_;
    }
    prod_.resize(n);
    for (int j = 0; j < n; ++j) prod_[j] = (*eta)[j] * (*u)[j];
    physical_to_spectral(*fft_, prod_, scratch_, prod_eu_);
    for (int j = 0; j < n; ++j) prod_[j] = 0.5 * (*u)[j] * (*u)[j];
    physical_to_spectral(*fft_, prod_, scratch_, prod_uu_);
    for (int k = 0; k < n; ++k) {
      if (!keep_[k]) prod_eu_[k] = prod_uu_[k] = cplx{};
    }
  }

  void check_growth(const FieldState& before, const FieldState& after, long step_index) const {
    double peak = 0;
    bool finite = true;
    for (int j = 0; j < grid_.N; ++j) {
      const double v = std::max(std::abs(after.eta[j]), std::abs(after.u[j]));
      if (!std::isfinite(v)) finite = false;
      peak = std::max(peak, v);
    }
    if (finite && peak <= kBlowUpLimit) return;
    long worst = 0;
    double worst_growth = -1;
    for (int k = 0; k < grid_.N; ++k) {
      const double grow = std::abs(after.eta_hat[k]) + std::abs(after.u_hat[k]) -
                          std::abs(before.eta_hat[k]) - std::abs(before.u_hat[k]);
      if (!std::isfinite(grow) || grow > worst_growth) {
        worst = k;
        worst_growth = std::isfinite(grow) ? grow : HUGE_VAL;
        if (!std::isfinite(grow)) break;
      }
    }
    throw BlowUp("solution blew up at step " + std::to_string(step_index) + " (t = " +
                     std::to_string(after.t) + "), fastest-growing mode " +
                     std::to_string(grid_.wavenumber_index(static_cast<int>(worst))),
                 step_index, grid_.wavenumber_index(static_cast<int>(worst)));
  }

  SystemSpec spec_;
  Grid grid_;
  SolverConfig config_;
  std::unique_ptr<FftPlan> fft_;
  std::vector<double> xi_odd_, inv_b_, inv_d_, disp_eta_, disp_u_, mu_eta_, mu_u_;
  std::vector<bool> keep_;

  mutable std::vector<cplx> masked_, scratch_, prod_eu_, prod_uu_;
  mutable std::vector<double> eta_f_, u_f_, prod_;
};

struct RunResult {
  NormSeries series;
  FieldState final_state;
  double boundary_max = 0;
  bool contaminated = false;
};

namespace detail {
inline long checked_steps(double span, double dt) { return std::lround(span / dt); }

inline void record(RunResult& out, const SystemSpec& spec, const Grid& g, const FieldState& s) {
  out.series.push_back(norms(spec, g, s));
  out.boundary_max = std::max(out.boundary_max, out.series.back().boundary_monitor);
}
}  // namespace detail

/// Leap-frog march of `steps` steps from `initial` (RK4 for the first one).
/// `on_level(state, n)` sees every new level n >= 1 before it is filtered.
template <class OnLevel>
FieldState march(const PseudoSpectralSolver& solver, FieldState initial, long steps, OnLevel&& on_level) {
  if (steps <= 0) return initial;
  const double dt = solver.config().dt;
  const double t0 = initial.t;
  FieldState curr = solver.bootstrap_first_step(initial, dt);
  curr.t = t0 + dt;
  on_level(curr, 1L);
  FieldState prev = std::move(initial);
  for (long n = 1; n < steps; ++n) {
    FieldState next = solver.step_leapfrog(prev, curr, n + 1);
    next.t = t0 + (n + 1) * dt;  // avoid drift from repeated addition
    on_level(next, n + 1);
    prev = std::move(curr);
    curr = std::move(next);
  }
  return curr;
}

inline FieldState advance(const PseudoSpectralSolver& solver, FieldState initial, double T) {
  return march(solver, std::move(initial), detail::checked_steps(T, solver.config().dt),
               [](const FieldState&, long) {});
}

/// Nonlinear run from the soliton data, sampling norms every
/// `sample_every` time units.
inline RunResult run(const SystemSpec& spec, const Grid& grid, const SolverConfig& config, double x0) {
  config.validate();
  PseudoSpectralSolver solver(spec, grid, config);
  RunResult out;
  FieldState init = initial_soliton(solver.fft(), grid, x0);
  detail::record(out, spec, grid, init);

  const long steps = detail::checked_steps(config.T, config.dt);
  const long stride = detail::checked_steps(config.sample_every, config.dt);
  out.final_state = march(solver, std::move(init), steps, [&](const FieldState& s, long n) {
    if (n % stride == 0) detail::record(out, spec, grid, s);
  });
  out.contaminated = out.boundary_max > kContaminationLimit;
  return out;
}

/// Same sampling as run(), using the exact linear semigroup from the soliton
/// data instead of time stepping.
inline RunResult run_linear(const SystemSpec& spec, const Grid& grid, const SolverConfig& config, double x0) {
  config.validate();
  FftPlan fft(grid.N);
  const auto init = initial_soliton(fft, grid, x0);
  const auto y0 = to_spectral_pair(spec, grid, init);
  RunResult out;
  detail::record(out, spec, grid, init);
  const long samples = detail::checked_steps(config.T, config.sample_every);
  FieldState last = init;
  for (long n = 1; n <= samples; ++n) {
    const double t = n * config.sample_every;
    last = to_field_state(spec, fft, evolve_linear(spec, y0, t), t);
    detail::record(out, spec, grid, last);
  }
  out.final_state = std::move(last);
  out.contaminated = out.boundary_max > kContaminationLimit;
  return out;
}

}  // namespace bousslab
