#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <optional>
#include <string_view>
#include <vector>

#include "bousslab/errors.hpp"
#include "bousslab/field.hpp"
#include "bousslab/params.hpp"

namespace bousslab {

struct NormRecord {
  double t = 0;
  double l2_uv = 0;    // (||eta||^2 + ||u||^2)^{1/2}
  double linf_uv = 0;  // ||eta||_inf + ||u||_inf
  double h1_uv = 0;    // adds ||eta_x||^2 + ||u_x||^2 under the root
  double l2_etaw = 0;  // (||eta||^2 + ||H u||^2)^{1/2}
  double boundary_monitor = 0;
  double linf_max = 0;  // max(||eta||_inf, ||u||_inf), diagnostic only
};

using NormSeries = std::vector<NormRecord>;

enum class NormKind { L2, Linf, H1, L2EtaW, LinfMax };

inline constexpr NormKind kReportedNorms[] = {NormKind::L2, NormKind::Linf, NormKind::H1,
                                              NormKind::L2EtaW};

inline std::string_view to_string(NormKind k) {
  switch (k) {
    case NormKind::L2: return "l2_uv";
    case NormKind::Linf: return "linf_uv";
    case NormKind::H1: return "h1_uv";
    case NormKind::L2EtaW: return "l2_etaw";
    case NormKind::LinfMax: return "linf_max";
  }
  return "?";
}

inline double value(const NormRecord& r, NormKind k) {
  switch (k) {
    case NormKind::L2: return r.l2_uv;
    case NormKind::Linf: return r.linf_uv;
    case NormKind::H1: return r.h1_uv;
    case NormKind::L2EtaW: return r.l2_etaw;
    case NormKind::LinfMax: return r.linf_max;
  }
  return 0;
}

/// Fraction of nodes (split evenly between both ends) watched for boundary
/// contamination.
inline constexpr double kBoundaryFraction = 0.05;

inline double boundary_monitor(const FieldState& s) {
  const std::size_t n = s.eta.size();
  const std::size_t edge = std::max<std::size_t>(1, static_cast<std::size_t>(kBoundaryFraction * n / 2));
  double m = 0;
  for (std::size_t j = 0; j < edge; ++j) {
    for (std::size_t idx : {j, n - 1 - j})
      m = std::max({m, std::abs(s.eta[idx]), std::abs(s.u[idx])});
  }
  return m;
}

/// Physical L2 of the pair: sqrt(dx * sum(eta^2 + u^2)).
inline double l2_physical(const Grid& g, const FieldState& s) {
  double acc = 0;
  for (int j = 0; j < g.N; ++j) acc += s.eta[j] * s.eta[j] + s.u[j] * s.u[j];
  return std::sqrt(g.dx * acc);
}

/// Same norm through Parseval: (dx / N) * sum |hat|^2.
inline double l2_spectral(const Grid& g, const FieldState& s) {
  double acc = 0;
  for (int k = 0; k < g.N; ++k) acc += std::norm(s.eta_hat[k]) + std::norm(s.u_hat[k]);
  return std::sqrt(g.dx / g.N * acc);
}

inline NormRecord norms(const SystemSpec& spec, const Grid& g, const FieldState& s) {
  NormRecord r;
  r.t = s.t;
  r.l2_uv = l2_physical(g, s);

  double eta_inf = 0, u_inf = 0;
  for (int j = 0; j < g.N; ++j) {
    eta_inf = std::max(eta_inf, std::abs(s.eta[j]));
    u_inf = std::max(u_inf, std::abs(s.u[j]));
  }
  r.linf_uv = eta_inf + u_inf;
  r.linf_max = std::max(eta_inf, u_inf);

  double grad = 0, weighted = 0;
  for (int k = 0; k < g.N; ++k) {
    const double xi = g.xi(k);
    const double h = multipliers(spec, xi).h_hat;
    grad += xi * xi * (std::norm(s.eta_hat[k]) + std::norm(s.u_hat[k]));
    weighted += std::norm(s.eta_hat[k]) + h * h * std::norm(s.u_hat[k]);
  }
  const double scale = g.dx / g.N;
  r.h1_uv = std::sqrt(r.l2_uv * r.l2_uv + scale * grad);
  r.l2_etaw = std::sqrt(scale * weighted);
  r.boundary_monitor = boundary_monitor(s);
  return r;
}

struct RatePoint {
  double t;
  double r;
};

struct RateSequence {
  std::vector<RatePoint> points;
  std::size_t skipped = 0;  // records dropped for t <= 0 or a zero norm
};

/// r(t_n) = -log(v_n / v_{n-1}) / log(t_n / t_{n-1}) over consecutive usable
/// records.
inline RateSequence rate_sequence(const NormSeries& series, NormKind kind) {
  RateSequence out;
  std::optional<std::pair<double, double>> last;
  for (const auto& rec : series) {
    const double v = value(rec, kind);
    if (!(rec.t > 0) || !(v > 0)) {
      ++out.skipped;
      continue;
    }
    if (last) {
      const double r = -std::log(v / last->second) / std::log(rec.t / last->first);
      out.points.push_back({rec.t, r});
    }
    last = {rec.t, v};
  }
  if (out.points.empty())
    throw DegenerateSeries("rate_sequence needs at least 2 records with t > 0 and nonzero norm");
  return out;
}

struct DecayFit {
  double r = 0;
  double C = 0;
  std::vector<RatePoint> r_sequence;
  int window = 5;
  bool plateau = false;
};

inline constexpr int kFitWindow = 5;
inline constexpr double kPlateauTol = 0.05;

namespace detail {
inline double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}
}  // namespace detail

/// Plateau test on a rate sequence: the last window has relative spread below
/// 5% and, when an earlier window exists, its mean moved by less than 5%.
inline bool rates_converged(std::span<const RatePoint> rs, int window = kFitWindow) {
  if (static_cast<int>(rs.size()) < window) return false;
  std::vector<double> last;
  for (std::size_t i = rs.size() - window; i < rs.size(); ++i) last.push_back(rs[i].r);
  const double m = detail::mean_of(last);
  double var = 0;
  for (double v : last) var += (v - m) * (v - m);
  const double sd = std::sqrt(var / window);
  if (!(m != 0) || !(sd / std::abs(m) < kPlateauTol)) return false;
  if (static_cast<int>(rs.size()) >= 2 * window) {
    std::vector<double> prev;
    for (std::size_t i = rs.size() - 2 * window; i < rs.size() - window; ++i) prev.push_back(rs[i].r);
    if (!(std::abs(m - detail::mean_of(prev)) / std::abs(m) < kPlateauTol)) return false;
  }
  return true;
}

/// v ~ C t^{-r}: r averages the last five r(t_n); C averages the last five
/// v(t_n) t_n^r.
inline DecayFit fit(const NormSeries& series, NormKind kind) {
  const auto rs = rate_sequence(series, kind);
  if (static_cast<int>(rs.points.size()) < kFitWindow)
    throw DegenerateSeries("fit needs at least 6 usable records");

  DecayFit f;
  f.window = kFitWindow;
  f.r_sequence = rs.points;
  double r_acc = 0;
  for (std::size_t i = rs.points.size() - kFitWindow; i < rs.points.size(); ++i) r_acc += rs.points[i].r;
  f.r = r_acc / kFitWindow;

  std::vector<const NormRecord*> usable;
  for (const auto& rec : series)
    if (rec.t > 0 && value(rec, kind) > 0) usable.push_back(&rec);
  double c_acc = 0;
  for (std::size_t i = usable.size() - kFitWindow; i < usable.size(); ++i)
    c_acc += value(*usable[i], kind) * std::pow(usable[i]->t, f.r);
  f.C = c_acc / kFitWindow;
  f.plateau = rates_converged(rs.points);
  return f;
}

}  // namespace bousslab
