#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bousslab/config.hpp"
#include "bousslab/decay.hpp"
#include "bousslab/errors.hpp"
#include "bousslab/io.hpp"
#include "bousslab/linprop.hpp"
#include "bousslab/solver.hpp"
#include "bousslab/symbol.hpp"

namespace bousslab {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitRuntime = 3 };

struct RunOutputs {
  RunResult result;
  std::vector<FitRow> fits;
};

namespace detail {

inline std::vector<FitRow> fit_all(const std::string& label, Dissipation diss, const NormSeries& series) {
  std::vector<FitRow> rows;
  for (NormKind k : kReportedNorms) {
    try {
      rows.push_back({label, diss, k, fit(series, k)});
    } catch (const DegenerateSeries&) {
      // too few samples: no row for this norm
    }
  }
  return rows;
}

inline void write_run_files(const std::filesystem::path& dir, const std::string& label, Dissipation diss,
                            const RunOutputs& out) {
  std::filesystem::create_directories(dir);
  std::ostringstream norms_csv, fit_csv, svg;
  write_norms_csv(norms_csv, out.result.series);
  write_fit_csv(fit_csv, out.fits);
  write_text_file(dir / "norms.csv", norms_csv.str());
  write_text_file(dir / "fit.csv", fit_csv.str());

  std::vector<PlotSeries> plot;
  const std::pair<NormKind, const char*> shown[] = {{NormKind::L2, "#1f77b4"}, {NormKind::Linf, "#d62728"}};
  for (auto [kind, colour] : shown) {
    PlotSeries s{std::string(to_string(kind)), colour, {}, {}, false};
    for (const auto& r : out.result.series) {
      s.t.push_back(r.t);
      s.v.push_back(value(r, kind));
    }
    plot.push_back(s);
    for (const auto& f : out.fits) {
      if (f.norm != kind) continue;
      PlotSeries line{"C t^-r (" + std::string(to_string(kind)) + ")", colour, s.t, {}, true};
      for (double t : line.t) line.v.push_back(t > 0 ? f.fit.C * std::pow(t, -f.fit.r) : 0.0);
      plot.push_back(line);
    }
  }
  write_loglog_svg(svg, label + " / " + std::string(to_string(diss)), plot);
  write_text_file(dir / "decay.svg", svg.str());
}

}  // namespace detail

/// Runs the configured experiment (time stepping or exact linear evolution),
/// fits every reported norm, and writes norms.csv, fit.csv and decay.svg.
inline RunOutputs execute(const ExperimentConfig& cfg, bool linear) {
  const auto spec = cfg.spec();
  const auto grid = cfg.grid();
  const auto sc = cfg.solver();
  RunOutputs out;
  out.result = linear ? run_linear(spec, grid, sc, cfg.start_position())
                      : run(spec, grid, sc, cfg.start_position());
  out.fits = detail::fit_all(cfg.label(), cfg.diss, out.result.series);
  detail::write_run_files(cfg.output, cfg.label(), cfg.diss, out);
  return out;
}

inline void print_fits(std::ostream& os, const std::vector<FitRow>& fits) {
  for (const auto& f : fits)
    os << std::left << std::setw(9) << to_string(f.norm) << " C = " << format_double(f.fit.C)
       << "  r = " << format_double(f.fit.r) << (f.fit.plateau ? "" : "  (rates not converged)") << '\n';
}

inline int report_contamination(const RunOutputs& out, std::ostream& err) {
  if (!out.result.contaminated) return kExitOk;
  err << "boundary contamination: monitor reached " << format_double(out.result.boundary_max)
      << " (limit " << format_double(kContaminationLimit) << ")\n";
  return kExitRuntime;
}

inline int cmd_simulate(const ExperimentConfig& cfg, std::ostream& os, std::ostream& err,
                        bool snapshot = false) {
  const auto out = execute(cfg, false);
  if (snapshot) {
    std::ofstream f(std::filesystem::path(cfg.output) / "final.bin", std::ios::binary);
    write_snapshot(f, cfg.grid(), out.result.final_state);
  }
  os << "wrote " << cfg.output << "/{norms.csv,fit.csv,decay.svg}\n";
  print_fits(os, out.fits);
  return report_contamination(out, err);
}

/// e-folding table for single modes; the last column is tau / xi^2.
inline void write_efold_csv(std::ostream& os, const SystemSpec& spec, const std::vector<double>& xis) {
  os << "xi0,efold,efold_over_xi2\n";
  for (double xi : xis) {
    const double tau = efolding_time(spec, xi);
    os << format_double(xi) << ',' << format_double(tau) << ',' << format_double(tau / (xi * xi)) << '\n';
  }
}

inline int cmd_linear(const ExperimentConfig& cfg, const std::vector<double>& efold_modes, std::ostream& os,
                      std::ostream& err) {
  const auto out = execute(cfg, true);
  os << "wrote " << cfg.output << "/{norms.csv,fit.csv,decay.svg}\n";
  print_fits(os, out.fits);
  if (!efold_modes.empty()) {
    std::ostringstream csv;
    write_efold_csv(csv, cfg.spec(), efold_modes);
    write_text_file(std::filesystem::path(cfg.output) / "efold.csv", csv.str());
    os << csv.str();
  }
  return report_contamination(out, err);
}

struct ClassifyTarget {
  std::string label;
  SystemSpec spec;
};

inline std::vector<ClassifyTarget> all_preset_targets() {
  std::vector<ClassifyTarget> out;
  for (const auto& p : kPresets)
    for (auto d : {Dissipation::Complete, Dissipation::PartialU})
      out.push_back({std::string(p.id), preset_spec(p.id, d)});
  return out;
}

inline int cmd_classify(const std::vector<ClassifyTarget>& targets, const std::string& output, std::ostream& os) {
  std::ostringstream csv;
  csv << kClassifyHeader << '\n';
  for (const auto& t : targets) write_classify_row(csv, t.label, t.spec.diss, classify(t.spec));
  if (!output.empty()) {
    std::filesystem::create_directories(output);
    write_text_file(std::filesystem::path(output) / "classify.csv", csv.str());
  }
  os << csv.str();
  return kExitOk;
}

inline int cmd_presets(std::ostream& os) {
  os << "id,a,b,c,d,family\n";
  for (const auto& p : kPresets) {
    const auto s = preset_spec(p.id, Dissipation::Complete);
    os << p.id << ',' << format_double(s.a) << ',' << format_double(s.b) << ',' << format_double(s.c) << ','
       << format_double(s.d) << ',' << (s.family == Family::C1 ? "C1" : "C2") << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// "key=v1,v2,v3"
inline SweepAxis parse_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ConfigError("sweep axis must look like key=v1,v2: '" + std::string(text) + "'");
  SweepAxis ax{std::string(detail::trim(text.substr(0, eq))), {}};
  if (ax.key == "output") throw ConfigError("output cannot be swept");
  std::string_view rest = text.substr(eq + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto v = detail::trim(rest.substr(0, comma));
    if (!v.empty()) ax.values.emplace_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  // validate the key and every value against a throwaway config
  ExperimentConfig probe;
  std::array<std::optional<double>, 4> parts;
  for (const auto& v : ax.values) apply_setting(probe, ax.key, v, parts);
  return ax;
}

struct SweepRow {
  std::vector<std::string> values;
  bool ok = false;
  std::string error;
  std::optional<DecayFit> l2, linf;
};

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + "\"";
}

inline int sweep_threads() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("BOUSSLAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

/// Cartesian product of the axes (last axis fastest). Each run writes into
/// <output>/run_NNN; the summary lands in <output>/summary.csv.
inline int cmd_sweep(const ExperimentConfig& base, const std::vector<SweepAxis>& axes, std::ostream& os,
                     int threads = sweep_threads()) {
  std::size_t total = axes.empty() ? 0 : 1;
  for (const auto& a : axes) total *= a.values.size();

  std::vector<SweepRow> rows(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    rows[i].values.resize(axes.size());
    for (std::size_t j = axes.size(); j-- > 0;) {
      rows[i].values[j] = axes[j].values[rem % axes[j].values.size()];
      rem /= axes[j].values.size();
    }
  }

  auto run_name = [](std::size_t i) {
    std::ostringstream s;
    s << "run_" << std::setw(3) << std::setfill('0') << i;
    return s.str();
  };

  auto work = [&](std::size_t i) {
    auto& row = rows[i];
    try {
      std::string text = emit(base);
      for (std::size_t j = 0; j < axes.size(); ++j) text += axes[j].key + "=" + row.values[j] + "\n";
      text += "output=" + (std::filesystem::path(base.output) / run_name(i)).string() + "\n";
      const auto cfg = parse_config(text);
      const auto out = execute(cfg, false);
      for (const auto& f : out.fits) {
        if (f.norm == NormKind::L2) row.l2 = f.fit;
        if (f.norm == NormKind::Linf) row.linf = f.fit;
      }
      row.ok = !out.result.contaminated;
      if (!row.ok) row.error = "boundary contamination " + format_double(out.result.boundary_max);
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < total;) work(i);
  };
  {
    std::vector<std::jthread> pool;
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(total)));
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }

  std::ostringstream csv;
  csv << "run";
  for (const auto& a : axes) csv << ',' << a.key;
  csv << ",status,r_l2,C_l2,plateau_l2,r_linf,C_linf,plateau_linf,error\n";
  for (std::size_t i = 0; i < total; ++i) {
    const auto& row = rows[i];
    csv << run_name(i);
    for (const auto& v : row.values) csv << ',' << csv_quote(v);
    csv << ',' << (row.ok ? "ok" : "error");
    for (const auto* f : {&row.l2, &row.linf}) {
      if (*f)
        csv << ',' << format_double((*f)->r) << ',' << format_double((*f)->C) << ','
            << ((*f)->plateau ? "true" : "false");
      else
        csv << ",,,";
    }
    csv << ',' << csv_quote(row.error) << '\n';
  }
  std::filesystem::create_directories(base.output);
  write_text_file(std::filesystem::path(base.output) / "summary.csv", csv.str());
  os << csv.str();
  return kExitOk;
}

}  // namespace bousslab
