#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bousslab/config.hpp"
#include "bousslab/decay.hpp"
#include "bousslab/errors.hpp"
#include "bousslab/field.hpp"
#include "bousslab/symbol.hpp"

namespace bousslab {

inline constexpr const char* kNormsHeader = "t,l2_uv,linf_uv,h1_uv,l2_etaw,boundary_monitor";
inline constexpr const char* kFitHeader = "preset,diss,norm,r,C,plateau";
inline constexpr const char* kClassifyHeader = "preset,diss,class,delta_m,delta_M,resonance";

inline void write_norms_csv(std::ostream& os, const NormSeries& series) {
  os << kNormsHeader << '\n';
  for (const auto& r : series) {
    os << format_double(r.t) << ',' << format_double(r.l2_uv) << ',' << format_double(r.linf_uv) << ','
       << format_double(r.h1_uv) << ',' << format_double(r.l2_etaw) << ','
       << format_double(r.boundary_monitor) << '\n';
  }
}

inline NormSeries read_norms_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kNormsHeader) throw ConfigError("norms.csv: bad header");
  NormSeries out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      auto d = parse_double(cell);
      if (!d) throw ConfigError("norms.csv: bad number '" + cell + "'");
      v.push_back(*d);
    }
    if (v.size() != 6) throw ConfigError("norms.csv: expected 6 columns");
    NormRecord r;
    r.t = v[0];
    r.l2_uv = v[1];
    r.linf_uv = v[2];
    r.h1_uv = v[3];
    r.l2_etaw = v[4];
    r.boundary_monitor = v[5];
    out.push_back(r);
  }
  return out;
}

struct FitRow {
  std::string preset;
  Dissipation diss;
  NormKind norm;
  DecayFit fit;
};

inline void write_fit_row(std::ostream& os, const FitRow& f) {
  os << f.preset << ',' << to_string(f.diss) << ',' << to_string(f.norm) << ',' << format_double(f.fit.r)
     << ',' << format_double(f.fit.C) << ',' << (f.fit.plateau ? "true" : "false") << '\n';
}

inline void write_fit_csv(std::ostream& os, const std::vector<FitRow>& rows) {
  os << kFitHeader << '\n';
  for (const auto& r : rows) write_fit_row(os, r);
}

inline void write_classify_row(std::ostream& os, const std::string& label, Dissipation diss,
                               const Classification& c) {
  os << label << ',' << to_string(diss) << ',' << to_string(c.klass) << ',' << format_double(c.delta_m)
     << ',' << format_double(c.delta_M) << ',' << (c.resonance ? format_double(*c.resonance) : "") << '\n';
}

// Snapshot: little-endian IEEE doubles N, L, t, eta[0..N), u[0..N).
inline void write_snapshot(std::ostream& os, const Grid& g, const FieldState& s) {
  auto put = [&](double v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
  put(static_cast<double>(g.N));
  put(g.L);
  put(s.t);
  for (double v : s.eta) put(v);
  for (double v : s.u) put(v);
  if (!os) throw Error("snapshot write failed");
}

struct Snapshot {
  int N = 0;
  double L = 0, t = 0;
  std::vector<double> eta, u;
};

inline Snapshot read_snapshot(std::istream& is) {
  auto get = [&]() {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw Error("snapshot truncated");
    return v;
  };
  Snapshot s;
  const double n = get();
  if (!(n > 0) || n != std::floor(n) || n > 1e9) throw Error("snapshot: bad N");
  s.N = static_cast<int>(n);
  s.L = get();
  s.t = get();
  s.eta.resize(s.N);
  s.u.resize(s.N);
  for (auto& v : s.eta) v = get();
  for (auto& v : s.u) v = get();
  return s;
}

struct PlotSeries {
  std::string name;
  std::string colour;
  std::vector<double> t, v;
  bool dashed = false;
};

/// Static log-log line chart. Points with t <= 0 or v <= 0 are dropped.
inline void write_loglog_svg(std::ostream& os, const std::string& title, const std::vector<PlotSeries>& series) {
  const double W = 640, H = 420, ml = 70, mr = 150, mt = 40, mb = 50;
  double tmin = HUGE_VAL, tmax = -HUGE_VAL, vmin = HUGE_VAL, vmax = -HUGE_VAL;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (!(s.t[i] > 0) || !(s.v[i] > 0)) continue;
      tmin = std::min(tmin, std::log10(s.t[i]));
      tmax = std::max(tmax, std::log10(s.t[i]));
      vmin = std::min(vmin, std::log10(s.v[i]));
      vmax = std::max(vmax, std::log10(s.v[i]));
    }
  if (!(tmax >= tmin)) tmin = 0, tmax = 1;
  if (!(vmax >= vmin)) vmin = 0, vmax = 1;
  tmin = std::floor(tmin), tmax = std::max(std::ceil(tmax), tmin + 1);
  vmin = std::floor(vmin), vmax = std::max(std::ceil(vmax), vmin + 1);
  auto px = [&](double lt) { return ml + (lt - tmin) / (tmax - tmin) * (W - ml - mr); };
  auto py = [&](double lv) { return H - mb - (lv - vmin) / (vmax - vmin) * (H - mt - mb); };
  auto f = [](double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << f(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<g stroke=\"#ccc\" font-size=\"11\">\n";
  for (int e = static_cast<int>(tmin); e <= static_cast<int>(tmax); ++e)
    os << "<line x1=\"" << f(px(e)) << "\" y1=\"" << f(py(vmin)) << "\" x2=\"" << f(px(e)) << "\" y2=\""
       << f(py(vmax)) << "\"/><text x=\"" << f(px(e)) << "\" y=\"" << f(H - mb + 16)
       << "\" text-anchor=\"middle\" stroke=\"none\">1e" << e << "</text>\n";
  for (int e = static_cast<int>(vmin); e <= static_cast<int>(vmax); ++e)
    os << "<line x1=\"" << f(px(tmin)) << "\" y1=\"" << f(py(e)) << "\" x2=\"" << f(px(tmax)) << "\" y2=\""
       << f(py(e)) << "\"/><text x=\"" << f(ml - 6) << "\" y=\"" << f(py(e) + 4)
       << "\" text-anchor=\"end\" stroke=\"none\">1e" << e << "</text>\n";
  os << "</g>\n";
  os << "<text x=\"" << f((ml + W - mr) / 2) << "\" y=\"" << f(H - 12) << "\" text-anchor=\"middle\" font-size=\"12\">t</text>\n";

  double ly = mt + 10;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\""
       << (s.dashed ? " stroke-dasharray=\"5,4\"" : "") << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (!(s.t[i] > 0) || !(s.v[i] > 0)) continue;
      os << (first ? "" : " ") << f(px(std::log10(s.t[i]))) << ',' << f(py(std::log10(s.v[i])));
      first = false;
    }
    os << "\"/>\n";
    os << "<line x1=\"" << f(W - mr + 10) << "\" y1=\"" << f(ly) << "\" x2=\"" << f(W - mr + 30) << "\" y2=\""
       << f(ly) << "\" stroke=\"" << s.colour << "\"" << (s.dashed ? " stroke-dasharray=\"5,4\"" : "")
       << "/><text x=\"" << f(W - mr + 35) << "\" y=\"" << f(ly + 4) << "\" font-size=\"11\">" << s.name
       << "</text>\n";
    ly += 18;
  }
  os << "</svg>\n";
}

inline void write_text_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot open " + p.string() + " for writing");
  f << content;
  if (!f) throw Error("write failed: " + p.string());
}

}  // namespace bousslab
