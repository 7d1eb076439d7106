#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "bousslab/errors.hpp"
#include "bousslab/field.hpp"
#include "bousslab/params.hpp"
#include "bousslab/solver.hpp"

namespace bousslab {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error("format_double failed");
  return std::string(buf.data(), end);
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Everything needed to reproduce one experiment.
struct ExperimentConfig {
  std::string preset = "bbm-bbm";
  std::optional<std::array<double, 4>> coeffs;  // overrides preset when set
  Dissipation diss = Dissipation::Complete;
  double L = 320.0;
  double dx = 0.1;
  double dt = 0.05;
  double T = 50.0;
  std::optional<double> x0;  // default L / 2
  bool dealias = true;
  double asselin = 0.01;
  double sample_every = 1.0;
  std::string output = "out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  std::string label() const { return coeffs ? std::string("custom") : preset; }

  SystemSpec spec() const {
    if (coeffs) return make_spec((*coeffs)[0], (*coeffs)[1], (*coeffs)[2], (*coeffs)[3], diss);
    return preset_spec(preset, diss);
  }

  /// N is L/dx rounded to the nearest even integer; dx must divide L.
  Grid grid() const {
    if (!(L > 0) || !(dx > 0)) throw ConfigError("L and dx must be positive");
    const double ratio = L / dx;
    const long n = 2 * std::lround(ratio / 2.0);
    if (n <= 0 || std::abs(n * dx - L) > 1e-9 * std::max(1.0, L))
      throw ConfigError("dx = " + format_double(dx) + " does not divide L = " + format_double(L) +
                        " into an even number of cells");
    return Grid::make(L, static_cast<int>(n));
  }

  double start_position() const { return x0.value_or(0.5 * L); }

  SolverConfig solver() const {
    SolverConfig c;
    c.dt = dt;
    c.T = T;
    c.dealias = dealias;
    c.asselin = asselin;
    c.sample_every = sample_every;
    return c;
  }
};

inline std::string emit(const ExperimentConfig& c) {
  std::ostringstream os;
  if (c.coeffs) {
    os << "a=" << format_double((*c.coeffs)[0]) << '\n';
    os << "b=" << format_double((*c.coeffs)[1]) << '\n';
    os << "c=" << format_double((*c.coeffs)[2]) << '\n';
    os << "d=" << format_double((*c.coeffs)[3]) << '\n';
  } else {
    os << "preset=" << c.preset << '\n';
  }
  os << "diss=" << to_string(c.diss) << '\n';
  os << "L=" << format_double(c.L) << '\n';
  os << "dx=" << format_double(c.dx) << '\n';
  os << "dt=" << format_double(c.dt) << '\n';
  os << "T=" << format_double(c.T) << '\n';
  if (c.x0) os << "x0=" << format_double(*c.x0) << '\n';
  os << "dealias=" << (c.dealias ? "true" : "false") << '\n';
  os << "asselin=" << format_double(c.asselin) << '\n';
  os << "sample_every=" << format_double(c.sample_every) << '\n';
  os << "output=" << c.output << '\n';
  return os.str();
}

namespace detail {
inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}
}  // namespace detail

/// Applies one key=value pair. Unknown keys and malformed values throw.
inline void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view val,
                          std::array<std::optional<double>, 4>& coeff_parts) {
  auto num = [&]() {
    auto v = parse_double(val);
    if (!v) throw ConfigError("bad number for '" + std::string(key) + "': '" + std::string(val) + "'");
    return *v;
  };
  if (key == "preset") {
    if (!find_preset(val)) throw ConfigError("unknown preset '" + std::string(val) + "'");
    c.preset = std::string(val);
    c.coeffs.reset();
  } else if (key == "a" || key == "b" || key == "c" || key == "d") {
    coeff_parts[key[0] - 'a'] = num();
  } else if (key == "diss") {
    auto d = parse_dissipation(val);
    if (!d) throw ConfigError("unknown dissipation '" + std::string(val) + "'");
    c.diss = *d;
  } else if (key == "L") {
    c.L = num();
  } else if (key == "dx") {
    c.dx = num();
  } else if (key == "dt") {
    c.dt = num();
  } else if (key == "T") {
    c.T = num();
  } else if (key == "x0") {
    c.x0 = num();
  } else if (key == "dealias") {
    if (val == "true" || val == "1" || val == "on") c.dealias = true;
    else if (val == "false" || val == "0" || val == "off") c.dealias = false;
    else throw ConfigError("bad boolean for dealias: '" + std::string(val) + "'");
  } else if (key == "asselin") {
    c.asselin = num();
  } else if (key == "sample_every") {
    c.sample_every = num();
  } else if (key == "output") {
    c.output = std::string(val);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

inline void finish_coeffs(ExperimentConfig& c, const std::array<std::optional<double>, 4>& parts) {
  const int given = (parts[0].has_value() + parts[1].has_value() + parts[2].has_value() + parts[3].has_value());
  if (given == 0) return;
  if (given != 4) throw ConfigError("explicit coefficients need all of a, b, c, d");
  c.coeffs = std::array<double, 4>{*parts[0], *parts[1], *parts[2], *parts[3]};
}

/// Flat key=value text, one pair per line, '#' starts a comment.
inline ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {}) {
  std::array<std::optional<double>, 4> parts;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    apply_setting(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), parts);
  }
  finish_coeffs(base, parts);
  return base;
}

}  // namespace bousslab
