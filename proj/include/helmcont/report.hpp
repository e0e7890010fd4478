#pragma once

// Deterministic report emission. Numbers are printed with std::to_chars at
// 17 significant digits (locale-free, round-trip exact for double), so a
// given record list always produces byte-identical files. SVG plots are
// standalone, fixed-palette, and carry no timestamps or host details.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "helmcont/core.hpp"
#include "helmcont/experiments.hpp"
#include "helmcont/operator_b.hpp"
#include "helmcont/util.hpp"

namespace helmcont {

namespace detail {

inline std::string fmt_double(double v, int precision = 17) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericalError("io", "cannot open for writing: " + path);
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

inline double parse_double_cell(const std::string& cell) {
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(cell);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// stability CSV

/// Header "k,geometry,solution_id,delta,theta,lhs_total,rhs_total,ratio,
/// term:<name>...". Term columns are the union of the records' term names
/// in first-appearance order; absent values print as nan.
inline void write_stability_csv(const std::string& path,
                                const std::vector<StabilityRecord>& records) {
  if (records.empty())
    throw std::invalid_argument("write_stability_csv: no records to write");

  std::vector<std::string> names;
  for (const StabilityRecord& r : records)
    for (const auto& [name, value] : r.terms) {
      (void)value;
      if (std::find(names.begin(), names.end(), name) == names.end())
        names.push_back(name);
    }

  std::ofstream out = detail::open_out(path);
  out << "k,geometry,solution_id,delta,theta,lhs_total,rhs_total,ratio";
  for (const std::string& n : names) out << ",term:" << n;
  out << "\n";
  for (const StabilityRecord& r : records) {
    out << detail::fmt_double(r.k) << ',' << r.geometry << ',' << r.solution_id << ','
        << detail::fmt_double(r.delta) << ',' << detail::fmt_double(r.theta) << ','
        << detail::fmt_double(r.lhs_total) << ',' << detail::fmt_double(r.rhs_total)
        << ',' << detail::fmt_double(r.ratio);
    for (const std::string& n : names) {
      double v = std::numeric_limits<double>::quiet_NaN();
      for (const auto& [name, value] : r.terms)
        if (name == n) {
          v = value;
          break;
        }
      out << ',' << detail::fmt_double(v);
    }
    out << "\n";
  }
}

/// Parse-back of write_stability_csv output (round-trip test oracle).
inline std::vector<StabilityRecord> parse_stability_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NumericalError("io", "cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw NumericalError("io", "empty stability CSV: " + path);
  const auto header = detail::split_csv_line(line);
  if (header.size() < 8 || header[0] != "k")
    throw NumericalError("io", "malformed stability CSV header: " + path);

  std::vector<StabilityRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw NumericalError("io", "ragged stability CSV row: " + path);
    StabilityRecord r;
    r.k = detail::parse_double_cell(cells[0]);
    r.geometry = cells[1];
    r.solution_id = cells[2];
    r.delta = detail::parse_double_cell(cells[3]);
    r.theta = detail::parse_double_cell(cells[4]);
    r.lhs_total = detail::parse_double_cell(cells[5]);
    r.rhs_total = detail::parse_double_cell(cells[6]);
    r.ratio = detail::parse_double_cell(cells[7]);
    for (std::size_t c = 8; c < cells.size(); ++c) {
      const std::string& h = header[c];
      if (h.rfind("term:", 0) != 0)
        throw NumericalError("io", "unexpected stability CSV column: " + h);
      const double v = detail::parse_double_cell(cells[c]);
      if (!std::isnan(v)) r.terms.emplace_back(h.substr(5), v);
    }
    r.ok = !std::isnan(r.ratio);
    records.push_back(std::move(r));
  }
  return records;
}

// ---------------------------------------------------------------------------
// spectrum and diagnostics CSV

/// Header "k,m,sigma,resonant"; one row per mode, spectra in given order.
inline void write_spectrum_csv(const std::string& path,
                               const std::vector<SingularSpectrum>& spectra) {
  if (spectra.empty())
    throw std::invalid_argument("write_spectrum_csv: no spectra to write");
  std::ofstream out = detail::open_out(path);
  out << "k,m,sigma,resonant\n";
  for (const SingularSpectrum& s : spectra)
    for (const ModeSigma& e : s.entries)
      out << detail::fmt_double(s.k) << ',' << e.m << ',' << detail::fmt_double(e.sigma)
          << ',' << (e.resonant ? 1 : 0) << "\n";
}

/// Header "mode,omega2,amp_in_out,flagged"; ascending mode order.
inline void write_diagnostics_csv(const std::string& path,
                                  const ContinuationResult& res) {
  std::ofstream out = detail::open_out(path);
  out << "mode,omega2,amp_in_out,flagged\n";
  for (const ModeDiagnostic& d : res.diagnostics)
    out << d.mode << ',' << detail::fmt_double(d.omega2) << ','
        << detail::fmt_double(d.amplification) << ',' << (d.flagged ? 1 : 0) << "\n";
}

/// Target-boundary trace per mode, for end-to-end oracle checks.
inline void write_trace_csv(const std::string& path, const ContinuationResult& res) {
  std::ofstream out = detail::open_out(path);
  out << "mode,re_value,im_value,re_derivative,im_derivative\n";
  const GridInfo& g = res.field.grid;
  for (int a = 0; a < g.n_tan; ++a)
    out << g.mode(a) << ',' << detail::fmt_double(res.trace_value[a].real()) << ','
        << detail::fmt_double(res.trace_value[a].imag()) << ','
        << detail::fmt_double(res.trace_derivative[a].real()) << ','
        << detail::fmt_double(res.trace_derivative[a].imag()) << "\n";
}

// ---------------------------------------------------------------------------
// field dump

/// Rows (i_tangential, j_depth, re, im); a leading # line carries the grid
/// so the dump can be reloaded stand-alone (the norms command needs it).
inline void write_field_csv(const std::string& path, const Field& field) {
  const GridInfo& g = field.grid;
  std::ofstream out = detail::open_out(path);
  out << "# " << to_string(g.kind) << ',' << g.n_tan << ',' << g.n_prof << ','
      << detail::fmt_double(g.tan_period) << ',' << detail::fmt_double(g.prof_lo) << ','
      << detail::fmt_double(g.prof_hi) << ',' << detail::fmt_double(g.sponge_width)
      << "\n";
  out << "i_tangential,j_depth,re,im\n";
  for (int j = 0; j < g.n_prof; ++j)
    for (int i = 0; i < g.n_tan; ++i)
      out << i << ',' << j << ',' << detail::fmt_double(field.at(i, j).real()) << ','
          << detail::fmt_double(field.at(i, j).imag()) << "\n";
}

inline Field read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NumericalError("io", "cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw NumericalError("io", "field dump missing grid line: " + path);
  const auto meta = detail::split_csv_line(line.substr(2));
  if (meta.size() != 7)
    throw NumericalError("io", "malformed field dump grid line: " + path);
  GridInfo g;
  if (meta[0] == "strip")
    g.kind = GeometryKind::strip;
  else if (meta[0] == "annulus")
    g.kind = GeometryKind::annulus;
  else
    throw NumericalError("io", "unknown geometry kind in field dump: " + meta[0]);
  g.n_tan = std::stoi(meta[1]);
  g.n_prof = std::stoi(meta[2]);
  g.tan_period = detail::parse_double_cell(meta[3]);
  g.prof_lo = detail::parse_double_cell(meta[4]);
  g.prof_hi = detail::parse_double_cell(meta[5]);
  g.sponge_width = detail::parse_double_cell(meta[6]);

  if (!std::getline(in, line) || line != "i_tangential,j_depth,re,im")
    throw NumericalError("io", "field dump missing column header: " + path);

  Field field(g);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 4) throw NumericalError("io", "ragged field dump row: " + path);
    const int i = std::stoi(cells[0]);
    const int j = std::stoi(cells[1]);
    if (i < 0 || i >= g.n_tan || j < 0 || j >= g.n_prof)
      throw NumericalError("io", "field dump index out of range: " + path);
    field.at(i, j) =
        cdouble{detail::parse_double_cell(cells[2]), detail::parse_double_cell(cells[3])};
    ++rows;
  }
  if (rows != field.values.size())
    throw NumericalError("io", "field dump row count mismatch: " + path);
  return field;
}

// ---------------------------------------------------------------------------
// SVG line plots

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string fmt_coord(double v) { return fmt_double(v, 6); }

inline void svg_axis_ticks(std::ostringstream& svg, bool log_scale, double lo, double hi,
                           bool horizontal, double px_lo, double px_hi, double cross_px) {
  std::vector<double> ticks;
  if (log_scale) {
    const int e_lo = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
    const int e_hi = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
    for (int e = e_lo; e <= e_hi; ++e) ticks.push_back(std::pow(10.0, e));
    if (ticks.empty()) ticks = {lo, hi};
  } else {
    for (int t = 0; t <= 4; ++t) ticks.push_back(lo + (hi - lo) * t / 4.0);
  }
  for (double t : ticks) {
    const double frac = log_scale ? (std::log10(t) - std::log10(lo)) /
                                        (std::log10(hi) - std::log10(lo))
                                  : (t - lo) / (hi - lo);
    const double px = px_lo + (px_hi - px_lo) * frac;
    if (horizontal) {
      svg << "<line x1=\"" << fmt_coord(px) << "\" y1=\"" << fmt_coord(cross_px)
          << "\" x2=\"" << fmt_coord(px) << "\" y2=\"" << fmt_coord(cross_px + 5)
          << "\" stroke=\"#444444\"/>\n";
      svg << "<text x=\"" << fmt_coord(px) << "\" y=\"" << fmt_coord(cross_px + 18)
          << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt_double(t, 3)
          << "</text>\n";
    } else {
      svg << "<line x1=\"" << fmt_coord(cross_px - 5) << "\" y1=\"" << fmt_coord(px)
          << "\" x2=\"" << fmt_coord(cross_px) << "\" y2=\"" << fmt_coord(px)
          << "\" stroke=\"#444444\"/>\n";
      svg << "<text x=\"" << fmt_coord(cross_px - 8) << "\" y=\"" << fmt_coord(px + 4)
          << "\" font-size=\"11\" text-anchor=\"end\">" << fmt_double(t, 3)
          << "</text>\n";
    }
  }
}

}  // namespace detail

/// Standalone SVG line plot; log axes skip nonpositive points. Palette and
/// layout are fixed so identical inputs give identical bytes.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<PlotSeries>& series, bool log_x,
                           bool log_y) {
  if (series.empty()) throw std::invalid_argument("write_svg_plot: no series to plot");

  const double W = 720, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  std::size_t usable = 0;
  for (const PlotSeries& s : series)
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (log_x && x <= 0.0) continue;
      if (log_y && y <= 0.0) continue;
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
      ++usable;
    }
  if (usable == 0) throw std::invalid_argument("write_svg_plot: no plottable points");
  if (x_lo == x_hi) {
    x_lo = log_x ? x_lo * 0.5 : x_lo - 1.0;
    x_hi = log_x ? x_hi * 2.0 : x_hi + 1.0;
  }
  if (y_lo == y_hi) {
    y_lo = log_y ? y_lo * 0.5 : y_lo - 1.0;
    y_hi = log_y ? y_hi * 2.0 : y_hi + 1.0;
  }

  auto px = [&](double x) {
    const double f = log_x ? (std::log10(x) - std::log10(x_lo)) /
                                 (std::log10(x_hi) - std::log10(x_lo))
                           : (x - x_lo) / (x_hi - x_lo);
    return ml + (W - ml - mr) * f;
  };
  auto py = [&](double y) {
    const double f = log_y ? (std::log10(y) - std::log10(y_lo)) /
                                 (std::log10(y_hi) - std::log10(y_lo))
                           : (y - y_lo) / (y_hi - y_lo);
    return H - mb - (H - mt - mb) * f;
  };

  static const char* palette[] = {"#1f6f8b", "#c05746", "#4f7942", "#7d5ba6",
                                  "#b8860b", "#555555"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
         "viewBox=\"0 0 720 480\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"720\" height=\"480\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"360\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">" << title
      << "</text>\n";
  svg << "<line x1=\"" << detail::fmt_coord(ml) << "\" y1=\"" << detail::fmt_coord(H - mb)
      << "\" x2=\"" << detail::fmt_coord(W - mr) << "\" y2=\""
      << detail::fmt_coord(H - mb) << "\" stroke=\"#444444\"/>\n";
  svg << "<line x1=\"" << detail::fmt_coord(ml) << "\" y1=\"" << detail::fmt_coord(mt)
      << "\" x2=\"" << detail::fmt_coord(ml) << "\" y2=\"" << detail::fmt_coord(H - mb)
      << "\" stroke=\"#444444\"/>\n";
  detail::svg_axis_ticks(svg, log_x, x_lo, x_hi, true, ml, W - mr, H - mb);
  detail::svg_axis_ticks(svg, log_y, y_lo, y_hi, false, H - mb, mt, ml);
  svg << "<text x=\"" << detail::fmt_coord((ml + W - mr) / 2) << "\" y=\""
      << detail::fmt_coord(H - 10) << "\" font-size=\"12\" text-anchor=\"middle\">"
      << xlabel << "</text>\n";
  svg << "<text x=\"16\" y=\"" << detail::fmt_coord((mt + H - mb) / 2)
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << detail::fmt_coord((mt + H - mb) / 2) << ")\">" << ylabel << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % 6];
    std::ostringstream pts;
    for (const auto& [x, y] : series[s].points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (log_x && x <= 0.0) continue;
      if (log_y && y <= 0.0) continue;
      pts << detail::fmt_coord(px(x)) << ',' << detail::fmt_coord(py(y)) << ' ';
    }
    const std::string p = pts.str();
    if (p.empty()) continue;
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" "
        << "points=\"" << p << "\"/>\n";
    svg << "<text x=\"" << detail::fmt_coord(W - mr - 6) << "\" y=\""
        << detail::fmt_coord(mt + 16.0 * (s + 1)) << "\" font-size=\"11\" "
        << "text-anchor=\"end\" fill=\"" << color << "\">" << series[s].name
        << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out = detail::open_out(path);
  out << svg.str();
}

// ---------------------------------------------------------------------------
// conjecture report

/// Flat key-value block plus the plateau table; r_star is the sorted-order
/// plateau size, m_star the contiguous angular-order edge.
inline void write_conjecture_report(const std::string& path,
                                    const ConjectureMetrics& met) {
  std::ofstream out = detail::open_out(path);
  out << "theta=" << detail::fmt_double(met.theta) << "\n";
  out << "delta1_hat=" << detail::fmt_double(met.delta1) << "\n";
  out << "delta2_hat=" << detail::fmt_double(met.delta2) << "\n";
  out << "monotone_ok=" << (met.monotone_ok ? 1 : 0) << "\n";
  out << "points=" << met.points.size() << "\n";
  out << "\n";
  out << "k,m_star,r_star,sigma_ref,plateau_min_ratio\n";
  for (const PlateauPoint& p : met.points)
    out << detail::fmt_double(p.k) << ',' << p.m_star << ',' << p.r_star << ','
        << detail::fmt_double(p.sigma_ref) << ','
        << detail::fmt_double(p.plateau_min_ratio) << "\n";
}

// ---------------------------------------------------------------------------
// bundle writers

/// Stability records to CSV plus the ratio-vs-k plot.
inline void emit_report(const std::vector<StabilityRecord>& records,
                        const std::string& out_dir, bool svg = true) {
  if (records.empty()) throw std::invalid_argument("emit_report: no records");
  namespace fs = std::filesystem;
  write_stability_csv((fs::path(out_dir) / "stability.csv").string(), records);
  if (!svg) return;
  PlotSeries ratio{"ratio", {}}, lhs{"lhs_total", {}}, rhs{"rhs_total", {}};
  for (const StabilityRecord& r : records) {
    ratio.points.emplace_back(r.k, r.ratio);
    lhs.points.emplace_back(r.k, r.lhs_total);
    rhs.points.emplace_back(r.k, r.rhs_total);
  }
  write_svg_plot((fs::path(out_dir) / "ratio_vs_k.svg").string(),
                 "stability ratio against wave number", "k", "ratio",
                 {ratio, lhs, rhs}, true, true);
}

/// Singular spectra to CSV plus the sigma-vs-m plot.
inline void emit_report(const std::vector<SingularSpectrum>& spectra,
                        const std::string& out_dir, bool svg = true) {
  if (spectra.empty()) throw std::invalid_argument("emit_report: no spectra");
  namespace fs = std::filesystem;
  write_spectrum_csv((fs::path(out_dir) / "spectrum.csv").string(), spectra);
  if (!svg) return;
  std::vector<PlotSeries> series;
  for (const SingularSpectrum& s : spectra) {
    PlotSeries ps{"k=" + detail::fmt_double(s.k, 6), {}};
    for (const ModeSigma& e : s.entries)
      if (e.m >= 0 && !e.resonant) ps.points.emplace_back(e.m, e.sigma);
    series.push_back(std::move(ps));
  }
  write_svg_plot((fs::path(out_dir) / "sigma_vs_m.svg").string(),
                 "singular values by angular order", "m", "sigma", series, false, true);
}

}  // namespace helmcont
