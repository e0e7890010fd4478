#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "helmcont/util.hpp"

namespace helmcont {

enum class GeometryKind { strip, annulus };

inline const char* to_string(GeometryKind k) {
  return k == GeometryKind::strip ? "strip" : "annulus";
}

/// Uniform grid description shared by both geometries.
///
/// Tangential direction: n_tan equispaced points on a period (L for the
/// strip, 2*pi for the annulus), Fourier modes stored in ascending order
/// m = -n_tan/2 .. n_tan/2-1. Profile direction: n_prof points spanning
/// depth [0,1] (strip) or radius [1,R] (annulus), endpoints included.
struct GridInfo {
  GeometryKind kind = GeometryKind::strip;
  int n_tan = 0;
  int n_prof = 0;
  double tan_period = 0.0;
  double prof_lo = 0.0;
  double prof_hi = 0.0;
  double sponge_width = 0.0;

  double dx() const { return tan_period / n_tan; }
  double dprof() const { return (prof_hi - prof_lo) / (n_prof - 1); }
  double x(int i) const { return i * dx(); }
  double prof(int j) const { return prof_lo + j * dprof(); }
  int mode(int idx) const { return idx - n_tan / 2; }
  int index_of_mode(int m) const { return m + n_tan / 2; }

  /// Tangential frequency of a stored mode: xi = 2*pi*m/L on the strip,
  /// the integer m itself on the annulus.
  double frequency(int m) const {
    return kind == GeometryKind::strip ? 2.0 * M_PI * m / tan_period
                                       : static_cast<double>(m);
  }

  /// Area measure weight of the profile coordinate (r for the annulus).
  double measure(double prof_coord) const {
    return kind == GeometryKind::annulus ? prof_coord : 1.0;
  }

  /// Distance of tangential coordinate x from the period seam at x=0.
  double seam_distance(double xc) const {
    double x0 = std::fmod(xc, tan_period);
    if (x0 < 0) x0 += tan_period;
    return std::min(x0, tan_period - x0);
  }

  bool operator==(const GridInfo&) const = default;
};

/// Periodic strip (x', x_n) in [0,L) x [0,1]; data boundary at x_n=0,
/// target at x_n=1. sponge_width is the fraction of L, on each side of the
/// period seam, reserved for the lateral cutoff band.
struct StripGeometry {
  double L = 2.0 * M_PI;
  int n_tangential = 64;
  int n_depth = 33;
  double sponge_width = 0.1;

  GridInfo grid() const {
    return {GeometryKind::strip, n_tangential, n_depth, L, 0.0, 1.0, sponge_width};
  }
};

/// Annulus 1 < r < R; data boundary at r=1, target at r=R.
struct AnnulusGeometry {
  double R = 2.0;
  int n_angular = 128;
  int n_radial = 2049;

  GridInfo grid() const {
    return {GeometryKind::annulus, n_angular, n_radial, 2.0 * M_PI, 1.0, R, 0.0};
  }
};

inline StripGeometry build_strip_geometry(double L, int n_tangential, int n_depth,
                                          double sponge_width) {
  if (!(L > 0.0) || !std::isfinite(L))
    throw std::invalid_argument("strip geometry: L must be positive");
  if (n_tangential < 8 || n_tangential % 2 != 0)
    throw std::invalid_argument("strip geometry: n_tangential must be even and >= 8");
  if (n_depth < 2)
    throw std::invalid_argument("strip geometry: n_depth must be >= 2");
  if (!(sponge_width >= 0.0) || sponge_width >= 0.5)
    throw std::invalid_argument("strip geometry: sponge_width must lie in [0, 0.5)");
  return {L, n_tangential, n_depth, sponge_width};
}

inline AnnulusGeometry build_annulus_geometry(double R, int n_angular, int n_radial) {
  if (!(R > 1.0) || !std::isfinite(R))
    throw std::invalid_argument("annulus geometry: R must exceed 1");
  if (n_angular < 8 || n_angular % 2 != 0)
    throw std::invalid_argument("annulus geometry: n_angular must be even and >= 8");
  if (n_radial < 2)
    throw std::invalid_argument("annulus geometry: n_radial must be >= 2");
  return {R, n_angular, n_radial};
}

/// Complex scalar field on the grid, profile-major storage: the tangential
/// ring at profile level j is contiguous (values[j*n_tan + i]).
struct Field {
  GridInfo grid;
  std::vector<cdouble> values;

  Field() = default;
  explicit Field(const GridInfo& g)
      : grid(g), values(static_cast<std::size_t>(g.n_tan) * g.n_prof) {}

  cdouble& at(int i_tan, int j_prof) {
    return values[static_cast<std::size_t>(j_prof) * grid.n_tan + i_tan];
  }
  const cdouble& at(int i_tan, int j_prof) const {
    return values[static_cast<std::size_t>(j_prof) * grid.n_tan + i_tan];
  }
};

/// Cauchy data on the data boundary: mode-wise traces of u and of its
/// normal/radial derivative taken pointing into the domain, in ascending
/// mode order, plus the wave number they belong to.
struct CauchyData {
  GridInfo grid;
  double k = 0.0;
  std::vector<cdouble> u0;
  std::vector<cdouble> u1;

  CauchyData() = default;
  CauchyData(const GridInfo& g, double wave_number)
      : grid(g), k(wave_number), u0(g.n_tan), u1(g.n_tan) {}
};

/// Second-order elliptic coefficient model
///   A = a22 d_nn + 2 a12 d_tn + a11 d_tt + a1 d_t + a2 d_n + a0,
/// with t the tangential and n the depth/radial direction. The strip variant
/// is constant, the annulus variant radially symmetric (profiles of r).
/// E bounds the tangential principal symbol, eps0 the ellipticity constant,
/// c the first-order-in-k zeroth coefficient.
struct CoefficientModel {
  GeometryKind kind = GeometryKind::strip;
  std::string preset = "laplacian";

  // strip constants
  double s_a11 = 1.0, s_a12 = 0.0, s_a22 = 1.0;
  double s_a1 = 0.0, s_a2 = 0.0, s_a0 = 0.0, s_c = 0.0;

  // annulus radial profiles
  std::function<double(double)> a22, a11, a2, a1, a0, c;

  double E = 1.0;
  double eps0 = 1.0;
};

inline CoefficientModel laplacian_strip() {
  CoefficientModel m;
  m.kind = GeometryKind::strip;
  m.preset = "laplacian";
  return m;
}

/// Polar Laplacian on the annulus: u_rr + u_r/r + u_pp/r^2. Per mode the
/// radial equation is Bessel's equation, solutions J_m(kr), Y_m(kr).
/// E = sup sqrt(a11) = 1, attained at r = 1.
inline CoefficientModel laplacian_annulus(double c_coeff = 0.0) {
  CoefficientModel m;
  m.kind = GeometryKind::annulus;
  m.preset = "laplacian";
  m.a22 = [](double) { return 1.0; };
  m.a11 = [](double r) { return 1.0 / (r * r); };
  m.a2 = [](double r) { return 1.0 / r; };
  m.a1 = [](double) { return 0.0; };
  m.a0 = [](double) { return 0.0; };
  m.c = [c_coeff](double) { return c_coeff; };
  m.E = 1.0;
  m.eps0 = 1.0;
  return m;
}

/// Two-column (r, value) table with linear interpolation, clamped outside
/// the tabulated range.
class RadialTable {
public:
  explicit RadialTable(std::vector<std::array<double, 2>> pts) : pts_(std::move(pts)) {
    if (pts_.size() < 2)
      throw std::invalid_argument("radial table needs at least two rows");
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (!std::isfinite(pts_[i][0]) || !std::isfinite(pts_[i][1]))
        throw NumericalError("nonfinite_coefficient", "radial table holds a nonfinite entry");
      if (i > 0 && pts_[i][0] <= pts_[i - 1][0])
        throw std::invalid_argument("radial table abscissae must increase");
    }
  }

  double operator()(double r) const {
    if (r <= pts_.front()[0]) return pts_.front()[1];
    if (r >= pts_.back()[0]) return pts_.back()[1];
    std::size_t hi = 1;
    while (pts_[hi][0] < r) ++hi;
    const auto& a = pts_[hi - 1];
    const auto& b = pts_[hi];
    const double t = (r - a[0]) / (b[0] - a[0]);
    return a[1] * (1.0 - t) + b[1] * t;
  }

  double min_value() const {
    double v = pts_.front()[1];
    for (const auto& p : pts_) v = std::min(v, p[1]);
    return v;
  }

private:
  std::vector<std::array<double, 2>> pts_;
};

inline std::vector<std::array<double, 2>> load_radial_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("coefficients.table_path", "cannot open table file: " + path);
  std::vector<std::array<double, 2>> pts;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double r, v;
    if (row >> r >> v) pts.push_back({r, v});
  }
  if (pts.size() < 2)
    throw ConfigError("coefficients.table_path", "table needs at least two (r, value) rows");
  return pts;
}

/// Scaled polar Laplacian: the table q(r) multiplies the principal part,
/// a22 = q, a2 = q/r, a11 = q/r^2. Ellipticity constant inf q, tangential
/// bound E = sup sqrt(q)/r over the annulus.
inline CoefficientModel radial_table_annulus(std::vector<std::array<double, 2>> pts,
                                             double R) {
  auto table = std::make_shared<RadialTable>(std::move(pts));
  CoefficientModel m;
  m.kind = GeometryKind::annulus;
  m.preset = "radial_table";
  m.a22 = [table](double r) { return (*table)(r); };
  m.a11 = [table](double r) { return (*table)(r) / (r * r); };
  m.a2 = [table](double r) { return (*table)(r) / r; };
  m.a1 = [](double) { return 0.0; };
  m.a0 = [](double) { return 0.0; };
  m.c = [](double) { return 0.0; };
  double sup_a11 = 0.0;
  const int samples = 512;
  for (int j = 0; j <= samples; ++j) {
    const double r = 1.0 + (R - 1.0) * j / samples;
    sup_a11 = std::max(sup_a11, m.a11(r));
  }
  m.E = std::sqrt(sup_a11);
  m.eps0 = table->min_value();
  return m;
}

struct ValidationReport {
  bool pass = false;
  bool eps0_ok = false;
  bool E_ok = false;
  double worst_margin = 0.0;   // smallest ellipticity slack found
  double worst_location = 0.0; // grid r (annulus) or sample angle (strip)
  std::string message;
};

/// Strip check on a sampled set of unit directions xi(theta):
/// eps0 |xi|^2 <= sum a_jm xi_j xi_m and tangential part bounded by E^2.
inline ValidationReport validate_coefficients(const CoefficientModel& m,
                                              const StripGeometry&) {
  if (m.kind != GeometryKind::strip)
    throw std::invalid_argument("validate_coefficients: model/geometry kind mismatch");
  for (double v : {m.s_a11, m.s_a12, m.s_a22, m.s_a1, m.s_a2, m.s_a0, m.s_c, m.E, m.eps0})
    if (!std::isfinite(v))
      throw NumericalError("nonfinite_coefficient", "strip coefficient is nonfinite");

  ValidationReport rep;
  rep.eps0_ok = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double slack = 1e-12 * std::max(1.0, std::abs(m.eps0));
  const int n_sample = 64;
  for (int s = 0; s < n_sample; ++s) {
    const double th = M_PI * s / n_sample;
    const double x1 = std::cos(th), x2 = std::sin(th);
    const double form = m.s_a11 * x1 * x1 + 2.0 * m.s_a12 * x1 * x2 + m.s_a22 * x2 * x2;
    const double margin = form - m.eps0;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_location = th;
    }
    if (margin < -slack) rep.eps0_ok = false;
  }
  rep.E_ok = m.s_a11 <= m.E * m.E * (1.0 + 1e-12);
  rep.pass = rep.eps0_ok && rep.E_ok;
  rep.message = rep.pass ? "ok"
                         : (rep.eps0_ok ? "tangential symbol exceeds E^2"
                                        : "ellipticity margin negative");
  return rep;
}

/// Annulus check on the radial grid nodes: eps0 <= a22(r), eps0 <= a11(r) r^2,
/// sup sqrt(a11) <= E.
inline ValidationReport validate_coefficients(const CoefficientModel& m,
                                              const AnnulusGeometry& g) {
  if (m.kind != GeometryKind::annulus)
    throw std::invalid_argument("validate_coefficients: model/geometry kind mismatch");
  ValidationReport rep;
  rep.eps0_ok = true;
  rep.E_ok = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double slack = 1e-12 * std::max(1.0, std::abs(m.eps0));
  const GridInfo grid = g.grid();
  for (int j = 0; j < grid.n_prof; ++j) {
    const double r = grid.prof(j);
    const double v22 = m.a22(r), v11 = m.a11(r);
    for (double v : {v22, v11, m.a2(r), m.a1(r), m.a0(r), m.c(r)})
      if (!std::isfinite(v))
        throw NumericalError("nonfinite_coefficient",
                             "annulus coefficient nonfinite at r=" + std::to_string(r));
    const double margin = std::min(v22 - m.eps0, v11 * r * r - m.eps0);
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_location = r;
    }
    if (margin < -slack) rep.eps0_ok = false;
    if (std::sqrt(v11) > m.E * (1.0 + 1e-12)) rep.E_ok = false;
  }
  rep.pass = rep.eps0_ok && rep.E_ok;
  rep.message = rep.pass ? "ok"
                         : (rep.eps0_ok ? "sup sqrt(a11) exceeds declared E"
                                        : "ellipticity margin negative");
  return rep;
}

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 on [0,1]: two continuous
/// derivatives, exact endpoints.
inline double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

inline double smoothstep5_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double u = t * (1.0 - t);
  return 30.0 * u * u;
}

inline double smoothstep5_d2(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 60.0 * t * (2.0 * t - 1.0) * (t - 1.0);
}

/// Lateral cutoff chi(x'): exactly 0 on the outer half of each sponge band
/// (width w*L/2 next to the period seam), exactly 1 on the core, quintic
/// taper in between. Width 0 degenerates to chi == 1.
class CutoffProfile {
public:
  CutoffProfile(double period, double sponge_width)
      : L_(period), w_(sponge_width) {
    if (!(period > 0.0)) throw std::invalid_argument("cutoff profile: period must be positive");
    if (!(sponge_width >= 0.0) || sponge_width >= 0.5)
      throw std::invalid_argument("cutoff profile: sponge_width must lie in [0, 0.5)");
  }

  explicit CutoffProfile(const StripGeometry& g) : CutoffProfile(g.L, g.sponge_width) {}

  double chi(double x) const {
    if (w_ == 0.0) return 1.0;
    const double d = seam_distance(x);
    const double a = 0.5 * w_ * L_;
    return smoothstep5((d - a) / a);
  }

  double dchi(double x) const {
    if (w_ == 0.0) return 0.0;
    const double a = 0.5 * w_ * L_;
    const double d = seam_distance(x);
    const double s = rising_side(x) ? 1.0 : -1.0;
    return s * smoothstep5_d1((d - a) / a) / a;
  }

  double d2chi(double x) const {
    if (w_ == 0.0) return 0.0;
    const double a = 0.5 * w_ * L_;
    const double d = seam_distance(x);
    return smoothstep5_d2((d - a) / a) / (a * a);
  }

  bool in_sponge(double x) const { return w_ > 0.0 && seam_distance(x) < w_ * L_; }
  bool in_core(double x) const { return !in_sponge(x); }
  double period() const { return L_; }
  double width() const { return w_; }

private:
  double seam_distance(double x) const {
    double x0 = std::fmod(x, L_);
    if (x0 < 0) x0 += L_;
    return std::min(x0, L_ - x0);
  }

  bool rising_side(double x) const {
    double x0 = std::fmod(x, L_);
    if (x0 < 0) x0 += L_;
    return x0 <= 0.5 * L_; // distance from seam grows with x on this side
  }

  double L_;
  double w_;
};

}  // namespace helmcont
