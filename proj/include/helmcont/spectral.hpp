#pragma once

// Tangential Fourier machinery, frequency splitting, and discrete norms.
//
// Conventions used throughout:
//  * Tangential basis functions are orthonormal on the period:
//    e_m(x) = exp(i xi_m x)/sqrt(P) with P = L (strip) or 2*pi (annulus),
//    xi_m = 2*pi*m/P. Mode coefficients are stored in ascending order
//    m = -N/2 .. N/2-1, so Parseval is exact at the grid level:
//    sum_m |c_m|^2 = dx * sum_i |u_i|^2 on every profile level.
//  * L2(Omega) uses the physical measure (dx' dx_n on the strip,
//    r dr dphi on the annulus); profile integrals use trapezoid weights.
//  * Sobolev norms are tensor norms: |u|_(p)^2 = sum_{a+b<=p} |D^b T^a u|_0^2
//    where T is the tangential derivative (per mode: i*xi on the strip,
//    i*m/r on the annulus) and D the profile derivative by centered
//    differences, second-order one-sided at the endpoints.
//  * The frequency cutoff keeps modes by the strict inequalities
//    xi^2 < (1-eps) k^2 / E^2 (strip) and m^2 < E^2 (1-eps) k^2 (annulus).

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <span>
#include <vector>

#include "helmcont/core.hpp"
#include "helmcont/util.hpp"

namespace helmcont {

/// Mode-major spectrum: the radial/depth profile of stored mode index a
/// (mode m = a - N/2) is contiguous, coeffs[a*n_prof + j].
struct ModeSpectrum {
  GridInfo grid;
  std::vector<cdouble> coeffs;

  ModeSpectrum() = default;
  explicit ModeSpectrum(const GridInfo& g)
      : grid(g), coeffs(static_cast<std::size_t>(g.n_tan) * g.n_prof) {}

  cdouble& at(int mode_idx, int j_prof) {
    return coeffs[static_cast<std::size_t>(mode_idx) * grid.n_prof + j_prof];
  }
  const cdouble& at(int mode_idx, int j_prof) const {
    return coeffs[static_cast<std::size_t>(mode_idx) * grid.n_prof + j_prof];
  }
  std::span<cdouble> profile(int mode_idx) {
    return {coeffs.data() + static_cast<std::size_t>(mode_idx) * grid.n_prof,
            static_cast<std::size_t>(grid.n_prof)};
  }
  std::span<const cdouble> profile(int mode_idx) const {
    return {coeffs.data() + static_cast<std::size_t>(mode_idx) * grid.n_prof,
            static_cast<std::size_t>(grid.n_prof)};
  }
};

namespace detail {

// FFTW's planner is not thread safe; executing distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class Fft1d {
public:
  Fft1d(int n, int sign) : n_(n) {
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(n, buf_, buf_, sign, FFTW_ESTIMATE);
  }
  ~Fft1d() {
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(buf_);
  }
  Fft1d(const Fft1d&) = delete;
  Fft1d& operator=(const Fft1d&) = delete;

  cdouble* data() { return reinterpret_cast<cdouble*>(buf_); }
  void run() { fftw_execute(plan_); }
  int size() const { return n_; }

private:
  int n_;
  fftw_complex* buf_;
  fftw_plan plan_;
};

}  // namespace detail

/// One tangential ring -> ascending mode coefficients (orthonormal basis).
inline std::vector<cdouble> forward_trace(std::span<const cdouble> ring,
                                          const GridInfo& grid) {
  const int n = grid.n_tan;
  if (static_cast<int>(ring.size()) != n)
    throw std::invalid_argument("forward_trace: ring size mismatch");
  detail::Fft1d fft(n, FFTW_FORWARD);
  std::copy(ring.begin(), ring.end(), fft.data());
  fft.run();
  const double scale = std::sqrt(grid.tan_period) / n;
  std::vector<cdouble> out(n);
  for (int a = 0; a < n; ++a) {
    const int m = grid.mode(a);
    const int bin = (m + n) % n;
    out[a] = fft.data()[bin] * scale;
  }
  return out;
}

/// Ascending mode coefficients -> physical ring values.
inline std::vector<cdouble> inverse_trace(std::span<const cdouble> modes,
                                          const GridInfo& grid) {
  const int n = grid.n_tan;
  if (static_cast<int>(modes.size()) != n)
    throw std::invalid_argument("inverse_trace: coefficient size mismatch");
  detail::Fft1d fft(n, FFTW_BACKWARD);
  std::fill(fft.data(), fft.data() + n, cdouble{0.0, 0.0});
  for (int a = 0; a < n; ++a) {
    const int m = grid.mode(a);
    fft.data()[(m + n) % n] = modes[a];
  }
  fft.run();
  const double scale = 1.0 / std::sqrt(grid.tan_period);
  std::vector<cdouble> out(n);
  for (int i = 0; i < n; ++i) out[i] = fft.data()[i] * scale;
  return out;
}

inline ModeSpectrum forward_transform(const Field& f) {
  const GridInfo& g = f.grid;
  ModeSpectrum spec(g);
  detail::Fft1d fft(g.n_tan, FFTW_FORWARD);
  const double scale = std::sqrt(g.tan_period) / g.n_tan;
  for (int j = 0; j < g.n_prof; ++j) {
    const cdouble* ring = f.values.data() + static_cast<std::size_t>(j) * g.n_tan;
    std::copy(ring, ring + g.n_tan, fft.data());
    fft.run();
    for (int a = 0; a < g.n_tan; ++a) {
      const int bin = (g.mode(a) + g.n_tan) % g.n_tan;
      spec.at(a, j) = fft.data()[bin] * scale;
    }
  }
  return spec;
}

inline Field inverse_transform(const ModeSpectrum& s) {
  const GridInfo& g = s.grid;
  Field f(g);
  detail::Fft1d fft(g.n_tan, FFTW_BACKWARD);
  const double scale = 1.0 / std::sqrt(g.tan_period);
  for (int j = 0; j < g.n_prof; ++j) {
    std::fill(fft.data(), fft.data() + g.n_tan, cdouble{0.0, 0.0});
    for (int a = 0; a < g.n_tan; ++a)
      fft.data()[(g.mode(a) + g.n_tan) % g.n_tan] = s.at(a, j);
    fft.run();
    cdouble* ring = f.values.data() + static_cast<std::size_t>(j) * g.n_tan;
    for (int i = 0; i < g.n_tan; ++i) ring[i] = fft.data()[i] * scale;
  }
  return f;
}

/// Low-frequency cutoff at wave number k with symbol bound E and margin eps.
struct SpectralCutoff {
  GeometryKind kind = GeometryKind::strip;
  double k = 0.0;
  double E = 1.0;
  double eps = 0.19;
  double tan_period = 2.0 * M_PI;

  /// Strict keep test for a mode index m.
  bool keeps(int m) const {
    if (kind == GeometryKind::strip) {
      const double xi = 2.0 * M_PI * m / tan_period;
      return xi * xi < (1.0 - eps) * k * k / (E * E);
    }
    const double mm = static_cast<double>(m) * m;
    return mm < E * E * (1.0 - eps) * k * k;
  }

  std::vector<int> kept_modes(const GridInfo& grid) const {
    std::vector<int> kept;
    for (int a = 0; a < grid.n_tan; ++a)
      if (keeps(grid.mode(a))) kept.push_back(grid.mode(a));
    return kept;
  }
};

inline SpectralCutoff make_cutoff(double k, double E, double eps, const GridInfo& grid) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw std::invalid_argument("cutoff: k must be positive");
  if (!(E > 0.0) || !std::isfinite(E))
    throw std::invalid_argument("cutoff: E must be positive");
  if (!(eps > 0.0) || !(eps < 1.0))
    throw std::invalid_argument("cutoff: eps must lie in (0,1)");
  return {grid.kind, k, E, eps, grid.tan_period};
}

/// Complementary split: low carries exactly the kept modes, high the rest;
/// both keep full mode indexing with zeros off their support.
struct FrequencySplit {
  ModeSpectrum low;
  ModeSpectrum high;
  SpectralCutoff cutoff;
};

inline FrequencySplit split_low_high(const ModeSpectrum& s, const SpectralCutoff& cut) {
  FrequencySplit out{ModeSpectrum(s.grid), ModeSpectrum(s.grid), cut};
  for (int a = 0; a < s.grid.n_tan; ++a) {
    const bool keep = cut.keeps(s.grid.mode(a));
    auto src = s.profile(a);
    auto dst = keep ? out.low.profile(a) : out.high.profile(a);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

inline FrequencySplit split_low_high(const Field& f, const SpectralCutoff& cut) {
  return split_low_high(forward_transform(f), cut);
}

/// P_k: transform, zero the excluded modes, transform back.
inline Field project_low(const Field& f, const SpectralCutoff& cut) {
  return inverse_transform(split_low_high(forward_transform(f), cut).low);
}

/// chi-multiplication along the tangential direction (v = chi u convention).
inline Field apply_cutoff_chi(const Field& f, const CutoffProfile& profile) {
  if (std::abs(profile.period() - f.grid.tan_period) > 1e-12 * f.grid.tan_period)
    throw std::invalid_argument("apply_cutoff_chi: profile period mismatch");
  Field out(f.grid);
  for (int j = 0; j < f.grid.n_prof; ++j)
    for (int i = 0; i < f.grid.n_tan; ++i)
      out.at(i, j) = f.at(i, j) * profile.chi(f.grid.x(i));
  return out;
}

/// Tangential derivative in mode space: i*xi_m (strip) or i*m/r (annulus).
inline ModeSpectrum tangential_derivative(const ModeSpectrum& s) {
  ModeSpectrum out(s.grid);
  for (int a = 0; a < s.grid.n_tan; ++a) {
    const int m = s.grid.mode(a);
    for (int j = 0; j < s.grid.n_prof; ++j) {
      double w;
      if (s.grid.kind == GeometryKind::strip) {
        w = 2.0 * M_PI * m / s.grid.tan_period;
      } else {
        w = static_cast<double>(m) / s.grid.prof(j);
      }
      out.at(a, j) = cdouble{0.0, 1.0} * w * s.at(a, j);
    }
  }
  return out;
}

namespace detail {

/// Profile derivative of one mode, centered interior stencils with
/// second-order one-sided closures. order in {1,2}.
inline std::vector<cdouble> profile_derivative(std::span<const cdouble> g, double h,
                                               int order) {
  const int n = static_cast<int>(g.size());
  std::vector<cdouble> d(n, cdouble{0.0, 0.0});
  if (order == 1) {
    if (n < 2) return d;
    if (n == 2) {
      d[0] = d[1] = (g[1] - g[0]) / h;
      return d;
    }
    for (int j = 1; j + 1 < n; ++j) d[j] = (g[j + 1] - g[j - 1]) / (2.0 * h);
    d[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h);
    d[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * h);
    return d;
  }
  if (order == 2) {
    if (n < 4) return d; // too short for a second-order closure; treat as flat
    for (int j = 1; j + 1 < n; ++j) d[j] = (g[j + 1] - 2.0 * g[j] + g[j - 1]) / (h * h);
    d[0] = (2.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3]) / (h * h);
    d[n - 1] = (2.0 * g[n - 1] - 5.0 * g[n - 2] + 4.0 * g[n - 3] - g[n - 4]) / (h * h);
    return d;
  }
  throw std::invalid_argument("profile_derivative: order must be 1 or 2");
}

/// integral of |g|^2 over the profile with trapezoid weights and the
/// physical measure (r dr for the annulus).
inline double profile_l2sq(std::span<const cdouble> g, const GridInfo& grid) {
  const int n = static_cast<int>(g.size());
  const double h = grid.dprof();
  std::vector<double> terms(n);
  for (int j = 0; j < n; ++j) {
    const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
    terms[j] = std::norm(g[j]) * w * h * grid.measure(grid.prof(j));
  }
  return pairwise_sum(terms);
}

inline void check_finite(const Field& f, const char* who) {
  for (const cdouble& v : f.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("nonfinite_field", std::string(who) + ": field holds NaN/Inf");
}

}  // namespace detail

/// Squared tensor Sobolev norm of one mode profile, all terms a+b <= p.
inline double mode_sobolev_sq(std::span<const cdouble> g, int m, const GridInfo& grid,
                              int p) {
  const double h = grid.dprof();
  const int n = grid.n_prof;
  auto tan_weight = [&](int j) {
    return grid.kind == GeometryKind::strip
               ? 2.0 * M_PI * m / grid.tan_period
               : static_cast<double>(m) / grid.prof(j);
  };

  std::vector<double> terms;
  std::vector<cdouble> work(g.begin(), g.end());
  // a: tangential order of the term family currently held in `work`
  for (int a = 0; a <= p; ++a) {
    terms.push_back(detail::profile_l2sq(work, grid));
    if (a + 1 <= p) {
      auto d1 = detail::profile_derivative(work, h, 1);
      terms.push_back(detail::profile_l2sq(d1, grid));
    }
    if (a + 2 <= p) {
      auto d2 = detail::profile_derivative(work, h, 2);
      terms.push_back(detail::profile_l2sq(d2, grid));
    }
    if (a + 1 <= p)
      for (int j = 0; j < n; ++j) work[j] *= cdouble{0.0, 1.0} * tan_weight(j);
  }
  return pairwise_sum(terms);
}

inline double spectrum_norm(const ModeSpectrum& s, int p) {
  if (p < 0 || p > 2) throw std::invalid_argument("sobolev norm: p must be 0, 1 or 2");
  std::vector<double> per_mode(s.grid.n_tan);
  for (int a = 0; a < s.grid.n_tan; ++a)
    per_mode[a] = mode_sobolev_sq(s.profile(a), s.grid.mode(a), s.grid, p);
  return std::sqrt(pairwise_sum(per_mode));
}

inline double sobolev_norm(const Field& f, int p) {
  detail::check_finite(f, "sobolev_norm");
  return spectrum_norm(forward_transform(f), p);
}

/// High-frequency semi-norm of order m (1 or 2):
/// sqrt(|u_h|_(m-1)^2 + |T u_h|_(m-1)^2) with u_h the excluded-band part.
inline double hf_seminorm(const ModeSpectrum& s, int m, const SpectralCutoff& cut) {
  if (m != 1 && m != 2) throw std::invalid_argument("hf_seminorm: order must be 1 or 2");
  const ModeSpectrum high = split_low_high(s, cut).high;
  const double base = spectrum_norm(high, m - 1);
  const double tang = spectrum_norm(tangential_derivative(high), m - 1);
  return std::sqrt(base * base + tang * tang);
}

inline double hf_seminorm(const Field& f, int m, const SpectralCutoff& cut) {
  detail::check_finite(f, "hf_seminorm");
  return hf_seminorm(forward_transform(f), m, cut);
}

/// Full H2 norm of the excluded-band part, |u - u_l|_(2).
inline double hf_h2_norm(const ModeSpectrum& s, const SpectralCutoff& cut) {
  return spectrum_norm(split_low_high(s, cut).high, 2);
}

inline double hf_h2_norm(const Field& f, const SpectralCutoff& cut) {
  detail::check_finite(f, "hf_h2_norm");
  return hf_h2_norm(forward_transform(f), cut);
}

/// L2 norm of a mode-coefficient trace on the boundary circle/line at
/// profile coordinate rho (1 for Gamma_0; R weights the outer circle).
inline double trace_l2(std::span<const cdouble> modes, const GridInfo& grid,
                       double prof_coord) {
  std::vector<double> terms(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) terms[i] = std::norm(modes[i]);
  return std::sqrt(pairwise_sum(terms) * grid.measure(prof_coord));
}

/// Physical-space masked norms on the strip: the core is the band at
/// seam distance >= w L, the sponge its complement. p in {0,1}; the H1
/// gradient uses the spectral tangential derivative and FD in depth.
inline double masked_strip_norm(const Field& f, bool core, int p) {
  if (f.grid.kind != GeometryKind::strip)
    throw std::invalid_argument("masked_strip_norm: strip fields only");
  if (p < 0 || p > 1) throw std::invalid_argument("masked_strip_norm: p must be 0 or 1");
  detail::check_finite(f, "masked_strip_norm");
  const GridInfo& g = f.grid;
  const double wL = g.sponge_width * g.tan_period;

  std::vector<const Field*> parts;
  Field du_t, du_n;
  parts.push_back(&f);
  if (p == 1) {
    du_t = inverse_transform(tangential_derivative(forward_transform(f)));
    du_n = Field(g);
    const double h = g.dprof();
    std::vector<cdouble> col(g.n_prof);
    for (int i = 0; i < g.n_tan; ++i) {
      for (int j = 0; j < g.n_prof; ++j) col[j] = f.at(i, j);
      auto d = detail::profile_derivative(col, h, 1);
      for (int j = 0; j < g.n_prof; ++j) du_n.at(i, j) = d[j];
    }
    parts.push_back(&du_t);
    parts.push_back(&du_n);
  }

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(g.n_tan) * g.n_prof * parts.size());
  for (int i = 0; i < g.n_tan; ++i) {
    const double d = g.seam_distance(g.x(i));
    const bool in_core = d >= wL;
    if (in_core != core) continue;
    for (int j = 0; j < g.n_prof; ++j) {
      const double w = ((j == 0 || j == g.n_prof - 1) ? 0.5 : 1.0) * g.dprof() * g.dx();
      for (const Field* part : parts) terms.push_back(std::norm(part->at(i, j)) * w);
    }
  }
  if (terms.empty()) return 0.0;
  return std::sqrt(pairwise_sum(terms));
}

}  // namespace helmcont
