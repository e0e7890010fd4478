#pragma once

// Mode-wise Cauchy continuation from the data boundary to the target
// boundary.
//
// Strip: every tangential mode obeys u'' + omega^2 u = f_hat with
// omega^2 = k^2 - xi^2, solved by closed-form propagators
//   Phi(t) = [[C, S], [-omega^2 S, C]],
// C = cos(omega t) / cosh(gamma t), S = sin(omega t)/omega / sinh(gamma t)/gamma
// depending on the sign of omega^2 (S -> t at omega = 0). det Phi = 1
// identically. Sources enter through Duhamel increments integrated by
// Simpson's rule with the kernel evaluated exactly, which keeps the
// composite scheme fourth order.
//
// Annulus: the radial factor of mode m obeys
//   a22 g'' + a2 g' + (a0 + k c + k^2 - m^2 a11 + i m a1) g = f_m,
// integrated by classical RK4 with the radial grid as the step and a
// doubled-step accept/reject test (refusal instead of silent stiffness
// error). For the polar Laplacian the fundamental solutions are
// J_m(kr), Y_m(kr), which serve as the independent oracle in the tests.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "helmcont/core.hpp"
#include "helmcont/spectral.hpp"
#include "helmcont/util.hpp"

namespace helmcont {

// ---------------------------------------------------------------------------
// strip propagators

namespace detail {

/// C(omega2, t) = cos/cosh branch of the propagator diagonal.
inline double prop_c(double omega2, double t) {
  if (omega2 >= 0.0) return std::cos(std::sqrt(omega2) * t);
  const double arg = std::sqrt(-omega2) * t;
  if (arg > 700.0) throw NumericalError("overflow", "cosh overflow in transfer matrix");
  return std::cosh(arg);
}

/// S(omega2, t) = sin(omega t)/omega resp. sinh(gamma t)/gamma; the series
/// in the signed square omega^2 t^2 covers both branches near zero.
inline double prop_s(double omega2, double t) {
  const double z = omega2 * t * t;
  if (std::abs(z) < 1e-8) return t * (1.0 - z / 6.0 + z * z / 120.0);
  if (omega2 > 0.0) {
    const double w = std::sqrt(omega2);
    return std::sin(w * t) / w;
  }
  const double gz = std::sqrt(-omega2);
  const double arg = gz * t;
  if (arg > 700.0) throw NumericalError("overflow", "sinh overflow in transfer matrix");
  return std::sinh(arg) / gz;
}

}  // namespace detail

/// Closed-form 2x2 propagator of one strip mode over a depth interval.
/// Acts on the state (u, u'); det == 1 for every branch.
struct TransferMatrix2 {
  double omega2 = 0.0;
  double tau = 0.0;
  double a = 1.0, b = 0.0; // [[a, b],
  double c = 0.0, d = 1.0; //  [c, d]]

  std::array<cdouble, 2> apply(const std::array<cdouble, 2>& y) const {
    return {a * y[0] + b * y[1], c * y[0] + d * y[1]};
  }

  double det() const { return a * d - b * c; }

  TransferMatrix2 inverse() const {
    TransferMatrix2 inv = *this;
    inv.tau = -tau;
    inv.a = d;
    inv.b = -b;
    inv.c = -c;
    inv.d = a;
    return inv;
  }

  /// Composition other(this(y)): the interval of `this` is traversed first.
  TransferMatrix2 then(const TransferMatrix2& o) const {
    TransferMatrix2 r;
    r.omega2 = omega2;
    r.tau = tau + o.tau;
    r.a = o.a * a + o.b * c;
    r.b = o.a * b + o.b * d;
    r.c = o.c * a + o.d * c;
    r.d = o.c * b + o.d * d;
    return r;
  }
};

inline TransferMatrix2 transfer_matrix_strip(double xi, double k, double s, double t) {
  if (!(s >= 0.0) || !(t <= 1.0) || !(s < t))
    throw std::invalid_argument("transfer_matrix_strip: need 0 <= s < t <= 1");
  TransferMatrix2 M;
  M.omega2 = k * k - xi * xi;
  M.tau = t - s;
  M.a = detail::prop_c(M.omega2, M.tau);
  M.b = detail::prop_s(M.omega2, M.tau);
  M.c = -M.omega2 * M.b;
  M.d = M.a;
  return M;
}

/// Duhamel increment over one step of width h by Simpson's rule; s0, smid,
/// s1 sample the mode source at the left end, midpoint, and right end.
inline std::array<cdouble, 2> duhamel_increment(double omega2, double h, cdouble s0,
                                                cdouble smid, cdouble s1) {
  // kernel rows of Phi(h - sigma) * (0, s): value row S(h - sigma), slope row
  // C(h - sigma); S(0) = 0 drops the right-end term of the value row
  const cdouble p_val =
      (h / 6.0) * (detail::prop_s(omega2, h) * s0 +
                   4.0 * detail::prop_s(omega2, 0.5 * h) * smid);
  const cdouble p_slp =
      (h / 6.0) * (detail::prop_c(omega2, h) * s0 +
                   4.0 * detail::prop_c(omega2, 0.5 * h) * smid + s1);
  return {p_val, p_slp};
}

// ---------------------------------------------------------------------------
// results and diagnostics

enum class ModePolicy { all, low_only };

struct ModeDiagnostic {
  int mode = 0;
  double omega2 = 0.0;       // k^2 - xi^2 (strip) or k^2 - m^2 a11(1) (annulus)
  double amplification = 0.0; // k-weighted homogeneous propagation ratio out/in,
                              // 0 for zero input; source terms enter the state
                              // additively but not this ratio
  bool flagged = false;
  std::string note;
};

struct ContinuationResult {
  Field field;
  std::vector<cdouble> trace_value;      // ascending modes at the target boundary
  std::vector<cdouble> trace_derivative; // d/dn resp. d/dr there
  std::vector<ModeDiagnostic> diagnostics;
  SpectralCutoff cutoff;
  ModePolicy policy = ModePolicy::all;
};

namespace detail {

inline double state_energy(double k, const std::array<cdouble, 2>& y) {
  return std::sqrt(k * k * std::norm(y[0]) + std::norm(y[1]));
}

inline bool state_finite(const std::array<cdouble, 2>& y) {
  return std::isfinite(y[0].real()) && std::isfinite(y[0].imag()) &&
         std::isfinite(y[1].real()) && std::isfinite(y[1].imag());
}

/// Source sampler over a mode profile given on the uniform grid
/// (cubic interpolation, exact at the nodes; zero when no profile is bound).
class SourceInterp {
public:
  SourceInterp() = default;
  SourceInterp(std::span<const cdouble> samples, double lo, double h)
      : samples_(samples.begin(), samples.end()), lo_(lo), h_(h) {}

  cdouble operator()(double rho) const {
    if (samples_.empty()) return {0.0, 0.0};
    const int n = static_cast<int>(samples_.size());
    const double u = (rho - lo_) / h_;
    int base = static_cast<int>(std::floor(u)) - 1;
    base = std::max(0, std::min(base, n - 4));
    if (n < 4) { // tiny grids: clamp to nearest sample
      int j = std::max(0, std::min(n - 1, static_cast<int>(std::lround(u))));
      return samples_[j];
    }
    return cubic_interp4(samples_[base], samples_[base + 1], samples_[base + 2],
                         samples_[base + 3], u - base);
  }

private:
  std::vector<cdouble> samples_;
  double lo_ = 0.0;
  double h_ = 1.0;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// strip continuation

/// Continue strip Cauchy data (v = chi u convention, chi already applied by
/// the caller) from x_n = 0 to x_n = 1. The source field f rides along via
/// per-interval Duhamel increments. Excluded modes are zeroed under
/// ModePolicy::low_only; overflowing modes are zeroed and flagged, never
/// dropped silently.
inline ContinuationResult continue_strip(const CauchyData& data, const StripGeometry& geom,
                                         const SpectralCutoff& cutoff, const Field* f,
                                         ModePolicy policy) {
  const GridInfo grid = geom.grid();
  if (data.grid != grid)
    throw std::invalid_argument("continue_strip: data grid does not match geometry");
  if (f && f->grid != grid)
    throw std::invalid_argument("continue_strip: source grid does not match geometry");
  if (!(data.k > 0.0)) throw std::invalid_argument("continue_strip: k must be positive");

  std::optional<ModeSpectrum> fhat;
  if (f) fhat = forward_transform(*f);

  const int n = grid.n_tan;
  const int nd = grid.n_prof;
  const double h = grid.dprof();
  const double k = data.k;

  ModeSpectrum values(grid);
  ContinuationResult res;
  res.cutoff = cutoff;
  res.policy = policy;
  res.trace_value.assign(n, cdouble{0, 0});
  res.trace_derivative.assign(n, cdouble{0, 0});
  res.diagnostics.assign(n, ModeDiagnostic{});

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t idx) {
    const int a = static_cast<int>(idx);
    const int m = grid.mode(a);
    const double xi = grid.frequency(m);
    ModeDiagnostic diag;
    diag.mode = m;
    diag.omega2 = k * k - xi * xi;

    if (policy == ModePolicy::low_only && !cutoff.keeps(m)) {
      diag.note = "excluded";
      res.diagnostics[a] = diag;
      return; // profile stays zero
    }

    std::array<cdouble, 2> y{data.u0[a], data.u1[a]};
    std::array<cdouble, 2> yh = y;
    const double e_in = detail::state_energy(k, y);
    detail::SourceInterp src;
    if (fhat) src = detail::SourceInterp(fhat->profile(a), grid.prof_lo, h);

    bool ok = true;
    values.at(a, 0) = y[0];
    try {
      const TransferMatrix2 M = transfer_matrix_strip(xi, k, 0.0, h);
      for (int j = 0; j + 1 < nd; ++j) {
        const double x0 = grid.prof(j);
        auto yn = M.apply(y);
        if (fhat) {
          const auto p = duhamel_increment(M.omega2, h, src(x0), src(x0 + 0.5 * h),
                                           src(x0 + h));
          yn[0] += p[0];
          yn[1] += p[1];
          yh = M.apply(yh);
        } else {
          yh = yn;
        }
        y = yn;
        if (!detail::state_finite(y) || !detail::state_finite(yh))
          throw NumericalError("overflow", "state overflow");
        values.at(a, j + 1) = y[0];
      }
    } catch (const NumericalError& e) {
      ok = false;
      diag.flagged = true;
      diag.note = e.kind();
      for (int j = 0; j < nd; ++j) values.at(a, j) = cdouble{0, 0};
    }

    if (ok) {
      res.trace_value[a] = y[0];
      res.trace_derivative[a] = y[1];
      const double e_out = detail::state_energy(k, yh);
      diag.amplification = e_in > 0.0 ? e_out / e_in : 0.0;
    }
    res.diagnostics[a] = diag;
  });

  res.field = inverse_transform(values);
  return res;
}

// ---------------------------------------------------------------------------
// Bessel fundamental system (closed-form oracle basis for the polar
// Laplacian; backed by GSL special functions)

struct BesselBasis {
  double J = 0.0, Y = 0.0, Jp = 0.0, Yp = 0.0;
};

namespace detail {

inline void gsl_quiet() {
  static const auto once = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)once;
}

inline double bessel_j(int n, double x) {
  gsl_sf_result r;
  const int status = gsl_sf_bessel_Jn_e(n, x, &r);
  if (status == GSL_EUNDRFLW) return 0.0;
  if (status != 0)
    throw NumericalError("bessel", std::string("J_n failed: ") + gsl_strerror(status));
  return r.val;
}

inline double bessel_y(int n, double x) {
  gsl_sf_result r;
  const int status = gsl_sf_bessel_Yn_e(n, x, &r);
  if (status == GSL_EUNDRFLW) return 0.0;
  if (status != 0)
    throw NumericalError("bessel", std::string("Y_n failed: ") + gsl_strerror(status));
  return r.val;
}

}  // namespace detail

/// J_m, Y_m and first derivatives at x > 0. Negative orders fold by parity.
inline BesselBasis bessel_basis(int m, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("bessel_basis: x must be positive");
  detail::gsl_quiet();
  const int n = std::abs(m);
  const double sign = (m < 0 && n % 2 == 1) ? -1.0 : 1.0;
  BesselBasis b;
  const double jm1 = detail::bessel_j(n - 1, x);
  const double jp1 = detail::bessel_j(n + 1, x);
  const double ym1 = detail::bessel_y(n - 1, x);
  const double yp1 = detail::bessel_y(n + 1, x);
  b.J = sign * detail::bessel_j(n, x);
  b.Y = sign * detail::bessel_y(n, x);
  b.Jp = sign * 0.5 * (jm1 - jp1);
  b.Yp = sign * 0.5 * (ym1 - yp1);
  return b;
}

// ---------------------------------------------------------------------------
// annulus per-mode integration

struct ModeProfile {
  std::vector<cdouble> value;
  std::vector<cdouble> derivative;
  std::array<cdouble, 2> state_at_target{};
};

namespace detail {

struct RadialOde {
  int m;
  double k;
  const CoefficientModel* model;

  std::array<cdouble, 2> operator()(double r, const std::array<cdouble, 2>& y,
                                    const cdouble& f) const {
    const double a22 = model->a22(r);
    const double mm = static_cast<double>(m);
    const cdouble q{model->a0(r) + k * model->c(r) + k * k - mm * mm * model->a11(r),
                    mm * model->a1(r)};
    return {y[1], (f - model->a2(r) * y[1] - q * y[0]) / a22};
  }
};

inline std::array<cdouble, 2> rk4_step(const RadialOde& ode, const SourceInterp& src,
                                       double r, double h,
                                       const std::array<cdouble, 2>& y) {
  const cdouble f0 = src(r), fm = src(r + 0.5 * h), f1 = src(r + h);
  const auto k1 = ode(r, y, f0);
  const auto k2 = ode(r + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]}, fm);
  const auto k3 = ode(r + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]}, fm);
  const auto k4 = ode(r + h, {y[0] + h * k3[0], y[1] + h * k3[1]}, f1);
  return {y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

/// March `steps` RK4 steps of width h from r0; records the state every
/// `record_every` steps into `out` when provided.
inline std::array<cdouble, 2> rk4_march(const RadialOde& ode, const SourceInterp& src,
                                        std::array<cdouble, 2> y, double r0, double h,
                                        long steps, long record_every,
                                        ModeProfile* out) {
  double r = r0;
  for (long s = 0; s < steps; ++s) {
    y = rk4_step(ode, src, r, h, y);
    r = r0 + (s + 1) * h;
    if (!state_finite(y))
      throw NumericalError("overflow", "radial mode integration overflowed");
    if (out && record_every > 0 && (s + 1) % record_every == 0) {
      out->value.push_back(y[0]);
      out->derivative.push_back(y[1]);
    }
  }
  return y;
}

}  // namespace detail

/// Radial continuation of a single annulus mode from r=1 to r=R with the
/// radial grid as the RK4 step. A doubled-step re-integration must agree to
/// 1e-4 in the k-weighted state norm, otherwise the solve is refused with a
/// resolution hint. Set reverse=true to march from R down to 1 (the profile
/// is still reported in ascending radius order).
inline ModeProfile continue_mode_annulus(int m, cdouble u0, cdouble u1, double k,
                                         const CoefficientModel& model,
                                         const AnnulusGeometry& geom,
                                         std::span<const cdouble> fhat = {},
                                         bool reverse = false) {
  if (model.kind != GeometryKind::annulus)
    throw std::invalid_argument("continue_mode_annulus: annulus coefficients required");
  if (!(k > 0.0)) throw std::invalid_argument("continue_mode_annulus: k must be positive");
  const GridInfo grid = geom.grid();
  const int nd = grid.n_prof;
  const double h0 = grid.dprof();
  if (!fhat.empty() && static_cast<int>(fhat.size()) != nd)
    throw std::invalid_argument("continue_mode_annulus: source profile length mismatch");

  ModeProfile prof;
  prof.value.reserve(nd);
  prof.derivative.reserve(nd);

  bool zero_source = true;
  for (const cdouble& v : fhat)
    if (v != cdouble{0.0, 0.0}) {
      zero_source = false;
      break;
    }
  if (u0 == cdouble{0.0, 0.0} && u1 == cdouble{0.0, 0.0} && zero_source) {
    prof.value.assign(nd, cdouble{0, 0});
    prof.derivative.assign(nd, cdouble{0, 0});
    return prof;
  }

  const detail::RadialOde ode{m, k, &model};
  detail::SourceInterp src;
  if (!fhat.empty()) src = detail::SourceInterp(fhat, grid.prof_lo, h0);

  const double r_start = reverse ? grid.prof_hi : grid.prof_lo;
  const double h = reverse ? -h0 : h0;
  const long steps = nd - 1;

  std::array<cdouble, 2> y{u0, u1};
  prof.value.push_back(y[0]);
  prof.derivative.push_back(y[1]);
  const auto y_fine = detail::rk4_march(ode, src, y, r_start, h, steps, 1, &prof);

  // doubled-step comparison at the far endpoint
  std::array<cdouble, 2> y_coarse{u0, u1};
  const long pairs = steps / 2;
  y_coarse = detail::rk4_march(ode, src, y_coarse, r_start, 2.0 * h, pairs, 0, nullptr);
  if (steps % 2 == 1)
    y_coarse = detail::rk4_march(ode, src, y_coarse, r_start + 2.0 * h * pairs, h, 1, 0,
                                 nullptr);

  const std::array<cdouble, 2> diff{y_fine[0] - y_coarse[0], y_fine[1] - y_coarse[1]};
  const double scale = std::max({detail::state_energy(k, y_fine),
                                 1e-14 * detail::state_energy(k, {u0, u1}),
                                 std::numeric_limits<double>::min()});
  const double rel = detail::state_energy(k, diff) / scale;
  if (rel > 1e-4) {
    const long suggest =
        static_cast<long>(std::ceil((nd - 1) * std::pow(rel / 1e-4, 0.25))) + 1;
    throw NumericalError("step_instability",
                         "doubled-step disagreement " + std::to_string(rel) +
                             " for mode " + std::to_string(m) +
                             "; increase n_radial to about " + std::to_string(suggest));
  }

  if (reverse) {
    std::reverse(prof.value.begin(), prof.value.end());
    std::reverse(prof.derivative.begin(), prof.derivative.end());
  }
  prof.state_at_target = y_fine;
  return prof;
}

/// Full annulus continuation, mode by mode. Per-mode failures (overflow,
/// refusal) are collected as flagged diagnostics with zeroed profiles and
/// the run continues.
inline ContinuationResult continue_annulus(const CauchyData& data,
                                           const AnnulusGeometry& geom,
                                           const CoefficientModel& model,
                                           const SpectralCutoff& cutoff, const Field* f,
                                           ModePolicy policy) {
  const GridInfo grid = geom.grid();
  if (data.grid != grid)
    throw std::invalid_argument("continue_annulus: data grid does not match geometry");
  if (f && f->grid != grid)
    throw std::invalid_argument("continue_annulus: source grid does not match geometry");

  std::optional<ModeSpectrum> fhat;
  if (f) fhat = forward_transform(*f);

  const int n = grid.n_tan;
  const double k = data.k;
  const double a11_in = model.a11(grid.prof_lo);

  ModeSpectrum values(grid);
  ContinuationResult res;
  res.cutoff = cutoff;
  res.policy = policy;
  res.trace_value.assign(n, cdouble{0, 0});
  res.trace_derivative.assign(n, cdouble{0, 0});
  res.diagnostics.assign(n, ModeDiagnostic{});

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t idx) {
    const int a = static_cast<int>(idx);
    const int m = grid.mode(a);
    ModeDiagnostic diag;
    diag.mode = m;
    diag.omega2 = k * k - static_cast<double>(m) * m * a11_in;

    if (policy == ModePolicy::low_only && !cutoff.keeps(m)) {
      diag.note = "excluded";
      res.diagnostics[a] = diag;
      return;
    }

    std::span<const cdouble> fm;
    if (fhat) fm = fhat->profile(a);
    bool fm_zero = true;
    for (const cdouble& v : fm)
      if (v != cdouble{0.0, 0.0}) {
        fm_zero = false;
        break;
      }
    try {
      const ModeProfile prof =
          continue_mode_annulus(m, data.u0[a], data.u1[a], k, model, geom, fm);
      for (int j = 0; j < grid.n_prof; ++j) values.at(a, j) = prof.value[j];
      res.trace_value[a] = prof.state_at_target[0];
      res.trace_derivative[a] = prof.state_at_target[1];
      const double e_in = detail::state_energy(k, {data.u0[a], data.u1[a]});
      std::array<cdouble, 2> yh = prof.state_at_target;
      if (!fm_zero && e_in > 0.0)
        yh = continue_mode_annulus(m, data.u0[a], data.u1[a], k, model, geom)
                 .state_at_target;
      diag.amplification = e_in > 0.0 ? detail::state_energy(k, yh) / e_in : 0.0;
    } catch (const NumericalError& e) {
      diag.flagged = true;
      diag.note = e.kind() + std::string(": ") + e.what();
      for (int j = 0; j < grid.n_prof; ++j) values.at(a, j) = cdouble{0, 0};
    }
    res.diagnostics[a] = diag;
  });

  res.field = inverse_transform(values);
  return res;
}

// ---------------------------------------------------------------------------
// regularized continuation

struct RegStrategy {
  enum class Kind { spectral_cutoff, tikhonov };
  Kind kind = Kind::spectral_cutoff;
  double eps = 0.19;   // spectral_cutoff margin
  double alpha = 0.0;  // tikhonov parameter

  static RegStrategy cutoff_margin(double eps) {
    if (!(eps > 0.0) || !(eps < 1.0))
      throw std::invalid_argument("spectral_cutoff strategy: eps must lie in (0,1)");
    return {Kind::spectral_cutoff, eps, 0.0};
  }
  static RegStrategy tikhonov(double alpha) {
    if (!(alpha >= 0.0))
      throw std::invalid_argument("tikhonov strategy: alpha must be nonnegative");
    return {Kind::tikhonov, 0.19, alpha};
  }
};

/// Regularized continuation: either a hard spectral cutoff (low-only run at
/// the strategy's margin) or Tikhonov damping of each propagated mode by
/// a/(a^2 + alpha), a the mode's recorded amplification.
template <typename Geometry>
inline ContinuationResult regularized_continuation(const CauchyData& data,
                                                   const Geometry& geom,
                                                   const CoefficientModel& model,
                                                   const Field* f,
                                                   const RegStrategy& strategy) {
  auto run = [&](const SpectralCutoff& cut, ModePolicy policy) {
    if constexpr (std::is_same_v<Geometry, StripGeometry>) {
      (void)model;
      return continue_strip(data, geom, cut, f, policy);
    } else {
      return continue_annulus(data, geom, model, cut, f, policy);
    }
  };

  if (strategy.kind == RegStrategy::Kind::spectral_cutoff) {
    const SpectralCutoff cut = make_cutoff(data.k, model.E, strategy.eps, data.grid);
    return run(cut, ModePolicy::low_only);
  }

  const SpectralCutoff cut = make_cutoff(data.k, model.E, strategy.eps, data.grid);
  ContinuationResult res = run(cut, ModePolicy::all);

  // damp in spectral space, then rebuild the physical field
  ModeSpectrum spec = forward_transform(res.field);
  for (int a = 0; a < data.grid.n_tan; ++a) {
    const double amp = res.diagnostics[a].amplification;
    const double denom = amp * amp + strategy.alpha;
    const double factor = denom > 0.0 ? amp / denom : 0.0;
    for (int j = 0; j < data.grid.n_prof; ++j) spec.at(a, j) *= factor;
    res.trace_value[a] *= factor;
    res.trace_derivative[a] *= factor;
  }
  res.field = inverse_transform(spec);
  return res;
}

/// Exact target-boundary traces of a known solution, ascending mode order.
struct TruthTraces {
  std::vector<cdouble> value;
  std::vector<cdouble> derivative;
};

struct ErrorReport {
  double field_l2 = 0.0;            // |u_rec - u| over the domain
  double gamma1_value = 0.0;        // trace error at the target boundary
  double gamma1_derivative = 0.0;
  double gamma1_energy_over_k = 0.0; // sqrt(k^2 e_val^2 + e_der^2)/k
};

inline ErrorReport error_report(const ContinuationResult& res, const Field& truth,
                                const TruthTraces& traces, double k) {
  if (truth.grid != res.field.grid)
    throw std::invalid_argument("error_report: grids differ");
  const GridInfo& g = res.field.grid;

  Field diff(g);
  for (std::size_t i = 0; i < diff.values.size(); ++i)
    diff.values[i] = res.field.values[i] - truth.values[i];

  std::vector<cdouble> dval(g.n_tan), dder(g.n_tan);
  for (int a = 0; a < g.n_tan; ++a) {
    dval[a] = res.trace_value[a] - traces.value[a];
    dder[a] = res.trace_derivative[a] - traces.derivative[a];
  }

  ErrorReport rep;
  rep.field_l2 = sobolev_norm(diff, 0);
  rep.gamma1_value = trace_l2(dval, g, g.prof_hi);
  rep.gamma1_derivative = trace_l2(dder, g, g.prof_hi);
  rep.gamma1_energy_over_k =
      std::sqrt(k * k * rep.gamma1_value * rep.gamma1_value +
                rep.gamma1_derivative * rep.gamma1_derivative) /
      k;
  return rep;
}

}  // namespace helmcont
