#pragma once

// Manufactured-solution experiments around the continuation engine.
//
// Strip solutions are exact mode sums for the constant-coefficient depth
// operator u'' + (k^2 - xi^2) u = 0 (oscillatory, neutral, or normalized
// exponential profile per mode). Annulus solutions are Bessel mode sums
// J_m(kappa r) e^{im theta}, unit L^2 per mode. Both make every downstream
// quantity checkable against closed forms.
//
// The strip pipeline continues v = chi u, chi the tangential seam cutoff,
// so the continued object is periodic with data supported away from the
// seam; the commutator source 2 chi' du + chi'' u rides along. Stability
// records collect the measured left- and right-hand terms of the expected
// bound: data terms on the actual (noisy) input, a-priori terms on the true
// solution, the left side on the continuation output.

#include <cctype>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "helmcont/continuation.hpp"
#include "helmcont/core.hpp"
#include "helmcont/spectral.hpp"
#include "helmcont/util.hpp"

namespace helmcont {

// ---------------------------------------------------------------------------
// manufactured solutions

struct Manufactured {
  std::string id;
  Field u;          // true solution
  Field v;          // continued object: chi*u on the strip, u on the annulus
  Field f;          // interior source carried by the continuation
  CauchyData data;  // exact data of v at the data boundary
  TruthTraces gamma1;    // exact traces of v at the target boundary
  ModeSpectrum spectrum; // constructed coefficients of u, zero off support
};

namespace detail {

struct SolutionKind {
  enum class Family { zero, single_mode, low_band, mixed } family = Family::zero;
  int band = 0;  // single mode order, or band half-width
  int high = 0;  // extra high mode for mixed
};

inline SolutionKind parse_solution_id(const std::string& id) {
  auto read_int = [&](std::size_t pos, int& out) -> std::size_t {
    std::size_t q = pos;
    while (q < id.size() && std::isdigit(static_cast<unsigned char>(id[q]))) ++q;
    if (q == pos) throw ConfigError("solution_id", "malformed solution id: " + id);
    out = std::stoi(id.substr(pos, q - pos));
    return q;
  };
  SolutionKind kind;
  if (id == "zero") return kind;
  if (id.rfind("single_mode_m", 0) == 0) {
    kind.family = SolutionKind::Family::single_mode;
    read_int(13, kind.band);
    return kind;
  }
  if (id.rfind("low_band_b", 0) == 0) {
    kind.family = SolutionKind::Family::low_band;
    read_int(10, kind.band);
    return kind;
  }
  if (id.rfind("mixed_b", 0) == 0) {
    kind.family = SolutionKind::Family::mixed;
    std::size_t q = read_int(7, kind.band);
    if (q + 2 > id.size() || id[q] != '_' || id[q + 1] != 'h')
      throw ConfigError("solution_id", "malformed solution id: " + id);
    read_int(q + 2, kind.high);
    return kind;
  }
  throw ConfigError("solution_id", "unknown solution id: " + id);
}

inline std::vector<std::pair<int, cdouble>> mode_coefficients(const SolutionKind& kind) {
  std::vector<std::pair<int, cdouble>> coeffs;
  auto weight = [](int m) {
    const double w = 1.0 / (1.0 + std::abs(m));
    return std::polar(w, 0.3 * m);
  };
  switch (kind.family) {
    case SolutionKind::Family::zero:
      break;
    case SolutionKind::Family::single_mode:
      coeffs.emplace_back(kind.band, weight(kind.band));
      break;
    case SolutionKind::Family::low_band:
      for (int m = -kind.band; m <= kind.band; ++m) coeffs.emplace_back(m, weight(m));
      break;
    case SolutionKind::Family::mixed:
      for (int m = -kind.band; m <= kind.band; ++m) coeffs.emplace_back(m, weight(m));
      coeffs.emplace_back(kind.high, weight(kind.high));
      break;
  }
  return coeffs;
}

/// Depth profile of one strip mode and its derivative; normalized so the
/// profile stays O(1) on [0,1] in every regime.
inline void strip_profile(double omega2, double t, double& phi, double& dphi) {
  if (omega2 > 1e-12) {
    const double w = std::sqrt(omega2);
    phi = std::sin(w * t);
    dphi = w * std::cos(w * t);
  } else if (omega2 >= -1e-12) {
    phi = 1.0 + t;
    dphi = 1.0;
  } else {
    const double g = std::sqrt(-omega2);
    phi = std::exp(g * (t - 1.0));
    dphi = g * phi;
  }
}

}  // namespace detail

/// Exact strip solution for ids "zero", "single_mode_m<j>", "low_band_b<B>",
/// "mixed_b<B>_h<H>". Requires the plain Laplacian depth operator.
inline Manufactured manufacture_solution(const std::string& id, double k,
                                         const StripGeometry& geom,
                                         const CoefficientModel& model) {
  if (model.kind != GeometryKind::strip)
    throw std::invalid_argument("manufacture_solution: strip coefficients required");
  if (model.s_a22 != 1.0 || model.s_a2 != 0.0 || model.s_a1 != 0.0 ||
      model.s_a11 != 1.0 || model.s_a0 != 0.0 || model.s_c != 0.0)
    throw std::invalid_argument(
        "manufacture_solution: exact strip solutions need the laplacian preset");
  if (!(k > 0.0)) throw std::invalid_argument("manufacture_solution: k must be positive");

  const GridInfo grid = geom.grid();
  const detail::SolutionKind kind = detail::parse_solution_id(id);
  const auto coeffs = detail::mode_coefficients(kind);
  const double root_p = std::sqrt(grid.tan_period);

  ModeSpectrum su(grid), sdu(grid);
  for (const auto& [m, c] : coeffs) {
    if (std::abs(m) * 2 >= grid.n_tan)
      throw ConfigError("solution_id", "mode beyond the grid Nyquist limit: " + id);
    const int a = grid.index_of_mode(m);
    const double xi = grid.frequency(m);
    const double omega2 = k * k - xi * xi;
    for (int j = 0; j < grid.n_prof; ++j) {
      double phi, dphi;
      detail::strip_profile(omega2, grid.prof(j), phi, dphi);
      su.at(a, j) += root_p * c * phi;
      sdu.at(a, j) += root_p * c * dphi;
    }
  }

  Manufactured out;
  out.id = id;
  out.spectrum = su;
  out.u = inverse_transform(su);
  const Field du = inverse_transform(sdu);

  const CutoffProfile chi(geom);
  out.v = apply_cutoff_chi(out.u, chi);
  const Field dv = apply_cutoff_chi(du, chi);

  // commutator source of the tangential cutoff: 2 chi' d_x u + chi'' u
  const Field dxu = inverse_transform(tangential_derivative(su));
  out.f = Field(grid);
  for (int j = 0; j < grid.n_prof; ++j)
    for (int i = 0; i < grid.n_tan; ++i) {
      const double x = grid.x(i);
      out.f.at(i, j) = 2.0 * chi.dchi(x) * dxu.at(i, j) + chi.d2chi(x) * out.u.at(i, j);
    }

  out.data.grid = grid;
  out.data.k = k;
  std::vector<cdouble> row(grid.n_tan);
  auto trace_of = [&](const Field& fld, int j) {
    for (int i = 0; i < grid.n_tan; ++i) row[i] = fld.at(i, j);
    return forward_trace(row, grid);
  };
  out.data.u0 = trace_of(out.v, 0);
  out.data.u1 = trace_of(dv, 0);
  out.gamma1.value = trace_of(out.v, grid.n_prof - 1);
  out.gamma1.derivative = trace_of(dv, grid.n_prof - 1);
  return out;
}

/// Exact annulus solution built from J_m(kappa r) radial factors with
/// kappa^2 = k^2 + c k, each mode normalized to unit L^2(r dr) on the grid.
inline Manufactured manufacture_solution(const std::string& id, double k,
                                         const AnnulusGeometry& geom,
                                         const CoefficientModel& model) {
  if (model.kind != GeometryKind::annulus)
    throw std::invalid_argument("manufacture_solution: annulus coefficients required");
  if (model.preset != "laplacian")
    throw std::invalid_argument(
        "manufacture_solution: exact annulus solutions need the laplacian preset");
  if (!(k > 0.0)) throw std::invalid_argument("manufacture_solution: k must be positive");
  const double c0 = model.c(1.0);
  const double kappa2 = k * k + c0 * k;
  if (!(kappa2 > 0.0))
    throw std::invalid_argument("manufacture_solution: k^2 + c k must be positive");
  const double kappa = std::sqrt(kappa2);

  const GridInfo grid = geom.grid();
  const detail::SolutionKind kind = detail::parse_solution_id(id);
  const auto coeffs = detail::mode_coefficients(kind);

  ModeSpectrum su(grid);
  Manufactured out;
  out.id = id;
  out.data.grid = grid;
  out.data.k = k;
  out.data.u0.assign(grid.n_tan, cdouble{0, 0});
  out.data.u1.assign(grid.n_tan, cdouble{0, 0});
  out.gamma1.value.assign(grid.n_tan, cdouble{0, 0});
  out.gamma1.derivative.assign(grid.n_tan, cdouble{0, 0});

  const double root_p = std::sqrt(grid.tan_period);
  for (const auto& [m, c] : coeffs) {
    if (std::abs(m) * 2 >= grid.n_tan)
      throw ConfigError("solution_id", "mode beyond the grid Nyquist limit: " + id);
    const int a = grid.index_of_mode(m);

    std::vector<double> gj(grid.n_prof);
    for (int j = 0; j < grid.n_prof; ++j)
      gj[j] = bessel_basis(m, kappa * grid.prof(j)).J;
    double nrm2 = 0.0;
    const double h = grid.dprof();
    for (int j = 0; j < grid.n_prof; ++j) {
      const double wq = (j == 0 || j == grid.n_prof - 1) ? 0.5 : 1.0;
      nrm2 += wq * h * grid.prof(j) * gj[j] * gj[j];
    }
    if (!(nrm2 > 0.0))
      throw NumericalError("degenerate_mode", "radial profile has no mass: " + id);
    const double nrm = std::sqrt(nrm2);

    const cdouble amp = root_p * c / nrm;
    for (int j = 0; j < grid.n_prof; ++j) su.at(a, j) += amp * gj[j];
    const BesselBasis b_in = bessel_basis(m, kappa * grid.prof_lo);
    const BesselBasis b_out = bessel_basis(m, kappa * grid.prof_hi);
    out.data.u0[a] += amp * b_in.J;
    out.data.u1[a] += amp * kappa * b_in.Jp;
    out.gamma1.value[a] += amp * b_out.J;
    out.gamma1.derivative[a] += amp * kappa * b_out.Jp;
  }

  out.spectrum = su;
  out.u = inverse_transform(su);
  out.v = out.u;
  out.f = Field(grid);
  return out;
}

// ---------------------------------------------------------------------------
// noise

/// Add complex Gaussian noise to both traces, each scaled to an exact
/// coefficient-l2 size delta. delta = 0 returns the data untouched.
inline CauchyData add_noise(const CauchyData& data, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw std::invalid_argument("add_noise: delta must be nonnegative");
  if (delta == 0.0) return data;

  CauchyData noisy = data;
  GaussianStream gs(seed);
  auto perturb = [&](std::vector<cdouble>& trace) {
    std::vector<cdouble> e(trace.size());
    std::vector<double> sq(trace.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      e[i] = gs.next_complex();
      sq[i] = std::norm(e[i]);
    }
    const double nrm = std::sqrt(pairwise_sum(sq));
    if (nrm == 0.0) return;
    for (std::size_t i = 0; i < e.size(); ++i) trace[i] += (delta / nrm) * e[i];
  };
  perturb(noisy.u0);
  perturb(noisy.u1);
  return noisy;
}

// ---------------------------------------------------------------------------
// stability records

struct StabilityRecord {
  double k = 0.0;
  std::string geometry;
  std::string solution_id;
  double delta = 0.0;
  double theta = 0.0;
  double lhs_total = 0.0;
  double rhs_total = 0.0;
  double ratio = 0.0;
  std::vector<std::pair<std::string, double>> terms;
  bool ok = true;
};

namespace detail {

inline void finish_record(StabilityRecord& rec) {
  double lhs = 0.0, rhs = 0.0;
  for (const auto& [name, value] : rec.terms) {
    if (name.rfind("lhs_", 0) == 0) lhs += value;
    if (name.rfind("rhs_", 0) == 0) rhs += value;
  }
  rec.lhs_total = lhs;
  rec.rhs_total = rhs;
  rec.ratio = rhs > 0.0 ? lhs / rhs
                        : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
}

}  // namespace detail

namespace detail {

inline double max_amplification(const ContinuationResult& res) {
  double amp = 0.0;
  for (const ModeDiagnostic& d : res.diagnostics)
    if (!d.flagged) amp = std::max(amp, d.amplification);
  return amp;
}

}  // namespace detail

/// Measured terms of the strip bound
///   |u|_0(core) <= C(|u0|_0 + k^-1(|f|_0 + |u1|_0 + |u|_1(sponge) + hf)),
/// the left side on the continuation output, the data terms on the actual
/// (noisy) input, the a-priori terms on the true solution. The hf terms use
/// the constructed coefficients, so a kept-band solution contributes
/// exactly zero.
inline StabilityRecord stability_ratio(const Manufactured& truth, const CauchyData& noisy,
                                       const ContinuationResult& res,
                                       const StripGeometry& geom, double delta,
                                       double theta) {
  (void)geom;
  const GridInfo& grid = truth.u.grid;
  const double k = noisy.k;
  StabilityRecord rec;
  rec.k = k;
  rec.geometry = "strip";
  rec.solution_id = truth.id;
  rec.delta = delta;
  rec.theta = theta;

  const double hf_h2 = hf_h2_norm(truth.spectrum, res.cutoff);
  const double hf_semi = hf_seminorm(truth.spectrum, 1, res.cutoff);

  rec.terms = {
      {"lhs_l2_core", masked_strip_norm(res.field, true, 0)},
      {"rhs_data_value", trace_l2(noisy.u0, grid, grid.prof_lo)},
      {"rhs_source", sobolev_norm(truth.f, 0) / k},
      {"rhs_data_derivative", trace_l2(noisy.u1, grid, grid.prof_lo) / k},
      {"rhs_sponge_h1", masked_strip_norm(truth.u, false, 1) / k},
      {"rhs_hf_seminorm", hf_semi / k},
      {"aux_hf_h2", hf_h2},
      {"aux_hf_theta", std::pow(k, theta - 0.5) * hf_h2},
      {"aux_hf_theta_alt", std::pow(k, theta - 1.5) * hf_h2},
      {"aux_max_amplification", detail::max_amplification(res)},
  };
  detail::finish_record(rec);
  return rec;
}

/// Measured terms of the annulus bound
///   k|u|_0(G1) + |du/dr|_0(G1) + |u|_1 <= C(k|u0|_0 + |u1|_0 + |f|_0)
///                                         + C(theta) k^(theta-1/2) |u-u_l|_2.
inline StabilityRecord stability_ratio(const Manufactured& truth, const CauchyData& noisy,
                                       const ContinuationResult& res,
                                       const AnnulusGeometry& geom, double delta,
                                       double theta) {
  (void)geom;
  const GridInfo& grid = truth.u.grid;
  const double k = noisy.k;
  StabilityRecord rec;
  rec.k = k;
  rec.geometry = "annulus";
  rec.solution_id = truth.id;
  rec.delta = delta;
  rec.theta = theta;

  const double hf_h2 = hf_h2_norm(truth.spectrum, res.cutoff);

  rec.terms = {
      {"lhs_trace_value", k * trace_l2(res.trace_value, grid, grid.prof_hi)},
      {"lhs_trace_derivative", trace_l2(res.trace_derivative, grid, grid.prof_hi)},
      {"lhs_h1_domain", sobolev_norm(res.field, 1)},
      {"rhs_data_value", k * trace_l2(noisy.u0, grid, grid.prof_lo)},
      {"rhs_data_derivative", trace_l2(noisy.u1, grid, grid.prof_lo)},
      {"rhs_source", sobolev_norm(truth.f, 0)},
      {"rhs_hf_theta", std::pow(k, theta - 0.5) * hf_h2},
      {"aux_hf_h2", hf_h2},
      {"aux_hf_theta_alt", std::pow(k, theta - 1.5) * hf_h2},
      {"aux_max_amplification", detail::max_amplification(res)},
  };
  detail::finish_record(rec);
  return rec;
}

// ---------------------------------------------------------------------------
// sweeps

struct SweepConfig {
  std::string solution_id = "low_band_b4";
  std::vector<double> k_values{5.0, 10.0, 20.0, 40.0};
  double delta = 1e-3;
  double theta = 0.1;
  double eps = 0.19;
  ModePolicy policy = ModePolicy::low_only;
  std::uint64_t seed = 20260816;
};

struct SweepReport {
  std::vector<StabilityRecord> records;
  double max_ratio = 0.0;
  double trend_slope = 0.0; // slope of log(ratio) against log(k)
};

namespace detail {

/// Noise seed of one sweep entry: a pure function of (seed, k) so repeated
/// k values reproduce identical records.
inline std::uint64_t entry_seed(std::uint64_t seed, double k) {
  std::uint64_t bits;
  std::memcpy(&bits, &k, sizeof bits);
  bits ^= seed + 0x9e3779b97f4a7c15ull;
  bits ^= bits >> 33;
  bits *= 0xff51afd7ed558ccdull;
  bits ^= bits >> 33;
  return bits;
}

inline StabilityRecord failed_record(double k, const std::string& geometry,
                                     const SweepConfig& cfg, const std::string& note) {
  StabilityRecord rec;
  rec.k = k;
  rec.geometry = geometry;
  rec.solution_id = cfg.solution_id;
  rec.delta = cfg.delta;
  rec.theta = cfg.theta;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rec.lhs_total = rec.rhs_total = rec.ratio = nan;
  rec.terms = {{"note_" + note, nan}};
  rec.ok = false;
  return rec;
}

inline SweepReport summarize_sweep(std::vector<StabilityRecord> records) {
  SweepReport rep;
  rep.records = std::move(records);
  std::vector<double> lk, lr;
  double max_ratio = 0.0;
  for (const StabilityRecord& r : rep.records)
    if (r.ok && std::isfinite(r.ratio) && r.ratio > 0.0) {
      max_ratio = std::max(max_ratio, r.ratio);
      lk.push_back(std::log(r.k));
      lr.push_back(std::log(r.ratio));
    }
  rep.max_ratio = max_ratio;
  bool spread = false;
  for (const double x : lk)
    if (x != lk.front()) {
      spread = true;
      break;
    }
  rep.trend_slope = lk.size() >= 2 && spread
                        ? ls_slope(lk, lr)
                        : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace detail

/// Stability sweep over k on the strip. Failed wave numbers produce NaN
/// records instead of aborting the sweep.
inline SweepReport sweep_k(const SweepConfig& cfg, const StripGeometry& geom,
                           const CoefficientModel& model) {
  std::vector<StabilityRecord> records;
  for (const double k : cfg.k_values) {
    try {
      const Manufactured man = manufacture_solution(cfg.solution_id, k, geom, model);
      const CauchyData noisy =
          add_noise(man.data, cfg.delta, detail::entry_seed(cfg.seed, k));
      const SpectralCutoff cut = make_cutoff(k, model.E, cfg.eps, man.u.grid);
      const ContinuationResult res =
          continue_strip(noisy, geom, cut, &man.f, cfg.policy);
      records.push_back(stability_ratio(man, noisy, res, geom, cfg.delta, cfg.theta));
    } catch (const NumericalError& e) {
      records.push_back(detail::failed_record(k, "strip", cfg, e.kind()));
    }
  }
  return detail::summarize_sweep(std::move(records));
}

/// Annulus counterpart of sweep_k.
inline SweepReport sweep_k(const SweepConfig& cfg, const AnnulusGeometry& geom,
                           const CoefficientModel& model) {
  std::vector<StabilityRecord> records;
  for (const double k : cfg.k_values) {
    try {
      const Manufactured man = manufacture_solution(cfg.solution_id, k, geom, model);
      const CauchyData noisy =
          add_noise(man.data, cfg.delta, detail::entry_seed(cfg.seed, k));
      const SpectralCutoff cut = make_cutoff(k, model.E, cfg.eps, man.u.grid);
      const ContinuationResult res =
          continue_annulus(noisy, geom, model, cut, nullptr, cfg.policy);
      records.push_back(stability_ratio(man, noisy, res, geom, cfg.delta, cfg.theta));
    } catch (const NumericalError& e) {
      records.push_back(detail::failed_record(k, "annulus", cfg, e.kind()));
    }
  }
  return detail::summarize_sweep(std::move(records));
}

// ---------------------------------------------------------------------------
// blow-up demo

struct JohnRow {
  double k = 0.0;
  double mu = 0.0;
  int mode = 0;
  double omega2 = 0.0;
  double amplification = 0.0; // Dirichlet trace ratio |u(1)| for data (1, 0)
  std::string regime;
};

/// Worst-case growth demo: for tangential frequency mu*k the unit Dirichlet
/// state is propagated across the strip and the target trace magnitude is
/// recorded. Above mu = 1 this grows like exp(sqrt(mu^2-1) k); below it
/// stays bounded by 1.
inline std::vector<JohnRow> john_blowup_demo(const std::vector<double>& k_values,
                                             const std::vector<double>& mu_values,
                                             const StripGeometry& geom = {}) {
  std::vector<JohnRow> rows;
  for (double k : k_values) {
    if (!(k > 0.0)) throw std::invalid_argument("john_blowup_demo: k must be positive");
    for (double mu : mu_values) {
      if (!(mu >= 0.0))
        throw std::invalid_argument("john_blowup_demo: mu must be nonnegative");
      JohnRow row;
      row.k = k;
      row.mu = mu;
      row.mode = static_cast<int>(std::lround(mu * k * geom.L / (2.0 * M_PI)));
      const double xi = 2.0 * M_PI * row.mode / geom.L;
      row.omega2 = k * k - xi * xi;
      try {
        const TransferMatrix2 M = transfer_matrix_strip(xi, k, 0.0, 1.0);
        const auto y = M.apply({cdouble{1.0, 0.0}, cdouble{0.0, 0.0}});
        row.amplification = std::abs(y[0]);
      } catch (const NumericalError&) {
        row.amplification = std::numeric_limits<double>::infinity();
      }
      row.regime = row.omega2 > 1e-12    ? "oscillatory"
                   : row.omega2 < -1e-12 ? "evanescent"
                                         : "neutral";
      rows.push_back(row);
    }
  }
  return rows;
}

/// Least-squares slope of ln(amplification) against k for one mu within the
/// demo rows; the evanescent regime trends toward sqrt(mu^2 - 1).
inline double john_log_slope(const std::vector<JohnRow>& rows, double mu) {
  std::vector<double> ks, logs;
  for (const JohnRow& r : rows)
    if (r.mu == mu && std::isfinite(r.amplification) && r.amplification > 0.0) {
      ks.push_back(r.k);
      logs.push_back(std::log(r.amplification));
    }
  if (ks.size() < 2)
    throw std::invalid_argument("john_log_slope: need at least two usable rows");
  return ls_slope(ks, logs);
}

}  // namespace helmcont
