#pragma once

// Mode-wise singular values of the outer-to-inner Neumann solution
// operator on the annulus: given Neumann data h e^{im theta} on r = R and
// a sound-hard inner boundary (u'(1) = 0), the solution trace at r = 1 is
// read off. Shooting with the fundamental system w1 = (1,0), w2 = (0,1)
// from r = 1 gives
//   sigma_m = 1 / (|w1'(R)| sqrt(R)),
// the boundary matrix [[0, 1], [w1'(R), w2'(R)]] turning singular exactly
// at interior Neumann eigenvalues (flagged, not interpolated over).
//
// The integration step subdivides the radial grid so that lambda * h stays
// small, lambda estimated from coefficient sups; this keeps the plateau
// region and the exponential tail both resolved for orders up to ~2kR.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "helmcont/continuation.hpp"
#include "helmcont/core.hpp"
#include "helmcont/util.hpp"

namespace helmcont {

struct ModeSigma {
  int m = 0;
  double sigma = 0.0;
  bool resonant = false;
  double det_abs = 0.0; // |w1'(R)|, the absolute boundary determinant
};

struct SingularSpectrum {
  double k = 0.0;
  double radius = 0.0;
  std::vector<ModeSigma> entries; // sorted by (|m|, m)
};

namespace detail {

inline long neumann_substeps(int m, double k, const CoefficientModel& model,
                             const GridInfo& grid) {
  double q_sup = 0.0, adv_sup = 0.0;
  const double mm = static_cast<double>(m);
  for (int j = 0; j < grid.n_prof; ++j) {
    const double r = grid.prof(j);
    const double a22 = model.a22(r);
    const cdouble q{model.a0(r) + k * model.c(r) + k * k - mm * mm * model.a11(r),
                    mm * model.a1(r)};
    q_sup = std::max(q_sup, std::abs(q) / a22);
    adv_sup = std::max(adv_sup, std::abs(model.a2(r)) / a22);
  }
  const double lambda = std::sqrt(q_sup) + adv_sup;
  const double h = grid.dprof();
  return std::max<long>(1, static_cast<long>(std::ceil(lambda * h / 0.05)));
}

}  // namespace detail

/// Shooting solve of one Neumann mode. Never refuses; resolution is chosen
/// deterministically from the coefficient magnitudes.
inline ModeSigma solve_neumann_mode(int m, double k, const CoefficientModel& model,
                                    const AnnulusGeometry& geom) {
  if (model.kind != GeometryKind::annulus)
    throw std::invalid_argument("solve_neumann_mode: annulus coefficients required");
  if (!(k > 0.0)) throw std::invalid_argument("solve_neumann_mode: k must be positive");

  const GridInfo grid = geom.grid();
  const long sub = detail::neumann_substeps(m, k, model, grid);
  const long steps = static_cast<long>(grid.n_prof - 1) * sub;
  const double h = (grid.prof_hi - grid.prof_lo) / static_cast<double>(steps);

  const detail::RadialOde ode{m, k, &model};
  const detail::SourceInterp no_source;
  const auto w1 = detail::rk4_march(ode, no_source, {cdouble{1, 0}, cdouble{0, 0}},
                                    grid.prof_lo, h, steps, 0, nullptr);
  const auto w2 = detail::rk4_march(ode, no_source, {cdouble{0, 0}, cdouble{1, 0}},
                                    grid.prof_lo, h, steps, 0, nullptr);

  ModeSigma out;
  out.m = m;
  out.det_abs = std::abs(w1[1]);
  const double row2 = std::hypot(std::abs(w1[1]), std::abs(w2[1]));
  out.resonant = out.det_abs < 1e-8 * row2;
  out.sigma = out.det_abs > 0.0 ? 1.0 / (out.det_abs * std::sqrt(grid.prof_hi))
                                : std::numeric_limits<double>::infinity();
  return out;
}

/// Singular values for all orders |m| <= m_max, each solved independently.
inline SingularSpectrum operator_b_spectrum(double k, const CoefficientModel& model,
                                            const AnnulusGeometry& geom, int m_max) {
  if (m_max < 0) throw std::invalid_argument("operator_b_spectrum: m_max must be >= 0");
  std::vector<int> orders;
  orders.push_back(0);
  for (int m = 1; m <= m_max; ++m) {
    orders.push_back(-m);
    orders.push_back(m);
  }

  SingularSpectrum spec;
  spec.k = k;
  spec.radius = geom.R;
  spec.entries.assign(orders.size(), ModeSigma{});
  parallel_for(orders.size(), [&](std::size_t i) {
    spec.entries[i] = solve_neumann_mode(orders[i], k, model, geom);
  });
  return spec;
}

// ---------------------------------------------------------------------------
// plateau metrics

struct PlateauPoint {
  double k = 0.0;
  int m_star = 0;             // plateau edge: largest contiguous passing order
  int r_star = 0;             // sorted-order plateau size: all passing orders
  double sigma_ref = 0.0;     // reference value at the smallest unflagged order
  double plateau_min_ratio = 0.0;
};

struct ConjectureMetrics {
  double theta = 0.0;
  double delta2 = 0.0;      // slope through the origin of m_star against k
  double delta1 = 0.0;      // worst normalized plateau value across all k
  bool monotone_ok = false; // m_star nondecreasing in k up to one order
  std::vector<PlateauPoint> points;
};

/// Plateau statistics over several spectra. The plateau of one spectrum is
/// the longest run of orders from 0 whose unflagged sigma stays above
/// theta * sigma_ref; flagged (resonant) orders are skipped, not counted
/// against the run.
inline ConjectureMetrics conjecture_metrics(const std::vector<SingularSpectrum>& spectra,
                                            double theta) {
  if (spectra.empty())
    throw std::invalid_argument("conjecture_metrics: at least one spectrum required");
  if (!(theta > 0.0) || !(theta < 1.0))
    throw std::invalid_argument("conjecture_metrics: theta must lie in (0,1)");

  ConjectureMetrics met;
  met.theta = theta;

  for (const SingularSpectrum& spec : spectra) {
    int m_max = 0;
    for (const ModeSigma& e : spec.entries) m_max = std::max(m_max, e.m);
    std::vector<const ModeSigma*> by_order(m_max + 1, nullptr);
    for (const ModeSigma& e : spec.entries)
      if (e.m >= 0) by_order[e.m] = &e;

    PlateauPoint pt;
    pt.k = spec.k;
    pt.sigma_ref = 0.0;
    for (int m = 0; m <= m_max; ++m)
      if (by_order[m] && !by_order[m]->resonant) {
        pt.sigma_ref = by_order[m]->sigma;
        break;
      }
    if (pt.sigma_ref <= 0.0)
      throw NumericalError("degenerate_spectrum",
                           "no unflagged singular value at k=" + std::to_string(spec.k));

    double plateau_min = std::numeric_limits<double>::infinity();
    int edge = -1;
    bool broken = false;
    for (int m = 0; m <= m_max; ++m) {
      const ModeSigma* e = by_order[m];
      if (!e || e->resonant) continue;
      if (e->sigma >= theta * pt.sigma_ref) ++pt.r_star;
      if (broken) continue;
      if (e->sigma < theta * pt.sigma_ref) {
        broken = true;
        continue;
      }
      edge = m;
      plateau_min = std::min(plateau_min, e->sigma / pt.sigma_ref);
    }
    pt.m_star = std::max(edge, 0);
    pt.plateau_min_ratio = std::isfinite(plateau_min) ? plateau_min : 0.0;
    met.points.push_back(pt);
  }

  std::sort(met.points.begin(), met.points.end(),
            [](const PlateauPoint& a, const PlateauPoint& b) { return a.k < b.k; });

  std::vector<double> ks, ms;
  met.delta1 = std::numeric_limits<double>::infinity();
  met.monotone_ok = true;
  for (std::size_t i = 0; i < met.points.size(); ++i) {
    ks.push_back(met.points[i].k);
    ms.push_back(static_cast<double>(met.points[i].m_star));
    met.delta1 = std::min(met.delta1, met.points[i].plateau_min_ratio);
    if (i > 0 && met.points[i].m_star < met.points[i - 1].m_star - 1)
      met.monotone_ok = false;
  }
  met.delta2 = met.points.size() >= 1 ? ls_through_origin(ks, ms) : 0.0;
  return met;
}

}  // namespace helmcont
