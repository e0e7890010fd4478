#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "helmcont/core.hpp"
#include "helmcont/spectral.hpp"
#include "helmcont/util.hpp"

using namespace helmcont;

namespace {

Field random_field(const GridInfo& g, std::uint64_t seed) {
  GaussianStream gs(seed);
  Field f(g);
  for (cdouble& v : f.values) v = {gs.next(), gs.next()};
  return f;
}

/// Physical-space L2 with the same quadrature the spectral side uses:
/// plain sum times dx tangentially, trapezoid with the r measure in depth.
double direct_l2(const Field& f) {
  const GridInfo& g = f.grid;
  std::vector<double> terms;
  terms.reserve(f.values.size());
  for (int i = 0; i < g.n_tan; ++i)
    for (int j = 0; j < g.n_prof; ++j) {
      const double w = (j == 0 || j == g.n_prof - 1) ? 0.5 : 1.0;
      terms.push_back(std::norm(f.at(i, j)) * g.dx() * w * g.dprof() *
                      g.measure(g.prof(j)));
    }
  return std::sqrt(pairwise_sum(terms));
}

Field single_mode_field(const GridInfo& g, int m, const std::vector<cdouble>& prof) {
  ModeSpectrum s(g);
  auto dst = s.profile(g.index_of_mode(m));
  std::copy(prof.begin(), prof.end(), dst.begin());
  return inverse_transform(s);
}

}  // namespace

TEST_CASE("transform round trip recovers the field") {
  for (GridInfo g : {StripGeometry{}.grid(), AnnulusGeometry{2.0, 32, 17}.grid()}) {
    const Field f = random_field(g, 11);
    const Field back = inverse_transform(forward_transform(f));
    double worst = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
      worst = std::max(worst, std::abs(f.values[i] - back.values[i]));
    CHECK(worst < 1e-13 * sobolev_norm(f, 0));
  }
}

TEST_CASE("tangential transform satisfies Parseval with the grid quadrature") {
  for (GridInfo g : {StripGeometry{}.grid(), AnnulusGeometry{2.0, 32, 17}.grid()}) {
    const Field f = random_field(g, 12);
    const double spectral = sobolev_norm(f, 0);
    const double physical = direct_l2(f);
    CHECK(spectral == Catch::Approx(physical).epsilon(1e-12));
  }
}

TEST_CASE("frequency split is an orthogonal decomposition") {
  const GridInfo g = StripGeometry{}.grid();
  const Field f = random_field(g, 13);
  const SpectralCutoff cut = make_cutoff(10.0, 1.0, 0.19, g);
  const FrequencySplit sp = split_low_high(forward_transform(f), cut);
  for (int p : {0, 1, 2}) {
    const double lo = spectrum_norm(sp.low, p);
    const double hi = spectrum_norm(sp.high, p);
    const double together = spectrum_norm(forward_transform(f), p);
    CHECK(std::sqrt(lo * lo + hi * hi) == Catch::Approx(together).epsilon(1e-12));
  }
}

TEST_CASE("low projector is idempotent and complementary") {
  const GridInfo g = StripGeometry{}.grid();
  const Field f = random_field(g, 14);
  const SpectralCutoff cut = make_cutoff(10.0, 1.0, 0.19, g);
  const Field once = project_low(f, cut);
  const Field twice = project_low(once, cut);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    CHECK(std::abs(once.values[i] - twice.values[i]) < 1e-13);

  // through physical space the excluded modes only fill with FFT roundoff
  const FrequencySplit sp = split_low_high(forward_transform(once), cut);
  CHECK(spectrum_norm(sp.high, 0) < 1e-13 * sobolev_norm(f, 0));

  // at the coefficient level the split is exact: low of low has empty complement
  const ModeSpectrum low = split_low_high(forward_transform(f), cut).low;
  const ModeSpectrum leftover = split_low_high(low, cut).high;
  for (const cdouble& c : leftover.coeffs) CHECK(c == cdouble{0.0, 0.0});
}

TEST_CASE("cutoff keep test is strict at the threshold") {
  // (1 - 3/4) k^2 = 1 at k = 2, all quantities exact in binary.
  const GridInfo gs = StripGeometry{}.grid();
  const SpectralCutoff strip_cut = make_cutoff(2.0, 1.0, 0.75, gs);
  CHECK(strip_cut.keeps(0));
  CHECK_FALSE(strip_cut.keeps(1));
  CHECK_FALSE(strip_cut.keeps(-1));

  const GridInfo ga = AnnulusGeometry{}.grid();
  const SpectralCutoff ann_cut = make_cutoff(2.0, 1.0, 0.75, ga);
  CHECK(ann_cut.keeps(0));
  CHECK_FALSE(ann_cut.keeps(1));
  CHECK_FALSE(ann_cut.keeps(-1));
}

TEST_CASE("cutoff band edge at the default margin") {
  const GridInfo g = StripGeometry{}.grid();
  const SpectralCutoff cut = make_cutoff(10.0, 1.0, 0.19, g);
  // sqrt(0.81) * 10 = 9; modes clear of the borderline are decided robustly,
  // the borderline mode itself is left to the strict comparison.
  CHECK(cut.keeps(8));
  CHECK(cut.keeps(-8));
  CHECK_FALSE(cut.keeps(10));
  CHECK_FALSE(cut.keeps(-10));
  CHECK(cut.keeps(9) == cut.keeps(-9));
}

TEST_CASE("make_cutoff validates its arguments") {
  const GridInfo g = StripGeometry{}.grid();
  CHECK_THROWS_AS(make_cutoff(0.0, 1.0, 0.19, g), std::invalid_argument);
  CHECK_THROWS_AS(make_cutoff(10.0, 0.0, 0.19, g), std::invalid_argument);
  CHECK_THROWS_AS(make_cutoff(10.0, 1.0, 0.0, g), std::invalid_argument);
  CHECK_THROWS_AS(make_cutoff(10.0, 1.0, 1.0, g), std::invalid_argument);
}

TEST_CASE("kept band obeys the Bernstein bound") {
  for (GridInfo g : {StripGeometry{}.grid(), AnnulusGeometry{2.0, 64, 17}.grid()}) {
    const Field f = random_field(g, 15);
    const double k = 10.0, E = 1.0, eps = 0.19;
    const SpectralCutoff cut = make_cutoff(k, E, eps, g);
    const ModeSpectrum low = split_low_high(forward_transform(f), cut).low;
    const double lhs = spectrum_norm(tangential_derivative(low), 0);
    const double bound = (g.kind == GeometryKind::strip ? k / E : E * k) *
                         std::sqrt(1.0 - eps) * spectrum_norm(low, 0);
    CHECK(lhs <= bound * (1.0 + 1e-10));
  }
}

TEST_CASE("tangential derivative matches the analytic derivative") {
  const StripGeometry geom{};
  const GridInfo g = geom.grid();
  Field f(g);
  for (int i = 0; i < g.n_tan; ++i)
    for (int j = 0; j < g.n_prof; ++j)
      f.at(i, j) = std::cos(3.0 * g.x(i)) * (1.0 + g.prof(j));
  const Field df = inverse_transform(tangential_derivative(forward_transform(f)));
  double worst = 0.0;
  for (int i = 0; i < g.n_tan; ++i)
    for (int j = 0; j < g.n_prof; ++j)
      worst = std::max(worst, std::abs(df.at(i, j) +
                                       3.0 * std::sin(3.0 * g.x(i)) * (1.0 + g.prof(j))));
  CHECK(worst < 1e-11);
}

TEST_CASE("L2 norm closed forms on pure modes") {
  const GridInfo gs = StripGeometry{}.grid();
  Field us(gs);
  for (int i = 0; i < gs.n_tan; ++i)
    for (int j = 0; j < gs.n_prof; ++j)
      us.at(i, j) = std::exp(cdouble{0.0, 3.0 * gs.x(i)});
  CHECK(sobolev_norm(us, 0) == Catch::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-12));

  const GridInfo ga = AnnulusGeometry{}.grid();
  Field ua(ga);
  for (int i = 0; i < ga.n_tan; ++i)
    for (int j = 0; j < ga.n_prof; ++j)
      ua.at(i, j) = std::exp(cdouble{0.0, 5.0 * ga.x(i)});
  // integral of r dr over [1,2] is 3/2, exact under the trapezoid rule.
  CHECK(sobolev_norm(ua, 0) == Catch::Approx(std::sqrt(3.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("H1 norm approaches the continuum closed form") {
  const GridInfo g = StripGeometry{}.grid();
  Field u(g);
  for (int i = 0; i < g.n_tan; ++i)
    for (int j = 0; j < g.n_prof; ++j)
      u.at(i, j) = std::exp(cdouble{0.0, 3.0 * g.x(i)}) * g.prof(j);
  // |u|^2 and |du/dx|^2 contribute t^2, |du/dt|^2 contributes 1:
  // 2*pi*(10/3 + 1) up to the trapezoid error on t^2.
  const double expected = std::sqrt(2.0 * M_PI * 13.0 / 3.0);
  CHECK(sobolev_norm(u, 1) == Catch::Approx(expected).epsilon(1e-3));
}

TEST_CASE("high-frequency semi-norm closed forms") {
  const GridInfo g = StripGeometry{}.grid();
  const SpectralCutoff cut = make_cutoff(10.0, 1.0, 0.19, g);
  const std::vector<cdouble> ones(g.n_prof, cdouble{1.0, 0.0});
  const Field u = single_mode_field(g, 12, ones);
  // excluded mode xi = 12, unit coefficient, flat profile:
  // |||u|||_(1,k)^2 = 1 + 144, |||u|||_(2,k)^2 = (1 + 144)^2.
  CHECK(hf_seminorm(u, 1, cut) == Catch::Approx(std::sqrt(145.0)).epsilon(1e-12));
  CHECK(hf_seminorm(u, 2, cut) == Catch::Approx(145.0).epsilon(1e-12));
  CHECK_THROWS_AS(hf_seminorm(u, 3, cut), std::invalid_argument);
}

TEST_CASE("high-frequency semi-norm vanishes on the kept band") {
  const GridInfo g = StripGeometry{}.grid();
  const SpectralCutoff cut = make_cutoff(10.0, 1.0, 0.19, g);
  GaussianStream gs(16);
  ModeSpectrum kept(g);
  for (int a = 0; a < g.n_tan; ++a) {
    if (!cut.keeps(g.mode(a))) continue;
    for (int j = 0; j < g.n_prof; ++j) kept.at(a, j) = {gs.next(), gs.next()};
  }
  CHECK(hf_seminorm(kept, 1, cut) == 0.0);
  CHECK(hf_seminorm(kept, 2, cut) == 0.0);
  CHECK(hf_h2_norm(kept, cut) == 0.0);

  // realized on the grid, the residual is FFT roundoff at worst
  const Field low = inverse_transform(kept);
  CHECK(hf_seminorm(low, 2, cut) < 1e-11 * sobolev_norm(low, 2));
}

TEST_CASE("high-frequency semi-norm is nonincreasing in k") {
  const GridInfo g = StripGeometry{}.grid();
  const Field f = random_field(g, 17);
  double prev = std::numeric_limits<double>::infinity();
  for (double k : {2.0, 5.0, 10.0, 20.0, 40.0}) {
    const double v = hf_seminorm(f, 1, make_cutoff(k, 1.0, 0.19, g));
    CHECK(v <= prev * (1.0 + 1e-12));
    prev = v;
  }
  // once the kept band covers every representable mode the residual is zero
  CHECK(hf_seminorm(f, 1, make_cutoff(40.0, 1.0, 0.19, g)) == 0.0);
}

TEST_CASE("trace norms on the boundary rings") {
  const GridInfo g = AnnulusGeometry{}.grid();
  std::vector<cdouble> ring(g.n_tan, cdouble{1.0, 0.0});
  const std::vector<cdouble> modes = forward_trace(ring, g);
  CHECK(std::abs(modes[g.index_of_mode(0)] - std::sqrt(2.0 * M_PI)) < 1e-12);
  CHECK(trace_l2(modes, g, 1.0) == Catch::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-12));
  CHECK(trace_l2(modes, g, 2.0) == Catch::Approx(2.0 * std::sqrt(M_PI)).epsilon(1e-12));

  const std::vector<cdouble> back = inverse_trace(modes, g);
  for (int i = 0; i < g.n_tan; ++i) CHECK(std::abs(back[i] - ring[i]) < 1e-13);
}

TEST_CASE("masked strip norms split the domain") {
  const GridInfo g = StripGeometry{}.grid();
  const Field f = random_field(g, 18);
  const double core = masked_strip_norm(f, true, 0);
  const double sponge = masked_strip_norm(f, false, 0);
  const double total = direct_l2(f);
  CHECK(std::sqrt(core * core + sponge * sponge) == Catch::Approx(total).epsilon(1e-12));

  // constant field: the core picks up exactly the columns away from the seam
  Field ones(g);
  for (cdouble& v : ones.values) v = 1.0;
  int n_core = 0;
  for (int i = 0; i < g.n_tan; ++i)
    if (g.seam_distance(g.x(i)) >= g.sponge_width * g.tan_period) ++n_core;
  CHECK(masked_strip_norm(ones, true, 0) ==
        Catch::Approx(std::sqrt(n_core * g.dx())).epsilon(1e-12));
}

TEST_CASE("norms reject nonfinite fields") {
  const GridInfo g = StripGeometry{}.grid();
  Field f(g);
  f.at(3, 4) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sobolev_norm(f, 0), NumericalError);
}
