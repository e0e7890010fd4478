#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helmcont/continuation.hpp"
#include "helmcont/core.hpp"
#include "helmcont/operator_b.hpp"

using namespace helmcont;

namespace {

/// Closed-form |u'(R)| for the Laplacian Neumann mode shot from u(1)=1,
/// u'(1)=0, built from the Bessel fundamental system and the Wronskian.
double oracle_det_abs(int m, double k, double R) {
  const BesselBasis b1 = bessel_basis(m, k);
  const BesselBasis bR = bessel_basis(m, k * R);
  return std::abs(M_PI * k * k / 2.0 * (b1.Yp * bR.Jp - b1.Jp * bR.Yp));
}

SingularSpectrum plateau_fixture(double k, int m_star, int m_max) {
  SingularSpectrum spec;
  spec.k = k;
  spec.radius = 2.0;
  spec.entries.push_back({0, 1.0, false, 1.0});
  for (int m = 1; m <= m_max; ++m) {
    const double sigma = m <= m_star ? 1.0 : 1e-2;
    spec.entries.push_back({-m, sigma, false, 1.0 / sigma});
    spec.entries.push_back({m, sigma, false, 1.0 / sigma});
  }
  return spec;
}

}  // namespace

TEST_CASE("Neumann mode solve matches the Bessel closed form") {
  const AnnulusGeometry geom{};
  const CoefficientModel model = laplacian_annulus();
  const double k = 10.0;
  for (int m : {0, 2, 7}) {
    const ModeSigma got = solve_neumann_mode(m, k, model, geom);
    const double det = oracle_det_abs(m, k, geom.R);
    CHECK(got.det_abs == Catch::Approx(det).epsilon(1e-8));
    CHECK(got.sigma == Catch::Approx(1.0 / (det * std::sqrt(geom.R))).epsilon(1e-8));
    CHECK_FALSE(got.resonant);
  }
}

TEST_CASE("Neumann mode solve validates its inputs") {
  const AnnulusGeometry geom{};
  CHECK_THROWS_AS(solve_neumann_mode(0, 0.0, laplacian_annulus(), geom),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_neumann_mode(0, 10.0, laplacian_strip(), geom),
                  std::invalid_argument);
}

TEST_CASE("spectrum is ordered by absolute order and symmetric") {
  const AnnulusGeometry geom{2.0, 128, 257};
  const SingularSpectrum spec = operator_b_spectrum(5.0, laplacian_annulus(), geom, 3);
  REQUIRE(spec.entries.size() == 7);
  const int expected[] = {0, -1, 1, -2, 2, -3, 3};
  for (int i = 0; i < 7; ++i) CHECK(spec.entries[i].m == expected[i]);
  for (int m = 1; m <= 3; ++m) {
    const double neg = spec.entries[2 * m - 1].sigma;
    const double pos = spec.entries[2 * m].sigma;
    CHECK(neg == Catch::Approx(pos).epsilon(1e-13));
  }
  CHECK_THROWS_AS(operator_b_spectrum(5.0, laplacian_annulus(), geom, -1),
                  std::invalid_argument);
}

TEST_CASE("singular values collapse past the shadow boundary") {
  const AnnulusGeometry geom{};
  const double k = 10.0;
  const SingularSpectrum spec = operator_b_spectrum(k, laplacian_annulus(), geom, 40);
  const double sigma0 = spec.entries.front().sigma;
  REQUIRE(sigma0 > 0.0);
  for (const ModeSigma& e : spec.entries) {
    if (e.m <= static_cast<int>(1.5 * k * geom.R)) continue;
    CHECK(e.sigma / sigma0 < 1e-6);
  }
}

TEST_CASE("plateau metrics recover an exact synthetic slope") {
  // edges at 0.9k for k = 10, 20, 40: least squares through the origin
  // gives (10*9 + 20*18 + 40*36) / (100 + 400 + 1600) = 1890/2100 = 0.9
  const std::vector<SingularSpectrum> spectra{
      plateau_fixture(10.0, 9, 30),
      plateau_fixture(20.0, 18, 40),
      plateau_fixture(40.0, 36, 60),
  };
  const ConjectureMetrics met = conjecture_metrics(spectra, 0.1);
  CHECK(met.delta2 == Catch::Approx(0.9).epsilon(1e-14));
  CHECK(met.delta1 == Catch::Approx(1.0));
  CHECK(met.monotone_ok);
  REQUIRE(met.points.size() == 3);
  CHECK(met.points[0].m_star == 9);
  CHECK(met.points[1].m_star == 18);
  CHECK(met.points[2].m_star == 36);
  CHECK(met.points[0].r_star == 10);
  CHECK(met.points[2].sigma_ref == 1.0);
}

TEST_CASE("plateau metrics skip resonant orders without breaking the run") {
  SingularSpectrum spec = plateau_fixture(10.0, 9, 20);
  spec.entries[2 * 5 - 1].resonant = true; // order -5, irrelevant for m >= 0
  spec.entries[2 * 5].resonant = true;     // order +5 inside the plateau
  const ConjectureMetrics met = conjecture_metrics({spec}, 0.1);
  CHECK(met.points[0].m_star == 9);
  CHECK(met.points[0].r_star == 9);
}

TEST_CASE("plateau reference skips a resonant leading order") {
  SingularSpectrum spec = plateau_fixture(10.0, 9, 20);
  spec.entries[0].resonant = true;
  spec.entries[0].sigma = 1e9; // must be ignored
  const ConjectureMetrics met = conjecture_metrics({spec}, 0.1);
  CHECK(met.points[0].sigma_ref == 1.0);
  CHECK(met.points[0].m_star == 9);
}

TEST_CASE("plateau edge stops at the first dip even if values recover") {
  SingularSpectrum spec = plateau_fixture(10.0, 9, 20);
  spec.entries[2 * 3].sigma = 1e-3; // order +3 dips below theta
  const ConjectureMetrics met = conjecture_metrics({spec}, 0.1);
  CHECK(met.points[0].m_star == 2);
  CHECK(met.points[0].r_star == 9); // orders 0..9 minus the dip still pass
}

TEST_CASE("plateau metrics flag a monotonicity break") {
  const std::vector<SingularSpectrum> fine{plateau_fixture(10.0, 9, 30),
                                           plateau_fixture(20.0, 8, 30)};
  CHECK(conjecture_metrics(fine, 0.1).monotone_ok);

  const std::vector<SingularSpectrum> broken{plateau_fixture(10.0, 9, 30),
                                             plateau_fixture(20.0, 7, 30)};
  CHECK_FALSE(conjecture_metrics(broken, 0.1).monotone_ok);
}

TEST_CASE("plateau metrics validate their inputs") {
  CHECK_THROWS_AS(conjecture_metrics({}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(conjecture_metrics({plateau_fixture(10.0, 9, 20)}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(conjecture_metrics({plateau_fixture(10.0, 9, 20)}, 1.0),
                  std::invalid_argument);

  SingularSpectrum all_resonant = plateau_fixture(10.0, 9, 5);
  for (ModeSigma& e : all_resonant.entries) e.resonant = true;
  try {
    (void)conjecture_metrics({all_resonant}, 0.1);
    FAIL("expected a degenerate-spectrum refusal");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == "degenerate_spectrum");
  }
}
