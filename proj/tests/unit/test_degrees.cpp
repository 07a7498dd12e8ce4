#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "henonlab/degrees.hpp"

using namespace henonlab;
using fixtures::point2;

namespace {

DiskSeed horizontal_disk(const HenonMap& f, double fraction) {
  return {point2(0.0, Complex(0.3, 0.2)), point2(1.0, 0.0), fraction * f.domain().radius_M()};
}

}  // namespace

TEST_CASE("curve mass of a flat disk is its area") {
  const HenonMap f = fixtures::horseshoe();
  const DiskSeed seed = horizontal_disk(f, 0.5);
  const MassEstimate m = curve_mass(f, 0, seed);
  CHECK(m.mass == doctest::Approx(M_PI * seed.radius * seed.radius).epsilon(1e-3));
  CHECK(m.converged);
}

TEST_CASE("restricting to a smaller D' decreases the mass") {
  const HenonMap wide = fixtures::horseshoe(fixtures::kHorseshoeRadius, 0.5, 0.75);
  const HenonMap narrow = fixtures::horseshoe(fixtures::kHorseshoeRadius, 0.5, 0.6);
  const DiskSeed seed = horizontal_disk(wide, 0.55);
  CHECK(curve_mass(narrow, 0, seed).mass == curve_mass(wide, 0, seed).mass);
  for (int n : {1, 2, 3, 4}) {
    const double a = curve_mass(wide, n, seed).mass, b = curve_mass(narrow, n, seed).mass;
    CHECK(b < a);
  }
}

TEST_CASE("curve mass estimator is stable under refinement") {
  const HenonMap f = fixtures::horseshoe();
  const DiskSeed seed = horizontal_disk(f, 0.75);
  RefinementConfig coarse, fine;
  fine.radial_cells = 16;
  fine.angular_cells = 64;
  fine.rel_tol = 0.0025;
  for (int n : {2, 3}) {
    const double a = curve_mass(f, n, seed, coarse).mass, b = curve_mass(f, n, seed, fine).mass;
    CHECK(std::abs(a - b) < 0.01 * b);
  }
}

TEST_CASE("backward curve mass uses the inverse map") {
  // The swap (x, y) -> (y, x) conjugates f^{-1} to f for the reversible horseshoe.
  const HenonMap f = fixtures::horseshoe();
  const DiskSeed h = horizontal_disk(f, 0.75);
  const DiskSeed v{point2(Complex(0.3, 0.2), 0.0), point2(0.0, 1.0), h.radius};
  for (int n : {1, 2}) {
    const double forward = curve_mass(f, n, h).mass, backward = curve_mass(f, n, v, {}, TimeDirection::Backward).mass;
    CHECK(backward == doctest::Approx(forward).epsilon(1e-6));
  }
}

TEST_CASE("planar point witness does not grow") {
  const HenonMap f = fixtures::horseshoe();
  const double x = 1.0 - fixtures::kSqrt7;
  const GrowthSeries g = point_growth(f, 6, point2(x, x));
  REQUIRE(g.fit.has_value());
  CHECK(std::abs(g.exponent()) < 1e-9);
  for (double m : g.masses) CHECK(m == 1.0);
  CHECK(point_mass(f, 1, point2(3.5, 0.0)) == 0.0);
}

TEST_CASE("curve growth of a composition reflects the product of degrees") {
  const HenonFactor h{Polynomial({-6.0, 0.0, 1.0}), -1.0};
  const HenonMap g = HenonMap::composition({h, h}, BidiskDomain::planar(fixtures::kHorseshoeRadius, fixtures::kHorseshoeRadius));
  CHECK(g.main_degree() == 4);
  const GrowthSeries s = curve_growth(g, 3, horizontal_disk(g, 0.75), {}, TimeDirection::Forward, 1);
  CHECK(s.exponent() == doctest::Approx(std::log(4.0)).epsilon(0.15));
}

TEST_CASE("surface mass of a flat bidisk") {
  const HenonMap f = fixtures::horseshoe();
  const HenonMap ff = product(f, f);
  const double r = 0.7 * fixtures::kHorseshoeRadius;
  PolydiskSeed seed;
  seed.center = ComplexPoint::Zero(4);
  for (std::size_t j = 0; j < 2; ++j) seed.center[static_cast<Eigen::Index>(ff.domain().contracting[j])] = Complex(0.3, 0.2);
  for (std::size_t j = 0; j < 2; ++j) {
    seed.directions[j] = ComplexPoint::Zero(4);
    seed.directions[j][static_cast<Eigen::Index>(ff.domain().expanding[j])] = 1.0;
    seed.radius[j] = r;
  }
  const MassEstimate m = surface_mass(ff, 0, seed);
  const double area = M_PI * r * r;
  CHECK(m.mass == doctest::Approx(area * area).epsilon(0.02));
  CHECK(m.converged);

  const MassEstimate m2 = surface_mass(ff, 2, seed);
  CHECK(m2.converged);
  CHECK(m2.standard_error < 0.1 * m2.mass);
}
