#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "henonlab/green.hpp"
#include "henonlab/precision.hpp"

using namespace henonlab;
using fixtures::point2;

TEST_CASE("G+ vanishes on bounded orbits and is nonnegative") {
  const HenonMap f = fixtures::horseshoe();
  const double radius = f.domain().default_escape_radius();
  const double x = 1.0 + fixtures::kSqrt7;
  const GreenValue fixed = green_plus(f, point2(x, x), 20, radius);
  CHECK(fixed.value == 0.0);
  CHECK(fixed.truncation_n == 20);
  CHECK_FALSE(fixed.escape_step.has_value());
  CHECK(green_minus(f, point2(x, x), 20, radius).value == 0.0);

  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const ComplexPoint z = fixtures::random_point(rng, {8.0, 8.0});
    CHECK(green_plus(f, z, 40, radius).value >= 0.0);
    CHECK(green_minus(f, z, 40, radius).value >= 0.0);
  }
}

TEST_CASE("G+ at a far point follows the dominant term") {
  const HenonMap f = fixtures::horseshoe();
  const GreenValue g = green_plus(f, point2(1e6, 0.0), 40, f.domain().default_escape_radius());
  CHECK(g.value == doctest::Approx(0.5 * std::log(1e12)).epsilon(0.01));
  CHECK(g.escape_step.value() == 0);
}

TEST_CASE("G- of the reversible horseshoe is G+ with swapped coordinates") {
  // With a = -1 and even p, swapping x and y conjugates f^{-1} to f.
  const HenonMap f = fixtures::horseshoe();
  const double radius = f.domain().default_escape_radius();
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    const ComplexPoint z = fixtures::random_point(rng, {6.0, 6.0});
    const double minus = green_minus(f, z, 40, radius).value;
    const double plus = green_plus(f, point2(z[1], z[0]), 40, radius).value;
    CHECK(minus == doctest::Approx(plus).epsilon(1e-12));
  }
  CHECK(green_minus(f, point2(0.0, 50.0), 40, radius).value > 0.0);
}

TEST_CASE("invariance residual") {
  const HenonMap f = fixtures::horseshoe();
  const double radius = f.domain().default_escape_radius();
  const double x = 1.0 - fixtures::kSqrt7;
  CHECK_FALSE(invariance_residual(f, point2(x, x), 40, radius).has_value());

  std::mt19937_64 rng(29);
  int tested = 0;
  while (tested < 200) {
    const ComplexPoint z = fixtures::random_point(rng, f.domain().radius);
    const auto r = invariance_residual(f, z, 40, radius);
    if (!r) continue;
    ++tested;
    CHECK(*r <= 1e-8);
    const auto r1 = invariance_residual(f, eval(f, z), 40, radius);
    if (r1) CHECK(*r1 <= 1e-8);
  }
}

TEST_CASE("escape-rate stages converge geometrically") {
  const HenonMap f = fixtures::horseshoe();
  const std::vector<double> s = green_stages(f, point2(Complex(2.0, 1.5), 0.5), 12);
  REQUIRE(s.size() >= 8);
  std::vector<double> gaps;
  for (std::size_t j = 3; j + 1 < s.size(); ++j) gaps.push_back(std::abs(s[j + 1] - s[j]));
  for (std::size_t j = 0; j + 1 < gaps.size(); ++j) CHECK(gaps[j + 1] <= 0.75 * gaps[j] + 1e-15);
}

TEST_CASE("G+ vanishes at census points") {
  const HenonMap f = fixtures::horseshoe();
  const double radius = f.domain().default_escape_radius();
  for (int n = 1; n <= 4; ++n) {
    for (const PeriodicPoint& pp : fixtures::horseshoe_census(n)) {
      CHECK(green_plus_periodic(f, pp.location, n, 40, radius).value <= 1e-8);
    }
  }
}

TEST_CASE("product G+ vanishes iff both factor orbits are bounded") {
  const HenonMap f = fixtures::horseshoe();
  const HenonMap ff = product(f, f);
  const double radius = ff.domain().default_escape_radius();
  const double x = 1.0 + fixtures::kSqrt7;
  auto place = [&](const ComplexPoint& a, const ComplexPoint& b) {
    ComplexPoint z(4);
    for (int j = 0; j < 2; ++j) {
      z[static_cast<Eigen::Index>(ff.first_slots()[j])] = a[j];
      z[static_cast<Eigen::Index>(ff.second_slots()[j])] = b[j];
    }
    return z;
  };
  const ComplexPoint fixed = point2(x, x), far = point2(3.0, -2.0);
  CHECK(green_plus(ff, place(fixed, fixed), 10, radius).value == 0.0);
  CHECK(green_plus(ff, place(fixed, far), 10, radius).value > 0.0);
  CHECK(green_plus(ff, place(far, fixed), 10, radius).value > 0.0);
}

TEST_CASE("slice grid has the documented layout") {
  const HenonMap f = fixtures::horseshoe();
  GreenSlice slice;
  slice.base = point2(0.0, 0.0);
  slice.extent = 4.0;
  slice.resolution = 5;
  const auto grid = green_grid(f, slice, 40, f.domain().default_escape_radius());
  REQUIRE(grid.size() == 25);
  CHECK(grid[0].z[0].real() == -4.0);
  CHECK(grid[0].z[1].real() == -4.0);
  CHECK(grid[1].z[0].real() > grid[0].z[0].real());
  CHECK(grid[5].z[1].real() > grid[0].z[1].real());
}
