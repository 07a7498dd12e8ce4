#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "henonlab/transversal.hpp"

using namespace henonlab;
using fixtures::point2;

TEST_CASE("horseshoe fixed points are transverse") {
  const HenonMap f = fixtures::horseshoe();
  const TangencySpectrum s = tangency_spectrum(f, 1, fixtures::horseshoe_census(1));
  REQUIRE(s.records.size() == 2);
  for (const TangencyRecord& r : s.records) {
    CHECK(r.sigma_min > 0.1);
    CHECK(r.simple);
  }
  CHECK(s.below_threshold == 0);
  CHECK(s.simple_count == 2);
  CHECK(s.min <= s.median);
}

TEST_CASE("tangency spectrum shares the solver computation") {
  const HenonMap f = fixtures::horseshoe();
  for (int n : {2, 4}) {
    const auto& census = fixtures::horseshoe_census(n);
    const TangencySpectrum s = tangency_spectrum(f, n, census);
    REQUIRE(s.records.size() == census.size());
    for (std::size_t i = 0; i < census.size(); ++i) {
      CHECK(s.records[i].sigma_min == fixed_point_sigma_min(f, census[i].location, n));
      CHECK(s.records[i].sigma_min == census[i].sigma_min);
    }
    CHECK(s.simple_count + s.multiplicity_excess == (1u << n));
  }
}

TEST_CASE("parabolic fixed point is the only tangency") {
  const HenonMap f = fixtures::parabolic();
  const PeriodicCensus census = find_periodic(f, 1);
  const TangencySpectrum s = tangency_spectrum(f, 1, census.points);
  CHECK(s.below_threshold == 1);
  REQUIRE(s.records.size() == 1);
  CHECK(s.records[0].sigma_min < 1e-6);
  CHECK_FALSE(s.records[0].simple);
  CHECK(s.simple_count + s.multiplicity_excess == 2);
}

TEST_CASE("sigma_min is unitarily invariant") {
  const HenonMap f = fixtures::horseshoe();
  std::mt19937_64 rng(53);
  std::normal_distribution<double> g;
  for (const PeriodicPoint& pp : fixtures::horseshoe_census(3)) {
    ComplexMatrix a(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) a(i, j) = Complex(g(rng), g(rng));
    const ComplexMatrix u = Eigen::HouseholderQR<ComplexMatrix>(a).householderQ() * ComplexMatrix::Identity(2, 2);
    const ComplexMatrix m = fixed_point_jacobian(f, pp.location, 3);
    const double plain = smallest_singular_value(m);
    CHECK(std::abs(smallest_singular_value(u * m * u.adjoint()) - plain) <= 1e-10 * std::max(1.0, plain));
  }
}

TEST_CASE("near-diagonal graph sampling") {
  const HenonMap f = fixtures::horseshoe();
  GraphSampleConfig config;
  config.samples = 300;
  const GraphStats s = graph_census_near_diagonal(f, 4, fixtures::horseshoe_census(4), config);
  CHECK(s.simple_points == 16);
  CHECK(s.expected == 16);
  CHECK(s.simple_fraction == 1.0);
  CHECK(s.near_diagonal > 0);
  CHECK(s.transverse <= s.near_diagonal);
  CHECK(s.confidence.low <= s.transverse_fraction);
  CHECK(s.transverse_fraction <= s.confidence.high);

  config.epsilon = f.domain().epsilon0();
  CHECK_THROWS_AS(graph_census_near_diagonal(f, 4, fixtures::horseshoe_census(4), config), ContractViolation);
}

TEST_CASE("Wilson interval") {
  const Interval all = wilson_interval(50, 50);
  CHECK(all.high == doctest::Approx(1.0));
  CHECK(all.low < 1.0);
  CHECK(all.low > 0.9);
  const Interval half = wilson_interval(50, 100);
  CHECK(half.low == doctest::Approx(1.0 - half.high));
}

TEST_CASE("doubled map diagonal census matches the period census") {
  const HenonMap f = fixtures::horseshoe();
  const DoubledCorrespondence c = doubled_correspondence(f, 2, fixtures::horseshoe_census(2));
  CHECK(c.holds);
  CHECK(c.matched == 4);
  CHECK(c.max_location_error <= 1e-9);
  CHECK(c.max_sigma_rel_error <= 1e-8);
  CHECK_THROWS_AS(doubled_diagonal_system(doubled(f), 3), ContractViolation);
}
