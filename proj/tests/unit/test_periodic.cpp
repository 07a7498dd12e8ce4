#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "henonlab/periodic.hpp"

using namespace henonlab;
using fixtures::point2;

namespace {

std::size_t total_multiplicity(const std::vector<PeriodicPoint>& census) {
  std::size_t total = 0;
  for (const PeriodicPoint& pp : census) total += static_cast<std::size_t>(pp.multiplicity);
  return total;
}

std::vector<double> sorted_moduli(const std::vector<Complex>& values) {
  std::vector<double> out;
  for (Complex v : values) out.push_back(std::abs(v));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("horseshoe fixed points are two saddles") {
  const auto& census = fixtures::horseshoe_census(1);
  REQUIRE(census.size() == 2);
  for (const PeriodicPoint& pp : census) {
    CHECK(pp.stability == Stability::Saddle);
    CHECK(pp.reason == NonSaddleReason::None);
    CHECK(pp.multiplicity == 1);
  }
  // Multipliers of [[2x, -1], [1, 0]]: x +- sqrt(x^2 - 1).
  const double x = 1.0 + fixtures::kSqrt7;
  const PeriodicPoint pp = classify_periodic(fixtures::horseshoe(), point2(x, x), 1);
  REQUIRE(pp.multipliers.size() == 2);
  CHECK(std::abs(pp.multipliers[0] - Complex(x + std::sqrt(x * x - 1.0))) < 1e-12);
  CHECK(std::abs(pp.multipliers[1] - Complex(x - std::sqrt(x * x - 1.0))) < 1e-12);
  CHECK(std::abs(pp.multipliers[0]) == doctest::Approx(7.15).epsilon(0.01));
  CHECK(std::abs(pp.multipliers[1]) == doctest::Approx(0.14).epsilon(0.01));
}

TEST_CASE("census counts and inclusion") {
  CHECK(total_multiplicity(fixtures::horseshoe_census(3)) == 8);
  CHECK(total_multiplicity(fixtures::horseshoe_census(4)) == 16);
  const auto& p1 = fixtures::horseshoe_census(1);
  const auto& p2 = fixtures::horseshoe_census(2);
  for (const PeriodicPoint& fixed : p1) {
    const bool found = std::any_of(p2.begin(), p2.end(), [&](const PeriodicPoint& pp) {
      return (pp.location - fixed.location).norm() < 1e-9;
    });
    CHECK(found);
  }
  for (const PeriodicPoint& pp : p2) CHECK(pp.period == 2);
}

TEST_CASE("census closure, multiplier invariance and saddle partition") {
  const HenonMap f = fixtures::horseshoe();
  for (int n : {1, 2, 3, 4}) {
    for (const PeriodicPoint& pp : fixtures::horseshoe_census(n)) {
      CHECK((iterate_point(f, pp.location, n) - pp.location).norm() <= 1e-8);

      const PeriodicPoint next = classify_periodic(f, eval(f, pp.location), n);
      const auto a = sorted_moduli(pp.multipliers), b = sorted_moduli(next.multipliers);
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-6 * a[i]);

      REQUIRE(pp.stability == Stability::Saddle);
      int expanding = 0, contracting = 0;
      for (Complex m : pp.multipliers) {
        if (std::abs(m) > 1.0 + 1e-6) ++expanding;
        if (std::abs(m) < 1.0 - 1e-6) ++contracting;
      }
      CHECK(expanding == 1);
      CHECK(contracting == 1);
      CHECK(pp.unstable_basis.rank() == 1);
      CHECK(pp.stable_basis.rank() == 1);
    }
  }
}

TEST_CASE("saddle fraction") {
  CHECK(saddle_fraction(fixtures::horseshoe_census(4)) == 1.0);

  PeriodicPoint saddle, other;
  saddle.stability = Stability::Saddle;
  other.stability = Stability::NonSaddle;
  other.reason = NonSaddleReason::UnitModulus;
  CHECK(saddle_fraction({saddle, other}) == 0.5);
  CHECK(saddle_fraction({other}) == 0.0);
  CHECK(saddles_only({saddle, other}).size() == 1);
  CHECK_THROWS_AS(saddle_fraction({}), ContractViolation);
}

TEST_CASE("empirical measures") {
  for (int n : {1, 3, 4}) {
    const auto& census = fixtures::horseshoe_census(n);
    const double norm = std::pow(2.0, n);
    CHECK(empirical_measure(census, norm).total_mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(empirical_measure(saddles_only(census), norm).total_mass == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto& p1 = fixtures::horseshoe_census(1);
  const EmpiricalMeasure one = empirical_measure({p1.front()}, 2.0);
  REQUIRE(one.atoms.size() == 1);
  CHECK(one.atoms[0].weight == 0.5);
  CHECK(one.total_mass == 0.5);
}

TEST_CASE("product census is the cartesian product of the factor censuses") {
  const HenonMap f = fixtures::horseshoe();
  const HenonMap ff = product(f, f);
  const PeriodicCensus census = find_periodic(ff, 1);
  const auto& p1 = fixtures::horseshoe_census(1);
  REQUIRE(total_multiplicity(census.points) == 4);
  for (const PeriodicPoint& a : p1) {
    for (const PeriodicPoint& b : p1) {
      ComplexPoint z(4);
      for (int j = 0; j < 2; ++j) {
        z[static_cast<Eigen::Index>(ff.first_slots()[j])] = a.location[j];
        z[static_cast<Eigen::Index>(ff.second_slots()[j])] = b.location[j];
      }
      const auto match = std::count_if(census.points.begin(), census.points.end(), [&](const PeriodicPoint& pp) {
        return (pp.location - z).norm() < 1e-9 && pp.multiplicity == a.multiplicity * b.multiplicity;
      });
      CHECK(match == 1);
    }
  }
  CHECK(saddle_fraction(census.points) == 1.0);
}

TEST_CASE("parabolic fixed point is a double non-saddle") {
  const PeriodicCensus census = find_periodic(fixtures::parabolic(), 1);
  CHECK(census.census.complete());
  REQUIRE(census.points.size() == 1);
  const PeriodicPoint& pp = census.points[0];
  CHECK(pp.multiplicity == 2);
  CHECK((pp.location - point2(1.0, 1.0)).norm() < 1e-6);
  CHECK(pp.stability == Stability::NonSaddle);
  CHECK(pp.reason == NonSaddleReason::UnitModulus);
  CHECK(to_string(pp.reason) == "unit-modulus");
}
