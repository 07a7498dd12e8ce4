#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "henonlab/grassmann.hpp"
#include "henonlab/measures.hpp"

using namespace henonlab;
using fixtures::point2;

namespace {

Direction line(Complex a, Complex b) {
  ComplexMatrix m(2, 1);
  m << a, b;
  return Direction::from_span(m);
}

Direction random_direction(std::mt19937_64& rng, int k, int p) {
  std::normal_distribution<double> g;
  ComplexMatrix m(k, p);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = Complex(g(rng), g(rng));
  return Direction::from_span(m);
}

PeriodicPoint fixed_saddle(double sign) {
  const double x = 1.0 + sign * fixtures::kSqrt7;
  return classify_periodic(fixtures::horseshoe(), point2(x, x), 1);
}

}  // namespace

TEST_CASE("Grassmann distance is a metric") {
  std::mt19937_64 rng(43);
  for (auto [k, p] : {std::pair{2, 1}, std::pair{4, 2}}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Direction a = random_direction(rng, k, p), b = random_direction(rng, k, p),
                      c = random_direction(rng, k, p);
      CHECK(grassmann_distance(a, a) <= 1e-7);
      CHECK(grassmann_distance(a, b) > 0.0);
      CHECK(grassmann_distance(a, b) == doctest::Approx(grassmann_distance(b, a)).epsilon(1e-12));
      CHECK(grassmann_distance(a, b) <= grassmann_distance(a, c) + grassmann_distance(c, b) + 1e-12);
      CHECK(grassmann_distance(a, b) <= M_PI / 2 + 1e-12);
    }
  }
  // Representatives differing by a unitary (here a phase) are the same point.
  CHECK(grassmann_distance(line(1.0, 2.0), line(Complex(0.0, 3.0), Complex(0.0, 6.0))) < 1e-12);
}

TEST_CASE("unstable direction at the fixed point x = 1 + sqrt 7") {
  const PeriodicPoint pp = fixed_saddle(1.0);
  const double x = 1.0 + fixtures::kSqrt7;
  const double lambda = x + std::sqrt(x * x - 1.0);
  CHECK(grassmann_distance(unstable_direction(pp), line(lambda, 1.0)) < 1e-12);
  CHECK(grassmann_distance(stable_direction(pp), line(1.0 / lambda, 1.0)) < 1e-12);
  CHECK(smallest_principal_angle(unstable_direction(pp), stable_direction(pp)) > 0.1);

  PeriodicPoint other;
  CHECK_THROWS_AS(unstable_direction(other), ContractViolation);
}

TEST_CASE("eigen-directions are invariant under the lift") {
  const HenonMap f = fixtures::horseshoe();
  for (double s : {1.0, -1.0}) {
    const PeriodicPoint pp = fixed_saddle(s);
    for (const Direction& v : {unstable_direction(pp), stable_direction(pp)}) {
      const LiftedPoint next = lift_step(f, {pp.location, v});
      CHECK((next.base - pp.location).norm() < 1e-12);
      CHECK(grassmann_distance(next.direction, v) <= 1e-10);
    }
  }
  // Equivariance along period-3 orbits: Df maps E_u(z) to E_u(f z).
  const auto& census = fixtures::horseshoe_census(3);
  for (const PeriodicPoint& pp : census) {
    const PeriodicPoint next = classify_periodic(f, eval(f, pp.location), 3);
    const LiftedPoint lifted = lift_step(f, {pp.location, unstable_direction(pp)});
    CHECK(grassmann_distance(lifted.direction, unstable_direction(next)) <= 1e-8);
    const LiftedPoint back = lift_step_inverse(f, {next.location, stable_direction(next)});
    CHECK(grassmann_distance(back.direction, stable_direction(pp)) <= 1e-8);
  }
}

TEST_CASE("lift steps follow the chain rule") {
  const HenonMap f = fixtures::horseshoe();
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexPoint z = fixtures::random_point(rng, {1.5, 1.5});
    const Direction v = random_direction(rng, 2, 1);
    LiftedPoint lp{z, v};
    for (int n = 1; n <= 4; ++n) {
      const LiftedPoint single = lift_step(f, lp);
      CHECK((single.base - eval(f, lp.base)).norm() == 0.0);
      CHECK(grassmann_distance(single.direction, push_forward(jacobian(f, lp.base), lp.direction)) <= 1e-14);
      lp = single;
      const OrbitJet jet = propagate(f, z, n);
      CHECK(grassmann_distance(lp.direction, push_forward(jet.jacobian, v)) <= 1e-9);
    }
  }
}

TEST_CASE("product unstable direction is the direct sum") {
  const HenonMap f = fixtures::horseshoe();
  const HenonMap ff = product(f, f);
  const PeriodicPoint a = fixed_saddle(1.0), b = fixed_saddle(-1.0);
  ComplexPoint z(4);
  ComplexMatrix sum = ComplexMatrix::Zero(4, 2);
  for (int j = 0; j < 2; ++j) {
    const auto s1 = static_cast<Eigen::Index>(ff.first_slots()[j]);
    const auto s2 = static_cast<Eigen::Index>(ff.second_slots()[j]);
    z[s1] = a.location[j];
    z[s2] = b.location[j];
    sum(s1, 0) = unstable_direction(a).basis()(j, 0);
    sum(s2, 1) = unstable_direction(b).basis()(j, 0);
  }
  const PeriodicPoint pp = classify_periodic(ff, z, 1);
  REQUIRE(pp.stability == Stability::Saddle);
  CHECK(grassmann_distance(unstable_direction(pp), Direction::from_span(sum)) < 1e-10);
}

TEST_CASE("direction convergence at the fixed points") {
  const HenonMap f = fixtures::horseshoe();
  for (double s : {1.0, -1.0}) {
    const PeriodicPoint pp = fixed_saddle(s);
    const double ratio = std::abs(pp.multipliers[1]) / std::abs(pp.multipliers[0]);
    const ComplexMatrix u = unstable_direction(pp).basis(), e = stable_direction(pp).basis();

    const DecayRecord exact = direction_convergence(f, {pp.location, unstable_direction(pp)}, pp, 10);
    for (double a : exact.distances) CHECK(a <= 1e-10);

    const Direction mix = Direction::from_span(u + e);
    const DecayRecord forward = direction_convergence(f, {pp.location, mix}, pp, 20);
    REQUIRE(forward.fit.has_value());
    CHECK(forward.fit->slope < 0.0);
    CHECK(forward.per_step_ratio == doctest::Approx(ratio).epsilon(0.05));

    ConvergenceOptions reverse;
    reverse.reverse_time = true;
    const DecayRecord backward = direction_convergence(f, {pp.location, mix}, pp, 20, reverse);
    REQUIRE(backward.fit.has_value());
    CHECK(backward.per_step_ratio == doctest::Approx(ratio).epsilon(0.05));

    CHECK_THROWS_AS(direction_convergence(f, {pp.location, stable_direction(pp)}, pp, 5), ContractViolation);
  }
  CHECK(fixed_saddle(1.0).multipliers.size() == 2);
  const PeriodicPoint p = fixed_saddle(1.0);
  CHECK(std::abs(p.multipliers[1]) / std::abs(p.multipliers[0]) == doctest::Approx(0.0196).epsilon(0.01));
}

TEST_CASE("decay fits are negative at every saddle up to period 4") {
  const HenonMap f = fixtures::horseshoe();
  for (int n = 1; n <= 4; ++n) {
    for (const PeriodicPoint& pp : fixtures::horseshoe_census(n)) {
      const Direction mix = Direction::from_span(unstable_direction(pp).basis() + stable_direction(pp).basis());
      const DecayRecord d = direction_convergence(f, {pp.location, mix}, pp, 12);
      REQUIRE(d.fit.has_value());
      CHECK(d.fit->slope < 0.0);
    }
  }
}

TEST_CASE("Oseledec empirical measure projects to the saddle measure") {
  const auto& census = fixtures::horseshoe_census(1);
  const auto atoms = oseledec_empirical(census, 2.0);
  REQUIRE(atoms.size() == 2);
  for (const auto& n : {1, 3}) {
    const auto& c = fixtures::horseshoe_census(n);
    const double norm = std::pow(2.0, n);
    const EmpiricalMeasure base = project_to_base(oseledec_empirical(c, norm));
    const EmpiricalMeasure saddles = empirical_measure(saddles_only(c), norm);
    REQUIRE(base.atoms.size() == saddles.atoms.size());
    for (std::size_t i = 0; i < base.atoms.size(); ++i) {
      CHECK(base.atoms[i].location == saddles.atoms[i].location);
      CHECK(base.atoms[i].weight == saddles.atoms[i].weight);
    }
    const TestFunction phi = TestFunction::gaussian(point2(0.5, -0.5), 1.0);
    CHECK(pair(base, phi) == pair(saddles, phi));
  }
}

TEST_CASE("tangent alignment statistics") {
  const HenonMap f = fixtures::horseshoe();
  const OracleResult oracle = mu_oracle(f, 2, make_point({Complex(0.3, 0.2)}), make_point({Complex(-0.4, 0.1)}));
  std::vector<ComplexPoint> points;
  for (const Atom& a : oracle.measure.atoms) points.push_back(a.location);
  const AlignmentStats stats = tangent_alignment(f, 2, points, fixtures::horseshoe_census(4), 0.5);
  CHECK(stats.matched + stats.excluded == points.size());
  CHECK(stats.matched > 0);
  CHECK(stats.angles.size() == stats.matched);
  CHECK(stats.p90 >= stats.median);
  for (double a : stats.angles) CHECK((a >= 0.0 && a <= M_PI / 2));

  // A saddle lying on the iterated curves: its own splitting is matched exactly.
  const auto& census = fixtures::horseshoe_census(4);
  const AlignmentStats self = tangent_alignment(f, 4, {census[3].location}, census, 0.5);
  REQUIRE(self.matched == 1);
  CHECK(self.median < 1e-3);
}
