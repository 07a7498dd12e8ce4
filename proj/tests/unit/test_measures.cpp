#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "henonlab/measures.hpp"

using namespace henonlab;
using fixtures::point2;

namespace {

EmpiricalMeasure random_measure(std::mt19937_64& rng, const BidiskDomain& d, int atoms) {
  EmpiricalMeasure m;
  std::uniform_real_distribution<double> w(0.05, 1.0);
  for (int i = 0; i < atoms; ++i) m.add(fixtures::random_point(rng, d.radius), w(rng));
  return m;
}

}  // namespace

TEST_CASE("standard bank shape and bounds") {
  const HenonMap f = fixtures::horseshoe();
  const auto bank = standard_bank(f.domain());
  REQUIRE(bank.size() == 78);
  std::mt19937_64 rng(31);
  for (const TestFunction& phi : bank) {
    for (int i = 0; i < 200; ++i) {
      const ComplexPoint z = fixtures::random_point(rng, f.domain().radius);
      CHECK(std::abs(phi(z)) <= 1.0);
      ComplexPoint dz = fixtures::random_point(rng, {1e-4, 1e-4});
      CHECK(std::abs(phi(z + dz) - phi(z)) <= phi.lipschitz_bound * dz.norm() * (1.0 + 1e-9) + 1e-15);
    }
  }
}

TEST_CASE("pairing") {
  const HenonMap f = fixtures::horseshoe();
  for (int n : {1, 3}) {
    const EmpiricalMeasure m = empirical_measure(fixtures::horseshoe_census(n), std::pow(2.0, n));
    CHECK(pair(m, TestFunction::constant()) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const ComplexPoint c = point2(Complex(0.3, 0.1), Complex(-0.2, 0.5));
  EmpiricalMeasure atom;
  atom.add(c, 1.0);
  CHECK(pair(atom, TestFunction::gaussian(c, 0.7)) == 1.0);

  std::mt19937_64 rng(37);
  const auto bank = standard_bank(f.domain());
  const EmpiricalMeasure m = random_measure(rng, f.domain(), 20);
  EmpiricalMeasure scaled;
  for (const Atom& a : m.atoms) scaled.add(a.location, 3.0 * a.weight);
  for (std::size_t i = 0; i + 1 < bank.size(); ++i) {
    const double alpha = 0.7, beta = -1.3;
    double combined = 0.0;
    for (const Atom& a : m.atoms) combined += a.weight * (alpha * bank[i](a.location) + beta * bank[i + 1](a.location));
    CHECK(std::abs(combined - (alpha * pair(m, bank[i]) + beta * pair(m, bank[i + 1]))) <= 1e-12);
    CHECK(std::abs(pair(scaled, bank[i]) - 3.0 * pair(m, bank[i])) <= 1e-12);
  }
}

TEST_CASE("discrepancy is a pseudometric") {
  const HenonMap f = fixtures::horseshoe();
  const auto bank = standard_bank(f.domain());
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const EmpiricalMeasure a = random_measure(rng, f.domain(), 6);
    const EmpiricalMeasure b = random_measure(rng, f.domain(), 6);
    const EmpiricalMeasure c = random_measure(rng, f.domain(), 6);
    const double ab = discrepancy(a, b, bank).value, ba = discrepancy(b, a, bank).value;
    CHECK(discrepancy(a, a, bank).value == 0.0);
    CHECK(ab >= 0.0);
    CHECK(ab == ba);
    CHECK(ab <= discrepancy(a, c, bank).value + discrepancy(c, b, bank).value + 1e-12);
  }
}

TEST_CASE("discrepancy of disjoint unit atoms is bounded") {
  EmpiricalMeasure a, b;
  a.add(point2(0.0, 0.0), 1.0);
  b.add(point2(3.0, 3.0), 1.0);
  const std::vector<TestFunction> bank{TestFunction::gaussian(point2(20.0, 20.0), 1.0),
                                       TestFunction::gaussian(point2(-20.0, 20.0), 1.0)};
  CHECK(discrepancy(a, b, bank).value <= 2.0);
  const std::vector<TestFunction> tied{TestFunction::gaussian(point2(0.0, 0.0), 1.0),
                                       TestFunction::gaussian(point2(0.0, 0.0), 1.0)};
  CHECK(discrepancy(a, b, tied).argmax_function == 0);
}

TEST_CASE("oracle at depth 0 and 1") {
  const HenonMap f = fixtures::horseshoe();
  const ComplexPoint a = make_point({Complex(0.3, 0.2)}), b = make_point({Complex(-0.4, 0.1)});
  const OracleResult zero = mu_oracle(f, 0, a, b);
  REQUIRE(zero.measure.atoms.size() == 1);
  CHECK((zero.measure.atoms[0].location - point2(a[0], b[0])).norm() < 1e-12);
  CHECK(zero.measure.atoms[0].weight == 1.0);

  const OracleResult one = mu_oracle(f, 1, a, b);
  CHECK(one.census.complete());
  CHECK(one.measure.atoms.size() == 4);
  CHECK(one.measure.total_mass == doctest::Approx(1.0).epsilon(1e-12));
  for (const Atom& atom : one.measure.atoms) {
    const ComplexPoint& z = atom.location;
    CHECK(std::abs(eval(f, z)[0] - a[0]) < 1e-9);
    CHECK(std::abs(eval_inverse(f, z)[1] - b[0]) < 1e-9);
  }
}

TEST_CASE("oracle stability is zero for identical anchors and symmetric") {
  const HenonMap f = fixtures::horseshoe();
  const auto bank = standard_bank(f.domain());
  const Anchor p{make_point({Complex(0.3, 0.2)}), make_point({Complex(-0.4, 0.1)})};
  const Anchor q{make_point({Complex(-1.1, -0.3)}), make_point({Complex(0.7, 0.25)})};
  CHECK(oracle_stability(f, 2, {p, p}, bank) == 0.0);
  CHECK(oracle_stability(f, 2, {p, q}, bank) == oracle_stability(f, 2, {q, p}, bank));
}

TEST_CASE("periodic measures approach the oracle") {
  const HenonMap f = fixtures::horseshoe();
  const auto bank = standard_bank(f.domain());
  const EmpiricalMeasure nu2 = empirical_measure(fixtures::horseshoe_census(2), 4.0);
  const EmpiricalMeasure nu4 = empirical_measure(fixtures::horseshoe_census(4), 16.0);
  const EmpiricalMeasure nu6 = empirical_measure(fixtures::horseshoe_census(6), 64.0);
  CHECK(discrepancy(nu4, nu6, bank).value < discrepancy(nu2, nu6, bank).value);

  const Anchor p{make_point({Complex(0.3, 0.2)}), make_point({Complex(-0.4, 0.1)})};
  const double d12 = discrepancy(mu_oracle(f, 1, p.a, p.b).measure, mu_oracle(f, 2, p.a, p.b).measure, bank).value;
  const double d23 = discrepancy(mu_oracle(f, 2, p.a, p.b).measure, mu_oracle(f, 3, p.a, p.b).measure, bank).value;
  CHECK(d23 < d12);
}
