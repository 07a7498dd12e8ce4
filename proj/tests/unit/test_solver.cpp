#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "fixtures.hpp"
#include "henonlab/solver.hpp"

using namespace henonlab;
using fixtures::point2;

namespace {

/// Roots of c_0 + c_1 x + ... + x^m as companion-matrix eigenvalues.
std::vector<Complex> companion_roots(const std::vector<Complex>& c) {
  const int m = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < m; ++i) comp(i, m - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
  const Eigen::VectorXcd ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// Fixed points of f^n (n = 1, 2) for f(x, y) = (x^2 + c + a y, x), by elimination.
/// n = 1: y = x and x^2 + (a - 1) x + c = 0.
/// n = 2: Y = p(X) / b and X = p(Y) / b with b = 1 - a, a quartic in X.
std::vector<ComplexPoint> eliminated_fixed_points(double c, double a, int n) {
  std::vector<ComplexPoint> out;
  const double b = 1.0 - a;
  if (n == 1) {
    for (Complex x : companion_roots({c, a - 1.0, 1.0})) out.push_back(point2(x, x));
  } else {
    const std::vector<Complex> quartic{c * c / (b * b) + c, -b, 2.0 * c / (b * b), 0.0, 1.0 / (b * b)};
    for (Complex x : companion_roots(quartic)) out.push_back(point2(x, (x * x + c) / b));
  }
  return out;
}

double nearest(const std::vector<RootRecord>& roots, const ComplexPoint& z) {
  double best = INFINITY;
  for (const RootRecord& r : roots) best = std::min(best, (r.location - z).norm());
  return best;
}

}  // namespace

TEST_CASE("Newton on an affine system converges in one step") {
  const ComplexPoint z0 = point2(Complex(0.3, -0.7), Complex(1.5, 0.2));
  HolomorphicSystem g{2, [&](const ComplexPoint& z, ComplexPoint& v, ComplexMatrix& j) {
                        v = z - z0;
                        j = ComplexMatrix::Identity(2, 2);
                        return true;
                      }};
  const NewtonOutcome out = newton_refine(g, point2(5.0, -4.0), 1e-10, 1);
  REQUIRE(std::holds_alternative<RootRecord>(out));
  CHECK((std::get<RootRecord>(out).location - z0).norm() < 1e-14);
}

TEST_CASE("Newton finds the horseshoe fixed point from (3.5, 3.5)") {
  const HenonMap f = fixtures::horseshoe();
  const NewtonOutcome out = newton_refine(fixed_point_system(f, 1), point2(3.5, 3.5), 1e-10, 60);
  REQUIRE(std::holds_alternative<RootRecord>(out));
  const RootRecord& r = std::get<RootRecord>(out);
  const double x = 1.0 + fixtures::kSqrt7;
  CHECK((r.location - point2(x, x)).norm() < 1e-12);
  CHECK(r.residual < 1e-10);
  CHECK(r.multiplicity == 1);
}

TEST_CASE("Newton from an escaping seed does not converge") {
  const HenonMap f = fixtures::horseshoe();
  const NewtonOutcome out = newton_refine(fixed_point_system(f, 6), point2(3.0, -3.0), 1e-10, 2);
  CHECK(std::holds_alternative<NoConvergence>(out));
}

TEST_CASE("fixed-point system Jacobian") {
  const HenonMap f = fixtures::horseshoe();
  const double x = 1.0 + fixtures::kSqrt7;
  const HolomorphicSystem g = fixed_point_system(f, 1);
  ComplexPoint v;
  ComplexMatrix j;
  REQUIRE(g.evaluate(point2(x, x), v, j));
  CHECK(v.norm() < 1e-14);
  CHECK(std::abs(j(0, 0) - Complex(2.0 * x - 1.0)) < 1e-14);
  CHECK(std::abs(j(0, 1) - Complex(-1.0)) < 1e-14);
  CHECK(std::abs(j(1, 0) - Complex(1.0)) < 1e-14);
  CHECK(std::abs(j(1, 1) - Complex(-1.0)) < 1e-14);
  CHECK(smallest_singular_value(j) > 0.1);
  CHECK(fixed_point_sigma_min(f, point2(x, x), 1) == smallest_singular_value(j));

  const ComplexPoint z = point2(Complex(0.4, 0.1), Complex(-0.3, 0.2));
  REQUIRE(g.evaluate(z, v, j));
  CHECK((v - (eval(f, z) - z)).norm() == 0.0);

  const HolomorphicSystem g3 = fixed_point_system(f, 3);
  const ComplexPoint z3 = fixtures::horseshoe_census(3)[2].location + point2(Complex(1e-3, 2e-3), Complex(-1e-3, 0.0));
  ComplexPoint v3;
  ComplexMatrix j3, fd(2, 2);
  REQUIRE(g3.evaluate(z3, v3, j3));
  const double h = 1e-7;
  for (int c = 0; c < 2; ++c) {
    ComplexPoint zp = z3, zm = z3, vp, vm;
    ComplexMatrix unused;
    zp[c] += h;
    zm[c] -= h;
    REQUIRE(g3.evaluate(zp, vp, unused));
    REQUIRE(g3.evaluate(zm, vm, unused));
    fd.col(c) = (vp - vm) / (2.0 * h);
  }
  CHECK((fd - j3).norm() <= 1e-5 * j3.norm());
}

TEST_CASE("census of the horseshoe fixed points") {
  const HenonMap f = fixtures::horseshoe();
  SolverConfig config;
  config.grid_density = 16;
  const BidiskDomain& d = f.domain();
  const CensusResult census = solve_all(fixed_point_system(f, 1), d, config, 2);
  CHECK(census.complete());
  REQUIRE(census.roots.size() == 2);
  CHECK(census.found_total == 2);
  for (const RootRecord& r : census.roots) {
    CHECK(r.multiplicity == 1);
    CHECK(r.residual <= config.tol);
  }
  for (double s : {1.0, -1.0}) {
    const double x = 1.0 + s * fixtures::kSqrt7;
    CHECK(nearest(census.roots, point2(x, x)) < 1e-9);
  }
}

TEST_CASE("census roots match the elimination oracle at n = 1, 2") {
  const HenonMap f = fixtures::horseshoe();
  for (int n : {1, 2}) {
    SolverConfig config;
    config.grid_density = 32;
    const CensusResult census = solve_all(balanced_fixed_point_system(f, n), f.domain(), config, 1u << n);
    CHECK(census.complete());
    const std::vector<ComplexPoint> oracle = eliminated_fixed_points(-6.0, -1.0, n);
    REQUIRE(census.roots.size() == oracle.size());
    for (const ComplexPoint& z : oracle) CHECK(nearest(census.roots, z) < 1e-9);
    CHECK(census.min_separation > config.dedup_tol);
  }
}

TEST_CASE("double root is one cluster of multiplicity 2") {
  HolomorphicSystem g{2, [](const ComplexPoint& z, ComplexPoint& v, ComplexMatrix& j) {
                        v = point2(z[0] * z[0], z[1]);
                        j = ComplexMatrix::Zero(2, 2);
                        j(0, 0) = 2.0 * z[0];
                        j(1, 1) = 1.0;
                        return true;
                      }};
  SolverConfig config;
  config.grid_density = 6;
  const CensusResult census = solve_all(g, BidiskDomain::planar(1.0, 1.0), config, 2);
  REQUIRE(census.roots.size() == 1);
  CHECK(census.roots[0].multiplicity == 2);
  CHECK(census.roots[0].location.norm() < 1e-5);
  CHECK(census.complete());
}

TEST_CASE("overcount is an error") {
  const HenonMap f = fixtures::horseshoe();
  SolverConfig config;
  config.grid_density = 16;
  CHECK_THROWS_AS(solve_all(fixed_point_system(f, 1), f.domain(), config, 1), CensusOverflow);
}

TEST_CASE("census is independent of the worker count") {
  const HenonMap f = fixtures::horseshoe();
  SolverConfig one, three;
  one.grid_density = three.grid_density = 24;
  one.threads = 1;
  three.threads = 3;
  const CensusResult a = solve_all(balanced_fixed_point_system(f, 3), f.domain(), one, 8);
  const CensusResult b = solve_all(balanced_fixed_point_system(f, 3), f.domain(), three, 8);
  REQUIRE(a.roots.size() == b.roots.size());
  for (std::size_t i = 0; i < a.roots.size(); ++i) {
    CHECK(a.roots[i].location == b.roots[i].location);
    CHECK(a.roots[i].multiplicity == b.roots[i].multiplicity);
  }
  CHECK(a.found_total == b.found_total);
}
