#pragma once

#include <optional>
#include <vector>

#include "henonlab/maps.hpp"
#include "henonlab/periodic.hpp"
#include "henonlab/solver.hpp"

namespace henonlab {

/// Bounded test function on D with a declared Lipschitz bound (Euclidean metric on C^k).
struct TestFunction {
  enum class Kind { Constant, Gaussian, Monomial };
  Kind kind = Kind::Constant;
  ComplexPoint center;              ///< Gaussian
  double width = 1.0;               ///< Gaussian
  std::vector<int> exponents;       ///< Monomial: power of each real coordinate re z_0, im z_0, ...
  std::vector<double> scale;        ///< Monomial: radius of each complex coordinate (normalizes and cuts off)
  double lipschitz_bound = 0.0;

  double operator()(const ComplexPoint& z) const;

  static TestFunction constant();
  static TestFunction gaussian(const ComplexPoint& center, double width);
  /// prod_j (x_j / r_j)^e_j times the cutoff prod_i psi(|z_i| / r_i),
  /// psi(s) = exp(1 - 1 / (1 - s^2)) on [0, 1), zero beyond.
  static TestFunction monomial(std::vector<int> exponents, std::vector<double> radii);
};

/// 32 Halton centers in D' with widths {0.25, 0.5} * radius_M (64 Gaussians),
/// then the normalized real monomials of degree 1 and 2 with cutoff.
std::vector<TestFunction> standard_bank(const BidiskDomain& domain);

/// sum_i w_i phi(z_i), summed pairwise in atom order.
double pair(const EmpiricalMeasure& m, const TestFunction& phi);

struct Discrepancy {
  double value = 0.0;
  std::size_t argmax_function = 0;
};

/// max over the bank of |<m1, phi> - <m2, phi>|; ties go to the lowest index.
Discrepancy discrepancy(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2,
                        const std::vector<TestFunction>& bank, unsigned threads = 0);

struct OracleConfig {
  SolverConfig solver;
  /// Seed each depth from perturbation clouds around the previous depth's roots.
  bool hierarchical = true;
  std::size_t cloud_size = 200;
  /// Cloud half-width in units of the nearest-neighbour distance.
  double cloud_scale = 1.5;
  /// Orbit-norm guard of the oracle system. Newton paths towards genuine roots
  /// routinely pass far outside D, so this only protects against overflow.
  double escape_radius = 1e8;

  OracleConfig() { solver.grid_density = 128; }
};

struct OracleResult {
  int depth = 0;
  ComplexPoint anchor_a;  ///< M-block coordinates of the vertical line V_a
  ComplexPoint anchor_b;  ///< N-block coordinates of the horizontal line H_b
  EmpiricalMeasure measure;
  CensusResult census;
};

/// System {pi_M f^n(z) = a, pi_N f^{-n}(z) = b}: its d^{2n} roots are the
/// intersections f^{-n}(V_a) with f^n(H_b).
HolomorphicSystem oracle_system(const HenonMap& f, int n, const ComplexPoint& a, const ComplexPoint& b,
                                double escape_radius = 1e8);

/// Atoms of weight d^{-2n} at the roots of oracle_system.
OracleResult mu_oracle(const HenonMap& f, int n, const ComplexPoint& a, const ComplexPoint& b,
                       const OracleConfig& config = {});

struct Anchor {
  ComplexPoint a;
  ComplexPoint b;
};

/// Max pairwise discrepancy between oracles at depth n built from different anchors.
double oracle_stability(const HenonMap& f, int n, const std::vector<Anchor>& anchors,
                        const std::vector<TestFunction>& bank, const OracleConfig& config = {});

/// Same, from precomputed oracle measures.
double oracle_stability(const std::vector<EmpiricalMeasure>& oracles,
                        const std::vector<TestFunction>& bank, unsigned threads = 0);

}  // namespace henonlab
