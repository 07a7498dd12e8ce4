#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "henonlab/core.hpp"
#include "henonlab/maps.hpp"

namespace henonlab {

/// Holomorphic system g: C^k -> C^k with its Jacobian. evaluate() returns
/// false when g is undefined at z (for dynamical systems: the orbit escaped),
/// which the solver treats as an infinite residual.
struct HolomorphicSystem {
  std::size_t dimension = 0;
  std::function<bool(const ComplexPoint& z, ComplexPoint& value, ComplexMatrix& jacobian)> evaluate;
};

struct RootRecord {
  ComplexPoint location;
  double residual = 0.0;
  int multiplicity = 1;
  double jacobian_sigma_min = 0.0;
};

struct NoConvergence {
  ComplexPoint last;
  double residual = 0.0;
};

using NewtonOutcome = std::variant<RootRecord, NoConvergence>;

/// Damped Newton. The step is halved (at most 30 times) while the residual
/// does not decrease; near-singular Jacobians use a pseudo-inverse step.
/// After ||g|| < tol the iterate keeps being polished while the residual drops.
/// The returned multiplicity is max(1, number of singular values below the threshold).
NewtonOutcome newton_refine(const HolomorphicSystem& system, const ComplexPoint& seed, double tol,
                            std::size_t max_iter, double singular_threshold = 1e-6);

struct SolverConfig {
  double tol = 1e-10;
  std::size_t max_iter = 60;
  double dedup_tol = 1e-6;
  double singular_threshold = 1e-6;
  /// Lattice points per real axis of each complex coordinate.
  std::size_t grid_density = 64;
  /// Imaginary lattice levels per coordinate (1 = real slice only).
  std::size_t imag_levels = 1;
  /// Seeds live in the polydisk scaled by this factor.
  double seed_scale = 1.0;
  /// Pseudo-random seeds; defaults to the lattice size.
  std::optional<std::size_t> random_seeds;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct Complete {};
struct Incomplete {
  std::size_t deficit = 0;
};

struct CensusResult {
  std::vector<RootRecord> roots;  ///< lexicographic order
  std::size_t expected = 0;
  std::size_t found_total = 0;
  std::variant<Complete, Incomplete> completeness;
  /// Smallest distance between distinct reported roots (infinity for < 2 roots).
  double min_separation = 0.0;
  std::size_t seeds_tried = 0;

  bool complete() const { return std::holds_alternative<Complete>(completeness); }
  std::size_t deficit() const {
    return complete() ? 0 : std::get<Incomplete>(completeness).deficit;
  }
};

/// Raised when roots counted with multiplicity exceed the expected total.
class CensusOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lattice seeds (real/imaginary grid) followed by pseudo-random seeds in the region.
std::vector<ComplexPoint> seed_points(const BidiskDomain& region, const SolverConfig& config);

/// Newton from every seed; converged roots inside the region, unordered by seed index.
std::vector<RootRecord> refine_seeds(const HolomorphicSystem& system, const BidiskDomain& region,
                                     const std::vector<ComplexPoint>& seeds,
                                     const SolverConfig& config);

/// Sorts, clusters (single linkage within dedup_tol) and assigns multiplicities.
CensusResult cluster_roots(std::vector<RootRecord> roots, std::size_t expected,
                           const SolverConfig& config);

/// Multi-start census: seed_points + extra_seeds -> refine_seeds -> cluster_roots.
CensusResult solve_all(const HolomorphicSystem& system, const BidiskDomain& region,
                       const SolverConfig& config, std::size_t expected,
                       const std::vector<ComplexPoint>& extra_seeds = {});

/// g(z) = f^n(z) - z with Jacobian Df^n - I; undefined once the orbit escapes.
HolomorphicSystem fixed_point_system(const HenonMap& f, int n);

/// g(z) = f^m(z) - f^{-(n-m)}(z), m = ceil(n/2). Same zero set as
/// fixed_point_system, with far better conditioned Newton basins.
HolomorphicSystem balanced_fixed_point_system(const HenonMap& f, int n);

/// Jacobian of fixed_point_system at z (Df^n - I).
ComplexMatrix fixed_point_jacobian(const HenonMap& f, const ComplexPoint& z, int n);

/// sigma_min(Df^n - I); the single shared tangency computation.
double fixed_point_sigma_min(const HenonMap& f, const ComplexPoint& z, int n);

}  // namespace henonlab
