#pragma once

#include <optional>
#include <string>
#include <vector>

#include "henonlab/direction.hpp"
#include "henonlab/maps.hpp"
#include "henonlab/solver.hpp"

namespace henonlab {

enum class Stability { Saddle, NonSaddle };

enum class NonSaddleReason {
  None,            ///< the point is a saddle
  UnitModulus,     ///< some multiplier lies within eta of the unit circle
  AllExpanding,
  AllContracting,
  WrongIndex,      ///< hyperbolic, but the expanding count differs from p
};

std::string to_string(Stability s);
std::string to_string(NonSaddleReason r);

struct PeriodicPoint {
  ComplexPoint location;
  int period = 1;                       ///< the n of the census (not necessarily minimal)
  std::optional<int> minimal_period;    ///< metadata only
  std::vector<Complex> multipliers;     ///< eigenvalues of Df^n, decreasing modulus
  Stability stability = Stability::NonSaddle;
  NonSaddleReason reason = NonSaddleReason::None;
  Direction unstable_basis;             ///< span of expanding eigenvectors (empty if none)
  Direction stable_basis;               ///< span of contracting eigenvectors (empty if none)
  int multiplicity = 1;
  double residual = 0.0;                ///< census system residual
  double sigma_min = 0.0;               ///< sigma_min(Df^n - I), shared with transversal
};

/// Multipliers, eigen-directions and stability of the fixed point z of f^n.
/// Contracting multipliers come from the inverse orbit product so that both
/// ends of the spectrum keep full relative accuracy.
PeriodicPoint classify_periodic(const HenonMap& f, const ComplexPoint& z, int n, double eta = 1e-6);

struct PeriodicConfig {
  SolverConfig solver;
  double eta = 1e-6;
  /// Polish census locations with 50-digit Newton before rounding.
  bool high_precision_polish = true;
  /// Rounds of re-seeding from orbit images of already found points.
  int orbit_seed_rounds = 3;
  /// Planar maps: raise the lattice density to 16 * 2^(n/2) per real axis when that exceeds solver.grid_density.
  bool auto_density = true;
  /// Lattice doublings tried while the census stays incomplete.
  int density_escalations = 2;
  /// Maps of dimension above 2: upper bound on the seed lattice size. The
  /// per-axis density is lowered to fit, and escalations past the bound add
  /// random seeds instead.
  std::size_t max_lattice = 20'000;
  std::vector<ComplexPoint> hint_seeds;
};

struct PeriodicCensus {
  int period = 1;
  std::vector<PeriodicPoint> points;  ///< lexicographic order
  CensusResult census;
};

/// Period-n census of f with expected count d^n (counting multiplicity).
PeriodicCensus find_periodic(const HenonMap& f, int n, const PeriodicConfig& config = {});

/// Multiplicity-weighted fraction of Saddle points.
double saddle_fraction(const std::vector<PeriodicPoint>& census);

struct Atom {
  ComplexPoint location;
  double weight = 0.0;
};

struct EmpiricalMeasure {
  std::vector<Atom> atoms;
  double total_mass = 0.0;

  void add(const ComplexPoint& z, double w);
};

/// Atoms of weight multiplicity / normalization at every census location.
EmpiricalMeasure empirical_measure(const std::vector<PeriodicPoint>& census, double normalization);

/// Only the Saddle points of the census (nu_n(SP_n)).
std::vector<PeriodicPoint> saddles_only(const std::vector<PeriodicPoint>& census);

}  // namespace henonlab
