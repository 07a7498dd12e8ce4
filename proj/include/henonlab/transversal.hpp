#pragma once

#include <cstdint>
#include <vector>

#include "henonlab/maps.hpp"
#include "henonlab/periodic.hpp"
#include "henonlab/solver.hpp"

namespace henonlab {

struct TangencyRecord {
  ComplexPoint point;
  double sigma_min = 0.0;  ///< sigma_min(Df^n - I), shared with the solver
  bool simple = false;     ///< sigma_min above the singularity threshold
  int multiplicity = 1;
};

struct TangencySpectrum {
  int period = 1;
  double threshold = 1e-6;
  std::vector<TangencyRecord> records;  ///< census order
  double min = 0.0;
  double median = 0.0;
  std::size_t below_threshold = 0;
  std::size_t simple_count = 0;
  /// sum over non-simple records of multiplicity; simple_count + this = d^n on complete censuses.
  std::size_t multiplicity_excess = 0;
};

/// One record per census point.
TangencySpectrum tangency_spectrum(const HenonMap& f, int n, const std::vector<PeriodicPoint>& census,
                                   double threshold = 1e-6);

struct GraphSampleConfig {
  double epsilon = 0.1;
  double eta = 1e-3;
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  SolverConfig solver;
};

/// Two-sided Wilson score interval (z = 1.96).
struct Interval {
  double low = 0.0;
  double high = 1.0;
};
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

struct GraphStats {
  int period = 1;
  double epsilon = 0.0;
  double eta = 0.0;
  std::size_t attempted = 0;
  std::size_t near_diagonal = 0;  ///< graph points (x, f^n x) found with |f^n x - x| < epsilon
  std::size_t transverse = 0;     ///< of those, sigma_min(Df^n(x) - I) > eta
  double transverse_fraction = 0.0;
  Interval confidence;
  std::size_t simple_points = 0;  ///< simple census points
  std::size_t expected = 0;       ///< d^n
  double simple_fraction = 0.0;
};

/// Samples graph points of f^n over the epsilon-ball around the diagonal: a
/// random offset z with |z| < epsilon is drawn, and f^n(x) - x = z is solved
/// by Newton from a randomly chosen census point. epsilon must stay below
/// half the margin between D' and the boundary of D.
GraphStats graph_census_near_diagonal(const HenonMap& f, int n, const std::vector<PeriodicPoint>& census,
                                      const GraphSampleConfig& config = {});

/// g(x) = pi_1 F^{-n/2}(x, x) - pi_2 F^{-n/2}(x, x) for the doubled map F = (f, f^{-1});
/// its zeros are the diagonal points of the graph of f^n. Requires even n.
HolomorphicSystem doubled_diagonal_system(const HenonMap& doubled_map, int n);

/// sigma_min(A^{-1} B - I) at (x, x), where A and B are the diagonal blocks of
/// DF^{-n/2}; equals sigma_min(Df^n - I) at period points of f.
double doubled_sigma_min(const HenonMap& doubled_map, const ComplexPoint& x, int n);

struct DoubledCorrespondence {
  int period = 2;
  CensusResult diagonal;            ///< census of doubled_diagonal_system
  std::size_t matched = 0;          ///< diagonal points matched one-to-one with the census of f
  double max_location_error = 0.0;
  double max_sigma_rel_error = 0.0;
  bool holds = false;
};

/// Compares the diagonal census of the doubled map with a period-n census of f.
DoubledCorrespondence doubled_correspondence(const HenonMap& f, int n, const std::vector<PeriodicPoint>& census,
                                             const SolverConfig& solver = {}, double location_tol = 1e-9,
                                             double sigma_tol = 1e-8);

}  // namespace henonlab
