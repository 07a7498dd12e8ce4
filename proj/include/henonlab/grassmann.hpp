#pragma once

#include <optional>
#include <vector>

#include "henonlab/direction.hpp"
#include "henonlab/maps.hpp"
#include "henonlab/periodic.hpp"

namespace henonlab {

struct LiftedPoint {
  ComplexPoint base;
  Direction direction;
};

/// Canonical lift (z, v) -> (f(z), Df_z v).
LiftedPoint lift_step(const HenonMap& f, const LiftedPoint& lp);
/// Lift of the inverse map, (z, v) -> (f^{-1}(z), D(f^{-1})_z v).
LiftedPoint lift_step_inverse(const HenonMap& f, const LiftedPoint& lp);

/// Span of the expanding / contracting eigenvectors of Df^n at a saddle.
Direction unstable_direction(const PeriodicPoint& pp);
Direction stable_direction(const PeriodicPoint& pp);

struct DecayRecord {
  std::vector<double> distances;  ///< a_l for l = 0..steps
  std::optional<LinearFit> fit;   ///< log a_l against l over 1 <= l while a_l > floor
  double per_step_ratio = 0.0;    ///< exp(slope), 0 when no fit was possible
};

struct ConvergenceOptions {
  double delta = 1e-3;         ///< required angle between start direction and the opposite splitting
  double floor = 1e-12;        ///< distances below this are left out of the fit
  bool reverse_time = false;   ///< lift by f^{-1} and measure distance to E_s
};

/// a_l = dist(direction after l lift steps, E_u(f^l x)) along the saddle's own
/// orbit. The start direction must keep an angle > delta from E_s(x).
DecayRecord direction_convergence(const HenonMap& f, const LiftedPoint& start,
                                  const PeriodicPoint& shadow_saddle, std::size_t steps,
                                  const ConvergenceOptions& options = {});

struct LiftedAtom {
  ComplexPoint base;
  Direction direction;
  double weight = 0.0;
};

/// Atoms (x, E_u(x)) of weight multiplicity / normalization over the saddles of a census.
std::vector<LiftedAtom> oseledec_empirical(const std::vector<PeriodicPoint>& census, double normalization);

/// Base projection of lifted atoms.
EmpiricalMeasure project_to_base(const std::vector<LiftedAtom>& atoms);

struct AlignmentStats {
  int depth = 0;
  std::size_t matched = 0;
  std::size_t excluded = 0;          ///< no saddle within the matching radius
  std::vector<double> angles;        ///< per matched point: max of the two angles
  std::vector<double> unstable_angles;
  std::vector<double> stable_angles;
  double median = 0.0;
  double p90 = 0.0;
  double unstable_median = 0.0;
  double stable_median = 0.0;
};

/// At each oracle point z of depth n: tangent of f^n(H_b) (the M-unit vectors
/// pushed by Df^n from f^{-n}(z)) against E_u of the nearest saddle, and the
/// tangent of f^{-n}(V_a) against E_s.
AlignmentStats tangent_alignment(const HenonMap& f, int n, const std::vector<ComplexPoint>& oracle_points,
                                 const std::vector<PeriodicPoint>& saddle_census, double radius,
                                 unsigned threads = 0);

}  // namespace henonlab
