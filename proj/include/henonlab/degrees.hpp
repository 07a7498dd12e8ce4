#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "henonlab/core.hpp"
#include "henonlab/maps.hpp"

namespace henonlab {

enum class TimeDirection { Forward, Backward };

/// Complex disk {center + s * direction : |s| <= radius}; direction has unit norm.
struct DiskSeed {
  ComplexPoint center;
  ComplexPoint direction;
  double radius = 1.0;
};

/// Product of two complex disks with orthonormal directions.
struct PolydiskSeed {
  ComplexPoint center;
  std::array<ComplexPoint, 2> directions;
  std::array<double, 2> radius{1.0, 1.0};
};

struct RefinementConfig {
  std::size_t radial_cells = 8;
  std::size_t angular_cells = 32;
  /// Initial image step bound, as a fraction of the smallest polydisk radius.
  double step_fraction = 0.25;
  /// Extra subdivision levels for cells that straddle the boundary of D'.
  int boundary_depth = 4;
  double rel_tol = 0.005;
  int max_doublings = 5;
  std::size_t max_cells = 4'000'000;
  unsigned threads = 0;
};

struct SampleConfig {
  std::size_t samples = 20000;
  std::size_t max_samples = 320000;
  double target_rel_error = 0.01;
  double unconverged_rel_error = 0.10;
  std::uint64_t seed = 1;
  RefinementConfig cells;
};

struct MassEstimate {
  double mass = 0.0;
  double standard_error = 0.0;  ///< curves: last refinement change; surfaces: Monte Carlo error
  bool converged = false;
  int doublings = 0;
  std::size_t cells = 0;
  std::size_t samples = 0;
};

/// Area of f^{+-n}(disk) inside D', as the integral of |d/ds f^n(center + s u)|^2
/// over the parameter disk. Parameter cells are refined until their images
/// are shorter than the step bound at every iterate, cells certified to leave
/// D are dropped, and the step bound is halved until the estimate settles.
MassEstimate curve_mass(const HenonMap& f, int n, const DiskSeed& seed, const RefinementConfig& config = {},
                        TimeDirection time = TimeDirection::Forward);

/// 4-real-dimensional volume of f^{+-n}(polydisk) inside D' for a product map,
/// by Monte Carlo over the parameter bidisk with integrand det(J^H J). Samples
/// are drawn cellwise from the surviving parameter cells of each factor.
MassEstimate surface_mass(const HenonMap& f, int n, const PolydiskSeed& seed, const SampleConfig& config = {},
                          TimeDirection time = TimeDirection::Forward);

/// Mass of the point f^{+-n}(z) inside D' (1 or 0).
double point_mass(const HenonMap& f, int n, const ComplexPoint& z, TimeDirection time = TimeDirection::Forward);

struct GrowthSeries {
  std::vector<int> n_values;
  std::vector<double> masses;
  std::vector<double> standard_errors;
  std::optional<LinearFit> fit;  ///< log mass against n over n >= fit_from
  bool converged = true;
  int fit_from = 2;

  double exponent() const { return fit ? fit->slope : 0.0; }
  double exponent_stderr() const { return fit ? fit->slope_stderr : 0.0; }
};

/// Witness masses for n = 0..n_max with the log-mass regression over [fit_from, n_max].
GrowthSeries curve_growth(const HenonMap& f, int n_max, const DiskSeed& seed, const RefinementConfig& config = {},
                          TimeDirection time = TimeDirection::Forward, int fit_from = 2);
GrowthSeries surface_growth(const HenonMap& f, int n_max, const PolydiskSeed& seed, const SampleConfig& config = {},
                            TimeDirection time = TimeDirection::Forward, int fit_from = 2);
GrowthSeries point_growth(const HenonMap& f, int n_max, const ComplexPoint& z,
                          TimeDirection time = TimeDirection::Forward, int fit_from = 2);

struct DegreeSeparationReport {
  GrowthSeries top_forward;
  GrowthSeries lower_forward;
  GrowthSeries top_backward;
  GrowthSeries lower_backward;
  double top_exponent = 0.0;    ///< min of the forward and backward top witnesses
  double lower_exponent = 0.0;  ///< max of the lower-dimensional witnesses
  double margin = 0.0;
  double uncertainty = 0.0;     ///< combined regression standard error
  bool qualified = false;       ///< every sub-estimate converged
  bool separated = false;       ///< qualified and margin > 2 * uncertainty
};

struct SeparationConfig {
  Complex slice = Complex(0.3, 0.2);  ///< N-block (resp. M-block) coordinate of the seeds
  RefinementConfig curves;
  SampleConfig surfaces;
  int fit_from = 2;
};

/// Witness exponents for the top-dimensional and the next lower horizontal
/// (forward) and vertical (backward) seeds. Planar maps use curves against
/// points; products of planar maps use bidisks against diagonal curves.
/// Exponents are lower-bound witnesses, not certified degrees.
DegreeSeparationReport degree_separation_report(const HenonMap& f, int n_max, const SeparationConfig& config = {});

}  // namespace henonlab
