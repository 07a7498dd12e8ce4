#pragma once

#include <optional>
#include <vector>

#include "henonlab/maps.hpp"

namespace henonlab {

struct GreenValue {
  double value = 0.0;
  std::size_t truncation_n = 0;  ///< depth N of the returned stage d^{-N} log||f^N z||
  double cauchy_gap = 0.0;       ///< |stage N - stage N-1|
  std::optional<std::size_t> escape_step;
};

/// Number of steps iterated past the escape before reading off the stage.
inline constexpr std::size_t kGreenExtrapolation = 3;

/// Growth rate of ||f^n|| on escaping orbits: the main degree for planar maps,
/// the larger factor degree for products, the base degree for the doubled map.
int escape_degree(const HenonMap& f);

/// d^{-N} log ||f^N z|| where the orbit first leaves the escape radius at step m
/// and N = m + 3 (fewer if the norm would overflow). Bounded orbits give 0.
GreenValue green_plus(const HenonMap& f, const ComplexPoint& z, std::size_t max_n,
                      double escape_radius);
GreenValue green_minus(const HenonMap& f, const ComplexPoint& z, std::size_t max_n,
                       double escape_radius);

/// d^{-depth} log ||f^depth z|| (forward), with no escape logic.
double green_stage(const HenonMap& f, const ComplexPoint& z, std::size_t depth);

/// All stages s_j = d^{-j} log ||f^j z|| for j = 0..depth (stops early on overflow).
std::vector<double> green_stages(const HenonMap& f, const ComplexPoint& z, std::size_t depth);

/// |G+(f z) - d G+(z)| at the shared depth N of z (G+(f z) read at depth N - 1).
/// Empty when z does not escape within max_n.
std::optional<double> invariance_residual(const HenonMap& f, const ComplexPoint& z,
                                          std::size_t max_n, double escape_radius);

/// G+ and G- on a 2-real-dimensional slice z = base + s e_i + t e_j (real axes
/// u and v index the 2k real coordinates as re z_0, im z_0, re z_1, ...).
struct GreenSlice {
  ComplexPoint base;
  std::size_t axis_u = 0;
  std::size_t axis_v = 2;
  double extent = 1.0;       ///< s, t in [-extent, extent]
  std::size_t resolution = 64;
};

struct GreenGridPoint {
  ComplexPoint z;
  double g_plus = 0.0;
  double g_minus = 0.0;
};

/// Row-major samples (v outer, u inner).
std::vector<GreenGridPoint> green_grid(const HenonMap& f, const GreenSlice& slice, std::size_t max_n,
                                       double escape_radius, unsigned threads = 0);

}  // namespace henonlab
