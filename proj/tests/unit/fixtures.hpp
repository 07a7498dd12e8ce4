#pragma once

#include <cmath>
#include <map>
#include <random>

#include "henonlab/maps.hpp"
#include "henonlab/periodic.hpp"

namespace fixtures {

using henonlab::Complex;
using henonlab::ComplexPoint;

inline const double kSqrt7 = std::sqrt(7.0);
/// Bidisk radius (2 + sqrt 28) / 2 = 1 + sqrt 7 of the horseshoe p(x) = x^2 - 6, a = -1.
inline const double kHorseshoeRadius = 1.0 + kSqrt7;

inline henonlab::HenonMap horseshoe(double radius = kHorseshoeRadius, double inner = 0.5, double mid = 0.75) {
  return henonlab::HenonMap::generalized(henonlab::Polynomial({-6.0, 0.0, 1.0}), -1.0,
                                         henonlab::BidiskDomain::planar(radius, radius, inner, mid));
}

/// p(x) = x^2 + 1, a = -1: x^2 + (a - 1) x + c has zero discriminant, so the
/// single fixed point x = 1 carries the multiplier 1.
inline henonlab::HenonMap parabolic() {
  const double r = 1.0 + std::sqrt(2.0);
  return henonlab::HenonMap::generalized(henonlab::Polynomial({1.0, 0.0, 1.0}), -1.0,
                                         henonlab::BidiskDomain::planar(r, r));
}

inline ComplexPoint point2(Complex x, Complex y) { return henonlab::make_point({x, y}); }

/// Uniform point of the closed polydisk with the given per-coordinate radii.
inline ComplexPoint random_point(std::mt19937_64& rng, const std::vector<double>& radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ComplexPoint z(static_cast<Eigen::Index>(radius.size()));
  for (std::size_t i = 0; i < radius.size(); ++i) {
    z[static_cast<Eigen::Index>(i)] = std::polar(radius[i] * std::sqrt(u(rng)), 2.0 * M_PI * u(rng));
  }
  return z;
}

/// Period-n census of the horseshoe, computed once per process.
inline const std::vector<henonlab::PeriodicPoint>& horseshoe_census(int n) {
  static std::map<int, std::vector<henonlab::PeriodicPoint>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, henonlab::find_periodic(horseshoe(), n).points).first;
  return it->second;
}

}  // namespace fixtures
