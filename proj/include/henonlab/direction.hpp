#pragma once

#include "henonlab/core.hpp"

namespace henonlab {

/// A point of the Grassmannian G(p, k): a k x p matrix with orthonormal columns.
/// Two representatives are equal up to right multiplication by a p x p unitary.
class Direction {
 public:
  Direction() = default;
  /// Orthonormalizes the columns of `span` (which must have full column rank).
  static Direction from_span(const ComplexMatrix& span);

  const ComplexMatrix& basis() const { return basis_; }
  Eigen::Index ambient() const { return basis_.rows(); }
  Eigen::Index rank() const { return basis_.cols(); }
  bool empty() const { return basis_.size() == 0; }

 private:
  ComplexMatrix basis_;
};

/// Principal angles between two subspaces, ascending, in [0, pi/2].
/// Computed with the sine/cosine split so small angles keep full accuracy.
Eigen::VectorXd principal_angles(const Direction& a, const Direction& b);

/// Grassmannian distance: the largest principal angle (same dimension required).
double grassmann_distance(const Direction& a, const Direction& b);

/// Smallest principal angle; zero exactly when the subspaces intersect.
double smallest_principal_angle(const Direction& a, const Direction& b);

/// Image of a direction under a linear map, re-orthonormalized.
Direction push_forward(const ComplexMatrix& linear, const Direction& v);

}  // namespace henonlab
