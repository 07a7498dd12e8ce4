#include "henonlab/direction.hpp"

#include <algorithm>
#include <cmath>

namespace henonlab {

Direction Direction::from_span(const ComplexMatrix& span) {
  require(span.cols() >= 1 && span.rows() >= span.cols(), "direction needs 1 <= p <= k columns");
  Eigen::JacobiSVD<ComplexMatrix> svd(span);
  const Eigen::VectorXd& s = svd.singularValues();
  require(s[0] > 0.0 && s[s.size() - 1] > s[0] * 1e-14, "direction span is rank deficient");
  Direction d;
  d.basis_ = orthonormal_columns(span);
  return d;
}

Eigen::VectorXd principal_angles(const Direction& a, const Direction& b) {
  require(!a.empty() && !b.empty(), "principal angles of an empty direction");
  require(a.ambient() == b.ambient(), "directions live in different ambient spaces");
  // Project the lower-dimensional subspace onto the other one.
  const ComplexMatrix& u = a.rank() >= b.rank() ? a.basis() : b.basis();
  const ComplexMatrix& v = a.rank() >= b.rank() ? b.basis() : a.basis();
  const ComplexMatrix cross = u.adjoint() * v;
  const ComplexMatrix residual = v - u * cross;
  Eigen::VectorXd cosines = Eigen::JacobiSVD<ComplexMatrix>(cross).singularValues();      // descending
  Eigen::VectorXd sines = Eigen::JacobiSVD<ComplexMatrix>(residual).singularValues();     // descending
  const Eigen::Index q = v.cols();
  Eigen::VectorXd angles(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double c = i < cosines.size() ? std::min(1.0, cosines[i]) : 0.0;
    const Eigen::Index si = sines.size() - 1 - i;
    const double s = si >= 0 ? std::min(1.0, sines[si]) : 0.0;
    angles[i] = std::atan2(s, c);
  }
  std::sort(angles.data(), angles.data() + angles.size());
  return angles;
}

double grassmann_distance(const Direction& a, const Direction& b) {
  require(a.rank() == b.rank(), "Grassmannian distance needs directions of equal dimension");
  const Eigen::VectorXd angles = principal_angles(a, b);
  return angles[angles.size() - 1];
}

double smallest_principal_angle(const Direction& a, const Direction& b) {
  return principal_angles(a, b)[0];
}

Direction push_forward(const ComplexMatrix& linear, const Direction& v) {
  require(linear.cols() == v.ambient(), "linear map does not act on the direction's ambient space");
  return Direction::from_span(linear * v.basis());
}

}  // namespace henonlab
