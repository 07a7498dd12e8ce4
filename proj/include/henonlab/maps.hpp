#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "henonlab/core.hpp"

namespace henonlab {

/// Polynomial c_0 + c_1 x + ... + c_d x^d with complex coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> coefficients);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Complex>& coefficients() const { return coeffs_; }

  template <class C>
  C operator()(const C& x) const;
  template <class C>
  C derivative(const C& x) const;

 private:
  std::vector<Complex> coeffs_;
};

/// Polydisk D = M x N. Coordinates are assigned to the expanding block M or the
/// contracting block N by index, so product and doubled maps can keep their
/// natural coordinate layouts.
struct BidiskDomain {
  std::vector<double> radius;            ///< per-coordinate polydisk radius
  std::vector<std::size_t> expanding;    ///< coordinates of M (size p)
  std::vector<std::size_t> contracting;  ///< coordinates of N (size k - p)
  double inner_M = 0.5;                  ///< M'' = inner_M * M
  double mid_M = 0.75;                   ///< M'  = mid_M * M
  double inner_N = 0.5;
  double mid_N = 0.75;

  /// The C x C bidisk used by planar generalized Henon maps.
  static BidiskDomain planar(double radius_M, double radius_N, double inner = 0.5,
                             double mid = 0.75);

  std::size_t k() const { return radius.size(); }
  std::size_t p() const { return expanding.size(); }
  double radius_M() const;
  double radius_N() const;

  /// Max-modulus membership in (scale_M * M) x (scale_N * N).
  bool contains(const ComplexPoint& z, double scale_M = 1.0, double scale_N = 1.0) const;
  bool in_prime(const ComplexPoint& z) const { return contains(z, mid_M, mid_N); }

  /// max_i |z_i| / r_i - 1; positive exactly when z lies outside the closed polydisk.
  double outside_margin(const ComplexPoint& z) const;

  /// 2 radius_M + 2 radius_N.
  double default_escape_radius() const;

  /// Distance between D' and the boundary of D, min over coordinates.
  double epsilon0() const;

  void validate() const;
};

/// One generalized Henon factor f(x, y) = (p(x) + a y, x).
struct HenonFactor {
  Polynomial poly;
  Complex shear;
};

/// Polynomial automorphism of C^k restricted to a bidisk.
class HenonMap {
 public:
  enum class Kind { GeneralizedHenon, Composition, Product, Doubled };

  static HenonMap generalized(Polynomial poly, Complex shear, BidiskDomain domain);
  /// Applies factors[0] first.
  static HenonMap composition(std::vector<HenonFactor> factors, BidiskDomain domain);

  Kind kind() const { return kind_; }
  const BidiskDomain& domain() const { return domain_; }
  int main_degree() const { return degree_; }
  std::size_t dimension() const { return domain_.k(); }
  std::size_t expanding_dimension() const { return domain_.p(); }

  const std::vector<HenonFactor>& factors() const { return factors_; }
  const HenonMap& first() const { return *parts_.at(0); }
  const HenonMap& second() const { return *parts_.at(1); }
  const HenonMap& base() const { return *parts_.at(0); }
  /// Product layout: slot of each coordinate of first() / second().
  const std::vector<std::size_t>& first_slots() const { return first_slots_; }
  const std::vector<std::size_t>& second_slots() const { return second_slots_; }

  std::string describe() const;

 private:
  friend HenonMap product(const HenonMap& f1, const HenonMap& f2);
  friend HenonMap doubled(const HenonMap& f);

  HenonMap() = default;

  Kind kind_ = Kind::GeneralizedHenon;
  BidiskDomain domain_;
  int degree_ = 1;
  std::vector<HenonFactor> factors_;
  std::vector<std::shared_ptr<const HenonMap>> parts_;
  std::vector<std::size_t> first_slots_;
  std::vector<std::size_t> second_slots_;
};

/// f1 x f2 on (M1 x M2) x (N1 x N2); main degree d1 d2.
HenonMap product(const HenonMap& f1, const HenonMap& f2);

/// F = (f, f^{-1}) on D x D in the natural (z, w) layout; main degree d^2.
HenonMap doubled(const HenonMap& f);

// ---------------------------------------------------------------------------
// Evaluation

ComplexPoint eval(const HenonMap& f, const ComplexPoint& z);
ComplexPoint eval_inverse(const HenonMap& f, const ComplexPoint& z);
/// Df_z.
ComplexMatrix jacobian(const HenonMap& f, const ComplexPoint& z);
/// D(f^{-1})_z.
ComplexMatrix inverse_jacobian(const HenonMap& f, const ComplexPoint& z);

/// Image and Jacobian of f^steps (steps < 0 iterates the inverse).
struct OrbitJet {
  ComplexPoint image;
  ComplexMatrix jacobian;
  bool escaped = false;  ///< some iterate exceeded the escape radius
};

/// Ordered chain-rule product of step Jacobians along the orbit. Stops at the
/// first iterate whose max-modulus exceeds escape_radius (if given).
OrbitJet propagate(const HenonMap& f, const ComplexPoint& z, int steps,
                   std::optional<double> escape_radius = std::nullopt);

/// f^steps(z) without the Jacobian.
ComplexPoint iterate_point(const HenonMap& f, const ComplexPoint& z, int steps);

struct Escaped {
  std::size_t step;
  double norm;
};

struct OrbitResult {
  std::vector<ComplexPoint> points;
  std::optional<Escaped> escaped;  ///< empty means Completed
  bool completed() const { return !escaped.has_value(); }
};

OrbitResult iterate(const HenonMap& f, const ComplexPoint& z, std::size_t n,
                    double escape_radius);

// ---------------------------------------------------------------------------
// Henon-like validity

struct ValidityReport {
  bool pass = false;
  /// min over sampled z on the vertical boundary of outside_margin(f(z)).
  double vertical_boundary_margin = 0.0;
  /// min over sampled w on the horizontal boundary of outside_margin(f^{-1}(w)).
  double horizontal_boundary_margin = 0.0;
  /// Samples of D whose image stays in D (the graph is nonempty iff > 0).
  std::size_t graph_samples = 0;
  /// Smallest shrink factors of M'' and N'' consistent with the samples.
  double measured_inner_M = 0.0;
  double measured_inner_N = 0.0;
  bool nested_domains_consistent = false;
  std::optional<ComplexPoint> failing_sample;
  std::string failure;
};

ValidityReport check_henon_like(const HenonMap& f, std::size_t samples, std::uint64_t seed);

}  // namespace henonlab

#include "henonlab/maps_generic.hpp"
