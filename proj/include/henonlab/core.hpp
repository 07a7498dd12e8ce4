#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace henonlab {

/// Largest ambient dimension supported by the fixed-capacity vector types.
inline constexpr int kMaxDim = 8;

using Complex = std::complex<double>;

/// A point of C^k. Storage is inline (no heap) up to kMaxDim coordinates.
using ComplexPoint = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

ComplexPoint make_point(std::initializer_list<Complex> coords);

/// max_i |z_i|
inline double max_modulus(const ComplexPoint& z) {
  return z.size() == 0 ? 0.0 : z.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexPoint& z);

double smallest_singular_value(const ComplexMatrix& m);
Eigen::VectorXd singular_values(const ComplexMatrix& m);

/// Orthonormal basis of the column space of `m` (thin QR, columns assumed independent).
ComplexMatrix orthonormal_columns(const ComplexMatrix& m);

/// Lexicographic order on (re z_0, im z_0, re z_1, ...).
bool lex_less(const ComplexPoint& a, const ComplexPoint& b);

// ---------------------------------------------------------------------------
// Deterministic parallelism

/// Worker count used when a routine is called with threads == 0.
void set_default_threads(unsigned threads);
unsigned default_threads();

/// Runs body(i) for i in [0, count) on `threads` workers (0 = default).
/// Work is split in contiguous static chunks; callers write results by index,
/// so the outcome never depends on the worker count.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------------------
// Small numeric helpers

/// SplitMix64 finalizer; used to derive independent per-item RNG streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Radical-inverse (Halton) coordinate of `index` in the given prime base.
double halton(std::uint64_t index, unsigned base);
unsigned nth_prime(unsigned n);

double median(std::vector<double> values);
/// Linear-interpolated percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;      ///< root-mean-square residual
  double slope_stderr = 0.0;  ///< standard error of the slope (0 for two points)
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace henonlab
