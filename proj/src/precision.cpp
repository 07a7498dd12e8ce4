#include "henonlab/precision.hpp"

#include <array>
#include <cmath>

#include <boost/multiprecision/cpp_complex.hpp>

#include "green_generic.hpp"

namespace henonlab {

namespace {

using Wide = boost::multiprecision::cpp_complex_50;
using WideReal = boost::multiprecision::cpp_bin_float_50;

using WidePoint = std::array<Wide, kMaxDim>;
using WideMatrix = std::array<Wide, kMaxDim * kMaxDim>;

WidePoint widen(const ComplexPoint& z) {
  WidePoint w;
  for (Eigen::Index i = 0; i < z.size(); ++i) w[static_cast<std::size_t>(i)] = Wide(z[i].real(), z[i].imag());
  return w;
}

ComplexPoint narrow(const WidePoint& w, std::size_t k) {
  ComplexPoint z(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    z[static_cast<Eigen::Index>(i)] =
        Complex(static_cast<double>(w[i].real()), static_cast<double>(w[i].imag()));
  }
  return z;
}

// Solves a x = b (column-major k x k) by Gaussian elimination with partial pivoting.
bool solve_in_place(WideMatrix a, WidePoint& b, std::size_t k) {
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    WideReal best = abs(a[c * k + c]);
    for (std::size_t r = c + 1; r < k; ++r) {
      const WideReal v = abs(a[c * k + r]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0) return false;
    if (piv != c) {
      for (std::size_t j = 0; j < k; ++j) std::swap(a[j * k + c], a[j * k + piv]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < k; ++r) {
      const Wide factor = a[c * k + r] / a[c * k + c];
      for (std::size_t j = c; j < k; ++j) a[j * k + r] -= factor * a[j * k + c];
      b[r] -= factor * b[c];
    }
  }
  for (std::size_t c = k; c-- > 0;) {
    Wide acc = b[c];
    for (std::size_t j = c + 1; j < k; ++j) acc -= a[j * k + c] * b[j];
    b[c] = acc / a[c * k + c];
  }
  return true;
}

WidePoint refine_wide(const HenonMap& f, const ComplexPoint& z, int n, int max_steps) {
  require(n >= 1, "period must be at least 1");
  const std::size_t k = f.dimension();
  WidePoint x = widen(z);
  for (int s = 0; s < max_steps; ++s) {
    WidePoint y = x;
    WideMatrix jac, step, tmp;
    detail::set_identity(jac.data(), k);
    for (int j = 0; j < n; ++j) {
      detail::forward_jacobian(f, y.data(), step.data());
      detail::matmul(step.data(), jac.data(), tmp.data(), k);
      jac = tmp;
      detail::forward(f, y.data());
    }
    WidePoint g;
    for (std::size_t i = 0; i < k; ++i) {
      g[i] = x[i] - y[i];
      jac[i * k + i] -= Wide(1.0, 0.0);
    }
    if (!solve_in_place(jac, g, k)) break;
    for (std::size_t i = 0; i < k; ++i) x[i] += g[i];
  }
  return x;
}

}  // namespace

ComplexPoint refine_periodic_point(const HenonMap& f, const ComplexPoint& z, int n, int max_steps) {
  require(static_cast<std::size_t>(z.size()) == f.dimension(), "point dimension does not match the map");
  return narrow(refine_wide(f, z, n, max_steps), f.dimension());
}

GreenValue green_plus_periodic(const HenonMap& f, const ComplexPoint& z, int n, std::size_t max_n,
                               double escape_radius) {
  require(static_cast<std::size_t>(z.size()) == f.dimension(), "point dimension does not match the map");
  require(max_n >= 1, "max_n must be at least 1");
  WidePoint w = refine_wide(f, z, n, 8);
  return detail::green_escape(f, w.data(), true, max_n, escape_radius);
}

}  // namespace henonlab
