#pragma once

// Scalar-generic evaluation of HenonMap. Used with std::complex<double> by the
// library and with a 50-digit complex type by the Green-function refinement.
// Points are raw arrays of dimension(); Jacobians are column-major k x k.

#include <array>

namespace henonlab {

template <class C>
C Polynomial::operator()(const C& x) const {
  C acc(coeffs_.back().real(), coeffs_.back().imag());
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) {
    acc = acc * x + C(it->real(), it->imag());
  }
  return acc;
}

template <class C>
C Polynomial::derivative(const C& x) const {
  C acc(0.0, 0.0);
  for (std::size_t i = coeffs_.size() - 1; i >= 1; --i) {
    const double m = static_cast<double>(i);
    acc = acc * x + C(m * coeffs_[i].real(), m * coeffs_[i].imag());
  }
  return acc;
}

namespace detail {

template <class C>
using PointBuffer = std::array<C, kMaxDim>;
template <class C>
using MatrixBuffer = std::array<C, kMaxDim * kMaxDim>;

template <class C>
C scalar(Complex c) {
  return C(c.real(), c.imag());
}

template <class C>
void set_identity(C* m, std::size_t k) {
  for (std::size_t i = 0; i < k * k; ++i) m[i] = C(0.0, 0.0);
  for (std::size_t i = 0; i < k; ++i) m[i * k + i] = C(1.0, 0.0);
}

// out = a * b, all column-major k x k; out may not alias a or b.
template <class C>
void matmul(const C* a, const C* b, C* out, std::size_t k) {
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t r = 0; r < k; ++r) {
      C acc(0.0, 0.0);
      for (std::size_t j = 0; j < k; ++j) acc += a[j * k + r] * b[c * k + j];
      out[c * k + r] = acc;
    }
  }
}

template <class C>
void factor_forward(const HenonFactor& h, C* z) {
  const C x = z[0];
  z[0] = h.poly(x) + scalar<C>(h.shear) * z[1];
  z[1] = x;
}

template <class C>
void factor_backward(const HenonFactor& h, C* z) {
  const C y = z[1];
  z[1] = (z[0] - h.poly(y)) / scalar<C>(h.shear);
  z[0] = y;
}

template <class C>
void factor_forward_jacobian(const HenonFactor& h, const C* z, C* j) {
  j[0] = h.poly.derivative(z[0]);
  j[1] = C(1.0, 0.0);
  j[2] = scalar<C>(h.shear);
  j[3] = C(0.0, 0.0);
}

template <class C>
void factor_backward_jacobian(const HenonFactor& h, const C* z, C* j) {
  const C a = scalar<C>(h.shear);
  j[0] = C(0.0, 0.0);
  j[1] = C(1.0, 0.0) / a;
  j[2] = C(1.0, 0.0);
  j[3] = -h.poly.derivative(z[1]) / a;
}

template <class C>
void forward(const HenonMap& f, C* z);
template <class C>
void backward(const HenonMap& f, C* z);

// Applies g (a map of dimension slots.size()) to the coordinates of z listed in slots.
template <class C, class Apply>
void apply_on_slots(const std::vector<std::size_t>& slots, C* z, Apply&& apply) {
  PointBuffer<C> local;
  for (std::size_t j = 0; j < slots.size(); ++j) local[j] = z[slots[j]];
  apply(local.data());
  for (std::size_t j = 0; j < slots.size(); ++j) z[slots[j]] = local[j];
}

template <class C>
void forward(const HenonMap& f, C* z) {
  switch (f.kind()) {
    case HenonMap::Kind::GeneralizedHenon:
    case HenonMap::Kind::Composition:
      for (const auto& h : f.factors()) factor_forward(h, z);
      return;
    case HenonMap::Kind::Product:
      apply_on_slots(f.first_slots(), z, [&](C* w) { forward(f.first(), w); });
      apply_on_slots(f.second_slots(), z, [&](C* w) { forward(f.second(), w); });
      return;
    case HenonMap::Kind::Doubled: {
      const std::size_t k0 = f.base().dimension();
      forward(f.base(), z);
      backward(f.base(), z + k0);
      return;
    }
  }
}

template <class C>
void backward(const HenonMap& f, C* z) {
  switch (f.kind()) {
    case HenonMap::Kind::GeneralizedHenon:
    case HenonMap::Kind::Composition:
      for (auto it = f.factors().rbegin(); it != f.factors().rend(); ++it) factor_backward(*it, z);
      return;
    case HenonMap::Kind::Product:
      apply_on_slots(f.first_slots(), z, [&](C* w) { backward(f.first(), w); });
      apply_on_slots(f.second_slots(), z, [&](C* w) { backward(f.second(), w); });
      return;
    case HenonMap::Kind::Doubled: {
      const std::size_t k0 = f.base().dimension();
      backward(f.base(), z);
      forward(f.base(), z + k0);
      return;
    }
  }
}

template <class C>
void forward_jacobian(const HenonMap& f, const C* z, C* jac);
template <class C>
void backward_jacobian(const HenonMap& f, const C* z, C* jac);

template <class C, class Jac>
void embed_block(const std::vector<std::size_t>& slots, const C* z, C* jac, std::size_t k,
                 Jac&& block_jacobian) {
  PointBuffer<C> local;
  MatrixBuffer<C> block;
  const std::size_t m = slots.size();
  for (std::size_t j = 0; j < m; ++j) local[j] = z[slots[j]];
  block_jacobian(local.data(), block.data());
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t r = 0; r < m; ++r) jac[slots[c] * k + slots[r]] = block[c * m + r];
  }
}

template <class C>
void forward_jacobian(const HenonMap& f, const C* z, C* jac) {
  const std::size_t k = f.dimension();
  switch (f.kind()) {
    case HenonMap::Kind::GeneralizedHenon:
    case HenonMap::Kind::Composition: {
      if (f.factors().size() == 1) {
        factor_forward_jacobian(f.factors()[0], z, jac);
        return;
      }
      PointBuffer<C> w{z[0], z[1]};
      MatrixBuffer<C> step, acc, tmp;
      set_identity(acc.data(), 2);
      for (const auto& h : f.factors()) {
        factor_forward_jacobian(h, w.data(), step.data());
        matmul(step.data(), acc.data(), tmp.data(), 2);
        acc = tmp;
        factor_forward(h, w.data());
      }
      for (std::size_t i = 0; i < 4; ++i) jac[i] = acc[i];
      return;
    }
    case HenonMap::Kind::Product:
      for (std::size_t i = 0; i < k * k; ++i) jac[i] = C(0.0, 0.0);
      embed_block(f.first_slots(), z, jac, k,
                  [&](const C* w, C* b) { forward_jacobian(f.first(), w, b); });
      embed_block(f.second_slots(), z, jac, k,
                  [&](const C* w, C* b) { forward_jacobian(f.second(), w, b); });
      return;
    case HenonMap::Kind::Doubled: {
      const std::size_t k0 = f.base().dimension();
      std::vector<std::size_t> lo(k0), hi(k0);
      for (std::size_t i = 0; i < k0; ++i) {
        lo[i] = i;
        hi[i] = k0 + i;
      }
      for (std::size_t i = 0; i < k * k; ++i) jac[i] = C(0.0, 0.0);
      embed_block(lo, z, jac, k, [&](const C* w, C* b) { forward_jacobian(f.base(), w, b); });
      embed_block(hi, z, jac, k, [&](const C* w, C* b) { backward_jacobian(f.base(), w, b); });
      return;
    }
  }
}

template <class C>
void backward_jacobian(const HenonMap& f, const C* z, C* jac) {
  const std::size_t k = f.dimension();
  switch (f.kind()) {
    case HenonMap::Kind::GeneralizedHenon:
    case HenonMap::Kind::Composition: {
      if (f.factors().size() == 1) {
        factor_backward_jacobian(f.factors()[0], z, jac);
        return;
      }
      PointBuffer<C> w{z[0], z[1]};
      MatrixBuffer<C> step, acc, tmp;
      set_identity(acc.data(), 2);
      for (auto it = f.factors().rbegin(); it != f.factors().rend(); ++it) {
        factor_backward_jacobian(*it, w.data(), step.data());
        matmul(step.data(), acc.data(), tmp.data(), 2);
        acc = tmp;
        factor_backward(*it, w.data());
      }
      for (std::size_t i = 0; i < 4; ++i) jac[i] = acc[i];
      return;
    }
    case HenonMap::Kind::Product:
      for (std::size_t i = 0; i < k * k; ++i) jac[i] = C(0.0, 0.0);
      embed_block(f.first_slots(), z, jac, k,
                  [&](const C* w, C* b) { backward_jacobian(f.first(), w, b); });
      embed_block(f.second_slots(), z, jac, k,
                  [&](const C* w, C* b) { backward_jacobian(f.second(), w, b); });
      return;
    case HenonMap::Kind::Doubled: {
      const std::size_t k0 = f.base().dimension();
      std::vector<std::size_t> lo(k0), hi(k0);
      for (std::size_t i = 0; i < k0; ++i) {
        lo[i] = i;
        hi[i] = k0 + i;
      }
      for (std::size_t i = 0; i < k * k; ++i) jac[i] = C(0.0, 0.0);
      embed_block(lo, z, jac, k, [&](const C* w, C* b) { backward_jacobian(f.base(), w, b); });
      embed_block(hi, z, jac, k, [&](const C* w, C* b) { forward_jacobian(f.base(), w, b); });
      return;
    }
  }
}

}  // namespace detail
}  // namespace henonlab
