#pragma once

// Escape-rate recursion shared by the double and the extended-precision paths.

#include <algorithm>
#include <cmath>

#include "henonlab/green.hpp"

namespace henonlab::detail {

// max_i |w_i| in double; C only needs abs() convertible to double.
template <class C>
double max_abs(const C* w, std::size_t k) {
  using std::abs;
  double m = 0.0;
  for (std::size_t i = 0; i < k; ++i) m = std::max(m, static_cast<double>(abs(w[i])));
  return m;
}

template <class C>
GreenValue green_escape(const HenonMap& f, C* w, bool forward, std::size_t max_n, double escape_radius) {
  const std::size_t k = f.dimension();
  const double d = escape_degree(f);
  auto step = [&] {
    if (forward) {
      detail::forward(f, w);
    } else {
      detail::backward(f, w);
    }
  };
  auto stage = [&](std::size_t j, double norm) {
    return std::max(0.0, std::log(norm) / std::pow(d, static_cast<double>(j)));
  };

  GreenValue out;
  double norm = max_abs(w, k);
  std::size_t m = 0;
  while (norm <= escape_radius) {
    if (m == max_n) {
      out.truncation_n = max_n;
      return out;
    }
    step();
    ++m;
    norm = max_abs(w, k);
  }
  out.escape_step = m;
  double cur = stage(m, norm);
  double prev = cur;
  std::size_t depth = m;
  for (std::size_t e = 1; e <= kGreenExtrapolation; ++e) {
    step();
    const double next_norm = max_abs(w, k);
    if (!std::isfinite(next_norm) || next_norm <= 0.0) break;
    depth = m + e;
    prev = cur;
    cur = stage(depth, next_norm);
  }
  out.value = cur;
  out.truncation_n = depth;
  out.cauchy_gap = depth == m ? cur : std::abs(cur - prev);
  return out;
}

}  // namespace henonlab::detail
