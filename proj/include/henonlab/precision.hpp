#pragma once

#include "henonlab/green.hpp"
#include "henonlab/maps.hpp"

namespace henonlab {

/// Newton on f^n(z) = z in 50-digit arithmetic started at z; returns the
/// root rounded to double. z must already lie in the root's quadratic basin.
ComplexPoint refine_periodic_point(const HenonMap& f, const ComplexPoint& z, int n,
                                   int max_steps = 8);

/// green_plus at a period-n point, with the point refined and its orbit
/// followed in 50-digit arithmetic (a double orbit of a saddle drifts off
/// after roughly 16 / log10|lambda_u| periods).
GreenValue green_plus_periodic(const HenonMap& f, const ComplexPoint& z, int n, std::size_t max_n,
                               double escape_radius);

}  // namespace henonlab
