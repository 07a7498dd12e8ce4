#include "henonlab/green.hpp"

#include <cmath>

#include "green_generic.hpp"

namespace henonlab {

int escape_degree(const HenonMap& f) {
  switch (f.kind()) {
    case HenonMap::Kind::GeneralizedHenon:
    case HenonMap::Kind::Composition:
      return f.main_degree();
    case HenonMap::Kind::Product:
      return std::max(escape_degree(f.first()), escape_degree(f.second()));
    case HenonMap::Kind::Doubled:
      return escape_degree(f.base());
  }
  return f.main_degree();
}

namespace {

GreenValue green_impl(const HenonMap& f, const ComplexPoint& z, std::size_t max_n,
                      double escape_radius, bool forward) {
  require(static_cast<std::size_t>(z.size()) == f.dimension(), "point dimension does not match the map");
  require(max_n >= 1, "max_n must be at least 1");
  require(escape_radius > 0.0, "escape radius must be positive");
  ComplexPoint w = z;
  return detail::green_escape(f, w.data(), forward, max_n, escape_radius);
}

}  // namespace

GreenValue green_plus(const HenonMap& f, const ComplexPoint& z, std::size_t max_n,
                      double escape_radius) {
  return green_impl(f, z, max_n, escape_radius, true);
}

GreenValue green_minus(const HenonMap& f, const ComplexPoint& z, std::size_t max_n,
                       double escape_radius) {
  return green_impl(f, z, max_n, escape_radius, false);
}

std::vector<double> green_stages(const HenonMap& f, const ComplexPoint& z, std::size_t depth) {
  require(static_cast<std::size_t>(z.size()) == f.dimension(), "point dimension does not match the map");
  const double d = escape_degree(f);
  std::vector<double> stages;
  ComplexPoint w = z;
  for (std::size_t j = 0; j <= depth; ++j) {
    if (j > 0) detail::forward(f, w.data());
    const double norm = max_modulus(w);
    if (!std::isfinite(norm)) break;
    stages.push_back(std::log(norm) / std::pow(d, static_cast<double>(j)));
  }
  return stages;
}

double green_stage(const HenonMap& f, const ComplexPoint& z, std::size_t depth) {
  const std::vector<double> s = green_stages(f, z, depth);
  require(s.size() == depth + 1, "orbit overflowed before the requested depth");
  return s.back();
}

std::optional<double> invariance_residual(const HenonMap& f, const ComplexPoint& z,
                                          std::size_t max_n, double escape_radius) {
  const GreenValue g = green_plus(f, z, max_n, escape_radius);
  if (!g.escape_step || g.truncation_n < 1) return std::nullopt;
  const std::size_t depth = g.truncation_n;
  const double d = escape_degree(f);
  const double at_z = green_stage(f, z, depth);
  const double at_fz = green_stage(f, eval(f, z), depth - 1);
  return std::abs(at_fz - d * at_z);
}

std::vector<GreenGridPoint> green_grid(const HenonMap& f, const GreenSlice& slice, std::size_t max_n,
                                       double escape_radius, unsigned threads) {
  const std::size_t k = f.dimension();
  require(static_cast<std::size_t>(slice.base.size()) == k, "slice base has the wrong dimension");
  require(slice.axis_u < 2 * k && slice.axis_v < 2 * k && slice.axis_u != slice.axis_v,
          "slice axes must be two distinct real coordinates");
  require(slice.resolution >= 2, "slice resolution must be at least 2");
  require(slice.extent > 0.0, "slice extent must be positive");
  const std::size_t res = slice.resolution;
  std::vector<GreenGridPoint> out(res * res);
  auto shift = [](ComplexPoint& z, std::size_t axis, double amount) {
    const auto i = static_cast<Eigen::Index>(axis / 2);
    z[i] += axis % 2 == 0 ? Complex(amount, 0.0) : Complex(0.0, amount);
  };
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    const std::size_t iu = idx % res, iv = idx / res;
    const double s = -slice.extent + 2.0 * slice.extent * static_cast<double>(iu) / static_cast<double>(res - 1);
    const double t = -slice.extent + 2.0 * slice.extent * static_cast<double>(iv) / static_cast<double>(res - 1);
    GreenGridPoint p;
    p.z = slice.base;
    shift(p.z, slice.axis_u, s);
    shift(p.z, slice.axis_v, t);
    p.g_plus = green_plus(f, p.z, max_n, escape_radius).value;
    p.g_minus = green_minus(f, p.z, max_n, escape_radius).value;
    out[idx] = p;
  });
  return out;
}

}  // namespace henonlab
