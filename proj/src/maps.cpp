#include "henonlab/maps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace henonlab {

Polynomial::Polynomial(std::vector<Complex> coefficients) : coeffs_(std::move(coefficients)) {
  while (coeffs_.size() > 1 && coeffs_.back() == Complex(0.0, 0.0)) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(Complex(0.0, 0.0));
}

// ---------------------------------------------------------------------------
// BidiskDomain

BidiskDomain BidiskDomain::planar(double radius_M, double radius_N, double inner, double mid) {
  BidiskDomain d;
  d.radius = {radius_M, radius_N};
  d.expanding = {0};
  d.contracting = {1};
  d.inner_M = d.inner_N = inner;
  d.mid_M = d.mid_N = mid;
  d.validate();
  return d;
}

double BidiskDomain::radius_M() const {
  double r = 0.0;
  for (auto i : expanding) r = std::max(r, radius[i]);
  return r;
}

double BidiskDomain::radius_N() const {
  double r = 0.0;
  for (auto i : contracting) r = std::max(r, radius[i]);
  return r;
}

bool BidiskDomain::contains(const ComplexPoint& z, double scale_M, double scale_N) const {
  require(static_cast<std::size_t>(z.size()) == k(), "point dimension does not match the domain");
  for (auto i : expanding) {
    if (std::abs(z[static_cast<Eigen::Index>(i)]) > scale_M * radius[i]) return false;
  }
  for (auto i : contracting) {
    if (std::abs(z[static_cast<Eigen::Index>(i)]) > scale_N * radius[i]) return false;
  }
  return true;
}

double BidiskDomain::outside_margin(const ComplexPoint& z) const {
  require(static_cast<std::size_t>(z.size()) == k(), "point dimension does not match the domain");
  double m = 0.0;
  for (std::size_t i = 0; i < k(); ++i) {
    m = std::max(m, std::abs(z[static_cast<Eigen::Index>(i)]) / radius[i]);
  }
  return m - 1.0;
}

double BidiskDomain::default_escape_radius() const { return 2.0 * radius_M() + 2.0 * radius_N(); }

double BidiskDomain::epsilon0() const {
  double e = std::numeric_limits<double>::infinity();
  for (auto i : expanding) e = std::min(e, (1.0 - mid_M) * radius[i]);
  for (auto i : contracting) e = std::min(e, (1.0 - mid_N) * radius[i]);
  return e;
}

void BidiskDomain::validate() const {
  require(k() >= 2 && k() <= static_cast<std::size_t>(kMaxDim),
          fmt::format("domain dimension {} outside [2, {}]", k(), kMaxDim));
  require(p() >= 1 && p() <= k() - 1, fmt::format("expanding dimension {} outside [1, k-1]", p()));
  require(p() + contracting.size() == k(), "expanding and contracting blocks must partition the coordinates");
  std::vector<int> seen(k(), 0);
  for (auto i : expanding) {
    require(i < k(), "expanding coordinate index out of range");
    ++seen[i];
  }
  for (auto i : contracting) {
    require(i < k(), "contracting coordinate index out of range");
    ++seen[i];
  }
  for (int s : seen) require(s == 1, "expanding and contracting blocks must partition the coordinates");
  for (double r : radius) require(r > 0.0 && std::isfinite(r), "domain radii must be positive and finite");
  require(0.0 < inner_M && inner_M < mid_M && mid_M < 1.0, "shrink factors must satisfy 0 < M'' < M' < 1");
  require(0.0 < inner_N && inner_N < mid_N && mid_N < 1.0, "shrink factors must satisfy 0 < N'' < N' < 1");
}

// ---------------------------------------------------------------------------
// HenonMap construction

namespace {

void validate_factor(const HenonFactor& h) {
  require(h.poly.degree() >= 2,
          fmt::format("generalized Henon factor needs polynomial degree >= 2, got {}", h.poly.degree()));
  require(h.shear != Complex(0.0, 0.0), "generalized Henon factor needs a nonzero shear coefficient");
  for (const Complex& c : h.poly.coefficients()) {
    require(std::isfinite(c.real()) && std::isfinite(c.imag()), "polynomial coefficients must be finite");
  }
  require(std::isfinite(h.shear.real()) && std::isfinite(h.shear.imag()), "shear must be finite");
}

void validate_planar_domain(const BidiskDomain& d) {
  d.validate();
  require(d.k() == 2 && d.p() == 1, "generalized Henon maps live on a planar bidisk (k = 2, p = 1)");
  require(d.expanding[0] == 0, "planar bidisk must expand along the first coordinate");
}

std::string format_complex(Complex c) {
  if (c.imag() == 0.0) return fmt::format("{}", c.real());
  return fmt::format("({}{:+}i)", c.real(), c.imag());
}

std::string format_factor(const HenonFactor& h) {
  std::string poly;
  const auto& c = h.poly.coefficients();
  for (std::size_t i = c.size(); i-- > 0;) {
    if (c[i] == Complex(0.0, 0.0)) continue;
    if (!poly.empty()) poly += " + ";
    poly += format_complex(c[i]);
    if (i >= 1) poly += "x";
    if (i >= 2) poly += fmt::format("^{}", i);
  }
  return fmt::format("henon[p = {}, a = {}]", poly, format_complex(h.shear));
}

}  // namespace

HenonMap HenonMap::generalized(Polynomial poly, Complex shear, BidiskDomain domain) {
  return composition({HenonFactor{std::move(poly), shear}}, std::move(domain));
}

HenonMap HenonMap::composition(std::vector<HenonFactor> factors, BidiskDomain domain) {
  require(!factors.empty(), "composition needs at least one factor");
  validate_planar_domain(domain);
  HenonMap f;
  f.kind_ = factors.size() == 1 ? Kind::GeneralizedHenon : Kind::Composition;
  f.degree_ = 1;
  for (const auto& h : factors) {
    validate_factor(h);
    f.degree_ *= h.poly.degree();
  }
  f.factors_ = std::move(factors);
  f.domain_ = std::move(domain);
  return f;
}

HenonMap product(const HenonMap& f1, const HenonMap& f2) {
  const BidiskDomain& d1 = f1.domain();
  const BidiskDomain& d2 = f2.domain();
  const std::size_t k = d1.k() + d2.k();
  require(k <= static_cast<std::size_t>(kMaxDim), "product dimension exceeds kMaxDim");
  const std::size_t p1 = d1.p(), p2 = d2.p(), q1 = d1.k() - p1;

  HenonMap f;
  f.kind_ = HenonMap::Kind::Product;
  f.degree_ = f1.main_degree() * f2.main_degree();
  f.parts_ = {std::make_shared<const HenonMap>(f1), std::make_shared<const HenonMap>(f2)};
  f.first_slots_.assign(d1.k(), 0);
  f.second_slots_.assign(d2.k(), 0);
  for (std::size_t i = 0; i < p1; ++i) f.first_slots_[d1.expanding[i]] = i;
  for (std::size_t i = 0; i < p2; ++i) f.second_slots_[d2.expanding[i]] = p1 + i;
  for (std::size_t i = 0; i < q1; ++i) f.first_slots_[d1.contracting[i]] = p1 + p2 + i;
  for (std::size_t i = 0; i < d2.contracting.size(); ++i) {
    f.second_slots_[d2.contracting[i]] = p1 + p2 + q1 + i;
  }

  BidiskDomain d;
  d.radius.assign(k, 0.0);
  for (std::size_t j = 0; j < d1.k(); ++j) d.radius[f.first_slots_[j]] = d1.radius[j];
  for (std::size_t j = 0; j < d2.k(); ++j) d.radius[f.second_slots_[j]] = d2.radius[j];
  for (std::size_t i = 0; i < p1 + p2; ++i) d.expanding.push_back(i);
  for (std::size_t i = p1 + p2; i < k; ++i) d.contracting.push_back(i);
  d.inner_M = std::max(d1.inner_M, d2.inner_M);
  d.mid_M = std::min(d1.mid_M, d2.mid_M);
  d.inner_N = std::max(d1.inner_N, d2.inner_N);
  d.mid_N = std::min(d1.mid_N, d2.mid_N);
  if (d.inner_M >= d.mid_M) d.inner_M = d.mid_M / 2.0;
  if (d.inner_N >= d.mid_N) d.inner_N = d.mid_N / 2.0;
  d.validate();
  f.domain_ = std::move(d);
  return f;
}

HenonMap doubled(const HenonMap& g) {
  const BidiskDomain& d0 = g.domain();
  const std::size_t k0 = d0.k();
  require(2 * k0 <= static_cast<std::size_t>(kMaxDim), "doubled dimension exceeds kMaxDim");

  HenonMap f;
  f.kind_ = HenonMap::Kind::Doubled;
  f.degree_ = g.main_degree() * g.main_degree();
  f.parts_ = {std::make_shared<const HenonMap>(g)};

  BidiskDomain d;
  d.radius = d0.radius;
  d.radius.insert(d.radius.end(), d0.radius.begin(), d0.radius.end());
  // f^{-1} expands along the N block of the second copy.
  d.expanding = d0.expanding;
  for (auto j : d0.contracting) d.expanding.push_back(k0 + j);
  d.contracting = d0.contracting;
  for (auto i : d0.expanding) d.contracting.push_back(k0 + i);
  d.inner_M = std::max(d0.inner_M, d0.inner_N);
  d.mid_M = std::min(d0.mid_M, d0.mid_N);
  d.inner_N = d.inner_M;
  d.mid_N = d.mid_M;
  if (d.inner_M >= d.mid_M) d.inner_M = d.inner_N = d.mid_M / 2.0;
  d.validate();
  f.domain_ = std::move(d);
  return f;
}

std::string HenonMap::describe() const {
  switch (kind_) {
    case Kind::GeneralizedHenon:
      return format_factor(factors_[0]);
    case Kind::Composition: {
      std::string s = "composition[";
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += ", ";
        s += format_factor(factors_[i]);
      }
      return s + "]";
    }
    case Kind::Product:
      return fmt::format("product[{}, {}]", first().describe(), second().describe());
    case Kind::Doubled:
      return fmt::format("doubled[{}]", base().describe());
  }
  return {};
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

void check_dimension(const HenonMap& f, const ComplexPoint& z) {
  if (static_cast<std::size_t>(z.size()) != f.dimension()) {
    throw ContractViolation(
        fmt::format("point has dimension {}, map expects {}", z.size(), f.dimension()));
  }
}

ComplexMatrix step_jacobian(const HenonMap& f, const ComplexPoint& z, bool inverse) {
  const auto k = static_cast<Eigen::Index>(f.dimension());
  ComplexMatrix j(k, k);
  if (inverse) {
    detail::backward_jacobian(f, z.data(), j.data());
  } else {
    detail::forward_jacobian(f, z.data(), j.data());
  }
  return j;
}

}  // namespace

ComplexPoint eval(const HenonMap& f, const ComplexPoint& z) {
  check_dimension(f, z);
  ComplexPoint w = z;
  detail::forward(f, w.data());
  return w;
}

ComplexPoint eval_inverse(const HenonMap& f, const ComplexPoint& z) {
  check_dimension(f, z);
  ComplexPoint w = z;
  detail::backward(f, w.data());
  return w;
}

ComplexMatrix jacobian(const HenonMap& f, const ComplexPoint& z) {
  check_dimension(f, z);
  return step_jacobian(f, z, false);
}

ComplexMatrix inverse_jacobian(const HenonMap& f, const ComplexPoint& z) {
  check_dimension(f, z);
  return step_jacobian(f, z, true);
}

OrbitJet propagate(const HenonMap& f, const ComplexPoint& z, int steps,
                   std::optional<double> escape_radius) {
  check_dimension(f, z);
  const auto k = static_cast<Eigen::Index>(f.dimension());
  const bool inverse = steps < 0;
  OrbitJet jet;
  jet.image = z;
  jet.jacobian = ComplexMatrix::Identity(k, k);
  for (int s = 0; s < std::abs(steps); ++s) {
    const ComplexMatrix step = step_jacobian(f, jet.image, inverse);
    jet.jacobian = (step * jet.jacobian).eval();
    if (inverse) {
      detail::backward(f, jet.image.data());
    } else {
      detail::forward(f, jet.image.data());
    }
    if (escape_radius && !(max_modulus(jet.image) <= *escape_radius)) {
      jet.escaped = true;
      break;
    }
  }
  return jet;
}

ComplexPoint iterate_point(const HenonMap& f, const ComplexPoint& z, int steps) {
  check_dimension(f, z);
  ComplexPoint w = z;
  for (int s = 0; s < std::abs(steps); ++s) {
    if (steps < 0) {
      detail::backward(f, w.data());
    } else {
      detail::forward(f, w.data());
    }
  }
  return w;
}

OrbitResult iterate(const HenonMap& f, const ComplexPoint& z, std::size_t n, double escape_radius) {
  check_dimension(f, z);
  require(escape_radius > 0.0, "escape radius must be positive");
  OrbitResult out;
  out.points.reserve(n + 1);
  out.points.push_back(z);
  const double n0 = max_modulus(z);
  if (!(n0 <= escape_radius)) {
    out.escaped = Escaped{0, n0};
    return out;
  }
  ComplexPoint w = z;
  for (std::size_t s = 1; s <= n; ++s) {
    detail::forward(f, w.data());
    out.points.push_back(w);
    const double norm = max_modulus(w);
    if (!(norm <= escape_radius)) {
      out.escaped = Escaped{s, norm};
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Henon-like validity

namespace {

constexpr double kMarginSlack = 1e-12;

Complex random_in_disk(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rho = r * std::sqrt(u(rng));
  const double theta = 2.0 * std::numbers::pi * u(rng);
  return std::polar(rho, theta);
}

Complex random_on_circle(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(r, 2.0 * std::numbers::pi * u(rng));
}

// A point of D with coordinate `pinned` on its boundary circle. Remaining
// coordinates are drawn on their circles half of the time, since the
// extreme corners of the polydisk are where the margins are tightest.
ComplexPoint boundary_sample(const BidiskDomain& d, std::size_t pinned, std::mt19937_64& rng) {
  std::bernoulli_distribution corner(0.5);
  ComplexPoint z(static_cast<Eigen::Index>(d.k()));
  for (std::size_t i = 0; i < d.k(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (i == pinned || corner(rng)) {
      z[ii] = random_on_circle(rng, d.radius[i]);
    } else {
      z[ii] = random_in_disk(rng, d.radius[i]);
    }
  }
  return z;
}

double block_excess(const BidiskDomain& d, const std::vector<std::size_t>& block, const ComplexPoint& w) {
  double m = 0.0;
  for (auto i : block) m = std::max(m, std::abs(w[static_cast<Eigen::Index>(i)]) / d.radius[i]);
  return m - 1.0;
}

}  // namespace

ValidityReport check_henon_like(const HenonMap& f, std::size_t samples, std::uint64_t seed) {
  require(samples >= 1, "check_henon_like needs at least one sample");
  const BidiskDomain& d = f.domain();
  ValidityReport rep;
  std::mt19937_64 rng(seed);

  // (1) f pushes the vertical boundary out through the M block.
  double vmin = std::numeric_limits<double>::infinity();
  std::optional<ComplexPoint> vworst;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t pinned = d.expanding[s % d.p()];
    const ComplexPoint z = boundary_sample(d, pinned, rng);
    const double m = block_excess(d, d.expanding, eval(f, z));
    if (m < vmin) {
      vmin = m;
      vworst = z;
    }
  }
  rep.vertical_boundary_margin = vmin;

  // (2) f^{-1} pushes the horizontal boundary out through the N block.
  double hmin = std::numeric_limits<double>::infinity();
  std::optional<ComplexPoint> hworst;
  const std::size_t q = d.contracting.size();
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t pinned = d.contracting[s % q];
    const ComplexPoint w = boundary_sample(d, pinned, rng);
    const double m = block_excess(d, d.contracting, eval_inverse(f, w));
    if (m < hmin) {
      hmin = m;
      hworst = w;
    }
  }
  rep.horizontal_boundary_margin = hmin;

  // (3) The graph over D is nonempty; record the shrinks it actually needs.
  for (std::size_t s = 0; s < samples; ++s) {
    ComplexPoint z(static_cast<Eigen::Index>(d.k()));
    for (std::size_t i = 0; i < d.k(); ++i) z[static_cast<Eigen::Index>(i)] = random_in_disk(rng, d.radius[i]);
    const ComplexPoint w = eval(f, z);
    if (!d.contains(w)) continue;
    ++rep.graph_samples;
    rep.measured_inner_M = std::max(rep.measured_inner_M, block_excess(d, d.expanding, z) + 1.0);
    rep.measured_inner_N = std::max(rep.measured_inner_N, block_excess(d, d.contracting, w) + 1.0);
  }
  rep.nested_domains_consistent = rep.graph_samples > 0 && rep.measured_inner_M <= d.inner_M &&
                                  rep.measured_inner_N <= d.inner_N;

  if (rep.vertical_boundary_margin < -kMarginSlack) {
    rep.failure = fmt::format("vertical boundary sample maps into D (margin {:.3e})", vmin);
    rep.failing_sample = vworst;
  } else if (rep.horizontal_boundary_margin < -kMarginSlack) {
    rep.failure = fmt::format("horizontal boundary sample maps into D under the inverse (margin {:.3e})", hmin);
    rep.failing_sample = hworst;
  } else if (rep.graph_samples == 0) {
    rep.failure = "no sampled point of D maps into D (empty graph)";
  }
  rep.pass = rep.failure.empty();
  return rep;
}

}  // namespace henonlab
