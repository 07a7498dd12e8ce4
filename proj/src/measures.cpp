#include "henonlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace henonlab {

namespace {

double cutoff(double s) {
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

// sup over [0, 1) of |psi'(s)| = psi(s) 2s / (1 - s^2)^2, sampled densely and padded.
double cutoff_slope_bound() {
  static const double bound = [] {
    double best = 0.0;
    for (int i = 1; i < 200000; ++i) {
      const double s = i / 200000.0;
      const double t = 1.0 - s * s;
      best = std::max(best, cutoff(s) * 2.0 * s / (t * t));
    }
    return best * 1.01;
  }();
  return bound;
}

}  // namespace

double TestFunction::operator()(const ComplexPoint& z) const {
  switch (kind) {
    case Kind::Constant:
      return 1.0;
    case Kind::Gaussian:
      return std::exp(-(z - center).squaredNorm() / (2.0 * width * width));
    case Kind::Monomial: {
      double c = 1.0;
      for (std::size_t i = 0; i < scale.size(); ++i) {
        c *= cutoff(std::abs(z[static_cast<Eigen::Index>(i)]) / scale[i]);
        if (c == 0.0) return 0.0;
      }
      double m = 1.0;
      for (std::size_t j = 0; j < exponents.size(); ++j) {
        if (exponents[j] == 0) continue;
        const Complex zi = z[static_cast<Eigen::Index>(j / 2)];
        const double x = (j % 2 == 0 ? zi.real() : zi.imag()) / scale[j / 2];
        m *= std::pow(x, exponents[j]);
      }
      return m * c;
    }
  }
  return 0.0;
}

TestFunction TestFunction::constant() { return TestFunction{}; }

TestFunction TestFunction::gaussian(const ComplexPoint& center, double width) {
  require(width > 0.0, "Gaussian width must be positive");
  require(all_finite(center), "Gaussian center must be finite");
  TestFunction t;
  t.kind = Kind::Gaussian;
  t.center = center;
  t.width = width;
  t.lipschitz_bound = 1.0 / (width * std::sqrt(std::numbers::e));
  return t;
}

TestFunction TestFunction::monomial(std::vector<int> exponents, std::vector<double> radii) {
  require(exponents.size() == 2 * radii.size(), "monomial needs one exponent per real coordinate");
  for (double r : radii) require(r > 0.0, "monomial radii must be positive");
  for (int e : exponents) require(e >= 0, "monomial exponents must be nonnegative");
  TestFunction t;
  t.kind = Kind::Monomial;
  // On the support every |x_j / r_j| <= 1 and the cutoff is <= 1.
  double grad_m = 0.0;
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    const double g = exponents[j] / radii[j / 2];
    grad_m += g * g;
  }
  double inv_r = 0.0;
  for (double r : radii) inv_r += 1.0 / (r * r);
  t.lipschitz_bound = std::sqrt(grad_m) + cutoff_slope_bound() * std::sqrt(inv_r);
  t.exponents = std::move(exponents);
  t.scale = std::move(radii);
  return t;
}

std::vector<TestFunction> standard_bank(const BidiskDomain& domain) {
  domain.validate();
  const std::size_t k = domain.k();
  std::vector<double> mid(k);
  for (auto i : domain.expanding) mid[i] = domain.mid_M;
  for (auto i : domain.contracting) mid[i] = domain.mid_N;

  std::vector<ComplexPoint> centers;
  for (std::uint64_t idx = 1; idx <= 32; ++idx) {
    ComplexPoint c(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      const double h1 = halton(idx, nth_prime(static_cast<unsigned>(2 * i)));
      const double h2 = halton(idx, nth_prime(static_cast<unsigned>(2 * i + 1)));
      c[static_cast<Eigen::Index>(i)] =
          std::polar(mid[i] * domain.radius[i] * std::sqrt(h1), 2.0 * std::numbers::pi * h2);
    }
    centers.push_back(c);
  }

  std::vector<TestFunction> bank;
  for (double frac : {0.25, 0.5}) {
    for (const auto& c : centers) bank.push_back(TestFunction::gaussian(c, frac * domain.radius_M()));
  }
  const std::size_t reals = 2 * k;
  for (std::size_t j = 0; j < reals; ++j) {
    std::vector<int> e(reals, 0);
    e[j] = 1;
    bank.push_back(TestFunction::monomial(e, domain.radius));
  }
  for (std::size_t j = 0; j < reals; ++j) {
    for (std::size_t l = j; l < reals; ++l) {
      std::vector<int> e(reals, 0);
      ++e[j];
      ++e[l];
      bank.push_back(TestFunction::monomial(e, domain.radius));
    }
  }
  return bank;
}

namespace {

double pairwise_sum(const EmpiricalMeasure& m, const TestFunction& phi, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += m.atoms[i].weight * phi(m.atoms[i].location);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(m, phi, lo, mid) + pairwise_sum(m, phi, mid, hi);
}

}  // namespace

double pair(const EmpiricalMeasure& m, const TestFunction& phi) {
  return pairwise_sum(m, phi, 0, m.atoms.size());
}

Discrepancy discrepancy(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2,
                        const std::vector<TestFunction>& bank, unsigned threads) {
  require(!bank.empty(), "discrepancy needs a nonempty bank");
  std::vector<double> gaps(bank.size());
  parallel_for(bank.size(), threads,
               [&](std::size_t i) { gaps[i] = std::abs(pair(m1, bank[i]) - pair(m2, bank[i])); });
  Discrepancy d;
  d.value = gaps[0];
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    if (gaps[i] > d.value) {
      d.value = gaps[i];
      d.argmax_function = i;
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Oracle for mu

HolomorphicSystem oracle_system(const HenonMap& f, int n, const ComplexPoint& a, const ComplexPoint& b,
                                double escape_radius) {
  require(n >= 0, "oracle depth must be nonnegative");
  const BidiskDomain& d = f.domain();
  require(static_cast<std::size_t>(a.size()) == d.p(), "anchor a must have the M-block dimension");
  require(static_cast<std::size_t>(b.size()) == d.k() - d.p(), "anchor b must have the N-block dimension");
  HolomorphicSystem s;
  s.dimension = d.k();
  require(escape_radius > 0.0, "escape radius must be positive");
  const double esc = escape_radius;
  s.evaluate = [f, n, a, b, esc](const ComplexPoint& z, ComplexPoint& value, ComplexMatrix& jac) {
    const OrbitJet fwd = propagate(f, z, n, esc);
    if (fwd.escaped) return false;
    const OrbitJet bwd = propagate(f, z, -n, esc);
    if (bwd.escaped) return false;
    const BidiskDomain& dom = f.domain();
    const auto k = static_cast<Eigen::Index>(dom.k());
    value.resize(k);
    jac.resize(k, k);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < dom.expanding.size(); ++i, ++row) {
      const auto c = static_cast<Eigen::Index>(dom.expanding[i]);
      value[row] = fwd.image[c] - a[static_cast<Eigen::Index>(i)];
      jac.row(row) = fwd.jacobian.row(c);
    }
    for (std::size_t j = 0; j < dom.contracting.size(); ++j, ++row) {
      const auto c = static_cast<Eigen::Index>(dom.contracting[j]);
      value[row] = bwd.image[c] - b[static_cast<Eigen::Index>(j)];
      jac.row(row) = bwd.jacobian.row(c);
    }
    return true;
  };
  return s;
}

namespace {

std::vector<ComplexPoint> perturbation_clouds(const std::vector<RootRecord>& prev, const BidiskDomain& d,
                                              const OracleConfig& config, int depth) {
  double rmin = std::numeric_limits<double>::infinity();
  for (double r : d.radius) rmin = std::min(rmin, r);
  std::vector<ComplexPoint> seeds;
  seeds.reserve(prev.size() * config.cloud_size);
  for (std::size_t i = 0; i < prev.size(); ++i) {
    double nn = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < prev.size(); ++j) {
      if (j != i) nn = std::min(nn, (prev[i].location - prev[j].location).norm());
    }
    const double half = config.cloud_scale * std::min(nn, 0.25 * rmin);
    std::mt19937_64 rng(mix_seed(config.solver.seed, (static_cast<std::uint64_t>(depth) << 40) + i));
    std::uniform_real_distribution<double> u(-half, half);
    for (std::size_t s = 0; s < config.cloud_size; ++s) {
      ComplexPoint z = prev[i].location;
      for (Eigen::Index c = 0; c < z.size(); ++c) z[c] += Complex(u(rng), u(rng));
      seeds.push_back(z);
    }
  }
  return seeds;
}

std::size_t power(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) {
    require(r <= std::numeric_limits<std::size_t>::max() / base, "expected count overflows");
    r *= base;
  }
  return r;
}

}  // namespace

OracleResult mu_oracle(const HenonMap& f, int n, const ComplexPoint& a, const ComplexPoint& b,
                       const OracleConfig& config) {
  require(n >= 0, "oracle depth must be nonnegative");
  const BidiskDomain& d = f.domain();
  require(static_cast<std::size_t>(a.size()) == d.p() && static_cast<std::size_t>(b.size()) == d.k() - d.p(),
          "anchor dimensions must match the M and N blocks");
  for (std::size_t i = 0; i < d.p(); ++i) {
    require(std::abs(a[static_cast<Eigen::Index>(i)]) < d.mid_M * d.radius[d.expanding[i]],
            "vertical anchor line must meet D'");
  }
  for (std::size_t j = 0; j < d.contracting.size(); ++j) {
    require(std::abs(b[static_cast<Eigen::Index>(j)]) < d.mid_N * d.radius[d.contracting[j]],
            "horizontal anchor line must meet D'");
  }

  const auto deg = static_cast<std::size_t>(f.main_degree());
  RootRecord start;
  start.location = ComplexPoint(static_cast<Eigen::Index>(d.k()));
  for (std::size_t i = 0; i < d.p(); ++i) start.location[static_cast<Eigen::Index>(d.expanding[i])] = a[static_cast<Eigen::Index>(i)];
  for (std::size_t j = 0; j < d.contracting.size(); ++j) start.location[static_cast<Eigen::Index>(d.contracting[j])] = b[static_cast<Eigen::Index>(j)];

  OracleResult out;
  out.depth = n;
  out.anchor_a = a;
  out.anchor_b = b;
  if (n == 0) {
    out.census = cluster_roots({start}, 1, config.solver);
  } else if (!config.hierarchical) {
    out.census = solve_all(oracle_system(f, n, a, b, config.escape_radius), d, config.solver, power(deg, 2 * n));
  } else {
    std::vector<RootRecord> prev{start};
    for (int depth = 1; depth <= n; ++depth) {
      const HolomorphicSystem sys = oracle_system(f, depth, a, b, config.escape_radius);
      const std::size_t expected = power(deg, 2 * depth);
      std::vector<ComplexPoint> seeds = perturbation_clouds(prev, d, config, depth);
      std::vector<RootRecord> raw = refine_seeds(sys, d, seeds, config.solver);
      CensusResult c = cluster_roots(raw, expected, config.solver);
      if (!c.complete()) {
        // Clouds missed some roots: add the lattice and random seeds.
        const std::vector<ComplexPoint> grid = seed_points(d, config.solver);
        const std::vector<RootRecord> more = refine_seeds(sys, d, grid, config.solver);
        raw.insert(raw.end(), more.begin(), more.end());
        seeds.insert(seeds.end(), grid.begin(), grid.end());
        c = cluster_roots(std::move(raw), expected, config.solver);
      }
      c.seeds_tried = seeds.size();
      prev = c.roots;
      out.census = std::move(c);
    }
  }
  const double w = 1.0 / static_cast<double>(power(deg, 2 * n));
  for (const auto& r : out.census.roots) out.measure.add(r.location, w * r.multiplicity);
  return out;
}

double oracle_stability(const std::vector<EmpiricalMeasure>& oracles,
                        const std::vector<TestFunction>& bank, unsigned threads) {
  require(oracles.size() >= 2, "oracle stability needs at least two anchors");
  double worst = 0.0;
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    for (std::size_t j = i + 1; j < oracles.size(); ++j) {
      worst = std::max(worst, discrepancy(oracles[i], oracles[j], bank, threads).value);
    }
  }
  return worst;
}

double oracle_stability(const HenonMap& f, int n, const std::vector<Anchor>& anchors,
                        const std::vector<TestFunction>& bank, const OracleConfig& config) {
  require(anchors.size() >= 2, "oracle stability needs at least two anchors");
  std::vector<EmpiricalMeasure> oracles;
  for (const auto& an : anchors) oracles.push_back(mu_oracle(f, n, an.a, an.b, config).measure);
  return oracle_stability(oracles, bank, config.solver.threads);
}

}  // namespace henonlab
