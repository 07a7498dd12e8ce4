#include "henonlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace henonlab {

namespace {

constexpr int kMaxHalvings = 30;
constexpr double kPseudoInverseRcond = 1e-14;

ComplexPoint newton_step(const ComplexMatrix& j, const ComplexPoint& g) {
  Eigen::PartialPivLU<ComplexMatrix> lu(j);
  if (lu.rcond() >= kPseudoInverseRcond && std::isfinite(lu.rcond())) {
    return -lu.solve(g);
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = (s.size() ? s[0] : 0.0) * kPseudoInverseRcond;
  ComplexPoint step = ComplexPoint::Zero(g.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff && s[i] > 0.0) {
      const Complex coef = svd.matrixU().col(i).dot(g) / s[i];
      step -= coef * svd.matrixV().col(i);
    }
  }
  return step;
}

struct Eval {
  ComplexPoint value;
  ComplexMatrix jacobian;
  double residual = std::numeric_limits<double>::infinity();
};

bool evaluate(const HolomorphicSystem& system, const ComplexPoint& z, Eval& out) {
  if (!all_finite(z)) return false;
  if (!system.evaluate(z, out.value, out.jacobian)) return false;
  out.residual = out.value.norm();
  return std::isfinite(out.residual);
}

}  // namespace

NewtonOutcome newton_refine(const HolomorphicSystem& system, const ComplexPoint& seed, double tol,
                            std::size_t max_iter, double singular_threshold) {
  require(static_cast<std::size_t>(seed.size()) == system.dimension,
          "seed dimension does not match the system");
  require(tol > 0.0, "Newton tolerance must be positive");
  ComplexPoint z = seed;
  Eval cur;
  if (!evaluate(system, z, cur)) return NoConvergence{z, std::numeric_limits<double>::infinity()};

  bool converged = cur.residual < tol;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const ComplexPoint step = newton_step(cur.jacobian, cur.value);
    Eval next;
    ComplexPoint trial;
    bool accepted = false;
    double t = 1.0;
    for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
      trial = z + t * step;
      if (evaluate(system, trial, next) && next.residual < cur.residual) {
        accepted = true;
        break;
      }
      if (converged) break;  // polishing takes full steps only
    }
    if (!accepted) break;
    z = trial;
    cur = std::move(next);
    if (cur.residual < tol) converged = true;
  }
  if (!converged) return NoConvergence{z, cur.residual};

  RootRecord r;
  r.location = z;
  r.residual = cur.residual;
  const Eigen::VectorXd sv = singular_values(cur.jacobian);
  r.jacobian_sigma_min = sv.size() ? sv[sv.size() - 1] : 0.0;
  r.multiplicity = std::max(1, static_cast<int>((sv.array() < singular_threshold).count()));
  return r;
}

// ---------------------------------------------------------------------------
// Multi-start census

std::vector<ComplexPoint> seed_points(const BidiskDomain& region, const SolverConfig& config) {
  require(config.grid_density >= 2, "grid_density must be at least 2 per complex dimension");
  require(config.imag_levels >= 1, "imag_levels must be at least 1");
  const std::size_t k = region.k();
  const std::size_t per_coord = config.grid_density * config.imag_levels;
  std::size_t lattice = 1;
  for (std::size_t i = 0; i < k; ++i) {
    require(lattice <= 50'000'000 / per_coord, "seed lattice too large");
    lattice *= per_coord;
  }

  auto axis = [&](std::size_t i, std::size_t idx, std::size_t count) {
    const double r = config.seed_scale * region.radius[i];
    if (count == 1) return 0.0;
    return -r + 2.0 * r * static_cast<double>(idx) / static_cast<double>(count - 1);
  };

  std::vector<ComplexPoint> seeds;
  const std::size_t random_count = config.random_seeds.value_or(lattice);
  seeds.reserve(lattice + random_count);
  for (std::size_t flat = 0; flat < lattice; ++flat) {
    ComplexPoint z(static_cast<Eigen::Index>(k));
    std::size_t rest = flat;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t c = rest % per_coord;
      rest /= per_coord;
      const double re = axis(i, c % config.grid_density, config.grid_density);
      const double im = axis(i, c / config.grid_density, config.imag_levels);
      z[static_cast<Eigen::Index>(i)] = Complex(re, im);
    }
    seeds.push_back(z);
  }
  for (std::size_t s = 0; s < random_count; ++s) {
    std::mt19937_64 rng(mix_seed(config.seed, s));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ComplexPoint z(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      const double r = config.seed_scale * region.radius[i] * std::sqrt(u(rng));
      z[static_cast<Eigen::Index>(i)] = std::polar(r, 2.0 * std::numbers::pi * u(rng));
    }
    seeds.push_back(z);
  }
  return seeds;
}

std::vector<RootRecord> refine_seeds(const HolomorphicSystem& system, const BidiskDomain& region,
                                     const std::vector<ComplexPoint>& seeds,
                                     const SolverConfig& config) {
  std::vector<std::optional<RootRecord>> slots(seeds.size());
  parallel_for(seeds.size(), config.threads, [&](std::size_t i) {
    NewtonOutcome out = newton_refine(system, seeds[i], config.tol, config.max_iter, config.singular_threshold);
    if (auto* r = std::get_if<RootRecord>(&out)) {
      // Slack keeps roots sitting exactly on the boundary of the region.
      if (region.contains(r->location, 1.0 + 1e-9, 1.0 + 1e-9)) slots[i] = std::move(*r);
    }
  });
  std::vector<RootRecord> roots;
  for (auto& s : slots) {
    if (s) roots.push_back(std::move(*s));
  }
  return roots;
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

CensusResult cluster_roots(std::vector<RootRecord> roots, std::size_t expected,
                           const SolverConfig& config) {
  require(config.dedup_tol > 0.0, "dedup_tol must be positive");
  std::sort(roots.begin(), roots.end(),
            [](const RootRecord& a, const RootRecord& b) { return lex_less(a.location, b.location); });

  // Single linkage. Sorted by Re z_0, so candidate partners form a window.
  const std::size_t m = roots.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    const double x0 = roots[i].location[0].real();
    for (std::size_t j = i + 1; j < m && roots[j].location[0].real() - x0 <= config.dedup_tol; ++j) {
      if ((roots[i].location - roots[j].location).norm() <= config.dedup_tol) {
        parent[find_root(parent, j)] = find_root(parent, i);
      }
    }
  }

  // Representative of each cluster: smallest residual, ties to the lexicographic first.
  std::vector<std::optional<std::size_t>> best(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = find_root(parent, i);
    if (!best[r] || roots[i].residual < roots[*best[r]].residual) best[r] = i;
  }
  CensusResult out;
  out.expected = expected;
  for (std::size_t i = 0; i < m; ++i) {
    if (best[i]) out.roots.push_back(roots[*best[i]]);
  }
  std::sort(out.roots.begin(), out.roots.end(),
            [](const RootRecord& a, const RootRecord& b) { return lex_less(a.location, b.location); });

  // Multiplicity starts from the rank deficiency set by newton_refine, then count matching.
  std::size_t found = 0;
  for (const auto& r : out.roots) found += static_cast<std::size_t>(r.multiplicity);

  std::vector<std::size_t> singular;
  for (std::size_t i = 0; i < out.roots.size(); ++i) {
    if (out.roots[i].jacobian_sigma_min < config.singular_threshold) singular.push_back(i);
  }
  std::stable_sort(singular.begin(), singular.end(), [&](std::size_t a, std::size_t b) {
    return out.roots[a].jacobian_sigma_min < out.roots[b].jacobian_sigma_min;
  });
  if (found < expected && !singular.empty()) {
    std::size_t deficit = expected - found;
    for (std::size_t idx : singular) {
      if (deficit == 0) break;
      if (out.roots[idx].multiplicity == 1) {
        ++out.roots[idx].multiplicity;
        --deficit;
      }
    }
    out.roots[singular.front()].multiplicity += static_cast<int>(deficit);
    found = expected;
  }
  out.found_total = found;
  if (found > expected) {
    throw CensusOverflow(fmt::format(
        "census found {} roots counting multiplicity but expected {} (dedup_tol too small or wrong expected count)",
        found, expected));
  }
  if (found == expected) {
    out.completeness = Complete{};
  } else {
    out.completeness = Incomplete{expected - found};
  }

  out.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.roots.size(); ++i) {
    for (std::size_t j = i + 1; j < out.roots.size(); ++j) {
      out.min_separation =
          std::min(out.min_separation, (out.roots[i].location - out.roots[j].location).norm());
    }
  }
  return out;
}

CensusResult solve_all(const HolomorphicSystem& system, const BidiskDomain& region,
                       const SolverConfig& config, std::size_t expected,
                       const std::vector<ComplexPoint>& extra_seeds) {
  require(region.k() == system.dimension, "region dimension does not match the system");
  std::vector<ComplexPoint> seeds = seed_points(region, config);
  seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());
  CensusResult out = cluster_roots(refine_seeds(system, region, seeds, config), expected, config);
  out.seeds_tried = seeds.size();
  return out;
}

// ---------------------------------------------------------------------------
// Fixed-point systems

ComplexMatrix fixed_point_jacobian(const HenonMap& f, const ComplexPoint& z, int n) {
  require(n >= 1, "period must be at least 1");
  OrbitJet jet = propagate(f, z, n);
  jet.jacobian -= ComplexMatrix::Identity(jet.jacobian.rows(), jet.jacobian.cols());
  return jet.jacobian;
}

double fixed_point_sigma_min(const HenonMap& f, const ComplexPoint& z, int n) {
  return smallest_singular_value(fixed_point_jacobian(f, z, n));
}

HolomorphicSystem fixed_point_system(const HenonMap& f, int n) {
  require(n >= 1, "period must be at least 1");
  HolomorphicSystem s;
  s.dimension = f.dimension();
  const double esc = f.domain().default_escape_radius();
  s.evaluate = [f, n, esc](const ComplexPoint& z, ComplexPoint& value, ComplexMatrix& jac) {
    OrbitJet jet = propagate(f, z, n, esc);
    if (jet.escaped) return false;
    value = jet.image - z;
    jac = jet.jacobian - ComplexMatrix::Identity(jet.jacobian.rows(), jet.jacobian.cols());
    return true;
  };
  return s;
}

HolomorphicSystem balanced_fixed_point_system(const HenonMap& f, int n) {
  require(n >= 1, "period must be at least 1");
  HolomorphicSystem s;
  s.dimension = f.dimension();
  const double esc = f.domain().default_escape_radius();
  const int forward = (n + 1) / 2;
  const int backward = n - forward;
  s.evaluate = [f, forward, backward, esc](const ComplexPoint& z, ComplexPoint& value,
                                           ComplexMatrix& jac) {
    OrbitJet a = propagate(f, z, forward, esc);
    if (a.escaped) return false;
    OrbitJet b = propagate(f, z, -backward, esc);
    if (b.escaped) return false;
    value = a.image - b.image;
    jac = a.jacobian - b.jacobian;
    return true;
  };
  return s;
}

}  // namespace henonlab
