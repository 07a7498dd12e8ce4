#include "henonlab/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "henonlab/precision.hpp"

namespace henonlab {

std::string to_string(Stability s) { return s == Stability::Saddle ? "saddle" : "non-saddle"; }

std::string to_string(NonSaddleReason r) {
  switch (r) {
    case NonSaddleReason::None:
      return "none";
    case NonSaddleReason::UnitModulus:
      return "unit-modulus";
    case NonSaddleReason::AllExpanding:
      return "all-expanding";
    case NonSaddleReason::AllContracting:
      return "all-contracting";
    case NonSaddleReason::WrongIndex:
      return "wrong-index";
  }
  return "unknown";
}

namespace {

Direction span_or_empty(const ComplexMatrix& vectors) {
  if (vectors.cols() == 0) return {};
  try {
    return Direction::from_span(vectors);
  } catch (const ContractViolation&) {
    return {};
  }
}

bool modulus_order(const Complex& a, const Complex& b) {
  if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

PeriodicPoint classify_periodic(const HenonMap& f, const ComplexPoint& z, int n, double eta) {
  require(n >= 1, "period must be at least 1");
  require(eta > 0.0 && eta < 1.0, "unit-circle tolerance must lie in (0, 1)");
  const auto k = static_cast<Eigen::Index>(f.dimension());
  const ComplexMatrix fwd = propagate(f, z, n).jacobian;
  const ComplexMatrix bwd = propagate(f, z, -n).jacobian;
  Eigen::ComplexEigenSolver<ComplexMatrix> ef(fwd, true);
  Eigen::ComplexEigenSolver<ComplexMatrix> eb(bwd, true);

  std::vector<Eigen::Index> big_f, big_b;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (std::abs(ef.eigenvalues()[i]) >= 1.0) big_f.push_back(i);
    if (std::abs(eb.eigenvalues()[i]) > 1.0) big_b.push_back(i);
  }

  PeriodicPoint pp;
  pp.location = z;
  pp.period = n;
  ComplexMatrix unstable(k, 0), stable(k, 0);
  if (static_cast<Eigen::Index>(big_f.size() + big_b.size()) == k) {
    unstable.resize(k, static_cast<Eigen::Index>(big_f.size()));
    stable.resize(k, static_cast<Eigen::Index>(big_b.size()));
    for (std::size_t c = 0; c < big_f.size(); ++c) {
      pp.multipliers.push_back(ef.eigenvalues()[big_f[c]]);
      unstable.col(static_cast<Eigen::Index>(c)) = ef.eigenvectors().col(big_f[c]);
    }
    for (std::size_t c = 0; c < big_b.size(); ++c) {
      pp.multipliers.push_back(1.0 / eb.eigenvalues()[big_b[c]]);
      stable.col(static_cast<Eigen::Index>(c)) = eb.eigenvectors().col(big_b[c]);
    }
  } else {
    // Spectrum touching the unit circle: fall back to Df^n alone.
    std::vector<Eigen::Index> up, down;
    for (Eigen::Index i = 0; i < k; ++i) {
      pp.multipliers.push_back(ef.eigenvalues()[i]);
      (std::abs(ef.eigenvalues()[i]) > 1.0 ? up : down).push_back(i);
    }
    unstable.resize(k, static_cast<Eigen::Index>(up.size()));
    stable.resize(k, static_cast<Eigen::Index>(down.size()));
    for (std::size_t c = 0; c < up.size(); ++c) unstable.col(static_cast<Eigen::Index>(c)) = ef.eigenvectors().col(up[c]);
    for (std::size_t c = 0; c < down.size(); ++c) stable.col(static_cast<Eigen::Index>(c)) = ef.eigenvectors().col(down[c]);
  }
  std::sort(pp.multipliers.begin(), pp.multipliers.end(), modulus_order);
  pp.unstable_basis = span_or_empty(unstable);
  pp.stable_basis = span_or_empty(stable);

  std::size_t expanding = 0, contracting = 0, unit = 0;
  for (const Complex& m : pp.multipliers) {
    const double r = std::abs(m);
    if (r > 1.0 + eta) {
      ++expanding;
    } else if (r < 1.0 - eta) {
      ++contracting;
    } else {
      ++unit;
    }
  }
  const std::size_t p = f.expanding_dimension();
  if (unit > 0) {
    pp.reason = NonSaddleReason::UnitModulus;
  } else if (contracting == 0) {
    pp.reason = NonSaddleReason::AllExpanding;
  } else if (expanding == 0) {
    pp.reason = NonSaddleReason::AllContracting;
  } else if (expanding != p) {
    pp.reason = NonSaddleReason::WrongIndex;
  }
  pp.stability = pp.reason == NonSaddleReason::None ? Stability::Saddle : Stability::NonSaddle;
  pp.sigma_min = fixed_point_sigma_min(f, z, n);

  for (int m = 1; m < n; ++m) {
    if (n % m != 0) continue;
    const ComplexPoint w = iterate_point(f, z, m);
    if ((w - z).norm() <= 1e-7 * (1.0 + z.norm())) {
      pp.minimal_period = m;
      break;
    }
  }
  if (!pp.minimal_period) pp.minimal_period = n;
  return pp;
}

PeriodicCensus find_periodic(const HenonMap& f, int n, const PeriodicConfig& config) {
  require(n >= 1, "period must be at least 1");
  const double expected_d = std::pow(static_cast<double>(f.main_degree()), n);
  require(expected_d < 1e9, "expected census size too large");
  const auto expected = static_cast<std::size_t>(std::llround(expected_d));

  const HolomorphicSystem system = balanced_fixed_point_system(f, n);
  const BidiskDomain& region = f.domain();
  SolverConfig solver = config.solver;
  if (config.auto_density && f.dimension() == 2) {
    const std::size_t scaled = std::size_t{16} << std::min(n / 2, 8);
    solver.grid_density = std::max(solver.grid_density, scaled);
  }
  const auto lattice_size = [&](std::size_t density) {
    return std::pow(static_cast<double>(density * solver.imag_levels), static_cast<double>(region.k()));
  };
  const double cap = f.dimension() > 2 ? static_cast<double>(config.max_lattice) : INFINITY;
  while (solver.grid_density > 2 && lattice_size(solver.grid_density) > cap) {
    --solver.grid_density;
  }
  std::vector<RootRecord> raw;
  std::size_t tried = 0;
  CensusResult census;
  for (int attempt = 0; attempt <= config.density_escalations; ++attempt) {
    std::vector<ComplexPoint> seeds = seed_points(region, solver);
    if (attempt == 0) seeds.insert(seeds.end(), config.hint_seeds.begin(), config.hint_seeds.end());
    std::vector<RootRecord> found = refine_seeds(system, region, seeds, solver);
    raw.insert(raw.end(), found.begin(), found.end());
    tried += seeds.size();
    census = cluster_roots(raw, expected, solver);

    // Orbit images of found points are period-n points too; seed from them.
    for (int round = 0; round < config.orbit_seed_rounds && !census.complete(); ++round) {
      std::vector<ComplexPoint> extra;
      for (const auto& r : census.roots) {
        ComplexPoint w = r.location;
        for (int j = 1; j < n; ++j) {
          w = eval(f, w);
          extra.push_back(w);
        }
      }
      if (extra.empty()) break;
      tried += extra.size();
      std::vector<RootRecord> more = refine_seeds(system, region, extra, solver);
      raw.insert(raw.end(), more.begin(), more.end());
      const std::size_t before = census.found_total;
      census = cluster_roots(raw, expected, solver);
      if (census.found_total == before) break;
    }
    if (census.complete()) break;
    if (lattice_size(2 * solver.grid_density) <= cap) {
      solver.grid_density *= 2;
    } else {
      const auto lattice = static_cast<std::size_t>(lattice_size(solver.grid_density));
      solver.random_seeds = 2 * solver.random_seeds.value_or(lattice);
    }
    solver.seed = mix_seed(solver.seed, static_cast<std::uint64_t>(attempt));
  }
  census.seeds_tried = tried;

  PeriodicCensus out;
  out.period = n;
  out.points.resize(census.roots.size());
  parallel_for(census.roots.size(), solver.threads, [&](std::size_t i) {
    const RootRecord& r = census.roots[i];
    ComplexPoint z = r.location;
    if (config.high_precision_polish && r.multiplicity == 1) {
      const ComplexPoint polished = refine_periodic_point(f, z, n);
      if (all_finite(polished) && (polished - z).norm() <= solver.dedup_tol) z = polished;
    }
    PeriodicPoint pp = classify_periodic(f, z, n, config.eta);
    pp.multiplicity = r.multiplicity;
    pp.residual = r.residual;
    out.points[i] = std::move(pp);
  });
  out.census = std::move(census);
  return out;
}

double saddle_fraction(const std::vector<PeriodicPoint>& census) {
  require(!census.empty(), "saddle_fraction of an empty census");
  double total = 0.0, saddle = 0.0;
  for (const auto& p : census) {
    total += p.multiplicity;
    if (p.stability == Stability::Saddle) saddle += p.multiplicity;
  }
  return saddle / total;
}

void EmpiricalMeasure::add(const ComplexPoint& z, double w) {
  require(w > 0.0 && std::isfinite(w), "atom weights must be positive");
  atoms.push_back(Atom{z, w});
  total_mass += w;
}

EmpiricalMeasure empirical_measure(const std::vector<PeriodicPoint>& census, double normalization) {
  require(normalization > 0.0, "normalization must be positive");
  EmpiricalMeasure m;
  for (const auto& p : census) m.add(p.location, static_cast<double>(p.multiplicity) / normalization);
  return m;
}

std::vector<PeriodicPoint> saddles_only(const std::vector<PeriodicPoint>& census) {
  std::vector<PeriodicPoint> out;
  for (const auto& p : census) {
    if (p.stability == Stability::Saddle) out.push_back(p);
  }
  return out;
}

}  // namespace henonlab
