#include "henonlab/transversal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace henonlab {

TangencySpectrum tangency_spectrum(const HenonMap& f, int n, const std::vector<PeriodicPoint>& census,
                                   double threshold) {
  require(n >= 1, "period must be at least 1");
  TangencySpectrum s;
  s.period = n;
  s.threshold = threshold;
  std::vector<double> sigmas;
  for (const auto& p : census) {
    TangencyRecord r;
    r.point = p.location;
    r.sigma_min = fixed_point_sigma_min(f, p.location, n);
    r.simple = r.sigma_min > threshold;
    r.multiplicity = p.multiplicity;
    if (r.simple) {
      ++s.simple_count;
    } else {
      ++s.below_threshold;
      s.multiplicity_excess += static_cast<std::size_t>(r.multiplicity);
    }
    sigmas.push_back(r.sigma_min);
    s.records.push_back(std::move(r));
  }
  if (!sigmas.empty()) {
    s.min = *std::min_element(sigmas.begin(), sigmas.end());
    s.median = median(sigmas);
  }
  return s;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {};
  const double nt = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double center = (ph + z2 / (2.0 * nt)) / (1.0 + z2 / nt);
  const double half = z * std::sqrt(ph * (1.0 - ph) / nt + z2 / (4.0 * nt * nt)) / (1.0 + z2 / nt);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

GraphStats graph_census_near_diagonal(const HenonMap& f, int n, const std::vector<PeriodicPoint>& census,
                                      const GraphSampleConfig& config) {
  require(n >= 1, "period must be at least 1");
  require(config.epsilon > 0.0 && config.epsilon < 0.5 * f.domain().epsilon0(),
          "epsilon must lie below half the margin between D' and the boundary of D");
  require(!census.empty(), "graph sampling needs a nonempty census");
  const std::size_t k = f.dimension();
  GraphStats st;
  st.period = n;
  st.epsilon = config.epsilon;
  st.eta = config.eta;
  st.attempted = config.samples;

  enum Outcome : char { Miss, Hit, TransverseHit };
  std::vector<Outcome> outcome(config.samples, Miss);
  const double esc = f.domain().default_escape_radius();
  parallel_for(config.samples, config.threads, [&](std::size_t i) {
    std::mt19937_64 rng(mix_seed(config.seed, i));
    std::uniform_int_distribution<std::size_t> pick(0, census.size() - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const ComplexPoint& start = census[pick(rng)].location;
    // Uniform point of the epsilon-ball in C^k = R^{2k}.
    ComplexPoint z(static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) z[static_cast<Eigen::Index>(j)] = Complex(gauss(rng), gauss(rng));
    z *= config.epsilon * std::pow(unif(rng), 1.0 / (2.0 * static_cast<double>(k))) / z.norm();

    HolomorphicSystem sys;
    sys.dimension = k;
    sys.evaluate = [&](const ComplexPoint& x, ComplexPoint& value, ComplexMatrix& jac) {
      OrbitJet jet = propagate(f, x, n, esc);
      if (jet.escaped) return false;
      value = jet.image - x - z;
      jac = jet.jacobian - ComplexMatrix::Identity(x.size(), x.size());
      return true;
    };
    const NewtonOutcome res =
        newton_refine(sys, start, config.solver.tol, config.solver.max_iter, config.solver.singular_threshold);
    const auto* root = std::get_if<RootRecord>(&res);
    if (!root || !f.domain().contains(root->location)) return;
    const ComplexPoint offset = iterate_point(f, root->location, n) - root->location;
    if (!(offset.norm() < config.epsilon)) return;
    outcome[i] = fixed_point_sigma_min(f, root->location, n) > config.eta ? TransverseHit : Hit;
  });
  for (Outcome o : outcome) {
    if (o == Miss) continue;
    ++st.near_diagonal;
    if (o == TransverseHit) ++st.transverse;
  }
  st.transverse_fraction =
      st.near_diagonal ? static_cast<double>(st.transverse) / static_cast<double>(st.near_diagonal) : 0.0;
  st.confidence = wilson_interval(st.transverse, st.near_diagonal);

  const TangencySpectrum spec = tangency_spectrum(f, n, census, config.solver.singular_threshold);
  st.simple_points = spec.simple_count;
  st.expected = 1;
  for (int j = 0; j < n; ++j) st.expected *= static_cast<std::size_t>(f.main_degree());
  st.simple_fraction = static_cast<double>(st.simple_points) / static_cast<double>(st.expected);
  return st;
}

namespace {

ComplexPoint diagonal_lift(const ComplexPoint& x) {
  ComplexPoint xx(2 * x.size());
  xx << x, x;
  return xx;
}

void require_doubled(const HenonMap& F, int n) {
  require(F.kind() == HenonMap::Kind::Doubled, "expected a doubled map");
  require(n >= 2 && n % 2 == 0, "the doubled-map correspondence needs an even period");
}

}  // namespace

HolomorphicSystem doubled_diagonal_system(const HenonMap& doubled_map, int n) {
  require_doubled(doubled_map, n);
  const auto k = static_cast<Eigen::Index>(doubled_map.base().dimension());
  const double esc = doubled_map.domain().default_escape_radius();
  HolomorphicSystem s;
  s.dimension = static_cast<std::size_t>(k);
  s.evaluate = [F = doubled_map, n, k, esc](const ComplexPoint& x, ComplexPoint& value, ComplexMatrix& jac) {
    const OrbitJet jet = propagate(F, diagonal_lift(x), -n / 2, esc);
    if (jet.escaped) return false;
    value = jet.image.head(k) - jet.image.tail(k);
    const ComplexMatrix& J = jet.jacobian;
    jac = J.topLeftCorner(k, k) + J.topRightCorner(k, k) - J.bottomLeftCorner(k, k) - J.bottomRightCorner(k, k);
    return true;
  };
  return s;
}

double doubled_sigma_min(const HenonMap& doubled_map, const ComplexPoint& x, int n) {
  require_doubled(doubled_map, n);
  const auto k = static_cast<Eigen::Index>(doubled_map.base().dimension());
  const OrbitJet jet = propagate(doubled_map, diagonal_lift(x), -n / 2);
  // A = D(f^{-n/2})_x and B = D(f^{n/2})_x; at a period point A^{-1} B = Df^n_x.
  const ComplexMatrix A = jet.jacobian.topLeftCorner(k, k);
  const ComplexMatrix B = jet.jacobian.bottomRightCorner(k, k);
  const ComplexMatrix M = A.partialPivLu().solve(B) - ComplexMatrix::Identity(k, k);
  return smallest_singular_value(M);
}

DoubledCorrespondence doubled_correspondence(const HenonMap& f, int n, const std::vector<PeriodicPoint>& census,
                                             const SolverConfig& solver, double location_tol, double sigma_tol) {
  const HenonMap F = doubled(f);
  require_doubled(F, n);
  DoubledCorrespondence c;
  c.period = n;
  std::size_t expected = 1;
  for (int j = 0; j < n; ++j) expected *= static_cast<std::size_t>(f.main_degree());
  c.diagonal = solve_all(doubled_diagonal_system(F, n), f.domain(), solver, expected);

  std::vector<bool> used(census.size(), false);
  for (const auto& root : c.diagonal.roots) {
    std::size_t best = census.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < census.size(); ++i) {
      const double d = (census[i].location - root.location).norm();
      if (!used[i] && d < best_d) {
        best_d = d;
        best = i;
      }
    }
    if (best == census.size()) continue;
    used[best] = true;
    const double scale = 1.0 + census[best].location.norm();
    c.max_location_error = std::max(c.max_location_error, best_d / scale);
    if (best_d > location_tol * scale) continue;
    ++c.matched;
    const double direct = fixed_point_sigma_min(f, census[best].location, n);
    const double via_doubled = doubled_sigma_min(F, census[best].location, n);
    c.max_sigma_rel_error = std::max(c.max_sigma_rel_error, std::abs(direct - via_doubled) / std::max(direct, 1e-300));
  }
  c.holds = c.diagonal.complete() && c.matched == census.size() && c.matched == c.diagonal.roots.size() &&
            c.max_sigma_rel_error <= sigma_tol;
  return c;
}

}  // namespace henonlab
