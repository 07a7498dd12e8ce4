#include "henonlab/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace henonlab {

LiftedPoint lift_step(const HenonMap& f, const LiftedPoint& lp) {
  return LiftedPoint{eval(f, lp.base), push_forward(jacobian(f, lp.base), lp.direction)};
}

LiftedPoint lift_step_inverse(const HenonMap& f, const LiftedPoint& lp) {
  return LiftedPoint{eval_inverse(f, lp.base), push_forward(inverse_jacobian(f, lp.base), lp.direction)};
}

Direction unstable_direction(const PeriodicPoint& pp) {
  require(pp.stability == Stability::Saddle, "unstable_direction needs a saddle point");
  return pp.unstable_basis;
}

Direction stable_direction(const PeriodicPoint& pp) {
  require(pp.stability == Stability::Saddle, "stable_direction needs a saddle point");
  return pp.stable_basis;
}

DecayRecord direction_convergence(const HenonMap& f, const LiftedPoint& start,
                                  const PeriodicPoint& shadow_saddle, std::size_t steps,
                                  const ConvergenceOptions& options) {
  require(shadow_saddle.stability == Stability::Saddle, "direction_convergence needs a saddle orbit");
  const int n = shadow_saddle.period;

  // The saddle's orbit and its splitting at every orbit point.
  std::vector<PeriodicPoint> orbit;
  ComplexPoint w = shadow_saddle.location;
  for (int j = 0; j < n; ++j) {
    orbit.push_back(j == 0 ? shadow_saddle : classify_periodic(f, w, n));
    w = eval(f, w);
  }
  std::optional<std::size_t> at;
  for (std::size_t j = 0; j < orbit.size(); ++j) {
    if ((orbit[j].location - start.base).norm() <= 1e-6 * (1.0 + start.base.norm())) {
      at = j;
      break;
    }
  }
  require(at.has_value(), "start point is not on the shadow saddle's orbit");

  const bool rev = options.reverse_time;
  auto target = [&](std::size_t j) { return rev ? orbit[j].stable_basis : orbit[j].unstable_basis; };
  const Direction& avoid = rev ? orbit[*at].unstable_basis : orbit[*at].stable_basis;
  require(!avoid.empty() && !target(*at).empty(), "saddle splitting is unavailable");
  require(smallest_principal_angle(start.direction, avoid) > options.delta,
          "start direction lies within delta of the opposite splitting");

  DecayRecord rec;
  Direction v = start.direction;
  std::size_t j = *at;
  rec.distances.push_back(grassmann_distance(v, target(j)));
  for (std::size_t l = 1; l <= steps; ++l) {
    const ComplexPoint& x = orbit[j].location;
    v = push_forward(rev ? inverse_jacobian(f, x) : jacobian(f, x), v);
    j = rev ? (j + orbit.size() - 1) % orbit.size() : (j + 1) % orbit.size();
    rec.distances.push_back(grassmann_distance(v, target(j)));
  }

  std::vector<double> ls, logs;
  for (std::size_t l = 1; l < rec.distances.size(); ++l) {
    if (!(rec.distances[l] > options.floor)) break;
    ls.push_back(static_cast<double>(l));
    logs.push_back(std::log(rec.distances[l]));
  }
  if (ls.size() >= 2) {
    rec.fit = fit_line(ls, logs);
    rec.per_step_ratio = std::exp(rec.fit->slope);
  }
  return rec;
}

std::vector<LiftedAtom> oseledec_empirical(const std::vector<PeriodicPoint>& census, double normalization) {
  require(normalization > 0.0, "normalization must be positive");
  std::vector<LiftedAtom> atoms;
  for (const auto& p : census) {
    if (p.stability != Stability::Saddle) continue;
    atoms.push_back(LiftedAtom{p.location, p.unstable_basis, p.multiplicity / normalization});
  }
  return atoms;
}

EmpiricalMeasure project_to_base(const std::vector<LiftedAtom>& atoms) {
  EmpiricalMeasure m;
  for (const auto& a : atoms) m.add(a.base, a.weight);
  return m;
}

AlignmentStats tangent_alignment(const HenonMap& f, int n, const std::vector<ComplexPoint>& oracle_points,
                                 const std::vector<PeriodicPoint>& saddle_census, double radius,
                                 unsigned threads) {
  require(n >= 1, "alignment depth must be at least 1");
  require(radius > 0.0, "matching radius must be positive");
  const BidiskDomain& d = f.domain();
  const auto k = static_cast<Eigen::Index>(d.k());
  ComplexMatrix horizontal = ComplexMatrix::Zero(k, static_cast<Eigen::Index>(d.p()));
  ComplexMatrix vertical = ComplexMatrix::Zero(k, static_cast<Eigen::Index>(d.k() - d.p()));
  for (std::size_t i = 0; i < d.p(); ++i) horizontal(static_cast<Eigen::Index>(d.expanding[i]), static_cast<Eigen::Index>(i)) = 1.0;
  for (std::size_t j = 0; j < d.contracting.size(); ++j) vertical(static_cast<Eigen::Index>(d.contracting[j]), static_cast<Eigen::Index>(j)) = 1.0;

  struct Slot {
    bool matched = false;
    double unstable = 0.0, stable = 0.0;
  };
  std::vector<Slot> slots(oracle_points.size());
  parallel_for(oracle_points.size(), threads, [&](std::size_t i) {
    const ComplexPoint& z = oracle_points[i];
    const PeriodicPoint* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : saddle_census) {
      if (s.stability != Stability::Saddle) continue;
      const double dist = (s.location - z).norm();
      if (dist < best) {
        best = dist;
        nearest = &s;
      }
    }
    if (!nearest || best > radius) return;
    const ComplexPoint back = iterate_point(f, z, -n);
    const ComplexPoint fwd = iterate_point(f, z, n);
    const Direction tu = Direction::from_span(propagate(f, back, n).jacobian * horizontal);
    const Direction ts = Direction::from_span(propagate(f, fwd, -n).jacobian * vertical);
    slots[i].matched = true;
    slots[i].unstable = grassmann_distance(tu, nearest->unstable_basis);
    slots[i].stable = grassmann_distance(ts, nearest->stable_basis);
  });

  AlignmentStats st;
  st.depth = n;
  for (const auto& s : slots) {
    if (!s.matched) {
      ++st.excluded;
      continue;
    }
    ++st.matched;
    st.unstable_angles.push_back(s.unstable);
    st.stable_angles.push_back(s.stable);
    st.angles.push_back(std::max(s.unstable, s.stable));
  }
  if (st.matched > 0) {
    st.median = median(st.angles);
    st.p90 = percentile(st.angles, 0.9);
    st.unstable_median = median(st.unstable_angles);
    st.stable_median = median(st.stable_angles);
  }
  return st;
}

}  // namespace henonlab
