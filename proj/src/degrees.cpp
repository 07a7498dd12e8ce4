#include "henonlab/degrees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "henonlab/periodic.hpp"

namespace henonlab {

namespace {

struct Cell {
  double r0, r1, t0, t1;
};

int signed_steps(int n, TimeDirection time) { return time == TimeDirection::Forward ? n : -n; }

ComplexPoint seed_point(const DiskSeed& seed, double rho, double theta) {
  return seed.center + std::polar(rho, theta) * seed.direction;
}

std::array<std::pair<double, double>, 5> cell_samples(const Cell& c) {
  return {{{c.r0, c.t0}, {c.r1, c.t0}, {c.r0, c.t1}, {c.r1, c.t1}, {0.5 * (c.r0 + c.r1), 0.5 * (c.t0 + c.t1)}}};
}

std::array<Cell, 4> split(const Cell& c) {
  const double rm = 0.5 * (c.r0 + c.r1), tm = 0.5 * (c.t0 + c.t1);
  return {{{c.r0, rm, c.t0, tm}, {rm, c.r1, c.t0, tm}, {c.r0, rm, tm, c.t1}, {rm, c.r1, tm, c.t1}}};
}

double cell_area(const Cell& c) { return 0.5 * (c.r1 * c.r1 - c.r0 * c.r0) * (c.t1 - c.t0); }

/// max_i |w_i| - r_i in absolute units; infinite for non-finite points.
double outside_distance(const BidiskDomain& d, const ComplexPoint& w) {
  if (!all_finite(w)) return std::numeric_limits<double>::infinity();
  double m = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < w.size(); ++i) m = std::max(m, std::abs(w[i]) - d.radius[static_cast<std::size_t>(i)]);
  return m;
}

void validate_disk(const BidiskDomain& d, const DiskSeed& seed) {
  require(seed.radius > 0.0, "seed radius must be positive");
  require(seed.center.size() == static_cast<Eigen::Index>(d.k()) && seed.direction.size() == seed.center.size(),
          "seed dimension does not match the map");
  require(std::abs(seed.direction.norm() - 1.0) < 1e-12, "seed direction must have unit norm");
  for (Eigen::Index i = 0; i < seed.center.size(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const bool in_M = std::find(d.expanding.begin(), d.expanding.end(), ui) != d.expanding.end();
    const double mid = in_M ? d.mid_M : d.mid_N;
    require(std::abs(seed.center[i]) + seed.radius * std::abs(seed.direction[i]) <= mid * d.radius[ui] * (1.0 + 1e-12),
            "seed disk must lie in D'");
  }
}

struct SurvivorCells {
  std::vector<Cell> cells;
  bool within_budget = true;
};

/// Parameter cells whose images stay in D for n steps, refined so that each
/// image is shorter than h at every step. A cell is dropped when its image is
/// short and lies entirely beyond the boundary of D.
SurvivorCells survivor_cells(const HenonMap& f, const DiskSeed& seed, int n, double h, const RefinementConfig& cfg,
                             TimeDirection time) {
  const BidiskDomain& d = f.domain();
  SurvivorCells out;
  const double dr = seed.radius / static_cast<double>(cfg.radial_cells);
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(cfg.angular_cells);
  for (std::size_t j = 0; j < cfg.angular_cells; ++j)
    for (std::size_t i = 0; i < cfg.radial_cells; ++i)
      out.cells.push_back(Cell{i * dr, (i + 1) * dr, j * dt, (j + 1) * dt});
  const double min_width = 1e-13 * seed.radius;

  for (int m = 1; m <= n; ++m) {
    std::vector<Cell> current = std::move(out.cells), kept;
    while (!current.empty()) {
      enum Action : char { Keep, Split, Drop };
      std::vector<Action> action(current.size(), Keep);
      parallel_for(current.size(), cfg.threads, [&](std::size_t c) {
        std::array<ComplexPoint, 5> img;
        const auto s = cell_samples(current[c]);
        double outside = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < 5; ++q) {
          img[q] = iterate_point(f, seed_point(seed, s[q].first, s[q].second), signed_steps(m, time));
          outside = std::min(outside, outside_distance(d, img[q]));
        }
        double diam = 0.0;
        for (std::size_t a = 0; a < 5; ++a)
          for (std::size_t b = a + 1; b < 5; ++b) diam = std::max(diam, (img[a] - img[b]).norm());
        if (!std::isfinite(diam)) diam = std::numeric_limits<double>::infinity();
        if (outside > std::max(h, diam)) {
          action[c] = Drop;
        } else if (diam > h && current[c].r1 - current[c].r0 > min_width) {
          action[c] = Split;
        }
      });
      std::vector<Cell> next;
      for (std::size_t c = 0; c < current.size(); ++c) {
        if (action[c] == Keep) kept.push_back(current[c]);
        if (action[c] == Split)
          for (const Cell& child : split(current[c])) next.push_back(child);
      }
      if (kept.size() + next.size() > cfg.max_cells) {
        out.within_budget = false;
        out.cells = std::move(kept);
        return out;
      }
      current = std::move(next);
    }
    out.cells = std::move(kept);
  }
  return out;
}

struct CellEval {
  double density;  ///< rho |d/ds f^n|^2
  bool inside;     ///< image in D'
};

CellEval evaluate(const HenonMap& f, const DiskSeed& seed, int steps, double rho, double theta) {
  const OrbitJet jet = propagate(f, seed_point(seed, rho, theta), steps);
  const double tangent = (jet.jacobian * seed.direction).squaredNorm();
  const bool inside = all_finite(jet.image) && f.domain().in_prime(jet.image);
  return CellEval{rho * tangent, inside};
}

/// Trapezoid rule on the cell corners; cells straddling the boundary of D'
/// are subdivided up to `depth` more levels.
double integrate_cell(const HenonMap& f, const DiskSeed& seed, int steps, const Cell& c, int depth,
                      bool restrict_to_prime) {
  const auto s = cell_samples(c);
  std::array<CellEval, 5> e;
  for (std::size_t q = 0; q < 5; ++q) e[q] = evaluate(f, seed, steps, s[q].first, s[q].second);
  if (restrict_to_prime) {
    const bool mixed = std::any_of(e.begin(), e.end(), [&](const CellEval& x) { return x.inside != e[0].inside; });
    if (mixed && depth > 0) {
      double sum = 0.0;
      for (const Cell& child : split(c)) sum += integrate_cell(f, seed, steps, child, depth - 1, true);
      return sum;
    }
  }
  double avg = 0.0;
  for (std::size_t q = 0; q < 4; ++q) avg += (restrict_to_prime && !e[q].inside) ? 0.0 : e[q].density;
  return 0.25 * avg * (c.r1 - c.r0) * (c.t1 - c.t0);
}

double sum_in_order(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double initial_step(const HenonMap& f, const RefinementConfig& cfg) {
  const auto& r = f.domain().radius;
  return cfg.step_fraction * *std::min_element(r.begin(), r.end());
}

/// Restriction of a product-map point to the coordinates of one factor.
ComplexPoint restrict_to(const ComplexPoint& z, const std::vector<std::size_t>& slots) {
  ComplexPoint out(static_cast<Eigen::Index>(slots.size()));
  for (std::size_t i = 0; i < slots.size(); ++i) out[static_cast<Eigen::Index>(i)] = z[static_cast<Eigen::Index>(slots[i])];
  return out;
}

struct WeightedCells {
  std::vector<Cell> cells;
  std::vector<double> cumulative;  ///< cumulative proposal weights
  bool within_budget = true;
};

WeightedCells proposal_cells(const HenonMap& factor, const DiskSeed& seed, int n, const RefinementConfig& cfg,
                             TimeDirection time) {
  const double h = initial_step(factor, cfg) / 4.0;
  SurvivorCells sc = survivor_cells(factor, seed, n, h, cfg, time);
  WeightedCells out;
  out.within_budget = sc.within_budget;
  out.cells = std::move(sc.cells);
  std::vector<double> w(out.cells.size());
  parallel_for(out.cells.size(), cfg.threads, [&](std::size_t c) {
    w[c] = integrate_cell(factor, seed, signed_steps(n, time), out.cells[c], 0, false);
  });
  const double mean = w.empty() ? 0.0 : sum_in_order(w) / static_cast<double>(w.size());
  double acc = 0.0;
  for (double x : w) {
    acc += std::max(x, 1e-3 * mean);
    out.cumulative.push_back(acc);
  }
  return out;
}

/// Draws a cell with probability proportional to its weight and a point
/// uniform in parameter area inside it. Returns (s, probability density).
std::pair<Complex, double> draw(const WeightedCells& wc, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double total = wc.cumulative.back();
  const double pick = u(rng) * total;
  auto it = std::upper_bound(wc.cumulative.begin(), wc.cumulative.end(), pick);
  const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - wc.cumulative.begin()), wc.cells.size() - 1);
  const Cell& c = wc.cells[idx];
  const double weight = wc.cumulative[idx] - (idx == 0 ? 0.0 : wc.cumulative[idx - 1]);
  const double rho = std::sqrt(c.r0 * c.r0 + u(rng) * (c.r1 * c.r1 - c.r0 * c.r0));
  const double theta = c.t0 + u(rng) * (c.t1 - c.t0);
  return {std::polar(rho, theta), (weight / total) / cell_area(c)};
}

GrowthSeries finish_series(GrowthSeries g) {
  std::vector<double> xs, ys;
  bool positive = true;
  for (std::size_t i = 0; i < g.n_values.size(); ++i) {
    if (g.n_values[i] < g.fit_from) continue;
    if (!(g.masses[i] > 0.0)) positive = false;
    xs.push_back(g.n_values[i]);
    ys.push_back(std::log(g.masses[i]));
  }
  if (positive && xs.size() >= 2) g.fit = fit_line(xs, ys);
  else g.converged = false;
  return g;
}

}  // namespace

MassEstimate curve_mass(const HenonMap& f, int n, const DiskSeed& seed, const RefinementConfig& config,
                        TimeDirection time) {
  require(n >= 0, "iterate count must be nonnegative");
  validate_disk(f.domain(), seed);
  const double h0 = initial_step(f, config);
  MassEstimate est;
  double previous = 0.0;
  for (int level = 0; level <= config.max_doublings; ++level) {
    const SurvivorCells sc = survivor_cells(f, seed, n, std::ldexp(h0, -level), config, time);
    if (!sc.within_budget) break;
    std::vector<double> parts(sc.cells.size());
    parallel_for(sc.cells.size(), config.threads, [&](std::size_t c) {
      parts[c] = integrate_cell(f, seed, signed_steps(n, time), sc.cells[c], config.boundary_depth + level, true);
    });
    est.mass = sum_in_order(parts);
    est.cells = sc.cells.size();
    est.doublings = level;
    if (level > 0) {
      est.standard_error = std::abs(est.mass - previous);
      if (est.standard_error <= config.rel_tol * est.mass) {
        est.converged = true;
        break;
      }
    }
    previous = est.mass;
  }
  return est;
}

MassEstimate surface_mass(const HenonMap& f, int n, const PolydiskSeed& seed, const SampleConfig& config,
                          TimeDirection time) {
  require(n >= 0, "iterate count must be nonnegative");
  require(f.kind() == HenonMap::Kind::Product && f.first().dimension() == 2 && f.second().dimension() == 2,
          "surface_mass needs a product of two planar maps");
  const auto& s1 = f.first_slots();
  const auto& s2 = f.second_slots();
  for (std::size_t t = 0; t < 2; ++t) {
    const auto& own = t == 0 ? s1 : s2;
    for (Eigen::Index i = 0; i < seed.directions[t].size(); ++i) {
      const bool owned = std::find(own.begin(), own.end(), static_cast<std::size_t>(i)) != own.end();
      require(owned || seed.directions[t][i] == Complex(0.0), "each seed direction must lie in one factor");
    }
  }
  const DiskSeed d1{restrict_to(seed.center, s1), restrict_to(seed.directions[0], s1), seed.radius[0]};
  const DiskSeed d2{restrict_to(seed.center, s2), restrict_to(seed.directions[1], s2), seed.radius[1]};
  validate_disk(f.first().domain(), d1);
  validate_disk(f.second().domain(), d2);

  const WeightedCells w1 = proposal_cells(f.first(), d1, n, config.cells, time);
  const WeightedCells w2 = proposal_cells(f.second(), d2, n, config.cells, time);
  MassEstimate est;
  est.cells = w1.cells.size() * w2.cells.size();
  if (w1.cells.empty() || w2.cells.empty()) {
    est.converged = w1.within_budget && w2.within_budget;
    return est;
  }

  const int steps = signed_steps(n, time);
  ComplexMatrix frame(seed.center.size(), 2);
  frame.col(0) = seed.directions[0];
  frame.col(1) = seed.directions[1];
  std::vector<double> values;
  std::size_t target = config.samples;
  double mean = 0.0, se = 0.0;
  while (true) {
    const std::size_t start = values.size();
    values.resize(target);
    parallel_for(target - start, config.cells.threads, [&](std::size_t i) {
      std::mt19937_64 rng(mix_seed(config.seed, start + i));
      const auto [a, pa] = draw(w1, rng);
      const auto [b, pb] = draw(w2, rng);
      const ComplexPoint z = seed.center + a * seed.directions[0] + b * seed.directions[1];
      const OrbitJet jet = propagate(f, z, steps);
      double g = 0.0;
      if (all_finite(jet.image) && f.domain().in_prime(jet.image)) {
        const ComplexMatrix j = jet.jacobian * frame;
        g = (j.adjoint() * j).determinant().real();
      }
      values[start + i] = g / (pa * pb);
    });
    mean = sum_in_order(values) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    se = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
    if (se <= config.target_rel_error * std::abs(mean) || 2 * target > config.max_samples) break;
    target *= 2;
  }
  est.mass = mean;
  est.standard_error = se;
  est.samples = values.size();
  est.converged = w1.within_budget && w2.within_budget && se <= config.unconverged_rel_error * std::abs(mean);
  return est;
}

double point_mass(const HenonMap& f, int n, const ComplexPoint& z, TimeDirection time) {
  const ComplexPoint w = iterate_point(f, z, signed_steps(n, time));
  return all_finite(w) && f.domain().in_prime(w) ? 1.0 : 0.0;
}

GrowthSeries curve_growth(const HenonMap& f, int n_max, const DiskSeed& seed, const RefinementConfig& config,
                          TimeDirection time, int fit_from) {
  GrowthSeries g;
  g.fit_from = fit_from;
  for (int n = 0; n <= n_max; ++n) {
    const MassEstimate m = curve_mass(f, n, seed, config, time);
    g.n_values.push_back(n);
    g.masses.push_back(m.mass);
    g.standard_errors.push_back(m.standard_error);
    g.converged = g.converged && m.converged;
  }
  return finish_series(std::move(g));
}

GrowthSeries surface_growth(const HenonMap& f, int n_max, const PolydiskSeed& seed, const SampleConfig& config,
                            TimeDirection time, int fit_from) {
  GrowthSeries g;
  g.fit_from = fit_from;
  for (int n = 0; n <= n_max; ++n) {
    SampleConfig c = config;
    c.seed = mix_seed(config.seed, static_cast<std::uint64_t>(n));
    const MassEstimate m = surface_mass(f, n, seed, c, time);
    g.n_values.push_back(n);
    g.masses.push_back(m.mass);
    g.standard_errors.push_back(m.standard_error);
    g.converged = g.converged && m.converged;
  }
  return finish_series(std::move(g));
}

GrowthSeries point_growth(const HenonMap& f, int n_max, const ComplexPoint& z, TimeDirection time, int fit_from) {
  GrowthSeries g;
  g.fit_from = fit_from;
  for (int n = 0; n <= n_max; ++n) {
    g.n_values.push_back(n);
    g.masses.push_back(point_mass(f, n, z, time));
    g.standard_errors.push_back(0.0);
  }
  return finish_series(std::move(g));
}

namespace {

ComplexPoint unit(std::size_t k, std::size_t i) {
  ComplexPoint e = ComplexPoint::Zero(static_cast<Eigen::Index>(k));
  e[static_cast<Eigen::Index>(i)] = 1.0;
  return e;
}

/// Most interior fixed point of f lying in D'.
ComplexPoint interior_fixed_point(const HenonMap& f) {
  const PeriodicCensus census = find_periodic(f, 1);
  std::optional<ComplexPoint> best;
  double best_margin = 0.0;
  for (const auto& p : census.points) {
    const double margin = f.domain().outside_margin(p.location);
    if (f.domain().in_prime(p.location) && (!best || margin < best_margin)) {
      best = p.location;
      best_margin = margin;
    }
  }
  require(best.has_value(), "no fixed point in D' to seed the point witness");
  return *best;
}

}  // namespace

DegreeSeparationReport degree_separation_report(const HenonMap& f, int n_max, const SeparationConfig& config) {
  require(n_max >= config.fit_from + 1, "n_max leaves fewer than two regression points");
  const BidiskDomain& d = f.domain();
  const std::size_t k = d.k();
  DegreeSeparationReport r;

  if (f.kind() != HenonMap::Kind::Product && k == 2) {
    require(check_henon_like(f, 2000, 1).pass, "map fails the Henon-like check");
    const std::size_t m = d.expanding[0], v = d.contracting[0];
    DiskSeed fwd{ComplexPoint::Zero(2), unit(2, m), d.mid_M * d.radius[m]};
    fwd.center[static_cast<Eigen::Index>(v)] = config.slice;
    DiskSeed bwd{ComplexPoint::Zero(2), unit(2, v), d.mid_N * d.radius[v]};
    bwd.center[static_cast<Eigen::Index>(m)] = config.slice;
    const ComplexPoint p = interior_fixed_point(f);
    r.top_forward = curve_growth(f, n_max, fwd, config.curves, TimeDirection::Forward, config.fit_from);
    r.top_backward = curve_growth(f, n_max, bwd, config.curves, TimeDirection::Backward, config.fit_from);
    r.lower_forward = point_growth(f, n_max, p, TimeDirection::Forward, config.fit_from);
    r.lower_backward = point_growth(f, n_max, p, TimeDirection::Backward, config.fit_from);
  } else {
    require(f.kind() == HenonMap::Kind::Product && f.first().dimension() == 2 && f.second().dimension() == 2,
            "degree_separation_report supports planar maps and products of planar maps");
    require(check_henon_like(f.first(), 2000, 1).pass && check_henon_like(f.second(), 2000, 2).pass,
            "a factor fails the Henon-like check");
    const std::size_t m1 = f.first_slots()[f.first().domain().expanding[0]];
    const std::size_t m2 = f.second_slots()[f.second().domain().expanding[0]];
    const std::size_t v1 = f.first_slots()[f.first().domain().contracting[0]];
    const std::size_t v2 = f.second_slots()[f.second().domain().contracting[0]];
    auto seeds = [&](std::size_t a1, std::size_t a2, std::size_t c1, std::size_t c2, double mid) {
      ComplexPoint center = ComplexPoint::Zero(static_cast<Eigen::Index>(k));
      center[static_cast<Eigen::Index>(c1)] = config.slice;
      center[static_cast<Eigen::Index>(c2)] = config.slice;
      PolydiskSeed top{center, {unit(k, a1), unit(k, a2)}, {mid * d.radius[a1], mid * d.radius[a2]}};
      DiskSeed diag{center, (unit(k, a1) + unit(k, a2)) / std::sqrt(2.0),
                    std::sqrt(2.0) * mid * std::min(d.radius[a1], d.radius[a2])};
      return std::pair{top, diag};
    };
    const auto [top_f, diag_f] = seeds(m1, m2, v1, v2, d.mid_M);
    const auto [top_b, diag_b] = seeds(v1, v2, m1, m2, d.mid_N);
    r.top_forward = surface_growth(f, n_max, top_f, config.surfaces, TimeDirection::Forward, config.fit_from);
    r.top_backward = surface_growth(f, n_max, top_b, config.surfaces, TimeDirection::Backward, config.fit_from);
    r.lower_forward = curve_growth(f, n_max, diag_f, config.curves, TimeDirection::Forward, config.fit_from);
    r.lower_backward = curve_growth(f, n_max, diag_b, config.curves, TimeDirection::Backward, config.fit_from);
  }

  const GrowthSeries& top =
      r.top_forward.exponent() <= r.top_backward.exponent() ? r.top_forward : r.top_backward;
  const GrowthSeries& lower =
      r.lower_forward.exponent() >= r.lower_backward.exponent() ? r.lower_forward : r.lower_backward;
  r.top_exponent = top.exponent();
  r.lower_exponent = lower.exponent();
  r.margin = r.top_exponent - r.lower_exponent;
  r.uncertainty = std::hypot(top.exponent_stderr(), lower.exponent_stderr());
  r.qualified = r.top_forward.converged && r.top_backward.converged && r.lower_forward.converged &&
                r.lower_backward.converged;
  r.separated = r.qualified && r.margin > 2.0 * r.uncertainty;
  return r;
}

}  // namespace henonlab
