#include "henonlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "henonlab/degrees.hpp"
#include "henonlab/grassmann.hpp"
#include "henonlab/green.hpp"
#include "henonlab/measures.hpp"
#include "henonlab/periodic.hpp"
#include "henonlab/precision.hpp"
#include "henonlab/report.hpp"
#include "henonlab/transversal.hpp"

namespace henonlab {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Verdict {
  std::string check;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct Result {
  json metrics = json::object();
  std::vector<Verdict> verdicts;

  void check(std::string name, bool pass, double value, double tolerance) {
    verdicts.push_back(Verdict{std::move(name), pass, value, tolerance});
  }
};

std::size_t power(std::size_t d, int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) r *= d;
  return r;
}

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, std::ostream& log)
      : cfg_(cfg), f_(build_map(cfg.map)), log_(log), d_(static_cast<std::size_t>(f_.main_degree())) {
    pcfg_.solver.tol = cfg.tolerances.newton_tol;
    pcfg_.solver.dedup_tol = cfg.tolerances.dedup_tol;
    pcfg_.solver.singular_threshold = cfg.tolerances.singular_threshold;
    pcfg_.solver.grid_density = cfg.tolerances.grid_density;
    pcfg_.solver.seed = cfg.prng_seed;
    pcfg_.solver.threads = cfg.threads;
    pcfg_.eta = cfg.tolerances.eta;
  }

  const HenonMap& map() const { return f_; }

  Result run(const ExperimentSpec& e, const fs::path& dir) {
    return std::visit([&](const auto& body) { return run_body(body, dir); }, e.body);
  }

 private:
  const PeriodicCensus& census(int n, bool require_complete) {
    auto it = censuses_.find(n);
    if (it == censuses_.end()) {
      log_ << fmt::format("  census n={}\n", n);
      it = censuses_.emplace(n, find_periodic(f_, n, pcfg_)).first;
    }
    const CensusResult& c = it->second.census;
    if (require_complete && !c.complete())
      throw IncompleteCensusError(
          fmt::format("period-{} census incomplete: found {} of {}", n, c.found_total, c.expected));
    return it->second;
  }

  OracleResult oracle(int depth, const Anchor& a, bool require_complete) {
    OracleConfig oc;
    oc.solver.tol = cfg_.tolerances.newton_tol;
    oc.solver.dedup_tol = cfg_.tolerances.dedup_tol;
    oc.solver.singular_threshold = cfg_.tolerances.singular_threshold;
    oc.solver.seed = cfg_.prng_seed;
    oc.solver.threads = cfg_.threads;
    log_ << fmt::format("  oracle depth {}\n", depth);
    OracleResult r = mu_oracle(f_, depth, a.a, a.b, oc);
    if (require_complete && !r.census.complete())
      throw IncompleteCensusError(fmt::format("depth-{} oracle incomplete: found {} of {}", depth,
                                              r.census.found_total, r.census.expected));
    return r;
  }

  /// Largest increase between consecutive values (negative when strictly decreasing).
  static double max_increase(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < v.size(); ++i) m = std::max(m, v[i] - v[i - 1]);
    return v.size() < 2 ? 0.0 : m;
  }

  Result run_body(const CensusExperiment& e, const fs::path& dir) {
    Result r;
    json counts = json::object(), fractions = json::object(), separations = json::object();
    for (int n : e.periods) {
      const PeriodicCensus& pc = census(n, e.require_complete);
      write_csv(census_table(pc.points), dir / fmt::format("census_n{}.csv", n));
      const std::size_t expected = power(d_, n);
      const double sf = saddle_fraction(pc.points);
      counts[std::to_string(n)] = pc.census.found_total;
      fractions[std::to_string(n)] = sf;
      separations[std::to_string(n)] = pc.census.min_separation;
      r.check(fmt::format("exact census count d^n at n={} (acceptance 1)", n),
              pc.census.complete() && pc.census.found_total == expected, static_cast<double>(pc.census.found_total),
              static_cast<double>(expected));
      r.check(fmt::format("saddle fraction equals 1 at n={} (acceptance 3)", n), sf == 1.0, sf, 1.0);
      if (n == 1 && f_.kind() == HenonMap::Kind::GeneralizedHenon && f_.factors()[0].poly.degree() == 2) {
        // Fixed points (x, x) with c2 x^2 + (c1 + a - 1) x + c0 = 0.
        const auto& c = f_.factors()[0].poly.coefficients();
        const Complex a = c[2], b = c[1] + f_.factors()[0].shear - 1.0, q = c[0];
        const Complex disc = std::sqrt(b * b - 4.0 * a * q);
        double worst = 0.0;
        for (const Complex x : {(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)}) {
          double best = std::numeric_limits<double>::infinity();
          for (const auto& p : pc.points)
            best = std::min(best, (p.location - make_point({x, x})).cwiseAbs().maxCoeff());
          worst = std::max(worst, best);
        }
        r.check("census fixed points match the quadratic formula (acceptance 2)", worst <= 1e-9, worst, 1e-9);
      }
    }
    r.metrics["counts"] = counts;
    r.metrics["saddle_fraction"] = fractions;
    r.metrics["min_separation"] = separations;
    return r;
  }

  Result run_body(const EquidistributionExperiment& e, const fs::path& dir) {
    Result r;
    const auto bank = standard_bank(f_.domain());
    std::vector<EmpiricalMeasure> oracles;
    for (std::size_t i = 0; i < e.anchors.size(); ++i) {
      oracles.push_back(oracle(e.oracle_depth, e.anchors[i], e.require_complete).measure);
      write_csv(measure_table(oracles.back()), dir / fmt::format("oracle_anchor{}.csv", i));
    }
    Table t;
    t.header = {"n", "discrepancy", "argmax_function", "discrepancy_saddles"};
    std::vector<double> all, sad;
    EmpiricalMeasure last;
    for (int n : e.periods) {
      const PeriodicCensus& pc = census(n, e.require_complete);
      const double norm = static_cast<double>(power(d_, n));
      last = empirical_measure(pc.points, norm);
      const Discrepancy da = discrepancy(last, oracles[0], bank, cfg_.threads);
      const Discrepancy ds = discrepancy(empirical_measure(saddles_only(pc.points), norm), oracles[0], bank, cfg_.threads);
      all.push_back(da.value);
      sad.push_back(ds.value);
      t.rows.push_back({static_cast<long long>(n), da.value, static_cast<long long>(da.argmax_function), ds.value});
    }
    write_csv(t, dir / "discrepancy.csv");
    if (!e.periods.empty())
      scatter_svg({{&last, "#1f77b4", fmt::format("nu_{}", e.periods.back())}, {&oracles[0], "#ff7f0e", "oracle"}},
                  f_.domain(), 0, 2, dir / "scatter.svg");

    const double slack = cfg_.tolerances.monotone_slack;
    const double inc_all = max_increase(all), inc_sad = max_increase(sad);
    r.metrics["discrepancy"] = all;
    r.metrics["discrepancy_saddles"] = sad;
    r.metrics["soft_warning"] = (inc_all > 0.0 && inc_all <= slack) || (inc_sad > 0.0 && inc_sad <= slack);
    r.check("discrepancy to the oracle nonincreasing over periods, all points (acceptance 4)", inc_all <= slack,
            inc_all, slack);
    r.check("discrepancy to the oracle nonincreasing over periods, saddle points (measures invariant)",
            inc_sad <= slack, inc_sad, slack);
    if (!all.empty())
      r.check(fmt::format("discrepancy at n={} within bound (acceptance 4)", e.periods.back()),
              all.back() <= cfg_.tolerances.discrepancy_max, all.back(), cfg_.tolerances.discrepancy_max);
    if (oracles.size() >= 2) {
      const double st = oracle_stability(oracles, bank, cfg_.threads);
      r.metrics["oracle_stability"] = st;
      r.check(fmt::format("oracle stability across {} anchors at depth {} (acceptance 4)", oracles.size(),
                          e.oracle_depth),
              st <= cfg_.tolerances.stability_max, st, cfg_.tolerances.stability_max);
    }
    return r;
  }

  Result run_body(const GreenExperiment& e, const fs::path& dir) {
    Result r;
    const double esc = f_.domain().default_escape_radius();
    const auto grid = green_grid(f_, e.slice, e.max_n, esc, cfg_.threads);
    write_csv(green_table(grid), dir / "green_grid.csv");
    std::vector<std::vector<double>> gp(e.slice.resolution), gm(e.slice.resolution);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      gp[i / e.slice.resolution].push_back(grid[i].g_plus);
      gm[i / e.slice.resolution].push_back(grid[i].g_minus);
    }
    heatmap_svg(gp, dir / "g_plus.svg", "G+");
    heatmap_svg(gm, dir / "g_minus.svg", "G-");

    // Escaping sample points drawn uniformly from D, in attempt order.
    const BidiskDomain& dom = f_.domain();
    std::vector<double> residuals;
    std::size_t attempts = 0;
    while (residuals.size() < e.samples && attempts < 100 * std::max<std::size_t>(e.samples, 1)) {
      const std::size_t batch = 2 * e.samples;
      std::vector<std::optional<double>> res(batch);
      parallel_for(batch, cfg_.threads, [&](std::size_t i) {
        std::mt19937_64 rng(mix_seed(cfg_.prng_seed, attempts + i));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        ComplexPoint z(static_cast<Eigen::Index>(dom.k()));
        for (std::size_t j = 0; j < dom.k(); ++j)
          z[static_cast<Eigen::Index>(j)] = std::polar(dom.radius[j] * std::sqrt(u(rng)), 2.0 * M_PI * u(rng));
        res[i] = invariance_residual(f_, z, e.max_n, esc);
      });
      for (const auto& v : res)
        if (v && residuals.size() < e.samples) residuals.push_back(*v);
      attempts += batch;
    }
    const double worst = residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
    r.metrics["escaping_samples"] = residuals.size();
    r.metrics["max_invariance_residual"] = worst;
    r.check(fmt::format("invariance residual at {} escaping points (acceptance 5)", e.samples),
            residuals.size() == e.samples && worst <= cfg_.tolerances.green_residual, worst,
            cfg_.tolerances.green_residual);
    for (int n : e.census_periods) {
      const PeriodicCensus& pc = census(n, true);
      std::vector<double> g(pc.points.size());
      parallel_for(pc.points.size(), cfg_.threads, [&](std::size_t i) {
        g[i] = green_plus_periodic(f_, pc.points[i].location, n, e.max_n, esc).value;
      });
      const double gmax = g.empty() ? 0.0 : *std::max_element(g.begin(), g.end());
      r.metrics["g_plus_census_max"][std::to_string(n)] = gmax;
      r.check(fmt::format("G+ vanishes at period-{} census points (acceptance 5)", n),
              gmax <= cfg_.tolerances.green_census, gmax, cfg_.tolerances.green_census);
    }
    return r;
  }

  Result run_body(const OseledecExperiment& e, const fs::path& dir) {
    Result r;
    const PeriodicCensus& fixed = census(1, true);
    const std::size_t p = f_.expanding_dimension();
    json ratios = json::array();
    std::size_t index = 0;
    for (const auto& pp : fixed.points) {
      if (pp.stability != Stability::Saddle) continue;
      const ComplexMatrix U = pp.unstable_basis.basis(), S = pp.stable_basis.basis();
      ComplexMatrix start = U;
      for (Eigen::Index j = 0; j < U.cols(); ++j) start.col(j) += S.col(j % S.cols());
      const DecayRecord rec = direction_convergence(f_, LiftedPoint{pp.location, Direction::from_span(start)}, pp,
                                                    e.steps, ConvergenceOptions{e.delta});
      write_csv(decay_table(rec), dir / fmt::format("decay_fixed{}.csv", index));
      const double expected = std::abs(pp.multipliers[p]) / std::abs(pp.multipliers[p - 1]);
      const double rel = std::abs(rec.per_step_ratio - expected) / expected;
      ratios.push_back({{"fitted", rec.per_step_ratio}, {"expected", expected}});
      r.check(fmt::format("contraction ratio at fixed point {} within tolerance of the multiplier ratio (acceptance 6)",
                          index),
              rec.fit.has_value() && rec.fit->slope < 0.0 && rel <= cfg_.tolerances.contraction_rel, rel,
              cfg_.tolerances.contraction_rel);
      ++index;
    }
    r.metrics["contraction"] = ratios;

    const PeriodicCensus& pc = census(e.census_period, true);
    const auto lifted = oseledec_empirical(pc.points, static_cast<double>(power(d_, e.census_period)));
    write_csv(lifted_table(lifted), dir / fmt::format("lifted_n{}.csv", e.census_period));
    const auto saddles = saddles_only(pc.points);
    Table t;
    t.header = {"n", "matched", "excluded", "median", "p90", "unstable_median", "stable_median"};
    std::vector<double> medians;
    for (int n : e.alignment_periods) {
      const OracleResult o = oracle(n, e.anchor, false);
      std::vector<ComplexPoint> pts;
      for (const auto& a : o.measure.atoms) pts.push_back(a.location);
      const AlignmentStats st = tangent_alignment(f_, n, pts, saddles, e.radius, cfg_.threads);
      medians.push_back(st.median);
      t.rows.push_back({static_cast<long long>(n), static_cast<long long>(st.matched),
                        static_cast<long long>(st.excluded), st.median, st.p90, st.unstable_median, st.stable_median});
    }
    write_csv(t, dir / "alignment.csv");
    r.metrics["alignment_median"] = medians;
    if (medians.size() >= 2) {
      const double diff = medians.back() - medians.front();
      r.check(fmt::format("tangent alignment median decreases from n={} to n={} (acceptance 6)",
                          e.alignment_periods.front(), e.alignment_periods.back()),
              diff < 0.0, diff, 0.0);
    }
    return r;
  }

  static json growth_json(const GrowthSeries& g) {
    return json{{"exponent", g.exponent()}, {"stderr", g.exponent_stderr()}, {"converged", g.converged},
                {"masses", g.masses}};
  }

  Result run_body(const DegreesExperiment& e, const fs::path& dir) {
    Result r;
    RefinementConfig rc;
    rc.rel_tol = e.rel_tol;
    rc.threads = cfg_.threads;
    SeparationConfig sc;
    sc.slice = e.slice;
    sc.curves = rc;
    sc.surfaces.samples = e.samples;
    sc.surfaces.seed = cfg_.prng_seed;
    sc.surfaces.cells = rc;

    auto separation = [&](const HenonMap& g, const std::string& tag) {
      const DegreeSeparationReport rep = degree_separation_report(g, e.n_max, sc);
      write_csv(growth_table(rep.top_forward), dir / fmt::format("{}_top_forward.csv", tag));
      write_csv(growth_table(rep.top_backward), dir / fmt::format("{}_top_backward.csv", tag));
      write_csv(growth_table(rep.lower_forward), dir / fmt::format("{}_lower_forward.csv", tag));
      write_csv(growth_table(rep.lower_backward), dir / fmt::format("{}_lower_backward.csv", tag));
      r.metrics[tag] = json{{"top_forward", growth_json(rep.top_forward)},
                            {"top_backward", growth_json(rep.top_backward)},
                            {"lower_forward", growth_json(rep.lower_forward)},
                            {"lower_backward", growth_json(rep.lower_backward)},
                            {"margin", rep.margin},
                            {"uncertainty", rep.uncertainty},
                            {"qualified", rep.qualified}};
      if (g.kind() == HenonMap::Kind::Product) {
        const double target = std::log(static_cast<double>(g.main_degree()));
        const double rel = std::abs(rep.top_forward.exponent() - target) / target;
        r.check("surface witness exponent near log of the main degree (acceptance 7)",
                rep.top_forward.converged && rel <= cfg_.tolerances.surface_exponent_rel, rel,
                cfg_.tolerances.surface_exponent_rel);
      }
      r.check(fmt::format("{} witness separation margin exceeds twice its uncertainty (acceptance 7)", tag),
              rep.separated, rep.margin, 2.0 * rep.uncertainty);
    };

    if (f_.kind() == HenonMap::Kind::Product) {
      separation(f_, "product");
    } else if (f_.dimension() == 2) {
      const BidiskDomain& dom = f_.domain();
      const std::size_t m = dom.expanding[0], v = dom.contracting[0];
      DiskSeed seed{ComplexPoint::Zero(2), ComplexPoint::Zero(2), dom.mid_M * dom.radius[m]};
      seed.direction[static_cast<Eigen::Index>(m)] = 1.0;
      seed.center[static_cast<Eigen::Index>(v)] = e.slice;
      const GrowthSeries g = curve_growth(f_, e.n_max, seed, rc);
      write_csv(growth_table(g), dir / "curve_growth.csv");
      const double target = std::log(static_cast<double>(d_));
      const double rel = std::abs(g.exponent() - target) / target;
      r.metrics["curve"] = growth_json(g);
      r.check(fmt::format("curve witness exponent within tolerance of log d over n={}..{} (acceptance 7)", g.fit_from,
                          e.n_max),
              g.converged && rel <= cfg_.tolerances.curve_exponent_rel, rel, cfg_.tolerances.curve_exponent_rel);
      if (e.product) separation(product(f_, f_), "product");
    } else {
      r.metrics["unsupported"] = "witness masses need a planar map or a product of planar maps";
    }
    return r;
  }

  Result run_body(const TransversalityExperiment& e, const fs::path& dir) {
    Result r;
    std::vector<double> fractions;
    json stats = json::object();
    for (int n : e.periods) {
      const PeriodicCensus& pc = census(n, true);
      const TangencySpectrum spec = tangency_spectrum(f_, n, pc.points, cfg_.tolerances.singular_threshold);
      write_csv(tangency_table(spec), dir / fmt::format("tangency_n{}.csv", n));
      GraphSampleConfig gc;
      gc.epsilon = e.epsilon;
      gc.eta = e.eta;
      gc.samples = e.samples;
      gc.seed = mix_seed(cfg_.prng_seed, static_cast<std::uint64_t>(n));
      gc.threads = cfg_.threads;
      gc.solver = pcfg_.solver;
      const GraphStats gs = graph_census_near_diagonal(f_, n, pc.points, gc);
      const json gj{{"period", n},
                    {"epsilon", gs.epsilon},
                    {"eta", gs.eta},
                    {"attempted", gs.attempted},
                    {"near_diagonal", gs.near_diagonal},
                    {"transverse", gs.transverse},
                    {"transverse_fraction", gs.transverse_fraction},
                    {"confidence_low", gs.confidence.low},
                    {"confidence_high", gs.confidence.high},
                    {"simple_points", gs.simple_points},
                    {"expected", gs.expected},
                    {"simple_fraction", gs.simple_fraction},
                    {"sigma_min", spec.min},
                    {"sigma_median", spec.median}};
      write_text(gj.dump(2) + "\n", dir / fmt::format("graph_n{}.json", n));
      stats[std::to_string(n)] = gj;
      fractions.push_back(gs.transverse_fraction);
      const std::size_t expected = power(d_, n);
      r.check(fmt::format("all period-{} census points simple (acceptance 8)", n), spec.simple_count == expected,
              static_cast<double>(spec.simple_count), static_cast<double>(expected));
      r.check(fmt::format("simple count plus multiplicity excess equals d^n at n={} (transversal invariant)", n),
              spec.simple_count + spec.multiplicity_excess == expected,
              static_cast<double>(spec.simple_count + spec.multiplicity_excess), static_cast<double>(expected));
    }
    r.metrics["graph_stats"] = stats;
    if (fractions.size() >= 2) {
      double drop = 0.0;
      for (std::size_t i = 1; i < fractions.size(); ++i) drop = std::max(drop, fractions[i - 1] - fractions[i]);
      r.check("near-diagonal transverse fraction nondecreasing over periods (transversal example)", drop <= 0.0, drop,
              0.0);
    }
    for (int n : e.doubled_periods) {
      const PeriodicCensus& pc = census(n, true);
      const DoubledCorrespondence dc =
          doubled_correspondence(f_, n, pc.points, pcfg_.solver, cfg_.tolerances.location_match);
      r.metrics["doubled"][std::to_string(n)] = json{{"diagonal_points", dc.diagonal.found_total},
                                                     {"matched", dc.matched},
                                                     {"max_location_error", dc.max_location_error},
                                                     {"max_sigma_rel_error", dc.max_sigma_rel_error}};
      r.check(fmt::format("doubled-map diagonal correspondence at n={} (acceptance 9)", n), dc.holds,
              dc.max_sigma_rel_error, 1e-8);
    }
    return r;
  }

  const ExperimentConfig& cfg_;
  HenonMap f_;
  std::ostream& log_;
  std::size_t d_;
  PeriodicConfig pcfg_;
  std::map<int, PeriodicCensus> censuses_;
};

}  // namespace

void apply_overrides(ExperimentConfig& config, const RunOverrides& overrides) {
  if (overrides.output) config.output = *overrides.output;
  if (overrides.threads) config.threads = *overrides.threads;
  if (overrides.seed) config.prng_seed = *overrides.seed;
}

int run_experiments(const ExperimentConfig& config, std::ostream& log) {
  set_default_threads(config.threads);
  const fs::path out = config.output;
  const std::string plan = resolved_plan(config);
  write_text(plan, out / "plan.txt");
  log << fmt::format("plan hash {:016x}\n", fnv1a(plan));

  Runner runner(config, log);
  json summary{{"schema", config.schema}, {"map", runner.map().describe()}, {"experiments", json::array()}};
  for (const auto& e : config.experiments) {
    log << fmt::format("running {} ({})\n", e.name, experiment_type(e.body));
    const Result r = runner.run(e, out / e.name);
    json verdicts = json::array();
    for (const auto& v : r.verdicts)
      verdicts.push_back({{"check", v.check}, {"pass", v.pass}, {"value", v.value}, {"tolerance", v.tolerance}});
    for (const auto& v : r.verdicts) log << fmt::format("  {} {}\n", v.pass ? "PASS" : "FAIL", v.check);
    summary["experiments"].push_back(
        {{"name", e.name}, {"status", "completed"}, {"metrics", r.metrics}, {"verdicts", verdicts}});
  }
  write_text(summary.dump(2) + "\n", out / "summary.json");
  return kExitOk;
}

int run_config_file(const fs::path& path, const RunOverrides& overrides, std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig cfg = load_config(path);
    apply_overrides(cfg, overrides);
    return run_experiments(cfg, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IncompleteCensusError& e) {
    err << "incomplete census: " << e.what() << "\n";
    return kExitIncomplete;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int describe_config_file(const fs::path& path, const RunOverrides& overrides, std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig cfg = load_config(path);
    apply_overrides(cfg, overrides);
    const std::string plan = resolved_plan(cfg);
    out << plan << fmt::format("plan hash {:016x}\n", fnv1a(plan));
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace henonlab
