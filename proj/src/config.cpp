#include "henonlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace henonlab {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) {
  throw ConfigError(fmt::format("line {}: {}", line_of(n), what));
}

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(node, fmt::format("{} must be a mapping", where));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, fmt::format("unknown key '{}' in {}", key, where));
  }
}

YAML::Node required(const YAML::Node& node, const std::string& key, const std::string& where) {
  const YAML::Node v = node[key];
  if (!v) fail(node, fmt::format("missing required key '{}' in {}", key, where));
  return v;
}

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, fmt::format("key '{}' has an invalid value", key));
  }
}

template <class T>
void optional_scalar(const YAML::Node& node, const std::string& key, T& out) {
  if (const YAML::Node v = node[key]) out = scalar<T>(v, key);
}

Complex complex_value(const YAML::Node& n, const std::string& key) {
  if (n.IsScalar()) return Complex(scalar<double>(n, key), 0.0);
  if (n.IsSequence() && n.size() == 2 && n[0].IsScalar() && n[1].IsScalar())
    return Complex(scalar<double>(n[0], key), scalar<double>(n[1], key));
  fail(n, fmt::format("key '{}' must be a number or a [re, im] pair", key));
}

/// A complex number or a list of complex numbers.
std::vector<Complex> complex_list(const YAML::Node& n, const std::string& key) {
  if (n.IsScalar()) return {complex_value(n, key)};
  if (!n.IsSequence()) fail(n, fmt::format("key '{}' must be a sequence", key));
  if (n.size() == 2 && n[0].IsScalar() && n[1].IsScalar()) return {complex_value(n, key)};
  std::vector<Complex> out;
  for (const auto& e : n) out.push_back(complex_value(e, key));
  return out;
}

ComplexPoint point_value(const YAML::Node& n, const std::string& key) {
  const auto v = complex_list(n, key);
  ComplexPoint p(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Eigen::Index>(i)] = v[i];
  return p;
}

/// A list of integers or a {from, to} range.
std::vector<int> period_list(const YAML::Node& n, const std::string& key) {
  std::vector<int> out;
  if (n.IsSequence()) {
    for (const auto& e : n) out.push_back(scalar<int>(e, key));
  } else if (n.IsMap()) {
    check_keys(n, key, {"from", "to"});
    const int lo = scalar<int>(required(n, "from", key), key), hi = scalar<int>(required(n, "to", key), key);
    for (int i = lo; i <= hi; ++i) out.push_back(i);
  } else {
    fail(n, fmt::format("key '{}' must be a list or a from/to range", key));
  }
  for (int p : out)
    if (p < 1) fail(n, fmt::format("key '{}' holds a period below 1", key));
  return out;
}

std::vector<double> real_list(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) fail(n, fmt::format("key '{}' must be a list", key));
  std::vector<double> out;
  for (const auto& e : n) out.push_back(scalar<double>(e, key));
  return out;
}

HenonFactor factor_value(const YAML::Node& n, const std::string& where) {
  const auto coeffs = complex_list(required(n, "polynomial", where), "polynomial");
  if (coeffs.size() < 3) fail(n, "key 'polynomial' needs degree at least 2");
  return HenonFactor{Polynomial(coeffs), complex_value(required(n, "shear", where), "shear")};
}

MapSpec map_value(const YAML::Node& n, const std::string& where) {
  if (!n.IsMap()) fail(n, fmt::format("{} must be a mapping", where));
  MapSpec spec;
  const auto kind = scalar<std::string>(required(n, "kind", where), "kind");
  auto domain = [&](MapSpec& s) {
    if (const YAML::Node d = n["domain"]) {
      check_keys(d, "domain", {"radius", "inner", "mid"});
      if (d["radius"]) s.domain.radius = real_list(d["radius"], "radius");
      optional_scalar(d, "inner", s.domain.inner);
      optional_scalar(d, "mid", s.domain.mid);
    }
  };
  if (kind == "generalized") {
    check_keys(n, where, {"kind", "polynomial", "shear", "domain"});
    spec.kind = MapSpec::Kind::Generalized;
    spec.factors = {factor_value(n, where)};
    domain(spec);
  } else if (kind == "composition") {
    check_keys(n, where, {"kind", "factors", "domain"});
    spec.kind = MapSpec::Kind::Composition;
    const YAML::Node fs = required(n, "factors", where);
    if (!fs.IsSequence() || fs.size() == 0) fail(fs, "key 'factors' must be a nonempty list");
    for (const auto& f : fs) {
      check_keys(f, "factor", {"polynomial", "shear"});
      spec.factors.push_back(factor_value(f, "factor"));
    }
    domain(spec);
  } else if (kind == "product") {
    check_keys(n, where, {"kind", "first", "second"});
    spec.kind = MapSpec::Kind::Product;
    spec.first = std::make_shared<MapSpec>(map_value(required(n, "first", where), "first"));
    spec.second = std::make_shared<MapSpec>(map_value(required(n, "second", where), "second"));
  } else if (kind == "doubled") {
    check_keys(n, where, {"kind", "base"});
    spec.kind = MapSpec::Kind::Doubled;
    spec.base = std::make_shared<MapSpec>(map_value(required(n, "base", where), "base"));
  } else {
    fail(n, fmt::format("unknown map kind '{}'", kind));
  }
  return spec;
}

Anchor anchor_value(const YAML::Node& n) {
  check_keys(n, "anchor", {"a", "b"});
  return Anchor{point_value(required(n, "a", "anchor"), "a"), point_value(required(n, "b", "anchor"), "b")};
}

ExperimentSpec experiment_value(const YAML::Node& n, std::size_t index) {
  const std::string where = fmt::format("experiment {}", index);
  if (!n.IsMap()) fail(n, fmt::format("{} must be a mapping", where));
  const auto type = scalar<std::string>(required(n, "type", where), "type");
  ExperimentSpec e;
  e.name = n["name"] ? scalar<std::string>(n["name"], "name") : fmt::format("{}_{}", type, index);
  const std::string ew = fmt::format("experiment '{}'", e.name);
  if (type == "periodic_census") {
    check_keys(n, ew, {"name", "type", "periods", "require_complete"});
    CensusExperiment c;
    c.periods = period_list(required(n, "periods", ew), "periods");
    optional_scalar(n, "require_complete", c.require_complete);
    e.body = c;
  } else if (type == "equidistribution") {
    check_keys(n, ew, {"name", "type", "periods", "oracle_depth", "anchors", "require_complete"});
    EquidistributionExperiment c;
    c.periods = period_list(required(n, "periods", ew), "periods");
    c.oracle_depth = scalar<int>(required(n, "oracle_depth", ew), "oracle_depth");
    const YAML::Node as = required(n, "anchors", ew);
    if (!as.IsSequence() || as.size() == 0) fail(as, "key 'anchors' must be a nonempty list");
    for (const auto& a : as) c.anchors.push_back(anchor_value(a));
    optional_scalar(n, "require_complete", c.require_complete);
    e.body = c;
  } else if (type == "green") {
    check_keys(n, ew, {"name", "type", "slice", "max_n", "samples", "census_periods"});
    GreenExperiment c;
    const YAML::Node s = required(n, "slice", ew);
    check_keys(s, "slice", {"base", "axes", "extent", "resolution"});
    c.slice.base = point_value(required(s, "base", "slice"), "base");
    const YAML::Node axes = required(s, "axes", "slice");
    if (!axes.IsSequence() || axes.size() != 2) fail(axes, "key 'axes' must list two real coordinate indices");
    c.slice.axis_u = scalar<std::size_t>(axes[0], "axes");
    c.slice.axis_v = scalar<std::size_t>(axes[1], "axes");
    c.slice.extent = scalar<double>(required(s, "extent", "slice"), "extent");
    c.slice.resolution = scalar<std::size_t>(required(s, "resolution", "slice"), "resolution");
    optional_scalar(n, "max_n", c.max_n);
    optional_scalar(n, "samples", c.samples);
    if (n["census_periods"]) c.census_periods = period_list(n["census_periods"], "census_periods");
    e.body = c;
  } else if (type == "oseledec") {
    check_keys(n, ew, {"name", "type", "steps", "delta", "alignment_periods", "anchor", "census_period", "radius"});
    OseledecExperiment c;
    c.steps = scalar<std::size_t>(required(n, "steps", ew), "steps");
    c.delta = scalar<double>(required(n, "delta", ew), "delta");
    if (n["alignment_periods"]) c.alignment_periods = period_list(n["alignment_periods"], "alignment_periods");
    c.anchor = anchor_value(required(n, "anchor", ew));
    optional_scalar(n, "census_period", c.census_period);
    optional_scalar(n, "radius", c.radius);
    e.body = c;
  } else if (type == "degrees") {
    check_keys(n, ew, {"name", "type", "n_max", "product", "slice", "rel_tol", "samples"});
    DegreesExperiment c;
    c.n_max = scalar<int>(required(n, "n_max", ew), "n_max");
    optional_scalar(n, "product", c.product);
    if (n["slice"]) c.slice = complex_value(n["slice"], "slice");
    optional_scalar(n, "rel_tol", c.rel_tol);
    optional_scalar(n, "samples", c.samples);
    e.body = c;
  } else if (type == "transversality") {
    check_keys(n, ew, {"name", "type", "periods", "epsilon", "eta", "samples", "doubled_periods"});
    TransversalityExperiment c;
    c.periods = period_list(required(n, "periods", ew), "periods");
    c.epsilon = scalar<double>(required(n, "epsilon", ew), "epsilon");
    c.eta = scalar<double>(required(n, "eta", ew), "eta");
    optional_scalar(n, "samples", c.samples);
    if (n["doubled_periods"]) c.doubled_periods = period_list(n["doubled_periods"], "doubled_periods");
    e.body = c;
  } else {
    fail(n, fmt::format("unknown experiment type '{}'", type));
  }
  return e;
}

std::string complex_text(Complex c) { return fmt::format("({:.17g}, {:.17g})", c.real(), c.imag()); }

std::string point_text(const ComplexPoint& z) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < z.size(); ++i) s += (i ? ", " : "") + complex_text(z[i]);
  return s + "]";
}

template <class T>
std::string list_text(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt::format("{}", v[i]);
  return s + "]";
}

void map_text(std::ostringstream& s, const MapSpec& m, const std::string& indent) {
  auto factors = [&] {
    for (const auto& f : m.factors) {
      s << indent << "  factor: polynomial [";
      const auto& c = f.poly.coefficients();
      for (std::size_t i = 0; i < c.size(); ++i) s << (i ? ", " : "") << complex_text(c[i]);
      s << "], shear " << complex_text(f.shear) << "\n";
    }
    const HenonMap built = build_map(m);
    s << indent << "  domain: radius " << list_text(built.domain().radius)
      << fmt::format(", inner {:.17g}, mid {:.17g}\n", m.domain.inner, m.domain.mid);
  };
  switch (m.kind) {
    case MapSpec::Kind::Generalized:
      s << indent << "generalized\n";
      factors();
      break;
    case MapSpec::Kind::Composition:
      s << indent << "composition\n";
      factors();
      break;
    case MapSpec::Kind::Product:
      s << indent << "product\n";
      map_text(s, *m.first, indent + "  ");
      map_text(s, *m.second, indent + "  ");
      break;
    case MapSpec::Kind::Doubled:
      s << indent << "doubled\n";
      map_text(s, *m.base, indent + "  ");
      break;
  }
}

std::size_t power(std::size_t d, int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) r *= d;
  return r;
}

}  // namespace

double filtration_radius(const std::vector<HenonFactor>& factors) {
  double best = 0.0;
  for (const auto& f : factors) {
    const auto& c = f.poly.coefficients();
    const double lead = std::abs(c.back());
    auto h = [&](double r) {
      double v = lead * std::pow(r, static_cast<double>(c.size() - 1)) - (std::abs(f.shear) + 1.0) * r;
      for (std::size_t j = 0; j + 1 < c.size(); ++j) v -= std::abs(c[j]) * std::pow(r, static_cast<double>(j));
      return v;
    };
    double hi = 1.0 + std::abs(f.shear) + 1.0;
    for (std::size_t j = 0; j + 1 < c.size(); ++j) hi += std::abs(c[j]) / lead;
    hi = std::max(hi, 1.0 + 2.0 / lead);
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) >= 0.0 ? hi : lo) = mid;
    }
    best = std::max(best, hi);
  }
  return best;
}

HenonMap build_map(const MapSpec& spec) {
  switch (spec.kind) {
    case MapSpec::Kind::Generalized:
    case MapSpec::Kind::Composition: {
      std::vector<double> r = spec.domain.radius;
      if (r.empty()) r = {filtration_radius(spec.factors), filtration_radius(spec.factors)};
      if (r.size() != 2) throw ConfigError("domain radius must list two values [radius_M, radius_N]");
      return HenonMap::composition(spec.factors, BidiskDomain::planar(r[0], r[1], spec.domain.inner, spec.domain.mid));
    }
    case MapSpec::Kind::Product:
      return product(build_map(*spec.first), build_map(*spec.second));
    case MapSpec::Kind::Doubled:
      return doubled(build_map(*spec.base));
  }
  throw ConfigError("unknown map kind");
}

std::string experiment_type(const ExperimentBody& body) {
  static const char* names[] = {"periodic_census", "equidistribution", "green", "oseledec", "degrees", "transversality"};
  return names[body.index()];
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  ExperimentConfig c;
  if (!root || root.IsNull()) throw ConfigError("line 1: empty configuration");
  check_keys(root, "configuration", {"schema", "prng_seed", "threads", "output", "map", "tolerances", "experiments"});
  c.schema = scalar<int>(required(root, "schema", "configuration"), "schema");
  if (c.schema != 1) fail(root["schema"], fmt::format("unsupported schema {}", c.schema));
  optional_scalar(root, "prng_seed", c.prng_seed);
  optional_scalar(root, "threads", c.threads);
  optional_scalar(root, "output", c.output);
  c.map = map_value(required(root, "map", "configuration"), "map");
  if (const YAML::Node t = root["tolerances"]) {
    check_keys(t, "tolerances",
               {"newton_tol", "dedup_tol", "singular_threshold", "eta", "grid_density", "green_residual",
                "green_census", "discrepancy_max", "stability_max", "monotone_slack", "contraction_rel",
                "curve_exponent_rel", "surface_exponent_rel", "location_match"});
    auto& o = c.tolerances;
    optional_scalar(t, "newton_tol", o.newton_tol);
    optional_scalar(t, "dedup_tol", o.dedup_tol);
    optional_scalar(t, "singular_threshold", o.singular_threshold);
    optional_scalar(t, "eta", o.eta);
    optional_scalar(t, "grid_density", o.grid_density);
    optional_scalar(t, "green_residual", o.green_residual);
    optional_scalar(t, "green_census", o.green_census);
    optional_scalar(t, "discrepancy_max", o.discrepancy_max);
    optional_scalar(t, "stability_max", o.stability_max);
    optional_scalar(t, "monotone_slack", o.monotone_slack);
    optional_scalar(t, "contraction_rel", o.contraction_rel);
    optional_scalar(t, "curve_exponent_rel", o.curve_exponent_rel);
    optional_scalar(t, "surface_exponent_rel", o.surface_exponent_rel);
    optional_scalar(t, "location_match", o.location_match);
  }
  if (const YAML::Node ex = root["experiments"]) {
    if (!ex.IsSequence() && !ex.IsNull()) fail(ex, "key 'experiments' must be a list");
    std::set<std::string> names;
    for (std::size_t i = 0; ex.IsSequence() && i < ex.size(); ++i) {
      c.experiments.push_back(experiment_value(ex[i], i));
      if (!names.insert(c.experiments.back().name).second)
        fail(ex[i], fmt::format("duplicate experiment name '{}'", c.experiments.back().name));
    }
  }
  try {
    const HenonMap f = build_map(c.map);
    (void)f;
  } catch (const ContractViolation& e) {
    fail(root["map"], fmt::format("invalid map: {}", e.what()));
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read configuration {}", path.string()));
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

std::string resolved_plan(const ExperimentConfig& c) {
  std::ostringstream s;
  const HenonMap f = build_map(c.map);
  const std::size_t d = static_cast<std::size_t>(f.main_degree());
  s << "schema: " << c.schema << "\n";
  s << "prng_seed: " << c.prng_seed << "\n";
  s << "map: " << f.describe() << " (main degree " << d << ", dimension " << f.dimension() << ")\n";
  map_text(s, c.map, "  ");
  const auto& t = c.tolerances;
  s << fmt::format(
      "tolerances: newton_tol {:.17g}, dedup_tol {:.17g}, singular_threshold {:.17g}, eta {:.17g}, grid_density {}, "
      "green_residual {:.17g}, green_census {:.17g}, discrepancy_max {:.17g}, stability_max {:.17g}, "
      "monotone_slack {:.17g}, contraction_rel {:.17g}, curve_exponent_rel {:.17g}, surface_exponent_rel {:.17g}, "
      "location_match {:.17g}\n",
      t.newton_tol, t.dedup_tol, t.singular_threshold, t.eta, t.grid_density, t.green_residual, t.green_census,
      t.discrepancy_max, t.stability_max, t.monotone_slack, t.contraction_rel, t.curve_exponent_rel,
      t.surface_exponent_rel, t.location_match);
  s << "experiments: " << c.experiments.size() << "\n";
  for (const auto& e : c.experiments) {
    s << "- " << e.name << " (" << experiment_type(e.body) << ")\n";
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          std::size_t work = 0;
          if constexpr (std::is_same_v<T, CensusExperiment>) {
            s << "    periods " << list_text(x.periods) << ", require_complete " << x.require_complete << "\n";
            for (int n : x.periods) work += power(d, n);
          } else if constexpr (std::is_same_v<T, EquidistributionExperiment>) {
            s << "    periods " << list_text(x.periods) << ", oracle_depth " << x.oracle_depth
              << ", require_complete " << x.require_complete << "\n";
            for (const auto& a : x.anchors) s << "    anchor a " << point_text(a.a) << " b " << point_text(a.b) << "\n";
            for (int n : x.periods) work += power(d, n);
            work += x.anchors.size() * power(d, 2 * x.oracle_depth);
          } else if constexpr (std::is_same_v<T, GreenExperiment>) {
            s << "    slice base " << point_text(x.slice.base) << ", axes [" << x.slice.axis_u << ", "
              << x.slice.axis_v << "], extent " << fmt::format("{:.17g}", x.slice.extent) << ", resolution "
              << x.slice.resolution << "\n";
            s << "    max_n " << x.max_n << ", samples " << x.samples << ", census_periods "
              << list_text(x.census_periods) << "\n";
            work = x.slice.resolution * x.slice.resolution + x.samples;
            for (int n : x.census_periods) work += power(d, n);
          } else if constexpr (std::is_same_v<T, OseledecExperiment>) {
            s << "    steps " << x.steps << ", delta " << fmt::format("{:.17g}", x.delta) << ", alignment_periods "
              << list_text(x.alignment_periods) << ", census_period " << x.census_period << ", radius "
              << fmt::format("{:.17g}", x.radius) << "\n";
            s << "    anchor a " << point_text(x.anchor.a) << " b " << point_text(x.anchor.b) << "\n";
            work = power(d, x.census_period);
            for (int n : x.alignment_periods) work += power(d, 2 * n);
          } else if constexpr (std::is_same_v<T, DegreesExperiment>) {
            s << "    n_max " << x.n_max << ", product " << x.product << ", slice " << complex_text(x.slice)
              << ", rel_tol " << fmt::format("{:.17g}", x.rel_tol) << ", samples " << x.samples << "\n";
            work = power(d, x.n_max) * (x.product ? 4 : 1) + (x.product ? x.samples * (x.n_max + 1) * 2 : 0);
          } else if constexpr (std::is_same_v<T, TransversalityExperiment>) {
            s << "    periods " << list_text(x.periods) << ", epsilon " << fmt::format("{:.17g}", x.epsilon)
              << ", eta " << fmt::format("{:.17g}", x.eta) << ", samples " << x.samples << ", doubled_periods "
              << list_text(x.doubled_periods) << "\n";
            for (int n : x.periods) work += power(d, n) + x.samples;
          }
          s << "    estimated work units " << work << "\n";
        },
        e.body);
  }
  return s.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace henonlab
