#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "henonlab/green.hpp"
#include "henonlab/maps.hpp"
#include "henonlab/measures.hpp"

namespace henonlab {

/// Malformed configuration; the message names the key and line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DomainSpec {
  std::vector<double> radius;  ///< empty: derived from the map
  double inner = 0.5;
  double mid = 0.75;
};

struct MapSpec {
  enum class Kind { Generalized, Composition, Product, Doubled };
  Kind kind = Kind::Generalized;
  std::vector<HenonFactor> factors;          ///< one factor for Generalized
  std::shared_ptr<MapSpec> first, second;    ///< Product
  std::shared_ptr<MapSpec> base;             ///< Doubled
  DomainSpec domain;
};

/// Escape radius of a factor list: the smallest R with |p(x)| - |a| R >= R for
/// |x| >= R (the bidisk radius that makes the map Henon-like).
double filtration_radius(const std::vector<HenonFactor>& factors);

HenonMap build_map(const MapSpec& spec);

struct Tolerances {
  double newton_tol = 1e-10;
  double dedup_tol = 1e-6;
  double singular_threshold = 1e-6;
  double eta = 1e-6;
  std::size_t grid_density = 64;
  double green_residual = 1e-8;
  double green_census = 1e-8;
  double discrepancy_max = 0.1;
  double stability_max = 0.1;
  double monotone_slack = 0.01;
  double contraction_rel = 0.25;
  double curve_exponent_rel = 0.15;
  double surface_exponent_rel = 0.20;
  double location_match = 1e-9;
};

struct CensusExperiment {
  std::vector<int> periods;
  bool require_complete = true;
};

struct EquidistributionExperiment {
  std::vector<int> periods;
  int oracle_depth = 4;
  std::vector<Anchor> anchors;
  bool require_complete = true;
};

struct GreenExperiment {
  GreenSlice slice;
  std::size_t max_n = 40;
  std::size_t samples = 1000;
  std::vector<int> census_periods;
};

struct OseledecExperiment {
  std::size_t steps = 20;
  double delta = 1e-3;
  std::vector<int> alignment_periods{2, 6};
  Anchor anchor;
  int census_period = 8;
  double radius = 0.5;
};

struct DegreesExperiment {
  int n_max = 6;
  bool product = true;
  Complex slice{0.3, 0.2};
  double rel_tol = 0.005;
  std::size_t samples = 20000;
};

struct TransversalityExperiment {
  std::vector<int> periods;
  double epsilon = 0.1;
  double eta = 1e-3;
  std::size_t samples = 2000;
  std::vector<int> doubled_periods;
};

using ExperimentBody = std::variant<CensusExperiment, EquidistributionExperiment, GreenExperiment,
                                    OseledecExperiment, DegreesExperiment, TransversalityExperiment>;

struct ExperimentSpec {
  std::string name;
  ExperimentBody body;
};

/// Type keyword of an experiment body (periodic_census, equidistribution, ...).
std::string experiment_type(const ExperimentBody& body);

struct ExperimentConfig {
  int schema = 1;
  std::uint64_t prng_seed = 1;
  unsigned threads = 0;
  std::string output = "results";
  MapSpec map;
  Tolerances tolerances;
  std::vector<ExperimentSpec> experiments;
};

/// Parses a YAML document; throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Human-readable plan with every resolved value; run and describe share it.
std::string resolved_plan(const ExperimentConfig& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

}  // namespace henonlab
