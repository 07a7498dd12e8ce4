#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "henonlab/degrees.hpp"
#include "henonlab/grassmann.hpp"
#include "henonlab/green.hpp"
#include "henonlab/periodic.hpp"
#include "henonlab/transversal.hpp"

namespace henonlab {

/// File-system failure, with the offending path in the message.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TableCell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<TableCell>> rows;
  /// Sort rows lexicographically by their columns before writing.
  bool sort_rows = true;
};

/// Floats with 17 significant digits.
std::string format_cell(const TableCell& cell);

/// Comma-separated with a header row; deterministic row order.
void write_csv(const Table& table, const std::filesystem::path& path);

/// Header and rows as strings (no quoting beyond what write_csv emits).
Table read_csv(const std::filesystem::path& path);

void write_text(const std::string& text, const std::filesystem::path& path);

// Column schemas.

/// re/im of each coordinate, multiplier moduli, stability, multiplicity.
Table census_table(const std::vector<PeriodicPoint>& census);
/// re/im of each coordinate and the weight.
Table measure_table(const EmpiricalMeasure& m);
Table growth_table(const GrowthSeries& g);
Table tangency_table(const TangencySpectrum& s);
/// re(x), im(x), re(y), im(y), G+, G-.
Table green_table(const std::vector<GreenGridPoint>& grid);
/// Base coordinates, weight, then re/im of the direction representative.
Table lifted_table(const std::vector<LiftedAtom>& atoms);
Table decay_table(const DecayRecord& d);

struct ScatterLayer {
  const EmpiricalMeasure* measure = nullptr;
  std::string color = "#1f77b4";
  std::string label;
};

struct ScatterStyle {
  double width_px = 600.0;
  double height_px = 600.0;
  double marker_scale = 40.0;  ///< marker radius in pixels at weight 1
};

/// One circle per atom of each layer, radius marker_scale * sqrt(weight).
/// Real coordinates u and v index re z_0, im z_0, re z_1, ...; the viewport is
/// [-r, r] of the corresponding polydisk radii.
std::string scatter_svg(const std::vector<ScatterLayer>& layers, const BidiskDomain& domain, std::size_t u,
                        std::size_t v, const ScatterStyle& style = {});
void scatter_svg(const std::vector<ScatterLayer>& layers, const BidiskDomain& domain, std::size_t u, std::size_t v,
                 const std::filesystem::path& path, const ScatterStyle& style = {});

/// Hex color of t in [0, 1] on the fixed ramp (luminance increases with t).
std::string ramp_color(double t);

/// grid[row][column]; rectangular and NaN-free. Cells colored on the fixed
/// ramp between min and max, which are annotated.
std::string heatmap_svg(const std::vector<std::vector<double>>& grid, const std::string& title = "");
void heatmap_svg(const std::vector<std::vector<double>>& grid, const std::filesystem::path& path,
                 const std::string& title = "");

}  // namespace henonlab
