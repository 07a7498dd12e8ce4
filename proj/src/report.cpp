#include "henonlab/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace henonlab {

namespace {

bool cell_less(const TableCell& a, const TableCell& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        return x < std::get<T>(b);
      },
      a);
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void ensure_parent(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError(fmt::format("cannot create directory {}: {}", path.parent_path().string(), ec.message()));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void coordinate_header(std::vector<std::string>& header, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    header.push_back(fmt::format("re_z{}", i));
    header.push_back(fmt::format("im_z{}", i));
  }
}

void coordinate_cells(std::vector<TableCell>& row, const ComplexPoint& z) {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    row.emplace_back(z[i].real());
    row.emplace_back(z[i].imag());
  }
}

std::string fixed(double x) { return fmt::format("{:.3f}", x); }

}  // namespace

std::string format_cell(const TableCell& cell) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) return fmt::format("{:.17g}", x);
        else if constexpr (std::is_same_v<T, long long>) return fmt::format("{}", x);
        else return quote(x);
      },
      cell);
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  out << text;
  out.close();
  if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

void write_csv(const Table& table, const std::filesystem::path& path) {
  std::vector<std::vector<TableCell>> rows = table.rows;
  if (table.sort_rows)
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), cell_less);
    });
  std::string text;
  for (std::size_t i = 0; i < table.header.size(); ++i) text += (i ? "," : "") + quote(table.header[i]);
  text += "\n";
  for (const auto& row : rows) {
    require(row.size() == table.header.size(), "table row width differs from the header");
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + format_cell(row[i]);
    text += "\n";
  }
  write_text(text, path);
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {} for reading", path.string()));
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    auto fields = split_csv_line(line);
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      std::vector<TableCell> row;
      for (auto& f : fields) row.emplace_back(std::move(f));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table census_table(const std::vector<PeriodicPoint>& census) {
  Table t;
  const std::size_t k = census.empty() ? 0 : static_cast<std::size_t>(census.front().location.size());
  coordinate_header(t.header, k);
  for (std::size_t i = 0; i < k; ++i) t.header.push_back(fmt::format("abs_lambda{}", i));
  for (const char* h : {"stability", "reason", "multiplicity", "sigma_min"}) t.header.emplace_back(h);
  for (const auto& p : census) {
    std::vector<TableCell> row;
    coordinate_cells(row, p.location);
    for (std::size_t i = 0; i < k; ++i) row.emplace_back(i < p.multipliers.size() ? std::abs(p.multipliers[i]) : 0.0);
    row.emplace_back(to_string(p.stability));
    row.emplace_back(to_string(p.reason));
    row.emplace_back(static_cast<long long>(p.multiplicity));
    row.emplace_back(p.sigma_min);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table measure_table(const EmpiricalMeasure& m) {
  Table t;
  const std::size_t k = m.atoms.empty() ? 0 : static_cast<std::size_t>(m.atoms.front().location.size());
  coordinate_header(t.header, k);
  t.header.emplace_back("weight");
  for (const auto& a : m.atoms) {
    std::vector<TableCell> row;
    coordinate_cells(row, a.location);
    row.emplace_back(a.weight);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table growth_table(const GrowthSeries& g) {
  Table t;
  t.header = {"n", "mass", "log_mass", "error"};
  for (std::size_t i = 0; i < g.n_values.size(); ++i)
    t.rows.push_back({static_cast<long long>(g.n_values[i]), g.masses[i],
                      g.masses[i] > 0.0 ? std::log(g.masses[i]) : -std::numeric_limits<double>::infinity(),
                      g.standard_errors[i]});
  return t;
}

Table tangency_table(const TangencySpectrum& s) {
  Table t;
  const std::size_t k = s.records.empty() ? 0 : static_cast<std::size_t>(s.records.front().point.size());
  coordinate_header(t.header, k);
  for (const char* h : {"sigma_min", "simple", "multiplicity"}) t.header.emplace_back(h);
  for (const auto& r : s.records) {
    std::vector<TableCell> row;
    coordinate_cells(row, r.point);
    row.emplace_back(r.sigma_min);
    row.emplace_back(static_cast<long long>(r.simple));
    row.emplace_back(static_cast<long long>(r.multiplicity));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table green_table(const std::vector<GreenGridPoint>& grid) {
  Table t;
  t.header = {"re_x", "im_x", "re_y", "im_y", "g_plus", "g_minus"};
  t.sort_rows = false;
  for (const auto& g : grid) {
    require(g.z.size() >= 2, "green table needs at least two coordinates");
    t.rows.push_back({g.z[0].real(), g.z[0].imag(), g.z[1].real(), g.z[1].imag(), g.g_plus, g.g_minus});
  }
  return t;
}

Table lifted_table(const std::vector<LiftedAtom>& atoms) {
  Table t;
  const std::size_t k = atoms.empty() ? 0 : static_cast<std::size_t>(atoms.front().base.size());
  coordinate_header(t.header, k);
  t.header.emplace_back("weight");
  for (std::size_t i = 0; i < k; ++i) {
    t.header.push_back(fmt::format("re_v{}", i));
    t.header.push_back(fmt::format("im_v{}", i));
  }
  for (const auto& a : atoms) {
    std::vector<TableCell> row;
    coordinate_cells(row, a.base);
    row.emplace_back(a.weight);
    // First column of the representative, phase-normalized so its largest entry is real positive.
    ComplexPoint v = a.direction.basis().col(0);
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    if (std::abs(v[big]) > 0.0) v *= std::conj(v[big]) / std::abs(v[big]);
    coordinate_cells(row, v);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table decay_table(const DecayRecord& d) {
  Table t;
  t.header = {"step", "distance"};
  for (std::size_t i = 0; i < d.distances.size(); ++i) t.rows.push_back({static_cast<long long>(i), d.distances[i]});
  return t;
}

std::string scatter_svg(const std::vector<ScatterLayer>& layers, const BidiskDomain& domain, std::size_t u,
                        std::size_t v, const ScatterStyle& style) {
  require(u < 2 * domain.k() && v < 2 * domain.k(), "projection axis outside the real coordinates");
  const double ru = domain.radius[u / 2], rv = domain.radius[v / 2];
  auto coord = [](const ComplexPoint& z, std::size_t axis) {
    const Complex c = z[static_cast<Eigen::Index>(axis / 2)];
    return axis % 2 == 0 ? c.real() : c.imag();
  };
  std::ostringstream s;
  s << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)",
                   fixed(style.width_px), fixed(style.height_px), fixed(style.width_px), fixed(style.height_px))
    << "\n";
  s << fmt::format(R"(<rect x="0" y="0" width="{}" height="{}" fill="white" stroke="black"/>)",
                   fixed(style.width_px), fixed(style.height_px))
    << "\n";
  for (std::size_t l = 0; l < layers.size(); ++l) {
    require(layers[l].measure != nullptr && !layers[l].measure->atoms.empty(), "scatter layers need nonempty measures");
    s << fmt::format(R"(<g id="layer{}" fill="{}" fill-opacity="0.6">)", l, layers[l].color);
    if (!layers[l].label.empty()) s << "<title>" << layers[l].label << "</title>";
    s << "\n";
    for (const auto& a : layers[l].measure->atoms) {
      const double x = (coord(a.location, u) + ru) / (2.0 * ru) * style.width_px;
      const double y = (rv - coord(a.location, v)) / (2.0 * rv) * style.height_px;
      const double r = style.marker_scale * std::sqrt(std::max(a.weight, 0.0));
      s << fmt::format(R"(<circle cx="{}" cy="{}" r="{}"/>)", fixed(x), fixed(y), fmt::format("{:.4f}", r)) << "\n";
    }
    s << "</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void scatter_svg(const std::vector<ScatterLayer>& layers, const BidiskDomain& domain, std::size_t u, std::size_t v,
                 const std::filesystem::path& path, const ScatterStyle& style) {
  write_text(scatter_svg(layers, domain, u, v, style), path);
}

std::string ramp_color(double t) {
  static constexpr std::array<std::array<double, 3>, 5> anchors{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * (anchors.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos), anchors.size() - 2);
  const double w = pos - static_cast<double>(i);
  std::array<int, 3> c{};
  for (std::size_t j = 0; j < 3; ++j) c[j] = static_cast<int>(std::lround((1 - w) * anchors[i][j] + w * anchors[i + 1][j]));
  return fmt::format("#{:02x}{:02x}{:02x}", c[0], c[1], c[2]);
}

std::string heatmap_svg(const std::vector<std::vector<double>>& grid, const std::string& title) {
  require(!grid.empty() && !grid.front().empty(), "heatmap grid must be nonempty");
  const std::size_t cols = grid.front().size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    require(grid[r].size() == cols, fmt::format("heatmap grid is not rectangular at row {}", r));
    for (std::size_t c = 0; c < cols; ++c) {
      require(!std::isnan(grid[r][c]), fmt::format("heatmap cell ({}, {}) is NaN", r, c));
      lo = std::min(lo, grid[r][c]);
      hi = std::max(hi, grid[r][c]);
    }
  }
  const double cell = 8.0, margin = 40.0;
  const double w = cell * static_cast<double>(cols), h = cell * static_cast<double>(grid.size());
  std::ostringstream s;
  s << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}">)", fixed(w), fixed(h + margin))
    << "\n";
  if (!title.empty()) s << "<title>" << title << "</title>\n";
  s << R"(<g shape-rendering="crispEdges">)" << "\n";
  for (std::size_t r = 0; r < grid.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double t = hi > lo ? (grid[r][c] - lo) / (hi - lo) : 0.0;
      s << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>)", fixed(c * cell),
                       fixed(r * cell), fixed(cell), fixed(cell), ramp_color(t))
        << "\n";
    }
  s << "</g>\n";
  s << fmt::format(R"(<text x="4" y="{}" font-size="12">min = {:.6g}</text>)", fixed(h + 16), lo) << "\n";
  s << fmt::format(R"(<text x="4" y="{}" font-size="12">max = {:.6g}</text>)", fixed(h + 32), hi) << "\n";
  s << "</svg>\n";
  return s.str();
}

void heatmap_svg(const std::vector<std::vector<double>>& grid, const std::filesystem::path& path,
                 const std::string& title) {
  write_text(heatmap_svg(grid, title), path);
}

}  // namespace henonlab
