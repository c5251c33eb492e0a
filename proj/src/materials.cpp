#include "sctmd/materials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "sctmd/errors.hpp"

namespace sctmd {

std::string bin_label(const EnergyBin& bin) {
  std::ostringstream os;
  os << bin.lo_kev << "-" << bin.hi_kev;
  return os.str();
}

int DensityMaps::material_index(const std::string& name) const {
  auto it = std::find(material_names.begin(), material_names.end(), name);
  return it == material_names.end() ? -1 : static_cast<int>(it - material_names.begin());
}

EnergyGrid::EnergyGrid(std::vector<double> energies_kev) : energies_(std::move(energies_kev)) {
  if (energies_.size() < 2) throw InputError("energy grid needs at least 2 points");
  for (std::size_t i = 0; i < energies_.size(); ++i) {
    if (!(energies_[i] > 0.0) || !std::isfinite(energies_[i]))
      throw InputError("energy grid values must be finite and positive");
    if (i > 0 && !(energies_[i] > energies_[i - 1]))
      throw InputError("energy grid must be strictly increasing");
  }
}

Spectrum::Spectrum(std::string n, EnergyGrid g, std::vector<double> f)
    : name(std::move(n)), grid(std::move(g)), fluence(std::move(f)) {
  if (fluence.size() != grid.size()) throw InputError("spectrum fluence length differs from its grid");
  double total = 0.0;
  for (double v : fluence) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("spectrum fluence must be finite and non-negative");
    total += v;
  }
  if (!(total > 0.0)) throw InputError("spectrum has zero total fluence");
}

namespace {

// Index j such that grid[j] <= e <= grid[j+1]; assumes e inside the grid.
std::size_t bracket(std::span<const double> grid, double e) {
  auto it = std::upper_bound(grid.begin(), grid.end(), e);
  std::size_t j = it == grid.begin() ? 0 : std::size_t(it - grid.begin()) - 1;
  return std::min(j, grid.size() - 2);
}

double lerp_on_grid(std::span<const double> grid, std::span<const double> values, double e) {
  if (e < grid.front() || e > grid.back()) return 0.0;
  std::size_t j = bracket(grid, e);
  double t = (e - grid[j]) / (grid[j + 1] - grid[j]);
  return values[j] + t * (values[j + 1] - values[j]);
}

}  // namespace

double Spectrum::fluence_at(double energy_kev) const {
  return lerp_on_grid(grid.energies(), fluence, energy_kev);
}

Spectrum Spectrum::scaled(double factor) const {
  std::vector<double> f = fluence;
  for (double& v : f) v *= factor;
  return Spectrum(name, grid, std::move(f));
}

DetectorResponse DetectorResponse::ideal_response(const EnergyGrid& grid, std::vector<EnergyBin> bins) {
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (!(bins[i].hi_kev > bins[i].lo_kev)) throw InputError("energy bin " + bin_label(bins[i]) + " is empty");
    if (i > 0 && bins[i].lo_kev < bins[i - 1].hi_kev)
      throw InputError("energy bins must be ordered and non-overlapping");
  }
  DetectorResponse r;
  r.grid = grid;
  r.bins = std::move(bins);
  r.ideal = true;
  auto e = grid.energies();
  r.sensitivity.assign(r.bins.size() * e.size(), 0.0);
  for (std::size_t b = 0; b < r.bins.size(); ++b)
    for (std::size_t g = 0; g < e.size(); ++g)
      if (e[g] >= r.bins[b].lo_kev && e[g] <= r.bins[b].hi_kev) r.sensitivity[b * e.size() + g] = 1.0;
  return r;
}

double DetectorResponse::sensitivity_at(std::size_t bin, double energy_kev) const {
  if (ideal) return (energy_kev >= bins[bin].lo_kev && energy_kev <= bins[bin].hi_kev) ? 1.0 : 0.0;
  auto row = std::span<const double>(sensitivity).subspan(bin * grid.size(), grid.size());
  return lerp_on_grid(grid.energies(), row, energy_kev);
}

std::vector<double> MaterialTable::edge_energies() const {
  std::vector<double> edges;
  for (std::size_t i = 1; i < energies_kev.size(); ++i)
    if (energies_kev[i] == energies_kev[i - 1]) edges.push_back(energies_kev[i]);
  return edges;
}

DecompMatrix DecompMatrix::select_columns(std::span<const int> columns) const {
  DecompMatrix out;
  out.bins = bins;
  out.entries.resize(entries.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.entries.col(static_cast<Eigen::Index>(c)) = entries.col(columns[c]);
    out.material_names.push_back(material_names[columns[c]]);
  }
  return out;
}

std::string DecompMatrix::to_csv() const {
  std::ostringstream os;
  os << "bin";
  for (const auto& n : material_names) os << ',' << n;
  os << '\n';
  char buf[64];
  for (int i = 0; i < n_bins(); ++i) {
    os << bin_label(bins[i]);
    for (int a = 0; a < n_materials(); ++a) {
      std::snprintf(buf, sizeof buf, ",%.8g", entries(i, a));
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

namespace {

struct TwoColumnFile {
  std::map<std::string, std::string> header;
  std::vector<double> x;
  std::vector<double> y;
};

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  return s;
}

TwoColumnFile parse_two_columns(std::istream& in, const std::string& source) {
  TwoColumnFile f;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      auto colon = t.find(':');
      if (colon != std::string::npos) f.header[trim(t.substr(1, colon - 1))] = trim(t.substr(colon + 1));
      continue;
    }
    std::istringstream ls(t);
    double a = 0.0, b = 0.0;
    std::string extra;
    if (!(ls >> a >> b) || (ls >> extra))
      throw InputError(source + ":" + std::to_string(lineno) + ": expected two numeric columns");
    if (!std::isfinite(a) || !std::isfinite(b))
      throw InputError(source + ":" + std::to_string(lineno) + ": non-finite value");
    f.x.push_back(a);
    f.y.push_back(b);
  }
  return f;
}

}  // namespace

MaterialTable parse_material_table(std::istream& in, const std::string& source) {
  TwoColumnFile f = parse_two_columns(in, source);
  MaterialTable t;
  auto name = f.header.find("material");
  if (name == f.header.end() || name->second.empty()) throw InputError(source + ": missing '# material:' header");
  t.name = name->second;
  if (auto d = f.header.find("density_g_cm3"); d != f.header.end()) {
    try {
      t.reference_density = std::stod(d->second);
    } catch (const std::exception&) {
      throw InputError(source + ": bad density_g_cm3 value '" + d->second + "'");
    }
  }
  if (f.x.size() < 2) throw InputError(source + ": material table needs at least 2 rows");
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    if (!(f.x[i] > 0.0)) throw InputError(source + ": energies must be positive");
    if (!(f.y[i] > 0.0)) throw InputError(source + ": mass attenuation coefficients must be positive");
    if (i > 0 && f.x[i] < f.x[i - 1]) throw InputError(source + ": energies must be non-decreasing");
    if (i > 1 && f.x[i] == f.x[i - 1] && f.x[i] == f.x[i - 2])
      throw InputError(source + ": more than two rows share one energy");
  }
  if (f.x.front() == f.x[1] || f.x.back() == f.x[f.x.size() - 2])
    throw InputError(source + ": a table cannot start or end on an edge pair");
  t.energies_kev = std::move(f.x);
  t.mass_atten = std::move(f.y);
  return t;
}

MaterialTable load_material_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open material table " + path.string());
  return parse_material_table(in, path.string());
}

Spectrum parse_spectrum(std::istream& in, const std::string& source) {
  TwoColumnFile f = parse_two_columns(in, source);
  std::string name = f.header.count("spectrum") ? f.header["spectrum"] : source;
  try {
    return Spectrum(name, EnergyGrid(std::move(f.x)), std::move(f.y));
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
}

Spectrum load_spectrum(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open spectrum " + path.string());
  return parse_spectrum(in, path.string());
}

double interpolate_mu(const MaterialTable& table, double energy_kev, EdgeSide side) {
  const auto& e = table.energies_kev;
  const auto& v = table.mass_atten;
  if (!(energy_kev >= e.front() && energy_kev <= e.back()))
    throw InputError("energy " + std::to_string(energy_kev) + " keV outside the '" + table.name + "' table");
  std::size_t n = e.size();
  std::size_t hi;
  if (side == EdgeSide::above) {
    hi = std::size_t(std::upper_bound(e.begin(), e.end(), energy_kev) - e.begin());
    if (hi == n) return v[n - 1];
    if (e[hi - 1] == energy_kev) return v[hi - 1];
  } else {
    hi = std::size_t(std::lower_bound(e.begin(), e.end(), energy_kev) - e.begin());
    if (e[hi] == energy_kev) return v[hi];
  }
  std::size_t lo = hi - 1;
  double t = std::log(energy_kev / e[lo]) / std::log(e[hi] / e[lo]);
  return std::exp(std::log(v[lo]) + t * std::log(v[hi] / v[lo]));
}

std::vector<double> collect_edges(std::span<const MaterialTable> tables) {
  std::vector<double> edges;
  for (const auto& t : tables) {
    auto te = t.edge_energies();
    edges.insert(edges.end(), te.begin(), te.end());
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<QuadratureNode> bin_quadrature(const Spectrum& spectrum, const DetectorResponse& response,
                                           std::size_t bin, std::span<const double> edges) {
  const EnergyBin& b = response.bins.at(bin);
  struct Raw {
    double e;
    EdgeSide side;
  };
  std::vector<Raw> nodes;
  nodes.push_back({b.lo_kev, EdgeSide::above});
  for (double g : spectrum.grid.energies())
    if (g > b.lo_kev && g < b.hi_kev) nodes.push_back({g, EdgeSide::above});
  for (double e : edges) {
    if (e > b.lo_kev && e < b.hi_kev) {
      nodes.push_back({e, EdgeSide::below});
      nodes.push_back({e, EdgeSide::above});
    }
  }
  nodes.push_back({b.hi_kev, EdgeSide::below});
  std::stable_sort(nodes.begin(), nodes.end(), [](const Raw& x, const Raw& y) {
    if (x.e != y.e) return x.e < y.e;
    return x.side == EdgeSide::below && y.side == EdgeSide::above;
  });
  // A grid point that coincides with an edge would otherwise appear three times.
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](const Raw& x, const Raw& y) { return x.e == y.e && x.side == y.side; }),
              nodes.end());

  std::vector<QuadratureNode> out;
  out.reserve(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    double left = k > 0 ? nodes[k].e - nodes[k - 1].e : 0.0;
    double right = k + 1 < nodes.size() ? nodes[k + 1].e - nodes[k].e : 0.0;
    double f = spectrum.fluence_at(nodes[k].e) * response.sensitivity_at(bin, nodes[k].e);
    out.push_back({nodes[k].e, nodes[k].side, f * 0.5 * (left + right)});
  }
  return out;
}

std::vector<double> bin_fluence(const Spectrum& spectrum, const DetectorResponse& response) {
  std::vector<double> out(response.n_bins(), 0.0);
  for (std::size_t b = 0; b < response.n_bins(); ++b)
    for (const auto& node : bin_quadrature(spectrum, response, b, {})) out[b] += node.weight;
  return out;
}

const MaterialTable& find_table(std::span<const MaterialTable> tables, const std::string& name) {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw InputError("no attenuation table for material '" + name + "'");
}

DecompMatrix effective_mu_matrix(const Spectrum& spectrum, const DetectorResponse& response,
                                 std::span<const MaterialTable> tables) {
  DecompMatrix m;
  m.bins = response.bins;
  m.entries.resize(static_cast<Eigen::Index>(response.n_bins()), static_cast<Eigen::Index>(tables.size()));
  for (const auto& t : tables) m.material_names.push_back(t.name);
  std::vector<double> edges = collect_edges(tables);
  for (std::size_t b = 0; b < response.n_bins(); ++b) {
    auto nodes = bin_quadrature(spectrum, response, b, edges);
    double total = 0.0;
    for (const auto& n : nodes) total += n.weight;
    if (!(total > 0.0)) throw NumericalError("energy bin " + bin_label(response.bins[b]) + " has zero fluence");
    for (std::size_t a = 0; a < tables.size(); ++a) {
      double acc = 0.0;
      for (const auto& n : nodes)
        if (n.weight != 0.0) acc += n.weight * interpolate_mu(tables[a], n.energy_kev, n.side);
      m.entries(Eigen::Index(b), Eigen::Index(a)) = acc / total;
    }
  }
  return m;
}

}  // namespace sctmd
