#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sctmd/image.hpp"

namespace sctmd {

/// Strictly increasing photon energies in keV, at least two points, all positive.
class EnergyGrid {
 public:
  EnergyGrid() = default;
  explicit EnergyGrid(std::vector<double> energies_kev);

  std::span<const double> energies() const { return energies_; }
  std::size_t size() const { return energies_.size(); }
  double front() const { return energies_.front(); }
  double back() const { return energies_.back(); }

 private:
  std::vector<double> energies_;
};

/// Photon fluence n0(E) sampled on a grid (photons per exposure per keV).
struct Spectrum {
  std::string name;
  EnergyGrid grid;
  std::vector<double> fluence;

  Spectrum() = default;
  Spectrum(std::string name, EnergyGrid grid, std::vector<double> fluence);

  /// Linear interpolation; zero outside the grid.
  double fluence_at(double energy_kev) const;
  Spectrum scaled(double factor) const;
};

/// Bin sensitivity d_i(E) on the spectrum grid. The ideal response is 1 on the
/// closed interval of each bin and 0 elsewhere.
struct DetectorResponse {
  EnergyGrid grid;
  std::vector<EnergyBin> bins;
  std::vector<double> sensitivity;  // bins.size() x grid.size(), row-major
  bool ideal = false;

  static DetectorResponse ideal_response(const EnergyGrid& grid, std::vector<EnergyBin> bins);
  std::size_t n_bins() const { return bins.size(); }
  double sensitivity_at(std::size_t bin, double energy_kev) const;
};

/// Tabulated mass attenuation coefficients (cm^2/g). Energies are non-decreasing;
/// an absorption edge is stored as a pair of rows at the same energy holding the
/// below-edge and above-edge values.
struct MaterialTable {
  std::string name;
  std::vector<double> energies_kev;
  std::vector<double> mass_atten;
  double reference_density = 0.0;  // g/cm^3

  double min_energy() const { return energies_kev.front(); }
  double max_energy() const { return energies_kev.back(); }
  std::vector<double> edge_energies() const;
};

enum class EdgeSide { below, above };

/// B x M effective mass attenuation matrix (cm^2/g).
struct DecompMatrix {
  Eigen::MatrixXd entries;
  std::vector<std::string> material_names;
  std::vector<EnergyBin> bins;

  int n_bins() const { return static_cast<int>(entries.rows()); }
  int n_materials() const { return static_cast<int>(entries.cols()); }
  DecompMatrix select_columns(std::span<const int> columns) const;
  std::string to_csv() const;
};

MaterialTable parse_material_table(std::istream& in, const std::string& source);
MaterialTable load_material_table(const std::filesystem::path& path);

Spectrum parse_spectrum(std::istream& in, const std::string& source);
Spectrum load_spectrum(const std::filesystem::path& path);

/// Log-log linear interpolation. At an edge energy `side` picks the below- or
/// above-edge value; elsewhere it is ignored.
double interpolate_mu(const MaterialTable& table, double energy_kev, EdgeSide side = EdgeSide::above);

/// One sample of the per-bin energy quadrature: the integrand is evaluated at
/// (energy, side) and multiplied by `weight` = n0 * d_i * trapezoid width.
struct QuadratureNode {
  double energy_kev;
  EdgeSide side;
  double weight;
};

/// Trapezoidal rule for bin `bin` over the spectrum grid restricted to the bin,
/// with the bin boundaries and every edge energy in `edges` inserted as nodes
/// (edges as a below/above pair).
std::vector<QuadratureNode> bin_quadrature(const Spectrum& spectrum, const DetectorResponse& response,
                                           std::size_t bin, std::span<const double> edges);

std::vector<double> collect_edges(std::span<const MaterialTable> tables);

/// Blank-scan photon count per bin.
std::vector<double> bin_fluence(const Spectrum& spectrum, const DetectorResponse& response);

/// Fluence-weighted bin average of each table's mass attenuation.
DecompMatrix effective_mu_matrix(const Spectrum& spectrum, const DetectorResponse& response,
                                 std::span<const MaterialTable> tables);

const MaterialTable& find_table(std::span<const MaterialTable> tables, const std::string& name);

}  // namespace sctmd
