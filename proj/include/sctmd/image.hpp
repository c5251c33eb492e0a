#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sctmd {

/// Energy-bin interval [lo, hi) in keV.
struct EnergyBin {
  double lo_kev = 0.0;
  double hi_kev = 0.0;

  double width() const { return hi_kev - lo_kev; }
  bool operator==(const EnergyBin&) const = default;
};

std::string bin_label(const EnergyBin& bin);

/// A stack of same-sized 2-D rasters, stored channel-major then row-major.
struct ImageStack {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;

  ImageStack() = default;
  ImageStack(int w, int h, int c) : width(w), height(h), channels(c), data(std::size_t(w) * h * c, 0.0) {}

  std::size_t pixels() const { return std::size_t(width) * height; }
  std::span<double> channel(int c) { return {data.data() + c * pixels(), pixels()}; }
  std::span<const double> channel(int c) const { return {data.data() + c * pixels(), pixels()}; }
  double& at(int c, std::size_t p) { return data[c * pixels() + p]; }
  double at(int c, std::size_t p) const { return data[c * pixels() + p]; }
};

/// Per-material mass density rasters in g/cm^3 (ground truth or decomposition output).
struct DensityMaps {
  ImageStack maps;
  std::vector<std::string> material_names;
  std::vector<std::string> warnings;

  int material_index(const std::string& name) const;
};

/// Reconstructed linear attenuation (1/cm), one channel per energy bin.
struct MultiEnergyImage {
  ImageStack data;
  std::vector<EnergyBin> bins;

  int n_bins() const { return data.channels; }
};

}  // namespace sctmd
