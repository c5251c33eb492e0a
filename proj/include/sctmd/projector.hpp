#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sctmd/image.hpp"
#include "sctmd/materials.hpp"

namespace sctmd {

/// Parallel-beam geometry. Detector j sits at offset (j - (n_detectors-1)/2) *
/// spacing from the rotation axis; the ray at angle phi and offset t is
/// t*(cos phi, sin phi) + s*(-sin phi, cos phi). The image grid is centred on
/// the axis.
struct Geometry {
  int n_detectors = 0;
  double detector_spacing_cm = 0.0;
  std::vector<double> angles;
  int width = 0;
  int height = 0;
  double pixel_size_cm = 0.0;

  /// n_views equally spaced angles over [0, 2 pi).
  static Geometry full_circle(int n_views, int n_detectors, double detector_spacing_cm, int width, int height,
                              double pixel_size_cm);

  int n_views() const { return static_cast<int>(angles.size()); }
  std::size_t pixels() const { return std::size_t(width) * height; }
  std::size_t sino_size() const { return std::size_t(n_views()) * n_detectors; }
  double detector_offset(int j) const { return (j - 0.5 * (n_detectors - 1)) * detector_spacing_cm; }
  void validate() const;
};

enum class SinogramKind { counts, line_integral };

std::string to_string(SinogramKind kind);
SinogramKind sinogram_kind_from_string(const std::string& s);

/// Per-bin projection data, bins x views x detectors.
struct Sinogram {
  SinogramKind kind = SinogramKind::counts;
  Geometry geometry;
  std::vector<EnergyBin> bins;
  std::vector<double> data;

  std::size_t n_bins() const { return bins.size(); }
  std::span<double> bin(std::size_t b) { return {data.data() + b * geometry.sino_size(), geometry.sino_size()}; }
  std::span<const double> bin(std::size_t b) const {
    return {data.data() + b * geometry.sino_size(), geometry.sino_size()};
  }
};

// Joseph-style interpolating projector. The OpenMP kernels produce results
// bit-identical to the serial references in namespace `serial`.

void forward_project(std::span<const double> image, const Geometry& geometry, std::span<double> sino);
std::vector<double> forward_project(std::span<const double> image, const Geometry& geometry);
void forward_project_view(std::span<const double> image, const Geometry& geometry, int view,
                          std::span<double> row);

/// Adjoint of forward_project; accumulates into `image`.
void back_project(std::span<const double> sino, const Geometry& geometry, std::span<double> image);
std::vector<double> back_project(std::span<const double> sino, const Geometry& geometry);
void back_project_view(std::span<const double> row, const Geometry& geometry, int view, std::span<double> image);

namespace serial {
void forward_project(std::span<const double> image, const Geometry& geometry, std::span<double> sino);
void back_project(std::span<const double> sino, const Geometry& geometry, std::span<double> image);
}  // namespace serial

/// Noiseless polychromatic photon counts: one forward projection per quadrature
/// node, shared by every bin whose rule contains that node.
Sinogram acquire_mean(const DensityMaps& maps, const Spectrum& spectrum, const DetectorResponse& response,
                      std::span<const MaterialTable> tables, const Geometry& geometry);

/// Independent Poisson draw per entry; entry i uses a generator derived from
/// (seed, i), so the result does not depend on thread count.
Sinogram poisson_sample(const Sinogram& mean, std::uint64_t seed);

inline constexpr double kDefaultCountFloor = 0.5;

/// -ln(max(count, floor) / blank[b]) per bin.
Sinogram log_normalize(const Sinogram& counts, std::span<const double> blank, double floor = kDefaultCountFloor);
Sinogram log_normalize(const Sinogram& counts, const Spectrum& spectrum, const DetectorResponse& response,
                       double floor = kDefaultCountFloor);

}  // namespace sctmd
