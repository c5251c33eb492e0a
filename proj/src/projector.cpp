#include "sctmd/projector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "ray_kernels.hpp"
#include "sctmd/errors.hpp"
#include "sctmd/phantom.hpp"
#include "sctmd/rng.hpp"

namespace sctmd {

Geometry Geometry::full_circle(int n_views, int n_detectors, double spacing, int width, int height,
                               double pixel_size) {
  Geometry g;
  g.n_detectors = n_detectors;
  g.detector_spacing_cm = spacing;
  g.width = width;
  g.height = height;
  g.pixel_size_cm = pixel_size;
  g.angles.resize(n_views);
  for (int v = 0; v < n_views; ++v) g.angles[v] = 2.0 * std::numbers::pi * v / n_views;
  g.validate();
  return g;
}

void Geometry::validate() const {
  if (n_detectors <= 0 || angles.empty()) throw InputError("geometry needs at least one view and one detector");
  if (!(detector_spacing_cm > 0.0)) throw InputError("detector spacing must be positive");
  if (width <= 0 || height <= 0 || !(pixel_size_cm > 0.0)) throw InputError("geometry image grid is invalid");
}

std::string to_string(SinogramKind kind) { return kind == SinogramKind::counts ? "counts" : "line_integral"; }

SinogramKind sinogram_kind_from_string(const std::string& s) {
  if (s == "counts") return SinogramKind::counts;
  if (s == "line_integral") return SinogramKind::line_integral;
  throw InputError("unknown sinogram kind '" + s + "'");
}

void forward_project(std::span<const double> image, const Geometry& g, std::span<double> sino) {
  const int nv = g.n_views();
  const int nd = g.n_detectors;
#pragma omp parallel for schedule(static)
  for (int v = 0; v < nv; ++v) {
    detail::ViewWalk w = detail::make_walk(g, v);
    for (int j = 0; j < nd; ++j)
      sino[std::size_t(v) * nd + j] = detail::ray_sum(image.data(), w, w.start(g.detector_offset(j)));
  }
}

std::vector<double> forward_project(std::span<const double> image, const Geometry& g) {
  std::vector<double> sino(g.sino_size(), 0.0);
  forward_project(image, g, sino);
  return sino;
}

void forward_project_view(std::span<const double> image, const Geometry& g, int view, std::span<double> row) {
  detail::ViewWalk w = detail::make_walk(g, view);
  const int nd = g.n_detectors;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nd; ++j) row[j] = detail::ray_sum(image.data(), w, w.start(g.detector_offset(j)));
}

void back_project_view(std::span<const double> row, const Geometry& g, int view, std::span<double> image) {
  detail::ViewWalk w = detail::make_walk(g, view);
  const int nd = g.n_detectors;
  // Each major line is owned by one thread; detectors are visited in order so
  // every pixel accumulates in the same order as the serial kernel.
#pragma omp parallel for schedule(static)
  for (int i = 0; i < w.n_major; ++i)
    for (int j = 0; j < nd; ++j)
      detail::ray_scatter_line(image.data(), w, w.start(g.detector_offset(j)), i, row[j]);
}

void back_project(std::span<const double> sino, const Geometry& g, std::span<double> image) {
  for (int v = 0; v < g.n_views(); ++v)
    back_project_view(sino.subspan(std::size_t(v) * g.n_detectors, g.n_detectors), g, v, image);
}

std::vector<double> back_project(std::span<const double> sino, const Geometry& g) {
  std::vector<double> image(g.pixels(), 0.0);
  back_project(sino, g, image);
  return image;
}

Sinogram acquire_mean(const DensityMaps& maps, const Spectrum& spectrum, const DetectorResponse& response,
                      std::span<const MaterialTable> tables, const Geometry& geometry) {
  geometry.validate();
  if (maps.maps.width != geometry.width || maps.maps.height != geometry.height)
    throw InputError("density maps do not match the geometry image grid");

  Sinogram out;
  out.kind = SinogramKind::counts;
  out.geometry = geometry;
  out.bins = response.bins;
  out.data.assign(response.n_bins() * geometry.sino_size(), 0.0);

  // Gather every (energy, side) node with its per-bin weights.
  std::vector<double> edges = collect_edges(tables);
  std::map<std::pair<double, int>, std::vector<std::pair<std::size_t, double>>> nodes;
  for (std::size_t b = 0; b < response.n_bins(); ++b)
    for (const auto& n : bin_quadrature(spectrum, response, b, edges))
      if (n.weight != 0.0) nodes[{n.energy_kev, static_cast<int>(n.side)}].push_back({b, n.weight});

  std::vector<double> line(geometry.sino_size());
  for (const auto& [key, weights] : nodes) {
    auto mu = attenuation_image(maps, tables, key.first, static_cast<EdgeSide>(key.second));
    forward_project(mu, geometry, line);
    for (const auto& [b, w] : weights) {
      auto dst = out.bin(b);
      const std::size_t n = dst.size();
#pragma omp parallel for schedule(static)
      for (std::size_t u = 0; u < n; ++u) dst[u] += w * std::exp(-line[u]);
    }
  }
  return out;
}

Sinogram poisson_sample(const Sinogram& mean, std::uint64_t seed) {
  if (mean.kind != SinogramKind::counts) throw InputError("poisson_sample needs a counts sinogram");
  Sinogram out = mean;
  const std::size_t n = mean.data.size();
  bool negative = false;
#pragma omp parallel for schedule(static) reduction(|| : negative)
  for (std::size_t i = 0; i < n; ++i) {
    double m = mean.data[i];
    if (!(m >= 0.0)) {
      negative = true;
      continue;
    }
    if (m == 0.0) {
      out.data[i] = 0.0;
      continue;
    }
    SplitMix64 gen(splitmix64(seed ^ splitmix64(i)));
    std::poisson_distribution<long long> dist(m);
    out.data[i] = static_cast<double>(dist(gen));
  }
  if (negative) throw InputError("poisson_sample: negative or non-finite mean");
  return out;
}

Sinogram log_normalize(const Sinogram& counts, std::span<const double> blank, double floor) {
  if (counts.kind != SinogramKind::counts) throw InputError("log_normalize needs a counts sinogram");
  if (blank.size() != counts.n_bins()) throw InputError("log_normalize: blank count per bin required");
  Sinogram out = counts;
  out.kind = SinogramKind::line_integral;
  for (std::size_t b = 0; b < counts.n_bins(); ++b) {
    if (!(blank[b] > 0.0)) throw NumericalError("energy bin " + bin_label(counts.bins[b]) + " has zero blank fluence");
    auto src = counts.bin(b);
    auto dst = out.bin(b);
    for (std::size_t u = 0; u < src.size(); ++u) dst[u] = -std::log(std::max(src[u], floor) / blank[b]);
  }
  return out;
}

Sinogram log_normalize(const Sinogram& counts, const Spectrum& spectrum, const DetectorResponse& response,
                       double floor) {
  return log_normalize(counts, bin_fluence(spectrum, response), floor);
}

}  // namespace sctmd
