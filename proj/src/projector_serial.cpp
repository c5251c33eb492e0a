// Reference kernels: plain loops over views, rays and major lines. Kept for
// testing the OpenMP kernels and for benchmarking.
#include "ray_kernels.hpp"
#include "sctmd/projector.hpp"

namespace sctmd::serial {

void forward_project(std::span<const double> image, const Geometry& g, std::span<double> sino) {
  for (int v = 0; v < g.n_views(); ++v) {
    detail::ViewWalk w = detail::make_walk(g, v);
    for (int j = 0; j < g.n_detectors; ++j)
      sino[std::size_t(v) * g.n_detectors + j] = detail::ray_sum(image.data(), w, w.start(g.detector_offset(j)));
  }
}

void back_project(std::span<const double> sino, const Geometry& g, std::span<double> image) {
  for (int v = 0; v < g.n_views(); ++v) {
    detail::ViewWalk w = detail::make_walk(g, v);
    for (int j = 0; j < g.n_detectors; ++j) {
      double val = sino[std::size_t(v) * g.n_detectors + j];
      double f0 = w.start(g.detector_offset(j));
      for (int i = 0; i < w.n_major; ++i) detail::ray_scatter_line(image.data(), w, f0, i, val);
    }
  }
}

}  // namespace sctmd::serial
