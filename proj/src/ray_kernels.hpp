#pragma once

#include <cmath>

#include "sctmd/projector.hpp"

namespace sctmd::detail {

// Per-view constants of the Joseph traversal. When the ray is closer to the y
// axis (|cos| >= |sin|) it is walked row by row and interpolated along x,
// otherwise column by column and interpolated along y.
struct ViewWalk {
  bool along_rows;
  int n_major;    // rows (along_rows) or columns
  int n_minor;    // pixels per row or per column
  double step;    // chord length per major step
  double slope;   // d(minor coordinate)/d(major index)
  double offset;  // minor coordinate at major index 0 for t = 0
  double t_scale; // d(minor coordinate)/dt
  int major_stride;
  int minor_stride;

  double start(double t) const { return offset + t * t_scale; }
};

inline ViewWalk make_walk(const Geometry& g, int view) {
  double c = std::cos(g.angles[view]);
  double s = std::sin(g.angles[view]);
  double ps = g.pixel_size_cm;
  ViewWalk w{};
  if (std::abs(c) >= std::abs(s)) {
    // x = t / cos - y tan
    w.along_rows = true;
    w.n_major = g.height;
    w.n_minor = g.width;
    w.step = ps / std::abs(c);
    w.slope = -s / c;
    w.offset = 0.5 * g.width - 0.5 - (s / c) * (0.5 - 0.5 * g.height);
    w.t_scale = 1.0 / (c * ps);
    w.major_stride = g.width;
    w.minor_stride = 1;
  } else {
    // y = t / sin - x cot
    w.along_rows = false;
    w.n_major = g.width;
    w.n_minor = g.height;
    w.step = ps / std::abs(s);
    w.slope = -c / s;
    w.offset = 0.5 * g.height - 0.5 - (c / s) * (0.5 - 0.5 * g.width);
    w.t_scale = 1.0 / (s * ps);
    w.major_stride = 1;
    w.minor_stride = g.width;
  }
  return w;
}

inline double ray_sum(const double* img, const ViewWalk& w, double f0) {
  double acc = 0.0;
  for (int i = 0; i < w.n_major; ++i) {
    double f = f0 + i * w.slope;
    double fl = std::floor(f);
    int i0 = static_cast<int>(fl);
    double a = f - fl;
    const double* row = img + std::ptrdiff_t(i) * w.major_stride;
    if (i0 >= 0 && i0 < w.n_minor) acc += (1.0 - a) * row[std::ptrdiff_t(i0) * w.minor_stride];
    if (i0 + 1 >= 0 && i0 + 1 < w.n_minor) acc += a * row[std::ptrdiff_t(i0 + 1) * w.minor_stride];
  }
  return acc * w.step;
}

// Scatters value v along the ray into major line i only.
inline void ray_scatter_line(double* img, const ViewWalk& w, double f0, int i, double v) {
  double f = f0 + i * w.slope;
  double fl = std::floor(f);
  int i0 = static_cast<int>(fl);
  double a = f - fl;
  double* row = img + std::ptrdiff_t(i) * w.major_stride;
  double vs = v * w.step;
  if (i0 >= 0 && i0 < w.n_minor) row[std::ptrdiff_t(i0) * w.minor_stride] += (1.0 - a) * vs;
  if (i0 + 1 >= 0 && i0 + 1 < w.n_minor) row[std::ptrdiff_t(i0 + 1) * w.minor_stride] += a * vs;
}

}  // namespace sctmd::detail
