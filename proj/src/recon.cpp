#include "sctmd/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sctmd/errors.hpp"

namespace sctmd {

void SartTvParams::validate() const {
  if (n_iterations < 1) throw InputError("SART-TV needs at least one iteration");
  if (!(relaxation > 0.0 && relaxation < 2.0)) throw InputError("SART relaxation must lie in (0, 2)");
  if (!(tv_weight >= 0.0)) throw InputError("TV weight must be non-negative");
  if (tv_inner_steps < 0) throw InputError("TV inner steps must be non-negative");
}

SartSystem::SartSystem(const Geometry& geometry) : geometry_(geometry) {
  geometry_.validate();
  std::vector<double> ones(geometry_.pixels(), 1.0);
  row_sums_ = forward_project(ones, geometry_);
  column_sums_.resize(std::size_t(geometry_.n_views()) * geometry_.pixels());
  std::vector<double> ones_row(geometry_.n_detectors, 1.0);
  std::vector<double> tmp(geometry_.pixels());
  for (int v = 0; v < geometry_.n_views(); ++v) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    back_project_view(ones_row, geometry_, v, tmp);
    std::copy(tmp.begin(), tmp.end(), column_sums_.begin() + std::ptrdiff_t(v) * std::ptrdiff_t(tmp.size()));
  }
}

double total_variation(std::span<const double> x, int w, int h) {
  double tv = 0.0;
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      std::size_t p = std::size_t(iy) * w + ix;
      double dx = ix + 1 < w ? x[p + 1] - x[p] : 0.0;
      double dy = iy + 1 < h ? x[p + w] - x[p] : 0.0;
      tv += std::sqrt(dx * dx + dy * dy);
    }
  }
  return tv;
}

namespace {

void tv_gradient(std::span<const double> x, int w, int h, double eps, std::span<double> g) {
  std::fill(g.begin(), g.end(), 0.0);
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      std::size_t p = std::size_t(iy) * w + ix;
      double dx = ix + 1 < w ? x[p + 1] - x[p] : 0.0;
      double dy = iy + 1 < h ? x[p + w] - x[p] : 0.0;
      double n = std::sqrt(dx * dx + dy * dy + eps * eps);
      g[p] -= (dx + dy) / n;
      if (ix + 1 < w) g[p + 1] += dx / n;
      if (iy + 1 < h) g[p + w] += dy / n;
    }
  }
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

void tv_descent(std::span<double> x, int w, int h, double step, int n_steps) {
  if (!(step > 0.0)) return;
  std::vector<double> g(x.size()), trial(x.size());
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  double eps = 1e-6 * std::max(scale, 1e-12);
  double tv = total_variation(x, w, h);
  for (int k = 0; k < n_steps; ++k) {
    tv_gradient(x, w, h, eps, g);
    double gn = norm2(g);
    if (!(gn > 0.0)) return;
    double s = step / gn;
    bool accepted = false;
    for (int halvings = 0; halvings <= 12 && !accepted; ++halvings, s *= 0.5) {
      for (std::size_t p = 0; p < x.size(); ++p) trial[p] = x[p] - s * g[p];
      double tv_trial = total_variation(trial, w, h);
      if (tv_trial <= tv) {
        std::copy(trial.begin(), trial.end(), x.begin());
        tv = tv_trial;
        accepted = true;
      }
    }
    if (!accepted) return;
  }
}

std::vector<double> sart_tv(std::span<const double> b, const SartSystem& system, const SartTvParams& params,
                            ReconDiagnostics* diag) {
  params.validate();
  const Geometry& g = system.geometry();
  if (b.size() != g.sino_size()) throw InputError("sinogram size does not match the geometry");
  const std::size_t np = g.pixels();
  const int nd = g.n_detectors;
  auto row_sums = system.row_sums();

  std::vector<double> x(np, 0.0), prev(np), update(np), row(nd), ax(g.sino_size());
  double b_norm = norm2(b);
  double min_residual = std::numeric_limits<double>::infinity();
  ReconDiagnostics local;

  for (int it = 0; it < params.n_iterations; ++it) {
    prev = x;
    for (int v = 0; v < g.n_views(); ++v) {
      forward_project_view(x, g, v, row);
      const double* bv = b.data() + std::size_t(v) * nd;
      const double* rs = row_sums.data() + std::size_t(v) * nd;
      for (int j = 0; j < nd; ++j) row[j] = rs[j] > 1e-12 ? (bv[j] - row[j]) / rs[j] : 0.0;
      std::fill(update.begin(), update.end(), 0.0);
      back_project_view(row, g, v, update);
      auto cs = system.column_sums(v);
      const double lam = params.relaxation;
#pragma omp parallel for schedule(static)
      for (std::size_t p = 0; p < np; ++p)
        if (cs[p] > 1e-12f) x[p] += lam * update[p] / cs[p];
    }
    if (params.nonneg)
      for (double& v : x) v = std::max(v, 0.0);

    forward_project(x, g, ax);
    double res = 0.0;
    for (std::size_t u = 0; u < ax.size(); ++u) res += (ax[u] - b[u]) * (ax[u] - b[u]);
    res = std::sqrt(res);
    local.residuals.push_back(res);
    min_residual = std::min(min_residual, res);
    if (res > 10.0 * min_residual) {
      std::ostringstream os;
      os << "SART-TV diverged at iteration " << it + 1 << ": residual " << res << " exceeds 10x the minimum "
         << min_residual;
      throw NumericalError(os.str());
    }

    if (params.tv_weight > 0.0 && params.tv_inner_steps > 0) {
      double d = 0.0;
      for (std::size_t p = 0; p < np; ++p) d += (x[p] - prev[p]) * (x[p] - prev[p]);
      tv_descent(x, g.width, g.height, params.tv_weight * std::sqrt(d), params.tv_inner_steps);
    }
    local.tv_values.push_back(total_variation(x, g.width, g.height));
  }
  local.relative_residual = b_norm > 0.0 ? local.residuals.back() / b_norm : local.residuals.back();
  if (diag) *diag = std::move(local);
  return x;
}

std::vector<double> sart_tv(std::span<const double> b, const Geometry& geometry, const SartTvParams& params,
                            ReconDiagnostics* diag) {
  return sart_tv(b, SartSystem(geometry), params, diag);
}

MultiEnergyImage reconstruct_all(const Sinogram& sino, const SartTvParams& params,
                                 std::vector<ReconDiagnostics>* diag) {
  if (sino.kind != SinogramKind::line_integral) throw InputError("reconstruct_all needs line integrals");
  params.validate();
  SartSystem system(sino.geometry);
  MultiEnergyImage out;
  out.bins = sino.bins;
  out.data = ImageStack(sino.geometry.width, sino.geometry.height, static_cast<int>(sino.n_bins()));
  if (diag) diag->assign(sino.n_bins(), {});
  for (std::size_t b = 0; b < sino.n_bins(); ++b) {
    ReconDiagnostics d;
    auto img = sart_tv(sino.bin(b), system, params, &d);
    std::copy(img.begin(), img.end(), out.data.channel(static_cast<int>(b)).begin());
    if (diag) (*diag)[b] = std::move(d);
  }
  return out;
}

}  // namespace sctmd
