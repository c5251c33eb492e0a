#include <algorithm>
#include <cmath>

#include "sctmd/decomp.hpp"
#include "sctmd/errors.hpp"
#include "sctmd/recon.hpp"

namespace sctmd {

namespace {

// Forward differences with a zero last difference (the adjoint pair of div).
void grad(const std::vector<double>& x, int w, int h, std::vector<double>& gx, std::vector<double>& gy) {
  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      std::size_t p = std::size_t(iy) * w + ix;
      gx[p] = ix + 1 < w ? x[p + 1] - x[p] : 0.0;
      gy[p] = iy + 1 < h ? x[p + w] - x[p] : 0.0;
    }
}

// D^T (px, py).
void grad_adjoint(const std::vector<double>& px, const std::vector<double>& py, int w, int h,
                  std::vector<double>& out) {
  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      std::size_t p = std::size_t(iy) * w + ix;
      double v = 0.0;
      if (ix + 1 < w) v -= px[p];
      if (ix > 0) v += px[p - 1];
      if (iy + 1 < h) v -= py[p];
      if (iy > 0) v += py[p - w];
      out[p] = v;
    }
}

// argmin_x 0.5 |x - v|^2 + gamma TV(x), optionally with x >= 0; fast gradient
// projection on the dual.
void tv_prox(std::vector<double>& v, int w, int h, double gamma, int iters, bool nonneg) {
  if (!(gamma > 0.0)) {
    if (nonneg)
      for (double& e : v) e = std::max(e, 0.0);
    return;
  }
  const std::size_t n = v.size();
  std::vector<double> px(n, 0.0), py(n, 0.0), rx(n, 0.0), ry(n, 0.0), px_old(n), py_old(n), x(n), dt(n), gx(n),
      gy(n);
  auto primal = [&](const std::vector<double>& ax, const std::vector<double>& ay) {
    grad_adjoint(ax, ay, w, h, dt);
    for (std::size_t p = 0; p < n; ++p) {
      x[p] = v[p] - gamma * dt[p];
      if (nonneg) x[p] = std::max(x[p], 0.0);
    }
  };
  double t = 1.0;
  const double step = 1.0 / (8.0 * gamma);
  for (int k = 0; k < iters; ++k) {
    primal(rx, ry);
    grad(x, w, h, gx, gy);
    px_old = px;
    py_old = py;
    for (std::size_t p = 0; p < n; ++p) {
      double a = rx[p] + step * gx[p], b = ry[p] + step * gy[p];
      double s = std::max(1.0, std::sqrt(a * a + b * b));
      px[p] = a / s;
      py[p] = b / s;
    }
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double c = (t - 1.0) / t_next;
    for (std::size_t p = 0; p < n; ++p) {
      rx[p] = px[p] + c * (px[p] - px_old[p]);
      ry[p] = py[p] + c * (py[p] - py_old[p]);
    }
    t = t_next;
  }
  primal(px, py);
  v.swap(x);
}

double largest_eigenvalue(const Eigen::MatrixXd& a) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.cols());
  double lam = 0.0;
  for (int k = 0; k < 500; ++k) {
    Eigen::VectorXd av = a * v;
    double nrm = av.norm();
    if (!(nrm > 0.0)) return 0.0;
    double next = v.dot(av) / v.squaredNorm();
    v = av / nrm;
    if (std::abs(next - lam) <= 1e-14 * std::abs(next)) return next;
    lam = next;
  }
  return lam;
}

double objective(const Eigen::MatrixXd& m, const Eigen::MatrixXd& y, const Eigen::MatrixXd& x, int w, int h,
                 double weight) {
  double f = 0.5 * (y - m * x).squaredNorm();
  if (weight > 0.0) {
    std::vector<double> row(x.cols());
    for (Eigen::Index a = 0; a < x.rows(); ++a) {
      for (Eigen::Index p = 0; p < x.cols(); ++p) row[p] = x(a, p);
      f += weight * total_variation(row, w, h);
    }
  }
  return f;
}

}  // namespace

void TvDecompParams::validate() const {
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw InputError("tv.weight must be finite and >= 0");
  if (max_iter < 1 || prox_iter < 1) throw InputError("tv iteration counts must be >= 1");
  if (!(tol >= 0.0)) throw InputError("tv tolerance must be >= 0");
}

double tv_decomp_objective(const MultiEnergyImage& y, const DecompMatrix& m, const DensityMaps& x, double weight,
                           bool weight_columns) {
  Eigen::MatrixXd xm(x.maps.channels, Eigen::Index(x.maps.pixels()));
  for (int a = 0; a < x.maps.channels; ++a)
    for (std::size_t p = 0; p < x.maps.pixels(); ++p) xm(a, Eigen::Index(p)) = x.maps.at(a, p);
  if (!weight_columns) return objective(m.entries, pixel_matrix(y), xm, y.data.width, y.data.height, weight);
  Eigen::VectorXd d = m.entries.colwise().norm().transpose();
  return objective(m.entries * d.cwiseInverse().asDiagonal(), pixel_matrix(y), d.asDiagonal() * xm, y.data.width,
                   y.data.height, weight);
}

TvDecompResult tv_decompose(const MultiEnergyImage& y, const DecompMatrix& m, const TvDecompParams& params) {
  params.validate();
  if (y.n_bins() != m.n_bins()) throw InputError("image has " + std::to_string(y.n_bins()) + " bins, matrix has " +
                                                 std::to_string(m.n_bins()));
  const int w = y.data.width, h = y.data.height;
  // With column weights the iteration runs on u = diag(|M_a|) x, where the
  // weighted penalty becomes a plain TV sum.
  Eigen::VectorXd d = Eigen::VectorXd::Ones(m.entries.cols());
  if (params.weight_columns) {
    d = m.entries.colwise().norm().transpose();
    if ((d.array() <= 0.0).any()) throw InputError("tv_decompose: decomposition matrix has a zero column");
  }
  const Eigen::MatrixXd mm = m.entries * d.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd yy = pixel_matrix(y);
  const Eigen::MatrixXd mtm = mm.transpose() * mm;
  const double L = largest_eigenvalue(mtm);
  if (!(L > 0.0)) throw NumericalError("tv_decompose: decomposition matrix is zero");

  // Start from the per-pixel least-squares solution (projected when nonneg).
  Eigen::MatrixXd x = mtm.ldlt().solve(mm.transpose() * yy);
  if (params.nonneg) x = x.cwiseMax(0.0);

  TvDecompResult out;
  double fx = objective(mm, yy, x, w, h, params.weight);
  out.objective_trace.push_back(fx);
  Eigen::MatrixXd z = x, x_prev = x, u;
  std::vector<double> row(x.cols());
  double t = 1.0;
  for (int it = 0; it < params.max_iter; ++it) {
    u = z - (mtm * z - mm.transpose() * yy) / L;
    for (Eigen::Index a = 0; a < u.rows(); ++a) {
      for (Eigen::Index p = 0; p < u.cols(); ++p) row[p] = u(a, p);
      tv_prox(row, w, h, params.weight / L, params.prox_iter, params.nonneg);
      for (Eigen::Index p = 0; p < u.cols(); ++p) u(a, p) = row[p];
    }
    double fu = objective(mm, yy, u, w, h, params.weight);
    x_prev = x;
    double f_prev = fx;
    if (fu <= fx) {
      x = u;
      fx = fu;
    }
    out.objective_trace.push_back(fx);
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = x + (t / t_next) * (u - x) + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
    if (fu <= f_prev && f_prev - fx <= params.tol * f_prev) {
      out.converged = true;
      break;
    }
  }
  out.maps = maps_from_matrix(d.cwiseInverse().asDiagonal() * x, m, w, h);
  if (!out.converged) out.maps.warnings.push_back("tv_decompose reached the iteration cap");
  return out;
}

}  // namespace sctmd
