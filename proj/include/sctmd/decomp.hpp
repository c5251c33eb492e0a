#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sctmd/image.hpp"
#include "sctmd/materials.hpp"
#include "sctmd/segmentation.hpp"

namespace sctmd {

struct AdmmParams {
  double lambda = 0.0;  // absolute L1 weight
  double rho = 1.0;
  int max_iter = 5000;
  /// Stopping tolerances on |u - z| and rho |z - z_prev|, where u, z are the
  /// column-normalized variables (units of y, 1/cm).
  double tol_primal = 1e-9;
  double tol_dual = 1e-9;
  bool nonneg = true;
  bool adapt_rho = true;
  /// Penalize lambda * |M_a| * |x_a| (M_a the a-th column) instead of
  /// lambda * |x_a|, so every material pays per unit of attenuation.
  bool weight_columns = false;

  void validate() const;
};

struct LassoResult {
  Eigen::MatrixXd x;  // M x N, one column per pixel
  bool converged = true;
  std::size_t unconverged = 0;
  int max_iterations = 0;
  std::vector<std::string> warnings;
};

/// Per-column solve of argmin 0.5 |y - M x|^2 + lambda |W x|_1 by ADMM, for the
/// B x N block `y`. W is the identity, or diag(|M_a|) with weight_columns. Internally the columns of M are normalized to unit length
/// (an exact change of variables); the factorization of (A^T A + rho I) is
/// shared across pixels and re-used when residual balancing changes rho.
LassoResult lasso_admm(const Eigen::MatrixXd& m, const Eigen::MatrixXd& y, const AdmmParams& params);

/// 0.5 |y - M x|^2 + lambda |W x|_1 summed over the columns.
double lasso_objective(const Eigen::MatrixXd& m, const Eigen::MatrixXd& y, const Eigen::MatrixXd& x, double lambda,
                       bool weight_columns = false);

/// scale * max_a |M_a^T y| / w_a over all pixels: the smallest lambda that
/// zeroes every pixel, times `scale`.
double auto_lambda(const MultiEnergyImage& y, const DecompMatrix& m, double scale, bool weight_columns = false);

/// Pixel spectra as a B x N matrix.
Eigen::MatrixXd pixel_matrix(const MultiEnergyImage& y);

DensityMaps maps_from_matrix(const Eigen::MatrixXd& x, const DecompMatrix& m, int width, int height);

/// Lasso on every pixel with the full matrix (the "Coarse" result).
DensityMaps coarse_decompose(const MultiEnergyImage& y, const DecompMatrix& m, const AdmmParams& params);

struct RoiBasisSelection {
  double threshold = 0.0;
  double presence_eps = 0.0;
  std::vector<std::string> material_names;
  std::vector<std::size_t> roi_sizes;
  Eigen::MatrixXd fractions;           // K x M
  std::vector<std::vector<int>> kept;  // per ROI, ascending column indices
  std::vector<std::string> notes;

  int n_rois() const { return static_cast<int>(kept.size()); }
  bool is_kept(int roi, int material) const;
  /// One line per ROI: id, pixel count, kept materials with their fractions.
  std::string report() const;
};

/// Keeps material a in ROI k iff the fraction of ROI pixels with x_a > eps is
/// at least T. If nothing passes, the material with the largest fraction is
/// kept (ties to the lowest index). Empty ROIs keep nothing and are noted.
RoiBasisSelection rpt_select(const DensityMaps& coarse, const LabelImage& rois, double threshold, double presence_eps);

/// Per-ROI lasso with the selected columns on y' = (1 - beta) y + beta * mean_k(y).
/// Unselected materials are exactly zero.
DensityMaps fine_decompose(const MultiEnergyImage& y, const LabelImage& rois, const RoiBasisSelection& selection,
                           const DecompMatrix& m, const AdmmParams& params, double beta);

struct TvDecompParams {
  double weight = 1e-3;
  int max_iter = 300;
  int prox_iter = 50;
  double tol = 1e-7;  // relative objective change
  bool nonneg = true;
  /// Penalize weight * |M_a| * TV(x_a), solved in the column-normalized
  /// variables |M_a| x_a.
  bool weight_columns = false;

  void validate() const;
};

struct TvDecompResult {
  DensityMaps maps;
  std::vector<double> objective_trace;
  bool converged = false;
};

/// 0.5 |Y - M X|_F^2 + weight * sum_a w_a TV(x_a) with isotropic TV; w_a = 1,
/// or |M_a| with weight_columns.
double tv_decomp_objective(const MultiEnergyImage& y, const DecompMatrix& m, const DensityMaps& x, double weight,
                           bool weight_columns = false);

/// Monotone accelerated proximal gradient with step 1/L (L = largest eigenvalue
/// of M^T M by power iteration) and a projected-gradient TV prox per material.
TvDecompResult tv_decompose(const MultiEnergyImage& y, const DecompMatrix& m, const TvDecompParams& params);

}  // namespace sctmd
