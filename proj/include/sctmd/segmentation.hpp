#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sctmd/image.hpp"

namespace sctmd {

// ---------------------------------------------------------------------------
// Gaussian mixture pre-segmentation of single-bin images

struct GmmModel {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;
  double loglikelihood = 0.0;
  int iterations = 0;
  bool converged = false;

  int n_components() const { return static_cast<int>(weights.size()); }
  /// ln p_M(y).
  double log_density(double y) const;
  /// Maximum-posterior component; ties go to the lowest index.
  int classify(double y) const;
};

/// 1-D EM fit: quantile-spaced initial means, uniform weights, pooled variance.
/// Stops when the relative log-likelihood change drops below 1e-6 or after 200
/// iterations. Variances are floored at 1e-8 of the data variance; a component
/// that empties is re-seeded at the worst-fit point.
GmmModel gmm_fit(std::span<const double> values, int n_components);

/// Min-max normalization to [0, 1]; a constant input maps to all zeros.
std::vector<double> normalize_min_max(std::span<const double> values);

/// Bin whose normalized image is best explained by a K-component GMM (largest
/// log-likelihood); ties go to the lowest bin.
int select_reference_bin(const MultiEnergyImage& y, int n_components, std::vector<double>* loglikelihoods = nullptr);

/// Pixel partition plus the mean spectrum of each class (K x B, in 1/cm).
struct LabelImage {
  int width = 0;
  int height = 0;
  int n_classes = 0;
  std::vector<int> labels;
  Eigen::MatrixXd means;
  std::vector<std::string> notes;

  /// Row of `means` for pixel p, i.e. the pixel value of the mean-value image.
  auto mean_of(std::size_t p) const { return means.row(labels[p]); }
};

/// GMM-classifies the normalized reference bin and replaces every pixel by the
/// per-bin mean of its class. Empty classes are dropped and labels compacted.
LabelImage build_label_image(const MultiEnergyImage& y, int ref_bin, int n_components);

// ---------------------------------------------------------------------------
// Kernel k-means on the combined spectral/spatial kernel

struct KernelParams {
  double theta = 0.2;
  double sigma2 = 0.5;
  int n_clusters = 6;
  int n_init = 3;
  int max_iter = 50;
  std::uint64_t seed = 0;
  /// Inputs above this many pixels are clustered on a uniform subsample.
  std::size_t direct_cap = std::size_t(1) << 14;
  std::size_t subsample = std::size_t(1) << 14;
  /// The spectral Gram matrix is stored (as float) up to this many points.
  std::size_t gram_cap = std::size_t(1) << 14;

  void validate() const;
};

/// (1 - theta) exp(-|y_i - y_j|^2 / 2 sigma2) + theta exp(-|ys_i - ys_j|^2 / 2 sigma2).
double combined_kernel(std::span<const double> y_i, std::span<const double> y_j, std::span<const double> ys_i,
                       std::span<const double> ys_j, const KernelParams& params);

struct KmeansResult {
  LabelImage partition;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  bool subsampled = false;
  std::vector<double> objective_trace;  // best restart, one entry per iteration
};

/// ROI partition. Spectral features are the pixel spectra and spatial features
/// the mean-value image rows, both divided by the image's maximum |y| so that
/// sigma2 is scale-free.
KmeansResult kernel_kmeans(const MultiEnergyImage& y, const LabelImage& ys, const KernelParams& params);

/// Kernel k-means with one Gaussian kernel on row-major `features` (n x dim),
/// used as the reference for the theta = 0 / theta = 1 endpoints.
KmeansResult kernel_kmeans_single(std::span<const double> features, int dim, int width, int height,
                                  const KernelParams& params);

/// Features as used by kernel_kmeans: spectra (n x B) and mean-value rows,
/// divided by max |y|.
void kernel_features(const MultiEnergyImage& y, const LabelImage& ys, std::vector<double>& spectral,
                     std::vector<double>& spatial);

/// sum over points of K(p,p) - 2 mean_{z in pi_k} K(p,z) + mean_{z,z' in pi_k} K(z,z')
/// for an explicit partition, evaluated by brute force on the combined kernel.
double kernel_kmeans_objective(std::span<const double> spectral, std::span<const double> spatial, int dim,
                               std::span<const int> labels, const KernelParams& params);

namespace serial {
/// Reference for the per-point cluster kernel sums used by kernel_kmeans:
/// sums[i*K + k] = sum over z with labels[z] == k of exp(-|f_i - f_z|^2 / 2 sigma2).
void gaussian_cluster_sums(std::span<const double> features, int dim, double sigma2, std::span<const int> labels,
                           int n_clusters, std::span<double> sums);
}  // namespace serial

/// OpenMP version of serial::gaussian_cluster_sums (identical results).
void gaussian_cluster_sums(std::span<const double> features, int dim, double sigma2, std::span<const int> labels,
                           int n_clusters, std::span<double> sums);

}  // namespace sctmd
