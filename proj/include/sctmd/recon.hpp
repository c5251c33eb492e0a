#pragma once

#include <span>
#include <vector>

#include "sctmd/image.hpp"
#include "sctmd/projector.hpp"

namespace sctmd {

struct SartTvParams {
  int n_iterations = 100;
  double relaxation = 1.0;
  /// TV descent step length as a fraction of the norm of the preceding SART
  /// update (0 disables the regularizer).
  double tv_weight = 0.2;
  int tv_inner_steps = 10;
  bool nonneg = true;

  void validate() const;
};

struct ReconDiagnostics {
  std::vector<double> residuals;  // ||Ax - b|| after each SART sweep (and clamp)
  std::vector<double> tv_values;  // TV after each outer iteration
  double relative_residual = 0.0; // final ||Ax - b|| / ||b||
};

/// Row sums of the system matrix and per-view column sums; shared by every
/// bin reconstructed on the same geometry.
class SartSystem {
 public:
  explicit SartSystem(const Geometry& geometry);

  const Geometry& geometry() const { return geometry_; }
  std::span<const double> row_sums() const { return row_sums_; }
  std::span<const float> column_sums(int view) const {
    return {column_sums_.data() + std::size_t(view) * geometry_.pixels(), geometry_.pixels()};
  }

 private:
  Geometry geometry_;
  std::vector<double> row_sums_;
  std::vector<float> column_sums_;
};

/// Isotropic total variation with forward differences (replicated border).
double total_variation(std::span<const double> image, int width, int height);

/// Normalized steepest descent on smoothed TV. A step that would increase the
/// (unsmoothed) TV is halved until it does not; after 12 halvings the step is skipped.
void tv_descent(std::span<double> image, int width, int height, double step, int n_steps);

/// Alternating SART sweep (views in angular order) and TV descent, starting from zero.
/// Throws NumericalError when the data residual grows 10x above its minimum.
std::vector<double> sart_tv(std::span<const double> sino_bin, const SartSystem& system, const SartTvParams& params,
                            ReconDiagnostics* diag = nullptr);
std::vector<double> sart_tv(std::span<const double> sino_bin, const Geometry& geometry, const SartTvParams& params,
                            ReconDiagnostics* diag = nullptr);

MultiEnergyImage reconstruct_all(const Sinogram& sino, const SartTvParams& params,
                                 std::vector<ReconDiagnostics>* diag = nullptr);

}  // namespace sctmd
