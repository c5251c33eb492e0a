#include <cmath>

#include "sctmd/errors.hpp"
#include "sctmd/segmentation.hpp"

namespace sctmd {

void KernelParams::validate() const {
  if (!(theta >= 0.0 && theta <= 1.0)) throw InputError("kernel theta must lie in [0, 1]");
  if (!(sigma2 > 0.0)) throw InputError("kernel sigma2 must be positive");
  if (n_clusters < 2) throw InputError("kernel k-means needs K >= 2");
  if (n_init < 1 || max_iter < 1) throw InputError("kernel k-means needs n_init >= 1 and max_iter >= 1");
  if (subsample < std::size_t(n_clusters)) throw InputError("kernel k-means subsample smaller than K");
}

double combined_kernel(std::span<const double> y_i, std::span<const double> y_j, std::span<const double> ys_i,
                       std::span<const double> ys_j, const KernelParams& params) {
  double d_spec = 0.0, d_space = 0.0;
  for (std::size_t b = 0; b < y_i.size(); ++b) d_spec += (y_i[b] - y_j[b]) * (y_i[b] - y_j[b]);
  for (std::size_t b = 0; b < ys_i.size(); ++b) d_space += (ys_i[b] - ys_j[b]) * (ys_i[b] - ys_j[b]);
  double s = 0.5 / params.sigma2;
  return (1.0 - params.theta) * std::exp(-d_spec * s) + params.theta * std::exp(-d_space * s);
}

}  // namespace sctmd
