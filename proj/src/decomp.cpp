#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sctmd/decomp.hpp"
#include "sctmd/errors.hpp"

namespace sctmd {

Eigen::MatrixXd pixel_matrix(const MultiEnergyImage& y) {
  const int B = y.n_bins();
  const std::size_t n = y.data.pixels();
  Eigen::MatrixXd out(B, Eigen::Index(n));
  for (int b = 0; b < B; ++b) {
    auto ch = y.data.channel(b);
    for (std::size_t p = 0; p < n; ++p) out(b, Eigen::Index(p)) = ch[p];
  }
  return out;
}

DensityMaps maps_from_matrix(const Eigen::MatrixXd& x, const DecompMatrix& m, int width, int height) {
  DensityMaps out;
  out.maps = ImageStack(width, height, m.n_materials());
  out.material_names = m.material_names;
  for (int a = 0; a < m.n_materials(); ++a) {
    auto ch = out.maps.channel(a);
    for (std::size_t p = 0; p < ch.size(); ++p) ch[p] = x(a, Eigen::Index(p));
  }
  return out;
}

double auto_lambda(const MultiEnergyImage& y, const DecompMatrix& m, double scale, bool weight_columns) {
  if (y.n_bins() != m.n_bins()) throw InputError("image has " + std::to_string(y.n_bins()) + " bins, matrix has " +
                                                 std::to_string(m.n_bins()));
  Eigen::MatrixXd c = (m.entries.transpose() * pixel_matrix(y)).cwiseAbs();
  if (weight_columns) c = m.entries.colwise().norm().transpose().cwiseInverse().asDiagonal() * c;
  return scale * c.maxCoeff();
}

DensityMaps coarse_decompose(const MultiEnergyImage& y, const DecompMatrix& m, const AdmmParams& params) {
  if (y.n_bins() != m.n_bins()) throw InputError("image has " + std::to_string(y.n_bins()) + " bins, matrix has " +
                                                 std::to_string(m.n_bins()));
  LassoResult r = lasso_admm(m.entries, pixel_matrix(y), params);
  DensityMaps out = maps_from_matrix(r.x, m, y.data.width, y.data.height);
  out.warnings = std::move(r.warnings);
  return out;
}

bool RoiBasisSelection::is_kept(int roi, int material) const {
  const auto& k = kept[roi];
  return std::binary_search(k.begin(), k.end(), material);
}

std::string RoiBasisSelection::report() const {
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", threshold);
  os << "# threshold " << buf;
  std::snprintf(buf, sizeof buf, "%.6g", presence_eps);
  os << " presence_eps " << buf << "\n";
  for (int k = 0; k < n_rois(); ++k) {
    os << "roi " << k << " pixels " << roi_sizes[k] << ":";
    for (int a : kept[k]) {
      std::snprintf(buf, sizeof buf, "%.4f", fractions(k, a));
      os << " " << material_names[a] << "=" << buf;
    }
    os << "\n";
  }
  for (const auto& n : notes) os << "# note: " << n << "\n";
  return os.str();
}

RoiBasisSelection rpt_select(const DensityMaps& coarse, const LabelImage& rois, double threshold,
                             double presence_eps) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InputError("RPT threshold must lie in [0, 1]");
  if (!(presence_eps >= 0.0)) throw InputError("presence_eps must be >= 0");
  const std::size_t n = coarse.maps.pixels();
  if (rois.labels.size() != n) throw InputError("ROI image does not match the density maps");
  const int K = rois.n_classes;
  const int M = coarse.maps.channels;

  RoiBasisSelection sel;
  sel.threshold = threshold;
  sel.presence_eps = presence_eps;
  sel.material_names = coarse.material_names;
  sel.roi_sizes.assign(K, 0);
  sel.fractions = Eigen::MatrixXd::Zero(K, M);
  sel.kept.assign(K, {});
  for (std::size_t p = 0; p < n; ++p) {
    int k = rois.labels[p];
    ++sel.roi_sizes[k];
    for (int a = 0; a < M; ++a)
      if (coarse.maps.at(a, p) > presence_eps) sel.fractions(k, a) += 1.0;
  }
  for (int k = 0; k < K; ++k) {
    if (sel.roi_sizes[k] == 0) {
      sel.notes.push_back("ROI " + std::to_string(k) + " is empty; selection skipped");
      continue;
    }
    sel.fractions.row(k) /= double(sel.roi_sizes[k]);
    for (int a = 0; a < M; ++a)
      if (sel.fractions(k, a) >= threshold) sel.kept[k].push_back(a);
    if (sel.kept[k].empty()) {
      Eigen::Index best;
      sel.fractions.row(k).maxCoeff(&best);
      sel.kept[k].push_back(int(best));
      sel.notes.push_back("ROI " + std::to_string(k) + ": no material reached the threshold, kept " +
                          sel.material_names[best]);
    }
  }
  return sel;
}

DensityMaps fine_decompose(const MultiEnergyImage& y, const LabelImage& rois, const RoiBasisSelection& selection,
                           const DecompMatrix& m, const AdmmParams& params, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("fine.beta must lie in [0, 1]");
  if (y.n_bins() != m.n_bins()) throw InputError("image has " + std::to_string(y.n_bins()) + " bins, matrix has " +
                                                 std::to_string(m.n_bins()));
  const std::size_t n = y.data.pixels();
  if (rois.labels.size() != n) throw InputError("ROI image does not match the multi-energy image");
  if (selection.n_rois() != rois.n_classes) throw InputError("selection does not cover every ROI");
  const int B = y.n_bins();
  const int K = rois.n_classes;

  std::vector<std::vector<Eigen::Index>> members(K);
  for (std::size_t p = 0; p < n; ++p) members[rois.labels[p]].push_back(Eigen::Index(p));

  DensityMaps out;
  out.maps = ImageStack(y.data.width, y.data.height, m.n_materials());
  out.material_names = m.material_names;
  for (int k = 0; k < K; ++k) {
    const auto& idx = members[k];
    if (idx.empty() || selection.kept[k].empty()) continue;
    Eigen::MatrixXd yk(B, Eigen::Index(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
      for (int b = 0; b < B; ++b) yk(b, Eigen::Index(j)) = y.data.at(b, std::size_t(idx[j]));
    if (beta > 0.0) {
      Eigen::VectorXd mean = yk.rowwise().mean();
      yk = (1.0 - beta) * yk + beta * mean.replicate(1, yk.cols());
    }
    const auto& cols = selection.kept[k];
    LassoResult r = lasso_admm(m.select_columns(cols).entries, yk, params);
    for (std::size_t j = 0; j < idx.size(); ++j)
      for (std::size_t c = 0; c < cols.size(); ++c)
        out.maps.at(cols[c], std::size_t(idx[j])) = r.x(Eigen::Index(c), Eigen::Index(j));
    for (auto& w : r.warnings) out.warnings.push_back("ROI " + std::to_string(k) + ": " + w);
  }
  return out;
}

}  // namespace sctmd
