#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sctmd/errors.hpp"
#include "sctmd/segmentation.hpp"

namespace sctmd {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double component_log(const GmmModel& m, int k, double y) {
  double d = y - m.means[k];
  return std::log(m.weights[k]) - 0.5 * (kLog2Pi + std::log(m.variances[k])) - 0.5 * d * d / m.variances[k];
}

double log_sum_exp(std::span<const double> v) {
  double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace

double GmmModel::log_density(double y) const {
  std::vector<double> lp(weights.size());
  for (int k = 0; k < n_components(); ++k) lp[k] = component_log(*this, k, y);
  return log_sum_exp(lp);
}

int GmmModel::classify(double y) const {
  int best = 0;
  double best_lp = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_components(); ++k) {
    double lp = component_log(*this, k, y);
    if (lp > best_lp) {
      best_lp = lp;
      best = k;
    }
  }
  return best;
}

GmmModel gmm_fit(std::span<const double> values, int K) {
  const std::size_t n = values.size();
  if (K < 1) throw InputError("GMM needs at least one component");
  if (n <= std::size_t(K)) throw InputError("GMM needs more samples than components");

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= double(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= double(n);
  const double floor = std::max(1e-8 * var, 1e-300);

  GmmModel m;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < K; ++k) {
    double q = (k + 0.5) / K;
    m.means.push_back(sorted[std::min(n - 1, std::size_t(q * double(n)))]);
  }
  double pooled = 0.0;
  for (double v : values) {
    double best = std::numeric_limits<double>::infinity();
    for (double mu : m.means) best = std::min(best, (v - mu) * (v - mu));
    pooled += best;
  }
  pooled = std::max(pooled / double(n), floor);
  m.weights.assign(K, 1.0 / K);
  m.variances.assign(K, pooled);

  std::vector<double> resp(n * K), point_ll(n), lp(K);
  auto e_step = [&]() {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = 0; k < K; ++k) lp[k] = component_log(m, k, values[i]);
      double l = log_sum_exp(lp);
      point_ll[i] = l;
      ll += l;
      for (int k = 0; k < K; ++k) resp[i * K + k] = std::exp(lp[k] - l);
    }
    return ll;
  };

  double ll = e_step();
  for (int it = 0; it < 200; ++it) {
    m.iterations = it + 1;
    for (int k = 0; k < K; ++k) {
      double nk = 0.0, s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * K + k];
        s += resp[i * K + k] * values[i];
      }
      if (nk < 1e-10 * double(n)) {
        std::size_t worst = std::size_t(std::min_element(point_ll.begin(), point_ll.end()) - point_ll.begin());
        m.means[k] = values[worst];
        m.variances[k] = pooled;
        m.weights[k] = 1.0 / double(n);
        continue;
      }
      double mu = s / nk;
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) v += resp[i * K + k] * (values[i] - mu) * (values[i] - mu);
      m.means[k] = mu;
      m.variances[k] = std::max(v / nk, floor);
      m.weights[k] = nk / double(n);
    }
    double wsum = 0.0;
    for (double w : m.weights) wsum += w;
    for (double& w : m.weights) w /= wsum;

    double ll_new = e_step();
    bool done = std::abs(ll_new - ll) < 1e-6 * std::max(std::abs(ll), 1e-300);
    ll = ll_new;
    if (done) {
      m.converged = true;
      break;
    }
  }
  m.loglikelihood = ll;
  return m;
}

std::vector<double> normalize_min_max(std::span<const double> values) {
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double a = *lo, range = *hi - *lo;
  std::vector<double> out(values.size(), 0.0);
  if (range > 0.0)
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - a) / range;
  return out;
}

int select_reference_bin(const MultiEnergyImage& y, int K, std::vector<double>* lls) {
  if (y.n_bins() < 2) throw InputError("reference-bin selection needs at least two bins");
  std::vector<double> ll(y.n_bins());
  int best = 0;
  for (int b = 0; b < y.n_bins(); ++b) {
    ll[b] = gmm_fit(normalize_min_max(y.data.channel(b)), K).loglikelihood;
    if (ll[b] > ll[best]) best = b;
  }
  if (lls) *lls = std::move(ll);
  return best;
}

LabelImage build_label_image(const MultiEnergyImage& y, int ref_bin, int K) {
  if (ref_bin < 0 || ref_bin >= y.n_bins()) throw InputError("reference bin out of range");
  const std::size_t n = y.data.pixels();
  auto norm = normalize_min_max(y.data.channel(ref_bin));
  GmmModel model = gmm_fit(norm, K);

  std::vector<int> raw(n);
  std::vector<std::size_t> counts(K, 0);
  for (std::size_t p = 0; p < n; ++p) {
    raw[p] = model.classify(norm[p]);
    ++counts[raw[p]];
  }
  LabelImage out;
  out.width = y.data.width;
  out.height = y.data.height;
  std::vector<int> remap(K, -1);
  for (int k = 0; k < K; ++k) {
    if (counts[k] > 0)
      remap[k] = out.n_classes++;
    else
      out.notes.push_back("GMM class " + std::to_string(k) + " is empty; dropped");
  }
  out.labels.resize(n);
  for (std::size_t p = 0; p < n; ++p) out.labels[p] = remap[raw[p]];

  out.means = Eigen::MatrixXd::Zero(out.n_classes, y.n_bins());
  std::vector<double> sizes(out.n_classes, 0.0);
  for (std::size_t p = 0; p < n; ++p) sizes[out.labels[p]] += 1.0;
  for (int b = 0; b < y.n_bins(); ++b) {
    auto ch = y.data.channel(b);
    for (std::size_t p = 0; p < n; ++p) out.means(out.labels[p], b) += ch[p];
  }
  for (int k = 0; k < out.n_classes; ++k) out.means.row(k) /= sizes[k];
  return out;
}

}  // namespace sctmd
