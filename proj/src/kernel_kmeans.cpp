#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "sctmd/errors.hpp"
#include "sctmd/rng.hpp"
#include "sctmd/segmentation.hpp"

namespace sctmd {

namespace {

inline double gauss(const double* a, const double* b, int dim, double inv2s2) {
  double d = 0.0;
  for (int c = 0; c < dim; ++c) d += (a[c] - b[c]) * (a[c] - b[c]);
  return std::exp(-d * inv2s2);
}

// Sums of exp(-|q_i - p_z|^2 / 2 sigma2) over points z of each cluster, for
// every query i. Query and point sets may differ.
void cross_sums(const double* query, std::size_t nq, const double* points, std::size_t np, int dim, double sigma2,
                const int* labels, int K, double* sums) {
  const double s = 0.5 / sigma2;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < nq; ++i) {
    double* out = sums + i * K;
    std::fill(out, out + K, 0.0);
    const double* qi = query + i * dim;
    for (std::size_t z = 0; z < np; ++z) out[labels[z]] += gauss(qi, points + z * dim, dim, s);
  }
}

// The combined kernel (1-w)*spectral + w*spatial, where the spatial features take
// one of a few distinct values indexed by `space_labels`.
class KernelModel {
 public:
  KernelModel(std::span<const double> spectral, int dim, double w_spec, std::span<const int> space_labels,
              Eigen::MatrixXd space_kernel, double w_space, double sigma2, std::size_t gram_cap)
      : spectral_(spectral),
        dim_(dim),
        n_(space_labels.empty() ? spectral.size() / std::size_t(dim) : space_labels.size()),
        w_spec_(w_spec),
        space_labels_(space_labels),
        space_kernel_(std::move(space_kernel)),
        w_space_(w_space),
        inv2s2_(0.5 / sigma2),
        sigma2_(sigma2) {
    if (w_spec_ > 0.0 && n_ <= gram_cap) {
      gram_.resize(n_ * n_);
      const std::size_t n = n_;
#pragma omp parallel for schedule(dynamic, 16)
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
          float k = static_cast<float>(gauss(&spectral_[i * dim_], &spectral_[j * dim_], dim_, inv2s2_));
          gram_[i * n + j] = k;
          gram_[j * n + i] = k;
        }
      }
    }
  }

  std::size_t size() const { return n_; }
  double diag() const { return w_spec_ + w_space_; }

  double kernel(std::size_t i, std::size_t j) const {
    double k = 0.0;
    if (w_spec_ > 0.0)
      k += w_spec_ * (gram_.empty() ? gauss(&spectral_[i * dim_], &spectral_[j * dim_], dim_, inv2s2_)
                                    : double(gram_[i * n_ + j]));
    if (w_space_ > 0.0) k += w_space_ * space_kernel_(space_labels_[i], space_labels_[j]);
    return k;
  }

  // sums[i*K + k] = sum over z in cluster k of K(i, z).
  void cluster_sums(std::span<const int> assign, int K, std::vector<double>& sums) const {
    sums.assign(n_ * K, 0.0);
    const std::size_t n = n_;
    if (w_spec_ > 0.0) {
      if (gram_.empty()) {
        cross_sums(spectral_.data(), n, spectral_.data(), n, dim_, sigma2_, assign.data(), K, sums.data());
      } else {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n; ++i) {
          double* out = &sums[i * K];
          const float* row = &gram_[i * n];
          for (std::size_t z = 0; z < n; ++z) out[assign[z]] += row[z];
        }
      }
      if (w_spec_ != 1.0)
        for (double& v : sums) v *= w_spec_;
    }
    if (w_space_ > 0.0) {
      int L = static_cast<int>(space_kernel_.rows());
      Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(K, L);
      for (std::size_t z = 0; z < n; ++z) counts(assign[z], space_labels_[z]) += 1.0;
      Eigen::MatrixXd per_label = space_kernel_ * counts.transpose();  // L x K
      for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < K; ++k) sums[i * K + k] += w_space_ * per_label(space_labels_[i], k);
    }
  }

 private:
  std::span<const double> spectral_;
  int dim_;
  std::size_t n_;
  double w_spec_;
  std::span<const int> space_labels_;
  Eigen::MatrixXd space_kernel_;
  double w_space_;
  double inv2s2_;
  double sigma2_;
  std::vector<float> gram_;
};

struct CoreResult {
  std::vector<int> assign;
  std::vector<double> sums;  // final cluster sums
  std::vector<double> trace;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
};

std::vector<int> seed_plus_plus(const KernelModel& km, int K, std::mt19937_64& rng) {
  const std::size_t n = km.size();
  std::vector<std::size_t> centers;
  centers.push_back(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = std::max(0.0, 2.0 * km.diag() - 2.0 * km.kernel(i, centers[0]));
  while (centers.size() < std::size_t(K)) {
    double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      double c = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        c += d2[i];
        if (u < c && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    }
    centers.push_back(pick);
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], std::max(0.0, 2.0 * km.diag() - 2.0 * km.kernel(i, pick)));
  }
  std::vector<int> assign(n);
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    double best_k = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      double v = km.kernel(i, centers[k]);
      if (v > best_k) {
        best_k = v;
        best = k;
      }
    }
    assign[i] = best;
  }
  return assign;
}

CoreResult run_core(const KernelModel& km, int K, int max_iter, std::vector<int> assign) {
  const std::size_t n = km.size();
  CoreResult r;
  std::vector<double> size(K), within(K), dist(n);
  for (int it = 0;; ++it) {
    km.cluster_sums(assign, K, r.sums);
    std::fill(size.begin(), size.end(), 0.0);
    std::fill(within.begin(), within.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      size[assign[i]] += 1.0;
      within[assign[i]] += r.sums[i * K + assign[i]];
    }
    double obj = km.diag() * double(n);
    for (int k = 0; k < K; ++k)
      if (size[k] > 0.0) obj -= within[k] / size[k];
    r.trace.push_back(obj);
    r.objective = obj;
    r.iterations = it;
    if (it == max_iter) break;

    bool changed = false;
    std::vector<int> next(assign);
    for (std::size_t i = 0; i < n; ++i) {
      auto d = [&](int k) {
        return km.diag() - 2.0 * r.sums[i * K + k] / size[k] + within[k] / (size[k] * size[k]);
      };
      double d_cur = d(assign[i]);
      int best = assign[i];
      double d_best = d_cur;
      for (int k = 0; k < K; ++k) {
        if (size[k] == 0.0 || k == assign[i]) continue;
        double dk = d(k);
        if (dk < d_best - 1e-12 || (best != assign[i] && dk < d_best)) {
          d_best = dk;
          best = k;
        }
      }
      dist[i] = d_best;
      if (best != assign[i]) {
        next[i] = best;
        changed = true;
      }
    }
    // Empty clusters take the point farthest from its (old) centroid.
    std::vector<std::size_t> count(K, 0);
    for (int a : next) ++count[a];
    for (int k = 0; k < K; ++k) {
      if (count[k] > 0) continue;
      std::size_t far = n;
      double far_d = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i)
        if (count[next[i]] > 1 && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      if (far == n) continue;
      --count[next[far]];
      next[far] = k;
      ++count[k];
      dist[far] = -std::numeric_limits<double>::infinity();
      changed = true;
    }
    if (!changed) {
      r.converged = true;
      break;
    }
    assign.swap(next);
  }
  r.assign = std::move(assign);
  return r;
}

CoreResult best_of_restarts(const KernelModel& km, const KernelParams& p) {
  CoreResult best;
  bool have = false;
  for (int r = 0; r < p.n_init; ++r) {
    std::mt19937_64 rng(derive_seed(p.seed, "kernel-kmeans") + std::uint64_t(r));
    CoreResult c = run_core(km, p.n_clusters, p.max_iter, seed_plus_plus(km, p.n_clusters, rng));
    if (!have || c.objective < best.objective) {
      best = std::move(c);
      have = true;
    }
  }
  return best;
}

LabelImage make_partition(std::vector<int> labels, int K, int width, int height, const MultiEnergyImage* y) {
  LabelImage out;
  out.width = width;
  out.height = height;
  out.n_classes = K;
  out.labels = std::move(labels);
  if (y) {
    out.means = Eigen::MatrixXd::Zero(K, y->n_bins());
    std::vector<double> size(K, 0.0);
    for (int l : out.labels) size[l] += 1.0;
    for (int b = 0; b < y->n_bins(); ++b) {
      auto ch = y->data.channel(b);
      for (std::size_t p = 0; p < out.labels.size(); ++p) out.means(out.labels[p], b) += ch[p];
    }
    for (int k = 0; k < K; ++k)
      if (size[k] > 0.0) out.means.row(k) /= size[k];
      else out.notes.push_back("ROI " + std::to_string(k) + " is empty");
  }
  return out;
}

Eigen::MatrixXd label_kernel(const Eigen::MatrixXd& scaled_means, double sigma2) {
  const Eigen::Index L = scaled_means.rows();
  Eigen::MatrixXd k(L, L);
  for (Eigen::Index a = 0; a < L; ++a)
    for (Eigen::Index b = 0; b < L; ++b)
      k(a, b) = std::exp(-(scaled_means.row(a) - scaled_means.row(b)).squaredNorm() * 0.5 / sigma2);
  return k;
}

double feature_scale(const MultiEnergyImage& y) {
  double mx = 0.0;
  for (double v : y.data.data) mx = std::max(mx, std::abs(v));
  return mx > 0.0 ? 1.0 / mx : 1.0;
}

}  // namespace

void serial::gaussian_cluster_sums(std::span<const double> f, int dim, double sigma2, std::span<const int> labels,
                                   int K, std::span<double> sums) {
  const std::size_t n = labels.size();
  const double s = 0.5 / sigma2;
  for (std::size_t i = 0; i < n; ++i) {
    double* out = &sums[i * K];
    std::fill(out, out + K, 0.0);
    for (std::size_t z = 0; z < n; ++z) out[labels[z]] += gauss(&f[i * dim], &f[z * dim], dim, s);
  }
}

void gaussian_cluster_sums(std::span<const double> f, int dim, double sigma2, std::span<const int> labels, int K,
                           std::span<double> sums) {
  cross_sums(f.data(), labels.size(), f.data(), labels.size(), dim, sigma2, labels.data(), K, sums.data());
}

void kernel_features(const MultiEnergyImage& y, const LabelImage& ys, std::vector<double>& spectral,
                     std::vector<double>& spatial) {
  const std::size_t n = y.data.pixels();
  const int B = y.n_bins();
  const double s = feature_scale(y);
  spectral.resize(n * B);
  spatial.resize(n * B);
  for (std::size_t p = 0; p < n; ++p)
    for (int b = 0; b < B; ++b) {
      spectral[p * B + b] = y.data.at(b, p) * s;
      spatial[p * B + b] = ys.means(ys.labels[p], b) * s;
    }
}

double kernel_kmeans_objective(std::span<const double> spectral, std::span<const double> spatial, int dim,
                               std::span<const int> labels, const KernelParams& params) {
  const std::size_t n = labels.size();
  int K = *std::max_element(labels.begin(), labels.end()) + 1;
  auto kern = [&](std::size_t i, std::size_t j) {
    return combined_kernel(spectral.subspan(i * dim, dim), spectral.subspan(j * dim, dim),
                           spatial.subspan(i * dim, dim), spatial.subspan(j * dim, dim), params);
  };
  std::vector<double> size(K, 0.0), within(K, 0.0);
  for (int l : labels) size[l] += 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (labels[i] == labels[j]) within[labels[i]] += kern(i, j);
  double obj = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    int k = labels[i];
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (labels[j] == k) s += kern(i, j);
    obj += kern(i, i) - 2.0 * s / size[k] + within[k] / (size[k] * size[k]);
  }
  return obj;
}

KmeansResult kernel_kmeans(const MultiEnergyImage& y, const LabelImage& ys, const KernelParams& params) {
  params.validate();
  const std::size_t n = y.data.pixels();
  const int B = y.n_bins();
  if (ys.labels.size() != n) throw InputError("label image does not match the multi-energy image");
  if (n < std::size_t(params.n_clusters)) throw InputError("fewer pixels than clusters");

  std::vector<double> spectral, spatial;
  kernel_features(y, ys, spectral, spatial);
  Eigen::MatrixXd scaled_means = ys.means * feature_scale(y);
  Eigen::MatrixXd lk = label_kernel(scaled_means, params.sigma2);
  const double w_spec = 1.0 - params.theta;
  const double w_space = params.theta;

  KmeansResult result;
  if (n <= params.direct_cap) {
    KernelModel km(spectral, B, w_spec, ys.labels, lk, w_space, params.sigma2, params.gram_cap);
    CoreResult c = best_of_restarts(km, params);
    result.partition = make_partition(std::move(c.assign), params.n_clusters, y.data.width, y.data.height, &y);
    result.objective = c.objective;
    result.converged = c.converged;
    result.iterations = c.iterations;
    result.objective_trace = std::move(c.trace);
    return result;
  }

  // Cluster a uniform subsample, then give every other pixel the cluster with
  // the smallest kernel distance to the subsample's clusters.
  const std::size_t m = std::min(params.subsample, n);
  std::vector<std::size_t> all(n), pick;
  std::iota(all.begin(), all.end(), std::size_t(0));
  std::mt19937_64 rng(derive_seed(params.seed, "kernel-kmeans-subsample"));
  std::sample(all.begin(), all.end(), std::back_inserter(pick), m, rng);

  std::vector<double> sub_spec(m * B);
  std::vector<int> sub_labels(m);
  for (std::size_t s = 0; s < m; ++s) {
    std::copy_n(&spectral[pick[s] * B], B, &sub_spec[s * B]);
    sub_labels[s] = ys.labels[pick[s]];
  }
  KernelModel km(sub_spec, B, w_spec, sub_labels, lk, w_space, params.sigma2, params.gram_cap);
  CoreResult c = best_of_restarts(km, params);
  const int K = params.n_clusters;

  std::vector<double> size(K, 0.0), within(K, 0.0);
  for (std::size_t s = 0; s < m; ++s) {
    size[c.assign[s]] += 1.0;
    within[c.assign[s]] += c.sums[s * K + c.assign[s]];
  }
  std::vector<int> labels(n, -1);
  std::vector<char> sampled(n, 0);
  for (std::size_t s = 0; s < m; ++s) {
    labels[pick[s]] = c.assign[s];
    sampled[pick[s]] = 1;
  }
  std::vector<std::size_t> rest;
  for (std::size_t p = 0; p < n; ++p)
    if (!sampled[p]) rest.push_back(p);
  std::vector<double> rest_spec(rest.size() * B);
  for (std::size_t r = 0; r < rest.size(); ++r) std::copy_n(&spectral[rest[r] * B], B, &rest_spec[r * B]);
  std::vector<double> sums(rest.size() * K, 0.0);
  if (w_spec > 0.0) {
    cross_sums(rest_spec.data(), rest.size(), sub_spec.data(), m, B, params.sigma2, c.assign.data(), K, sums.data());
    for (double& v : sums) v *= w_spec;
  }
  if (w_space > 0.0) {
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(K, lk.rows());
    for (std::size_t s = 0; s < m; ++s) counts(c.assign[s], sub_labels[s]) += 1.0;
    Eigen::MatrixXd per_label = lk * counts.transpose();
    for (std::size_t r = 0; r < rest.size(); ++r)
      for (int k = 0; k < K; ++k) sums[r * K + k] += w_space * per_label(ys.labels[rest[r]], k);
  }
  const double diag = w_spec + w_space;
  for (std::size_t r = 0; r < rest.size(); ++r) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      if (size[k] == 0.0) continue;
      double d = diag - 2.0 * sums[r * K + k] / size[k] + within[k] / (size[k] * size[k]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    labels[rest[r]] = best;
  }
  result.partition = make_partition(std::move(labels), K, y.data.width, y.data.height, &y);
  result.objective = c.objective;
  result.converged = c.converged;
  result.iterations = c.iterations;
  result.objective_trace = std::move(c.trace);
  result.subsampled = true;
  return result;
}

KmeansResult kernel_kmeans_single(std::span<const double> features, int dim, int width, int height,
                                  const KernelParams& params) {
  params.validate();
  const std::size_t n = features.size() / std::size_t(dim);
  if (n != std::size_t(width) * height) throw InputError("feature count does not match the image size");
  if (n > params.direct_cap) throw InputError("kernel_kmeans_single does not subsample");
  KernelModel km(features, dim, 1.0, {}, Eigen::MatrixXd(), 0.0, params.sigma2, params.gram_cap);
  CoreResult c = best_of_restarts(km, params);
  KmeansResult result;
  result.partition = make_partition(std::move(c.assign), params.n_clusters, width, height, nullptr);
  result.objective = c.objective;
  result.converged = c.converged;
  result.iterations = c.iterations;
  result.objective_trace = std::move(c.trace);
  return result;
}

}  // namespace sctmd
