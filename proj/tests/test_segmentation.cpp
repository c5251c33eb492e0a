#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <doctest.h>

#include "sctmd/errors.hpp"
#include "sctmd/segmentation.hpp"

using namespace sctmd;

namespace {

// A B-bin image made of `regions` vertical stripes with distinct spectra plus noise.
MultiEnergyImage striped_image(int w, int h, int bins, int regions, double noise, std::uint64_t seed) {
  MultiEnergyImage y;
  y.data = ImageStack(w, h, bins);
  for (int b = 0; b < bins; ++b) y.bins.push_back({30.0 + 10 * b, 40.0 + 10 * b});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise);
  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      int r = ix * regions / w;
      for (int b = 0; b < bins; ++b)
        y.data.at(b, std::size_t(iy) * w + ix) = 0.2 + 0.1 * r * (1.0 + 0.3 * b * (r % 2)) + g(rng);
    }
  return y;
}

// Relabels a partition by order of first appearance.
std::vector<int> canonical(const std::vector<int>& labels) {
  std::map<int, int> remap;
  std::vector<int> out;
  for (int l : labels) {
    auto it = remap.find(l);
    if (it == remap.end()) it = remap.emplace(l, int(remap.size())).first;
    out.push_back(it->second);
  }
  return out;
}

KernelParams small_params(int k) {
  KernelParams p;
  p.n_clusters = k;
  p.seed = 11;
  return p;
}

}  // namespace

TEST_CASE("GMM recovers two separated components") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> a(0.0, 0.1), b(5.0, 0.2);
  std::vector<double> v;
  for (int i = 0; i < 600; ++i) v.push_back(a(rng));
  for (int i = 0; i < 400; ++i) v.push_back(b(rng));
  GmmModel m = gmm_fit(v, 2);
  std::vector<double> means = m.means;
  std::sort(means.begin(), means.end());
  CHECK(means[0] == doctest::Approx(0.0).epsilon(0.05).scale(1.0));
  CHECK(means[1] == doctest::Approx(5.0).epsilon(0.02));
  CHECK(m.classify(0.0) != m.classify(5.0));
  CHECK(std::isfinite(m.loglikelihood));
  CHECK_THROWS_AS(gmm_fit(std::vector<double>{1.0, 2.0}, 2), InputError);
}

TEST_CASE("min-max normalization") {
  auto n = normalize_min_max(std::vector<double>{2.0, 4.0, 3.0});
  CHECK(n == std::vector<double>{0.0, 1.0, 0.5});
  auto c = normalize_min_max(std::vector<double>{7.0, 7.0});
  CHECK(c == std::vector<double>{0.0, 0.0});
}

TEST_CASE("reference bin is invariant to per-bin affine rescaling") {
  auto y = striped_image(24, 24, 4, 3, 0.01, 2);
  int ref = select_reference_bin(y, 3);
  auto z = y;
  for (int b = 0; b < 4; ++b)
    for (double& v : z.data.channel(b)) v = (1.5 + b) * v + 0.3 * b;
  CHECK(select_reference_bin(z, 3) == ref);
}

TEST_CASE("label image replaces pixels by class means") {
  auto y = striped_image(24, 12, 3, 3, 0.0, 1);
  LabelImage l = build_label_image(y, 0, 3);
  CHECK(l.n_classes == 3);
  for (std::size_t p = 0; p < y.data.pixels(); ++p)
    for (int b = 0; b < 3; ++b) CHECK(l.mean_of(p)(b) == doctest::Approx(y.data.at(b, p)));
}

TEST_CASE("OpenMP cluster sums equal the serial reference") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 300, dim = 4, K = 5;
  std::vector<double> f(n * dim);
  for (double& v : f) v = u(rng);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = int(u(rng) * K);
  std::vector<double> a(n * K), b(n * K);
  serial::gaussian_cluster_sums(f, dim, 0.3, labels, K, a);
  gaussian_cluster_sums(f, dim, 0.3, labels, K, b);
  CHECK(a == b);
}

TEST_CASE("kernel k-means: trace is monotone and matches the brute-force objective") {
  for (int trial = 0; trial < 5; ++trial) {
    auto y = striped_image(16, 12, 3, 4, 0.03, 40 + trial);
    LabelImage ys = build_label_image(y, select_reference_bin(y, 4), 4);
    KernelParams p = small_params(4);
    p.theta = 0.3;
    p.sigma2 = 0.05;
    p.seed = trial;
    auto r = kernel_kmeans(y, ys, p);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
      CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] + 1e-9);
    std::vector<double> spec, space;
    kernel_features(y, ys, spec, space);
    double brute = kernel_kmeans_objective(spec, space, 3, r.partition.labels, p);
    // The spectral Gram matrix is held in single precision.
    CHECK(r.objective == doctest::Approx(brute).epsilon(1e-5));
  }
}

TEST_CASE("kernel k-means separates well-separated regions") {
  auto y = striped_image(20, 10, 3, 3, 0.005, 3);
  LabelImage ys = build_label_image(y, 0, 3);
  KernelParams p = small_params(3);
  p.sigma2 = 0.05;
  auto r = kernel_kmeans(y, ys, p);
  CHECK(r.converged);
  for (int iy = 0; iy < 10; ++iy)
    for (int ix = 0; ix < 20; ++ix) {
      int region = ix * 3 / 20;
      CHECK(r.partition.labels[iy * 20 + ix] == r.partition.labels[region * 7]);
    }
}

TEST_CASE("theta endpoints reduce to single-kernel runs") {
  auto y = striped_image(18, 14, 3, 4, 0.05, 77);
  LabelImage ys = build_label_image(y, select_reference_bin(y, 3), 3);
  std::vector<double> spec, space;
  kernel_features(y, ys, spec, space);
  for (double theta : {0.0, 1.0}) {
    KernelParams p = small_params(4);
    p.theta = theta;
    p.sigma2 = 0.05;
    auto combined = kernel_kmeans(y, ys, p);
    auto single = kernel_kmeans_single(theta == 0.0 ? spec : space, 3, 18, 14, p);
    CHECK(canonical(combined.partition.labels) == canonical(single.partition.labels));
    CHECK(combined.objective == doctest::Approx(single.objective).epsilon(1e-6));
  }
}

TEST_CASE("kernel k-means on a subsample labels every pixel deterministically") {
  auto y = striped_image(40, 40, 3, 4, 0.01, 8);
  LabelImage ys = build_label_image(y, 0, 4);
  KernelParams p = small_params(4);
  p.sigma2 = 0.05;
  p.direct_cap = 500;
  p.subsample = 400;
  auto a = kernel_kmeans(y, ys, p);
  auto b = kernel_kmeans(y, ys, p);
  CHECK(a.subsampled);
  CHECK(a.partition.labels == b.partition.labels);
  for (int l : a.partition.labels) CHECK((l >= 0 && l < 4));
  // Stripes stay intact.
  for (int iy = 0; iy < 40; ++iy)
    for (int ix = 0; ix < 40; ++ix) CHECK(a.partition.labels[iy * 40 + ix] == a.partition.labels[(ix / 10) * 10]);
}

TEST_CASE("kernel parameter validation") {
  KernelParams p;
  p.theta = 1.5;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = KernelParams{};
  p.sigma2 = 0.0;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = KernelParams{};
  p.n_clusters = 1;
  CHECK_THROWS_AS(p.validate(), InputError);
}
