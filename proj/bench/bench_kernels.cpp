// Serial reference kernels versus their OpenMP versions.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sctmd/projector.hpp"
#include "sctmd/segmentation.hpp"

namespace {

sctmd::Geometry geometry(int n) { return sctmd::Geometry::full_circle(n, n, 0.1, n, n, 0.1); }

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (double& e : v) e = u(rng);
  return v;
}

void BM_ForwardSerial(benchmark::State& st) {
  auto g = geometry(int(st.range(0)));
  auto img = random_vector(g.pixels(), 1);
  std::vector<double> sino(g.sino_size());
  for (auto _ : st) {
    sctmd::serial::forward_project(img, g, sino);
    benchmark::DoNotOptimize(sino.data());
  }
}

void BM_ForwardParallel(benchmark::State& st) {
  auto g = geometry(int(st.range(0)));
  auto img = random_vector(g.pixels(), 1);
  std::vector<double> sino(g.sino_size());
  for (auto _ : st) {
    sctmd::forward_project(img, g, sino);
    benchmark::DoNotOptimize(sino.data());
  }
}

void BM_BackSerial(benchmark::State& st) {
  auto g = geometry(int(st.range(0)));
  auto sino = random_vector(g.sino_size(), 2);
  std::vector<double> img(g.pixels());
  for (auto _ : st) {
    std::fill(img.begin(), img.end(), 0.0);
    sctmd::serial::back_project(sino, g, img);
    benchmark::DoNotOptimize(img.data());
  }
}

void BM_BackParallel(benchmark::State& st) {
  auto g = geometry(int(st.range(0)));
  auto sino = random_vector(g.sino_size(), 2);
  std::vector<double> img(g.pixels());
  for (auto _ : st) {
    std::fill(img.begin(), img.end(), 0.0);
    sctmd::back_project(sino, g, img);
    benchmark::DoNotOptimize(img.data());
  }
}

struct ClusterInput {
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<double> sums;
  static constexpr int kDim = 5;
  static constexpr int kClusters = 6;

  explicit ClusterInput(std::size_t n) : features(random_vector(n * kDim, 3)), labels(n), sums(n * kClusters) {
    for (std::size_t i = 0; i < n; ++i) labels[i] = int(i % kClusters);
  }
};

void BM_ClusterSumsSerial(benchmark::State& st) {
  ClusterInput in(std::size_t(st.range(0)));
  for (auto _ : st) {
    sctmd::serial::gaussian_cluster_sums(in.features, ClusterInput::kDim, 0.5, in.labels, ClusterInput::kClusters,
                                         in.sums);
    benchmark::DoNotOptimize(in.sums.data());
  }
}

void BM_ClusterSumsParallel(benchmark::State& st) {
  ClusterInput in(std::size_t(st.range(0)));
  for (auto _ : st) {
    sctmd::gaussian_cluster_sums(in.features, ClusterInput::kDim, 0.5, in.labels, ClusterInput::kClusters, in.sums);
    benchmark::DoNotOptimize(in.sums.data());
  }
}

}  // namespace

BENCHMARK(BM_ForwardSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardParallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BackSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BackParallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClusterSumsSerial)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClusterSumsParallel)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
