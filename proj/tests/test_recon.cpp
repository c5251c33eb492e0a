#include <cmath>
#include <random>

#include <doctest.h>

#include "sctmd/errors.hpp"
#include "sctmd/projector.hpp"
#include "sctmd/recon.hpp"

using namespace sctmd;

namespace {

std::vector<double> disk_image(int n, double pixel, double radius, double value) {
  std::vector<double> img(std::size_t(n) * n, 0.0);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      double x = (ix + 0.5 - 0.5 * n) * pixel, y = (iy + 0.5 - 0.5 * n) * pixel;
      if (x * x + y * y <= radius * radius) img[std::size_t(iy) * n + ix] = value;
    }
  return img;
}

}  // namespace

TEST_CASE("total variation of simple images") {
  std::vector<double> flat(25, 3.0);
  CHECK(total_variation(flat, 5, 5) == 0.0);
  std::vector<double> step(25, 0.0);
  for (int iy = 0; iy < 5; ++iy)
    for (int ix = 3; ix < 5; ++ix) step[iy * 5 + ix] = 1.0;
  CHECK(total_variation(step, 5, 5) == doctest::Approx(5.0));
}

TEST_CASE("TV descent never increases TV") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> img(400);
  for (double& v : img) v = u(rng);
  double before = total_variation(img, 20, 20);
  tv_descent(img, 20, 20, 0.5, 10);
  CHECK(total_variation(img, 20, 20) <= before);
}

TEST_CASE("noiseless disk reconstruction") {
  const int n = 64;
  const double pixel = 0.1, mu = 0.25;
  auto truth = disk_image(n, pixel, 2.0, mu);
  Geometry g = Geometry::full_circle(90, 96, 0.1, n, n, pixel);
  auto sino = forward_project(truth, g);
  SartTvParams p;
  ReconDiagnostics diag;
  auto img = sart_tv(sino, g, p, &diag);
  CHECK(diag.relative_residual < 0.01);
  CHECK(diag.residuals.size() == 100);
  double sum = 0.0;
  int count = 0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      double x = (ix + 0.5 - 0.5 * n) * pixel, y = (iy + 0.5 - 0.5 * n) * pixel;
      if (x * x + y * y <= 1.5 * 1.5) {
        sum += img[std::size_t(iy) * n + ix];
        ++count;
      }
    }
  CHECK(sum / count == doctest::Approx(mu).epsilon(0.03));
  for (double v : img) CHECK(v >= 0.0);
}

TEST_CASE("reconstruct_all returns one channel per bin") {
  Geometry g = Geometry::full_circle(20, 24, 0.1, 16, 16, 0.1);
  Sinogram s;
  s.kind = SinogramKind::line_integral;
  s.geometry = g;
  s.bins = {{30, 40}, {40, 50}, {50, 60}};
  s.data.assign(3 * g.sino_size(), 0.0);
  auto t = disk_image(16, 0.1, 0.5, 0.2);
  auto line = forward_project(t, g);
  for (int b = 0; b < 3; ++b) std::copy(line.begin(), line.end(), s.bin(b).begin());
  SartTvParams p;
  p.n_iterations = 5;
  auto y = reconstruct_all(s, p);
  CHECK(y.n_bins() == 3);
  CHECK(y.bins == s.bins);
  CHECK(y.data.channel(0)[0] == y.data.channel(2)[0]);
}

TEST_CASE("SART-TV parameter validation") {
  SartTvParams p;
  p.n_iterations = 0;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = SartTvParams{};
  p.relaxation = 0.0;
  CHECK_THROWS_AS(p.validate(), InputError);
}
