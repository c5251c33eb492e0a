#include <cmath>
#include <string>

#include <doctest.h>

#include "sctmd/errors.hpp"
#include "sctmd/phantom.hpp"

using namespace sctmd;

namespace {

const std::vector<std::string> kMaterials = {"water", "iodine"};

std::string disk_json(double r, const std::string& extra = "") {
  return R"({"width": 20, "height": 20, "pixel_size_cm": 0.5, "background": [],
             "inserts": [{"center_cm": [0, 0], "radius_cm": )" +
         std::to_string(r) + R"(, "composition": [{"material": "water", "density_mg_cc": 1000},
                                                   {"material": "iodine", "density_mg_cc": 5}]})" +
         extra + "]}";
}

}  // namespace

TEST_CASE("parse and rasterize a single disk") {
  auto spec = parse_phantom_spec(disk_json(3.0));
  auto maps = rasterize(spec, kMaterials);
  CHECK(maps.maps.channels == 2);
  std::size_t inside = 0;
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) {
      double x = pixel_center_x(ix, 20, 0.5), y = pixel_center_y(iy, 20, 0.5);
      bool in = x * x + y * y <= 9.0;
      inside += in;
      std::size_t p = std::size_t(iy) * 20 + ix;
      CHECK(maps.maps.at(0, p) == (in ? 1.0 : 0.0));
      CHECK(maps.maps.at(1, p) == doctest::Approx(in ? 0.005 : 0.0));
    }
  CHECK(inside > 100);
  CHECK(maps.warnings.empty());
}

TEST_CASE("later disks override earlier ones and partial overlaps are reported") {
  std::string extra = R"(, {"center_cm": [2, 0], "radius_cm": 1.0, "composition": [{"material": "iodine", "density_mg_cc": 10}]})";
  auto maps = rasterize(parse_phantom_spec(disk_json(1.5, extra)), kMaterials);
  // Pixel centred at (2.25, 0.25) lies only in the second disk.
  std::size_t p = std::size_t(10) * 20 + 14;
  CHECK(maps.maps.at(0, p) == 0.0);
  CHECK(maps.maps.at(1, p) == doctest::Approx(0.010));
  REQUIRE(maps.warnings.size() == 1);
}

TEST_CASE("nested disks are not partial overlaps") {
  std::string extra = R"(, {"center_cm": [0, 0], "radius_cm": 1.0, "composition": []})";
  auto maps = rasterize(parse_phantom_spec(disk_json(3.0, extra)), kMaterials);
  CHECK(maps.warnings.empty());
  CHECK(maps.maps.at(0, std::size_t(10) * 20 + 10) == 0.0);
}

TEST_CASE("phantom validation errors") {
  CHECK_THROWS_AS(parse_phantom_spec("{"), InputError);
  CHECK_THROWS_AS(parse_phantom_spec(R"({"width": 4, "height": 4, "pixel_size_cm": 1, "background": [], "inserts": [], "bogus": 1})"),
                  InputError);
  auto outside = parse_phantom_spec(disk_json(6.0));
  CHECK_THROWS_AS(rasterize(outside, kMaterials), InputError);
  auto spec = parse_phantom_spec(disk_json(3.0));
  const std::vector<std::string> only_water = {"water"};
  CHECK_THROWS_AS(rasterize(spec, only_water), InputError);
}

TEST_CASE("bundled desk phantom loads") {
  auto spec = load_phantom_spec(std::string(SCTMD_DATA_DIR) + "/phantoms/desk.json");
  const std::vector<std::string> mats = {"water", "pmma", "iron", "iodine", "gadolinium"};
  auto maps = rasterize(spec, mats);
  CHECK(maps.maps.width == 256);
  CHECK(maps.warnings.empty());
  for (int a = 0; a < 5; ++a) {
    double mx = 0.0;
    for (double v : maps.maps.channel(a)) mx = std::max(mx, v);
    CHECK(mx > 0.0);
  }
}
