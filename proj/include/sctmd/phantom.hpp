#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sctmd/image.hpp"
#include "sctmd/materials.hpp"

namespace sctmd {

struct Component {
  std::string material;
  double density_mg_cc = 0.0;
};

struct DiskInsert {
  double center_x_cm = 0.0;
  double center_y_cm = 0.0;
  double radius_cm = 0.0;
  std::vector<Component> composition;
};

/// Disk phantom on a width x height grid centred on the origin. Inserts are
/// painted in order, so later disks override earlier ones.
struct PhantomSpec {
  int width = 0;
  int height = 0;
  double pixel_size_cm = 0.0;
  std::vector<Component> background;
  std::vector<DiskInsert> inserts;

  void validate(std::span<const std::string> materials) const;
};

PhantomSpec parse_phantom_spec(std::string_view json_text, const std::string& source = "phantom");
PhantomSpec load_phantom_spec(const std::filesystem::path& path);

/// Centre of pixel (ix, iy) in cm.
inline double pixel_center_x(int ix, int width, double pixel_size) { return (ix + 0.5 - 0.5 * width) * pixel_size; }
inline double pixel_center_y(int iy, int height, double pixel_size) { return (iy + 0.5 - 0.5 * height) * pixel_size; }

/// Center-in-circle rasterization into g/cm^3 maps, one per entry of `materials`.
/// Partially overlapping disks are reported in DensityMaps::warnings.
DensityMaps rasterize(const PhantomSpec& spec, std::span<const std::string> materials);

/// mu(x, E) = sum over materials of mu_m(E) * rho(x), in 1/cm.
std::vector<double> attenuation_image(const DensityMaps& maps, std::span<const MaterialTable> tables,
                                      double energy_kev, EdgeSide side = EdgeSide::above);

}  // namespace sctmd
