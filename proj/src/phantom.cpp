#include "sctmd/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sctmd/errors.hpp"

namespace sctmd {

namespace {

using nlohmann::json;

std::vector<Component> parse_composition(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": composition must be a list");
  std::vector<Component> out;
  for (const auto& c : j) {
    if (!c.is_object() || !c.contains("material") || !c.contains("density_mg_cc"))
      throw InputError(where + ": composition entries need 'material' and 'density_mg_cc'");
    out.push_back({c.at("material").get<std::string>(), c.at("density_mg_cc").get<double>()});
  }
  return out;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
      throw InputError(where + ": unknown key '" + key + "'");
}

}  // namespace

PhantomSpec parse_phantom_spec(std::string_view json_text, const std::string& source) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
  try {
    check_keys(j, {"width", "height", "pixel_size_cm", "background", "inserts"}, source);
    PhantomSpec spec;
    spec.width = j.at("width").get<int>();
    spec.height = j.at("height").get<int>();
    spec.pixel_size_cm = j.at("pixel_size_cm").get<double>();
    spec.background = parse_composition(j.value("background", json::array()), source + ": background");
    int idx = 0;
    for (const auto& d : j.value("inserts", json::array())) {
      std::string where = source + ": inserts[" + std::to_string(idx++) + "]";
      check_keys(d, {"center_cm", "radius_cm", "composition"}, where);
      const auto& c = d.at("center_cm");
      if (!c.is_array() || c.size() != 2) throw InputError(where + ": center_cm must be [x, y]");
      spec.inserts.push_back({c[0].get<double>(), c[1].get<double>(), d.at("radius_cm").get<double>(),
                              parse_composition(d.at("composition"), where)});
    }
    return spec;
  } catch (const json::exception& e) {
    throw InputError(source + ": " + e.what());
  }
}

PhantomSpec load_phantom_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open phantom spec " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_phantom_spec(ss.str(), path.string());
}

void PhantomSpec::validate(std::span<const std::string> materials) const {
  if (width <= 0 || height <= 0) throw InputError("phantom size must be positive");
  if (!(pixel_size_cm > 0.0)) throw InputError("phantom pixel size must be positive");
  auto check = [&](const std::vector<Component>& comp, const std::string& where) {
    for (const auto& c : comp) {
      if (std::find(materials.begin(), materials.end(), c.material) == materials.end())
        throw InputError(where + ": material '" + c.material + "' is not in the declared material set");
      if (!(c.density_mg_cc >= 0.0) || !std::isfinite(c.density_mg_cc))
        throw InputError(where + ": densities must be finite and non-negative");
    }
  };
  check(background, "background");
  double half_w = 0.5 * width * pixel_size_cm;
  double half_h = 0.5 * height * pixel_size_cm;
  for (std::size_t i = 0; i < inserts.size(); ++i) {
    const auto& d = inserts[i];
    std::string where = "inserts[" + std::to_string(i) + "]";
    if (!(d.radius_cm > 0.0)) throw InputError(where + ": radius must be positive");
    if (std::abs(d.center_x_cm) + d.radius_cm > half_w + 1e-12 ||
        std::abs(d.center_y_cm) + d.radius_cm > half_h + 1e-12)
      throw InputError(where + ": disk extends outside the image");
    check(d.composition, where);
  }
}

DensityMaps rasterize(const PhantomSpec& spec, std::span<const std::string> materials) {
  spec.validate(materials);
  DensityMaps out;
  out.material_names.assign(materials.begin(), materials.end());
  out.maps = ImageStack(spec.width, spec.height, static_cast<int>(materials.size()));

  // Owner of each pixel: -1 for background, else the last disk containing its centre.
  std::vector<int> owner(out.maps.pixels(), -1);
  for (std::size_t d = 0; d < spec.inserts.size(); ++d) {
    const auto& disk = spec.inserts[d];
    double r2 = disk.radius_cm * disk.radius_cm;
    for (int iy = 0; iy < spec.height; ++iy) {
      double dy = pixel_center_y(iy, spec.height, spec.pixel_size_cm) - disk.center_y_cm;
      for (int ix = 0; ix < spec.width; ++ix) {
        double dx = pixel_center_x(ix, spec.width, spec.pixel_size_cm) - disk.center_x_cm;
        if (dx * dx + dy * dy <= r2) owner[std::size_t(iy) * spec.width + ix] = static_cast<int>(d);
      }
    }
  }

  for (std::size_t a = 0; a < spec.inserts.size(); ++a) {
    for (std::size_t b = a + 1; b < spec.inserts.size(); ++b) {
      const auto& p = spec.inserts[a];
      const auto& q = spec.inserts[b];
      double dist = std::hypot(p.center_x_cm - q.center_x_cm, p.center_y_cm - q.center_y_cm);
      if (dist < p.radius_cm + q.radius_cm && dist > std::abs(p.radius_cm - q.radius_cm))
        out.warnings.push_back("inserts[" + std::to_string(a) + "] and inserts[" + std::to_string(b) +
                               "] overlap partially; later disk wins");
    }
  }

  auto density_of = [&](const std::vector<Component>& comp, std::size_t m) {
    double rho = 0.0;
    for (const auto& c : comp)
      if (c.material == materials[m]) rho += c.density_mg_cc * 1e-3;
    return rho;
  };
  for (std::size_t m = 0; m < materials.size(); ++m) {
    double bg = density_of(spec.background, m);
    std::vector<double> disk_rho(spec.inserts.size());
    for (std::size_t d = 0; d < spec.inserts.size(); ++d) disk_rho[d] = density_of(spec.inserts[d].composition, m);
    auto ch = out.maps.channel(static_cast<int>(m));
    for (std::size_t p = 0; p < ch.size(); ++p) ch[p] = owner[p] < 0 ? bg : disk_rho[owner[p]];
  }
  return out;
}

std::vector<double> attenuation_image(const DensityMaps& maps, std::span<const MaterialTable> tables,
                                      double energy_kev, EdgeSide side) {
  std::vector<double> mu(maps.maps.pixels(), 0.0);
  for (std::size_t m = 0; m < maps.material_names.size(); ++m) {
    double coeff = interpolate_mu(find_table(tables, maps.material_names[m]), energy_kev, side);
    auto ch = maps.maps.channel(static_cast<int>(m));
    for (std::size_t p = 0; p < mu.size(); ++p) mu[p] += coeff * ch[p];
  }
  return mu;
}

}  // namespace sctmd
