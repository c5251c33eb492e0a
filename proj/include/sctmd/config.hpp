#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sctmd/decomp.hpp"
#include "sctmd/image.hpp"
#include "sctmd/recon.hpp"
#include "sctmd/segmentation.hpp"

namespace sctmd {

/// Everything a pipeline run depends on. See docs/config.md for the file format.
struct RunConfig {
  std::filesystem::path phantom;
  std::filesystem::path spectrum;
  std::filesystem::path material_dir;
  std::vector<std::string> materials;
  std::vector<EnergyBin> bins;
  double photons_per_bin = 1e4;  // mean blank count per ray, averaged over bins
  int n_views = 360;
  int n_detectors = 256;
  double detector_spacing_cm = 0.1;
  std::uint64_t seed = 1;

  SartTvParams sart;
  int gmm_components = 6;
  KernelParams kernel;
  AdmmParams admm{.weight_columns = true};
  double lambda_scale = 0.01;
  double rpt_threshold = 0.4;
  double presence_eps = 1e-4;
  double fine_beta = 0.5;
  TvDecompParams tv{.weight_columns = true};

  std::vector<std::string> methods = {"tv", "coarse", "roi"};
  std::filesystem::path out = "out";
  bool write_png = true;
  std::vector<double> sweep_t = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> sweep_theta = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> sweep_sigma2 = {0.5};

  /// Parses `key = value` lines ('#' starts a comment). Relative paths resolve
  /// against `base_dir`. Errors name the source and line.
  static RunConfig parse(const std::string& text, const std::string& source, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);

  /// Applies one `key = value` assignment (also used for command-line overrides).
  void set(const std::string& key, const std::string& value, const std::filesystem::path& base_dir,
           const std::string& where);

  /// Checks ranges and that referenced files exist.
  void validate() const;

  bool has_method(const std::string& m) const;
  std::filesystem::path material_file(const std::string& name) const;

  /// Canonical `key = value` dump of every setting, in a fixed order.
  std::string canonical() const;
  /// Canonical lines for the settings that affect one stage.
  std::string stage_settings(const std::string& stage) const;
};

std::vector<std::string> split_list(const std::string& s, char sep = ',');

}  // namespace sctmd
