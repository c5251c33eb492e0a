#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sctmd/config.hpp"
#include "sctmd/decomp.hpp"
#include "sctmd/materials.hpp"
#include "sctmd/metrics.hpp"
#include "sctmd/phantom.hpp"
#include "sctmd/projector.hpp"
#include "sctmd/raster_io.hpp"
#include "sctmd/recon.hpp"
#include "sctmd/segmentation.hpp"

namespace sctmd {

/// Loaded inputs of a run: tables, the spectrum scaled to the photon budget,
/// geometry, ground truth and the effective matrix.
struct Setup {
  RunConfig config;
  std::vector<MaterialTable> tables;
  Spectrum spectrum;
  DetectorResponse response;
  Geometry geometry;
  PhantomSpec phantom;
  DensityMaps truth;
  DecompMatrix matrix;
  std::vector<double> blank;  // per-bin blank counts per ray
};

Setup prepare(const RunConfig& config);

struct Simulation {
  Sinogram mean;
  Sinogram noisy;
};

/// Noiseless counts and a Poisson draw seeded by derive_seed(seed, "noise").
Simulation simulate(const Setup& setup);

/// log_normalize (for counts input) followed by reconstruct_all.
MultiEnergyImage reconstruct(const Setup& setup, const Sinogram& sino, std::vector<ReconDiagnostics>* diag = nullptr);

struct RoiRun {
  int reference_bin = 0;
  std::vector<double> gmm_loglikelihoods;
  LabelImage prelabels;
  KmeansResult kmeans;
  RoiBasisSelection selection;
  DensityMaps maps;
};

struct Decomposition {
  double lambda = 0.0;
  std::map<std::string, DensityMaps> maps;  // per requested method
  std::optional<DensityMaps> coarse;        // computed for "coarse" or "roi"
  std::optional<RoiRun> roi;
  std::optional<TvDecompResult> tv;
};

AdmmParams admm_params(const RunConfig& config, double lambda);

/// Pre-segmentation (reference bin + GMM label image) used as the spatial features.
LabelImage presegment(const RunConfig& config, const MultiEnergyImage& y, int* reference_bin = nullptr,
                      std::vector<double>* loglikelihoods = nullptr);

/// Everything after the coarse stage: RPT on `rois`, then the fine lasso.
DensityMaps roi_fine(const RunConfig& config, const DecompMatrix& m, const MultiEnergyImage& y,
                     const DensityMaps& coarse, const LabelImage& rois, double lambda, double threshold,
                     RoiBasisSelection* selection = nullptr);

Decomposition decompose(const RunConfig& config, const DecompMatrix& m, const MultiEnergyImage& y,
                        std::ostream* log = nullptr);

std::map<std::string, std::string> report_metadata(const RunConfig& config);

/// Reports for the requested methods, in config order.
std::vector<EvalReport> evaluate_methods(const RunConfig& config, const std::map<std::string, DensityMaps>& maps,
                                         const DensityMaps& truth);

struct SweepRow {
  double t = 0.0;
  double theta = 0.0;
  double sigma2 = 0.0;
  MaterialScore score;
};

/// ROI error over config.sweep_t with a fixed partition and coarse result.
std::vector<SweepRow> sweep_threshold(const RunConfig& config, const DecompMatrix& m, const MultiEnergyImage& y,
                                      const DensityMaps& coarse, const LabelImage& rois, const DensityMaps& truth,
                                      double lambda);

/// ROI error over the config.sweep_theta x config.sweep_sigma2 grid, re-running
/// kernel k-means for each point.
std::vector<SweepRow> sweep_kernel(const RunConfig& config, const DecompMatrix& m, const MultiEnergyImage& y,
                                   const DensityMaps& coarse, const LabelImage& prelabels, const DensityMaps& truth,
                                   double lambda, std::ostream* log = nullptr);

std::string sweep_threshold_csv(const std::vector<SweepRow>& rows);
std::string sweep_kernel_csv(const std::vector<SweepRow>& rows);

// Raster conversions.
Raster sinogram_raster(const Sinogram& s, DType dtype, const std::vector<double>& blank);
Sinogram sinogram_from_raster(const Raster& r, std::vector<double>* blank = nullptr);
Raster image_raster(const MultiEnergyImage& y);
MultiEnergyImage image_from_raster(const Raster& r);
Raster maps_raster(const DensityMaps& x, const std::string& method, const nlohmann::json& windows);
DensityMaps maps_from_raster(const Raster& r);
Raster labels_raster(const LabelImage& l, const std::string& kind);
LabelImage labels_from_raster(const Raster& r);

/// Display window per material: [0, largest ground-truth density].
nlohmann::json display_windows(const DensityMaps& truth);

/// On-disk stages under config.out. Each stage writes `stamp` last; with
/// `resume`, a stage whose stamp matches the current settings (and upstream
/// stamps) is skipped. Evaluate always runs.
class StageRunner {
 public:
  StageRunner(RunConfig config, std::ostream& log, bool resume);

  void simulate();
  void reconstruct();
  void decompose();
  /// sweep: "" (report only), "t", "theta-sigma2" or "all".
  void evaluate(const std::string& sweep = "");
  void pipeline(const std::string& sweep = "");

  std::filesystem::path stage_dir(const std::string& stage) const;
  /// Stages executed (not skipped) so far.
  const std::vector<std::string>& executed() const { return executed_; }

 private:
  std::string stamp_for(const std::string& stage) const;
  bool up_to_date(const std::string& stage, const std::vector<std::string>& files) const;
  void finish(const std::string& stage);
  const Setup& setup();

  RunConfig config_;
  std::ostream& log_;
  bool resume_;
  std::optional<Setup> setup_;
  std::vector<std::string> executed_;
};

}  // namespace sctmd
