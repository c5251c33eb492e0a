#include <chrono>
#include <cstdio>
#include <numeric>

#include "sctmd/errors.hpp"
#include "sctmd/pipeline.hpp"
#include "sctmd/rng.hpp"

namespace sctmd {

namespace fs = std::filesystem;
using nlohmann::json;

Setup prepare(const RunConfig& config) {
  config.validate();
  Setup s;
  s.config = config;
  for (const auto& name : config.materials) {
    s.tables.push_back(load_material_table(config.material_file(name)));
    if (s.tables.back().name != name)
      throw InputError(config.material_file(name).string() + ": table is for '" + s.tables.back().name +
                       "', expected '" + name + "'");
  }
  Spectrum raw = load_spectrum(config.spectrum);
  for (const auto& b : config.bins)
    if (b.lo_kev < raw.grid.energies().front() || b.hi_kev > raw.grid.energies().back())
      throw InputError("bin " + bin_label(b) + " lies outside the spectrum range");
  s.response = DetectorResponse::ideal_response(raw.grid, config.bins);
  std::vector<double> fl = bin_fluence(raw, s.response);
  double mean = std::accumulate(fl.begin(), fl.end(), 0.0) / double(fl.size());
  if (!(mean > 0.0)) throw InputError("spectrum has zero fluence in the configured bins");
  s.spectrum = raw.scaled(config.photons_per_bin / mean);
  s.blank = bin_fluence(s.spectrum, s.response);
  for (std::size_t b = 0; b < s.blank.size(); ++b)
    if (!(s.blank[b] > 0.0)) throw InputError("spectrum has zero fluence in bin " + bin_label(config.bins[b]));

  s.phantom = load_phantom_spec(config.phantom);
  s.phantom.validate(config.materials);
  s.truth = rasterize(s.phantom, config.materials);
  s.geometry = Geometry::full_circle(config.n_views, config.n_detectors, config.detector_spacing_cm, s.phantom.width,
                                     s.phantom.height, s.phantom.pixel_size_cm);
  s.matrix = effective_mu_matrix(s.spectrum, s.response, s.tables);
  return s;
}

Simulation simulate(const Setup& setup) {
  Simulation sim;
  sim.mean = acquire_mean(setup.truth, setup.spectrum, setup.response, setup.tables, setup.geometry);
  sim.noisy = poisson_sample(sim.mean, derive_seed(setup.config.seed, "noise"));
  return sim;
}

MultiEnergyImage reconstruct(const Setup& setup, const Sinogram& sino, std::vector<ReconDiagnostics>* diag) {
  if (sino.kind == SinogramKind::counts) return reconstruct_all(log_normalize(sino, setup.blank), setup.config.sart, diag);
  return reconstruct_all(sino, setup.config.sart, diag);
}

AdmmParams admm_params(const RunConfig& config, double lambda) {
  AdmmParams p = config.admm;
  p.lambda = lambda;
  return p;
}

LabelImage presegment(const RunConfig& config, const MultiEnergyImage& y, int* reference_bin,
                      std::vector<double>* loglikelihoods) {
  int ref = select_reference_bin(y, config.gmm_components, loglikelihoods);
  if (reference_bin) *reference_bin = ref;
  return build_label_image(y, ref, config.gmm_components);
}

DensityMaps roi_fine(const RunConfig& config, const DecompMatrix& m, const MultiEnergyImage& y,
                     const DensityMaps& coarse, const LabelImage& rois, double lambda, double threshold,
                     RoiBasisSelection* selection) {
  RoiBasisSelection sel = rpt_select(coarse, rois, threshold, config.presence_eps);
  DensityMaps out = fine_decompose(y, rois, sel, m, admm_params(config, lambda), config.fine_beta);
  if (selection) *selection = std::move(sel);
  return out;
}

namespace {

KernelParams kernel_params(const RunConfig& config) {
  KernelParams k = config.kernel;
  k.seed = config.seed;
  return k;
}

void note(std::ostream* log, const std::string& msg) {
  if (log) *log << msg << std::endl;
}

}  // namespace

Decomposition decompose(const RunConfig& config, const DecompMatrix& m, const MultiEnergyImage& y,
                        std::ostream* log) {
  Decomposition d;
  d.lambda = auto_lambda(y, m, config.lambda_scale, config.admm.weight_columns);
  note(log, "  lambda = " + format_g6(d.lambda));
  if (config.has_method("coarse") || config.has_method("roi")) {
    note(log, "  coarse lasso");
    d.coarse = coarse_decompose(y, m, admm_params(config, d.lambda));
  }
  if (config.has_method("roi")) {
    RoiRun r;
    note(log, "  pre-segmentation");
    r.prelabels = presegment(config, y, &r.reference_bin, &r.gmm_loglikelihoods);
    note(log, "  kernel k-means");
    r.kmeans = kernel_kmeans(y, r.prelabels, kernel_params(config));
    note(log, "  fine lasso");
    r.maps = roi_fine(config, m, y, *d.coarse, r.kmeans.partition, d.lambda, config.rpt_threshold, &r.selection);
    d.roi = std::move(r);
  }
  if (config.has_method("tv")) {
    note(log, "  tv decomposition");
    d.tv = tv_decompose(y, m, config.tv);
  }
  for (const auto& method : config.methods) {
    if (method == "coarse") d.maps[method] = *d.coarse;
    if (method == "roi") d.maps[method] = d.roi->maps;
    if (method == "tv") d.maps[method] = d.tv->maps;
  }
  return d;
}

std::map<std::string, std::string> report_metadata(const RunConfig& config) {
  return {{"phantom", config.phantom.filename().string()}, {"seed", std::to_string(config.seed)}};
}

std::vector<EvalReport> evaluate_methods(const RunConfig& config, const std::map<std::string, DensityMaps>& maps,
                                         const DensityMaps& truth) {
  std::vector<EvalReport> out;
  for (const auto& method : config.methods) {
    auto it = maps.find(method);
    if (it == maps.end()) throw InputError("no density maps for method '" + method + "'");
    out.push_back(evaluate(it->second, truth, method, config.presence_eps, report_metadata(config)));
  }
  return out;
}

std::vector<SweepRow> sweep_threshold(const RunConfig& config, const DecompMatrix& m, const MultiEnergyImage& y,
                                      const DensityMaps& coarse, const LabelImage& rois, const DensityMaps& truth,
                                      double lambda) {
  std::vector<SweepRow> rows;
  for (double t : config.sweep_t) {
    DensityMaps x = roi_fine(config, m, y, coarse, rois, lambda, t);
    EvalReport r = evaluate(x, truth, "roi", config.presence_eps);
    for (const auto& s : r.scores) rows.push_back({t, config.kernel.theta, config.kernel.sigma2, s});
  }
  return rows;
}

std::vector<SweepRow> sweep_kernel(const RunConfig& config, const DecompMatrix& m, const MultiEnergyImage& y,
                                   const DensityMaps& coarse, const LabelImage& prelabels, const DensityMaps& truth,
                                   double lambda, std::ostream* log) {
  std::vector<SweepRow> rows;
  for (double sigma2 : config.sweep_sigma2) {
    for (double theta : config.sweep_theta) {
      note(log, "  theta = " + format_g6(theta) + ", sigma2 = " + format_g6(sigma2));
      KernelParams kp = kernel_params(config);
      kp.theta = theta;
      kp.sigma2 = sigma2;
      KmeansResult km = kernel_kmeans(y, prelabels, kp);
      DensityMaps x = roi_fine(config, m, y, coarse, km.partition, lambda, config.rpt_threshold);
      EvalReport r = evaluate(x, truth, "roi", config.presence_eps);
      for (const auto& s : r.scores) rows.push_back({config.rpt_threshold, theta, sigma2, s});
    }
  }
  return rows;
}

std::string sweep_threshold_csv(const std::vector<SweepRow>& rows) {
  std::string out = "t,material,error_m,fp,fn\n";
  for (const auto& r : rows)
    out += format_g6(r.t) + "," + r.score.material + "," + format_g6(r.score.error_m) + "," + format_g6(r.score.fp) +
           "," + format_g6(r.score.fn) + "\n";
  return out;
}

std::string sweep_kernel_csv(const std::vector<SweepRow>& rows) {
  std::string out = "theta,sigma2,material,error_m,fp,fn\n";
  for (const auto& r : rows)
    out += format_g6(r.theta) + "," + format_g6(r.sigma2) + "," + r.score.material + "," +
           format_g6(r.score.error_m) + "," + format_g6(r.score.fp) + "," + format_g6(r.score.fn) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Raster conversions

namespace {

json bins_json(const std::vector<EnergyBin>& bins) {
  json j = json::array();
  for (const auto& b : bins) j.push_back({b.lo_kev, b.hi_kev});
  return j;
}

std::vector<EnergyBin> bins_from_json(const json& j, const std::string& where) {
  std::vector<EnergyBin> out;
  try {
    for (const auto& b : j) out.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  } catch (const json::exception& e) {
    throw InputError(where + ": bad bins metadata: " + e.what());
  }
  return out;
}

template <class T>
T meta(const Raster& r, const char* key) {
  try {
    return r.metadata.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError("raster '" + r.kind + "' lacks metadata field '" + key + "'");
  }
}

void expect_kind(const Raster& r, std::initializer_list<const char*> kinds) {
  for (const char* k : kinds)
    if (r.kind == k) return;
  throw InputError("unexpected raster kind '" + r.kind + "'");
}

}  // namespace

Raster sinogram_raster(const Sinogram& s, DType dtype, const std::vector<double>& blank) {
  Raster r;
  r.width = s.geometry.n_detectors;
  r.height = s.geometry.n_views();
  r.channels = int(s.n_bins());
  r.dtype = dtype;
  r.kind = "sinogram";
  const Geometry& g = s.geometry;
  r.metadata = {{"sinogram_kind", to_string(s.kind)},
                {"bins", bins_json(s.bins)},
                {"blank", blank},
                {"geometry",
                 {{"n_detectors", g.n_detectors},
                  {"detector_spacing_cm", g.detector_spacing_cm},
                  {"angles", g.angles},
                  {"width", g.width},
                  {"height", g.height},
                  {"pixel_size_cm", g.pixel_size_cm}}}};
  r.data = s.data;
  return r;
}

Sinogram sinogram_from_raster(const Raster& r, std::vector<double>* blank) {
  expect_kind(r, {"sinogram"});
  Sinogram s;
  s.kind = sinogram_kind_from_string(meta<std::string>(r, "sinogram_kind"));
  s.bins = bins_from_json(r.metadata.at("bins"), "sinogram");
  json g = meta<json>(r, "geometry");
  try {
    s.geometry.n_detectors = g.at("n_detectors").get<int>();
    s.geometry.detector_spacing_cm = g.at("detector_spacing_cm").get<double>();
    s.geometry.angles = g.at("angles").get<std::vector<double>>();
    s.geometry.width = g.at("width").get<int>();
    s.geometry.height = g.at("height").get<int>();
    s.geometry.pixel_size_cm = g.at("pixel_size_cm").get<double>();
  } catch (const json::exception& e) {
    throw InputError(std::string("sinogram: bad geometry metadata: ") + e.what());
  }
  s.geometry.validate();
  if (r.width != s.geometry.n_detectors || r.height != s.geometry.n_views() || r.channels != int(s.bins.size()))
    throw InputError("sinogram: raster shape does not match its geometry and bins");
  if (blank) *blank = meta<std::vector<double>>(r, "blank");
  s.data = r.data;
  return s;
}

Raster image_raster(const MultiEnergyImage& y) {
  return Raster::from_stack(y.data, DType::f64, "multi_energy", {{"bins", bins_json(y.bins)}, {"units", "1/cm"}});
}

MultiEnergyImage image_from_raster(const Raster& r) {
  expect_kind(r, {"multi_energy"});
  MultiEnergyImage y;
  y.data = r.stack();
  y.bins = bins_from_json(r.metadata.at("bins"), "multi_energy");
  if (int(y.bins.size()) != y.data.channels) throw InputError("multi_energy: channel count differs from bin count");
  return y;
}

Raster maps_raster(const DensityMaps& x, const std::string& method, const json& windows) {
  return Raster::from_stack(x.maps, DType::f64, "density_maps",
                            {{"materials", x.material_names},
                             {"method", method},
                             {"units", "g/cm^3"},
                             {"window", windows},
                             {"warnings", x.warnings}});
}

DensityMaps maps_from_raster(const Raster& r) {
  expect_kind(r, {"density_maps"});
  DensityMaps x;
  x.maps = r.stack();
  x.material_names = meta<std::vector<std::string>>(r, "materials");
  if (int(x.material_names.size()) != x.maps.channels)
    throw InputError("density_maps: channel count differs from material count");
  if (r.metadata.contains("warnings")) x.warnings = r.metadata.at("warnings").get<std::vector<std::string>>();
  return x;
}

Raster labels_raster(const LabelImage& l, const std::string& kind) {
  Raster r;
  r.width = l.width;
  r.height = l.height;
  r.channels = 1;
  r.dtype = DType::i32;
  r.kind = kind;
  json means = json::array();
  for (Eigen::Index k = 0; k < l.means.rows(); ++k) {
    std::vector<double> row(l.means.cols());
    for (Eigen::Index b = 0; b < l.means.cols(); ++b) row[b] = l.means(k, b);
    means.push_back(row);
  }
  r.metadata = {{"n_classes", l.n_classes}, {"means", means}, {"notes", l.notes}};
  r.data.assign(l.labels.begin(), l.labels.end());
  return r;
}

LabelImage labels_from_raster(const Raster& r) {
  LabelImage l;
  l.width = r.width;
  l.height = r.height;
  l.n_classes = meta<int>(r, "n_classes");
  auto means = meta<std::vector<std::vector<double>>>(r, "means");
  l.means = Eigen::MatrixXd::Zero(l.n_classes, means.empty() ? 0 : Eigen::Index(means[0].size()));
  if (int(means.size()) != l.n_classes) throw InputError(r.kind + ": means do not match n_classes");
  for (int k = 0; k < l.n_classes; ++k)
    for (std::size_t b = 0; b < means[k].size(); ++b) l.means(k, Eigen::Index(b)) = means[k][b];
  l.notes = meta<std::vector<std::string>>(r, "notes");
  l.labels.reserve(r.data.size());
  for (double v : r.data) {
    int k = int(v);
    if (k < 0 || k >= l.n_classes) throw InputError(r.kind + ": label out of range");
    l.labels.push_back(k);
  }
  return l;
}

json display_windows(const DensityMaps& truth) {
  json w = json::object();
  for (int a = 0; a < truth.maps.channels; ++a) {
    double hi = 0.0;
    for (double v : truth.maps.channel(a)) hi = std::max(hi, v);
    w[truth.material_names[a]] = {0.0, hi > 0.0 ? hi : 1.0};
  }
  return w;
}

// ---------------------------------------------------------------------------
// On-disk stages

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f s", s);
  return buf;
}

}  // namespace

StageRunner::StageRunner(RunConfig config, std::ostream& log, bool resume)
    : config_(std::move(config)), log_(log), resume_(resume) {
  config_.validate();
}

fs::path StageRunner::stage_dir(const std::string& stage) const { return config_.out / stage; }

const Setup& StageRunner::setup() {
  if (!setup_) setup_ = prepare(config_);
  return *setup_;
}

std::string StageRunner::stamp_for(const std::string& stage) const {
  if (stage == "simulate") {
    std::string text = config_.stage_settings("simulate");
    text += read_text_file(config_.phantom);
    text += read_text_file(config_.spectrum);
    for (const auto& m : config_.materials) text += read_text_file(config_.material_file(m));
    return hex(fnv1a(text));
  }
  std::string upstream = stage == "reconstruct" ? "simulate" : "reconstruct";
  return hex(fnv1a(stamp_for(upstream) + "\n" + config_.stage_settings(stage)));
}

bool StageRunner::up_to_date(const std::string& stage, const std::vector<std::string>& files) const {
  if (!resume_) return false;
  fs::path dir = stage_dir(stage);
  if (!fs::exists(dir / "stamp")) return false;
  for (const auto& f : files)
    if (!fs::exists(dir / f)) return false;
  return read_text_file(dir / "stamp") == stamp_for(stage) + "\n";
}

void StageRunner::finish(const std::string& stage) {
  write_text_file(stage_dir(stage) / "stamp", stamp_for(stage) + "\n");
  executed_.push_back(stage);
}

void StageRunner::simulate() {
  const std::vector<std::string> files = {"truth.sctr", "sino_mean.sctr", "sino_noisy.sctr", "matrix.csv"};
  if (up_to_date("simulate", files)) {
    log_ << "[simulate] up to date, skipped" << std::endl;
    return;
  }
  Timer t;
  log_ << "[simulate]" << std::endl;
  fs::path dir = stage_dir("simulate");
  fs::create_directories(dir);
  fs::remove(dir / "stamp");
  const Setup& s = setup();
  for (const auto& w : s.truth.warnings) log_ << "  warning: " << w << std::endl;
  Simulation sim = sctmd::simulate(s);
  write_raster(dir / "truth.sctr", maps_raster(s.truth, "truth", display_windows(s.truth)));
  write_raster(dir / "sino_mean.sctr", sinogram_raster(sim.mean, DType::f64, s.blank));
  write_raster(dir / "sino_noisy.sctr", sinogram_raster(sim.noisy, DType::i32, s.blank));
  write_text_file(dir / "matrix.csv", s.matrix.to_csv());
  finish("simulate");
  log_ << "  done in " << secs(t.seconds()) << std::endl;
}

void StageRunner::reconstruct() {
  const std::vector<std::string> files = {"recon.sctr", "residuals.csv"};
  if (up_to_date("reconstruct", files)) {
    log_ << "[reconstruct] up to date, skipped" << std::endl;
    return;
  }
  Timer t;
  log_ << "[reconstruct]" << std::endl;
  fs::path dir = stage_dir("reconstruct");
  fs::create_directories(dir);
  fs::remove(dir / "stamp");
  const Setup& s = setup();
  fs::path in = stage_dir("simulate") / "sino_noisy.sctr";
  if (!fs::exists(in)) throw InputError("reconstruct: missing input " + in.string() + " (run simulate first)");
  std::vector<double> blank;
  Sinogram sino = sinogram_from_raster(read_raster(in), &blank);
  // Keep only the configured bins, in config order.
  Sinogram picked = sino;
  picked.bins = config_.bins;
  picked.data.clear();
  std::vector<double> picked_blank;
  for (const auto& b : config_.bins) {
    auto it = std::find(sino.bins.begin(), sino.bins.end(), b);
    if (it == sino.bins.end()) throw InputError("reconstruct: sinogram has no bin " + bin_label(b));
    std::size_t idx = std::size_t(it - sino.bins.begin());
    auto src = sino.bin(idx);
    picked.data.insert(picked.data.end(), src.begin(), src.end());
    picked_blank.push_back(blank[idx]);
  }
  Sinogram li = picked.kind == SinogramKind::counts ? log_normalize(picked, picked_blank) : picked;
  std::vector<ReconDiagnostics> diag;
  MultiEnergyImage y = reconstruct_all(li, config_.sart, &diag);
  (void)s;
  write_raster(dir / "recon.sctr", image_raster(y));
  std::string csv = "bin,iteration,residual,tv\n";
  for (std::size_t b = 0; b < diag.size(); ++b)
    for (std::size_t i = 0; i < diag[b].residuals.size(); ++i)
      csv += bin_label(config_.bins[b]) + "," + std::to_string(i + 1) + "," + format_g6(diag[b].residuals[i]) + "," +
             format_g6(i < diag[b].tv_values.size() ? diag[b].tv_values[i] : 0.0) + "\n";
  write_text_file(dir / "residuals.csv", csv);
  for (std::size_t b = 0; b < diag.size(); ++b)
    log_ << "  bin " << bin_label(config_.bins[b]) << ": relative residual " << format_g6(diag[b].relative_residual)
         << std::endl;
  finish("reconstruct");
  log_ << "  done in " << secs(t.seconds()) << std::endl;
}

void StageRunner::decompose() {
  std::vector<std::string> files;
  for (const auto& m : config_.methods) files.push_back("maps_" + m + ".sctr");
  if (config_.has_method("roi")) {
    files.insert(files.end(), {"prelabels.sctr", "rois.sctr", "selection.txt", "maps_coarse.sctr"});
  }
  if (up_to_date("decompose", files)) {
    log_ << "[decompose] up to date, skipped" << std::endl;
    return;
  }
  Timer t;
  log_ << "[decompose]" << std::endl;
  fs::path dir = stage_dir("decompose");
  fs::create_directories(dir);
  fs::remove(dir / "stamp");
  const Setup& s = setup();
  fs::path in = stage_dir("reconstruct") / "recon.sctr";
  if (!fs::exists(in)) throw InputError("decompose: missing input " + in.string() + " (run reconstruct first)");
  MultiEnergyImage y = image_from_raster(read_raster(in));
  if (y.bins != s.matrix.bins) throw InputError("decompose: reconstructed bins differ from the configured bins");
  Decomposition d = sctmd::decompose(config_, s.matrix, y, &log_);
  json windows = display_windows(s.truth);
  for (const auto& [method, maps] : d.maps) write_raster(dir / ("maps_" + method + ".sctr"), maps_raster(maps, method, windows));
  if (d.coarse && !config_.has_method("coarse"))
    write_raster(dir / "maps_coarse.sctr", maps_raster(*d.coarse, "coarse", windows));
  if (d.roi) {
    write_raster(dir / "prelabels.sctr", labels_raster(d.roi->prelabels, "prelabels"));
    Raster rois = labels_raster(d.roi->kmeans.partition, "rois");
    rois.metadata["objective"] = d.roi->kmeans.objective;
    rois.metadata["converged"] = d.roi->kmeans.converged;
    rois.metadata["subsampled"] = d.roi->kmeans.subsampled;
    rois.metadata["reference_bin"] = d.roi->reference_bin;
    write_raster(dir / "rois.sctr", rois);
    write_text_file(dir / "selection.txt", d.roi->selection.report());
  }
  for (const auto& [method, maps] : d.maps)
    for (const auto& w : maps.warnings) log_ << "  warning (" << method << "): " << w << std::endl;
  finish("decompose");
  log_ << "  done in " << secs(t.seconds()) << std::endl;
}

void StageRunner::evaluate(const std::string& sweep) {
  if (sweep != "" && sweep != "t" && sweep != "theta-sigma2" && sweep != "all")
    throw InputError("unknown sweep mode '" + sweep + "' (expected t, theta-sigma2 or all)");
  Timer t;
  log_ << "[evaluate]" << std::endl;
  fs::path dir = stage_dir("evaluate");
  fs::create_directories(dir);
  const Setup& s = setup();
  fs::path dec = stage_dir("decompose");
  std::map<std::string, DensityMaps> maps;
  for (const auto& m : config_.methods) {
    fs::path p = dec / ("maps_" + m + ".sctr");
    if (!fs::exists(p)) throw InputError("evaluate: missing input " + p.string() + " (run decompose first)");
    maps[m] = maps_from_raster(read_raster(p));
    if (maps[m].maps.width != s.truth.maps.width || maps[m].maps.height != s.truth.maps.height)
      throw InputError("evaluate: " + p.string() + " does not match the ground-truth shape");
  }
  std::vector<EvalReport> reports = evaluate_methods(config_, maps, s.truth);
  Comparison cmp = compare_methods(reports);
  write_text_file(dir / "report.csv", cmp.csv);
  write_text_file(dir / "report.txt", cmp.text);
  log_ << cmp.text;

  if (config_.write_png) {
    fs::create_directories(dir / "png");
    json windows = display_windows(s.truth);
    for (const auto& [method, x] : maps)
      for (int a = 0; a < x.maps.channels; ++a) {
        const std::string& name = x.material_names[a];
        auto w = windows.contains(name) ? windows[name].get<std::vector<double>>() : std::vector<double>{0.0, 1.0};
        write_png_gray(dir / "png" / (method + "_" + name + ".png"), x.maps.channel(a), x.maps.width, x.maps.height,
                       w[0], w[1], {{"method", method}, {"material", name}});
      }
  }

  if (!sweep.empty()) {
    MultiEnergyImage y = image_from_raster(read_raster(stage_dir("reconstruct") / "recon.sctr"));
    fs::path cp = dec / "maps_coarse.sctr", rp = dec / "rois.sctr", pp = dec / "prelabels.sctr";
    for (const auto& p : {cp, rp, pp})
      if (!fs::exists(p)) throw InputError("evaluate: sweeps need " + p.string() + " (include roi in methods)");
    DensityMaps coarse = maps_from_raster(read_raster(cp));
    double lambda = auto_lambda(y, s.matrix, config_.lambda_scale, config_.admm.weight_columns);
    if (sweep == "t" || sweep == "all") {
      log_ << "  threshold sweep" << std::endl;
      auto rows = sweep_threshold(config_, s.matrix, y, coarse, labels_from_raster(read_raster(rp)), s.truth, lambda);
      write_text_file(dir / "sweep_t.csv", sweep_threshold_csv(rows));
    }
    if (sweep == "theta-sigma2" || sweep == "all") {
      log_ << "  theta / sigma2 sweep" << std::endl;
      auto rows = sweep_kernel(config_, s.matrix, y, coarse, labels_from_raster(read_raster(pp)), s.truth, lambda, &log_);
      write_text_file(dir / "sweep_theta_sigma2.csv", sweep_kernel_csv(rows));
    }
  }
  executed_.push_back("evaluate");
  log_ << "  done in " << secs(t.seconds()) << std::endl;
}

void StageRunner::pipeline(const std::string& sweep) {
  const char* stage = "simulate";
  try {
    simulate();
    stage = "reconstruct";
    reconstruct();
    stage = "decompose";
    decompose();
    stage = "evaluate";
    evaluate(sweep);
  } catch (const InputError& e) {
    throw InputError(std::string(stage) + " stage failed (artifacts in " + stage_dir(stage).string() + "): " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(stage) + " stage failed (artifacts in " + stage_dir(stage).string() +
                         "): " + e.what());
  }
}

}  // namespace sctmd
