#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "sctmd/config.hpp"
#include "sctmd/errors.hpp"
#include "sctmd/raster_io.hpp"

namespace sctmd {

namespace fs = std::filesystem;

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw InputError("empty item in list '" + s + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) throw InputError("empty list");
  return out;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  errno = 0;
  char* end = nullptr;
  double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw InputError("'" + v + "' is not a number");
  return d;
}

long long to_int(const std::string& v) {
  errno = 0;
  char* end = nullptr;
  long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw InputError("'" + v + "' is not an integer");
  return i;
}

std::uint64_t to_u64(const std::string& v) {
  errno = 0;
  char* end = nullptr;
  if (!v.empty() && v[0] == '-') throw InputError("'" + v + "' must be non-negative");
  unsigned long long i = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw InputError("'" + v + "' is not an unsigned integer");
  return i;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InputError("'" + v + "' is not a boolean");
}

std::vector<double> to_doubles(const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_double(s));
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string nums(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(v[i]);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

struct Key {
  const char* name;
  const char* stage;
  std::function<void(RunConfig&, const std::string&, const fs::path&)> set;
  std::function<std::string(const RunConfig&)> get;
};

fs::path resolve(const std::string& v, const fs::path& base) {
  fs::path p(v);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

#define SCTMD_DOUBLE(key, stage, field) \
  Key { key, stage, [](RunConfig& c, const std::string& v, const fs::path&) { c.field = to_double(v); }, \
        [](const RunConfig& c) { return num(c.field); } }
#define SCTMD_INT(key, stage, field) \
  Key { key, stage, [](RunConfig& c, const std::string& v, const fs::path&) { c.field = int(to_int(v)); }, \
        [](const RunConfig& c) { return std::to_string(c.field); } }
#define SCTMD_SIZE(key, stage, field)                                                                        \
  Key {                                                                                                      \
    key, stage, [](RunConfig& c, const std::string& v, const fs::path&) { c.field = std::size_t(to_u64(v)); }, \
        [](const RunConfig& c) { return std::to_string(c.field); }                                           \
  }
#define SCTMD_BOOL(key, stage, field) \
  Key { key, stage, [](RunConfig& c, const std::string& v, const fs::path&) { c.field = to_bool(v); }, \
        [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); } }
#define SCTMD_PATH(key, stage, field) \
  Key { key, stage, [](RunConfig& c, const std::string& v, const fs::path& b) { c.field = resolve(v, b); }, \
        [](const RunConfig& c) { return c.field.string(); } }
#define SCTMD_DOUBLES(key, stage, field) \
  Key { key, stage, [](RunConfig& c, const std::string& v, const fs::path&) { c.field = to_doubles(v); }, \
        [](const RunConfig& c) { return nums(c.field); } }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      SCTMD_PATH("phantom", "simulate", phantom),
      SCTMD_PATH("spectrum", "simulate", spectrum),
      SCTMD_PATH("material_dir", "simulate", material_dir),
      Key{"materials", "simulate",
          [](RunConfig& c, const std::string& v, const fs::path&) { c.materials = split_list(v); },
          [](const RunConfig& c) { return join(c.materials); }},
      Key{"bins", "simulate",
          [](RunConfig& c, const std::string& v, const fs::path&) {
            c.bins.clear();
            for (const auto& item : split_list(v)) {
              auto dash = item.find('-', 1);
              if (dash == std::string::npos) throw InputError("bin '" + item + "' is not of the form lo-hi");
              c.bins.push_back({to_double(trim(item.substr(0, dash))), to_double(trim(item.substr(dash + 1)))});
            }
          },
          [](const RunConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < c.bins.size(); ++i)
              out += (i ? "," : "") + num(c.bins[i].lo_kev) + "-" + num(c.bins[i].hi_kev);
            return out;
          }},
      SCTMD_DOUBLE("photons_per_bin", "simulate", photons_per_bin),
      SCTMD_INT("n_views", "simulate", n_views),
      SCTMD_INT("n_detectors", "simulate", n_detectors),
      SCTMD_DOUBLE("detector_spacing_cm", "simulate", detector_spacing_cm),
      Key{"seed", "simulate", [](RunConfig& c, const std::string& v, const fs::path&) { c.seed = to_u64(v); },
          [](const RunConfig& c) { return std::to_string(c.seed); }},

      SCTMD_INT("sart.iterations", "reconstruct", sart.n_iterations),
      SCTMD_DOUBLE("sart.relaxation", "reconstruct", sart.relaxation),
      SCTMD_DOUBLE("sart.tv_weight", "reconstruct", sart.tv_weight),
      SCTMD_INT("sart.tv_steps", "reconstruct", sart.tv_inner_steps),
      SCTMD_BOOL("sart.nonneg", "reconstruct", sart.nonneg),

      SCTMD_INT("gmm.components", "decompose", gmm_components),
      SCTMD_DOUBLE("kernel.theta", "decompose", kernel.theta),
      SCTMD_DOUBLE("kernel.sigma2", "decompose", kernel.sigma2),
      SCTMD_INT("kernel.clusters", "decompose", kernel.n_clusters),
      SCTMD_INT("kernel.restarts", "decompose", kernel.n_init),
      SCTMD_INT("kernel.max_iter", "decompose", kernel.max_iter),
      SCTMD_SIZE("kernel.direct_cap", "decompose", kernel.direct_cap),
      SCTMD_SIZE("kernel.subsample", "decompose", kernel.subsample),
      SCTMD_SIZE("kernel.gram_cap", "decompose", kernel.gram_cap),
      SCTMD_DOUBLE("admm.lambda_scale", "decompose", lambda_scale),
      SCTMD_DOUBLE("admm.rho", "decompose", admm.rho),
      SCTMD_INT("admm.max_iter", "decompose", admm.max_iter),
      SCTMD_DOUBLE("admm.tol_primal", "decompose", admm.tol_primal),
      SCTMD_DOUBLE("admm.tol_dual", "decompose", admm.tol_dual),
      SCTMD_BOOL("admm.nonneg", "decompose", admm.nonneg),
      SCTMD_BOOL("admm.column_weights", "decompose", admm.weight_columns),
      SCTMD_DOUBLE("rpt.threshold", "decompose", rpt_threshold),
      SCTMD_DOUBLE("rpt.presence_eps", "decompose", presence_eps),
      SCTMD_DOUBLE("fine.beta", "decompose", fine_beta),
      SCTMD_DOUBLE("tv.weight", "decompose", tv.weight),
      SCTMD_INT("tv.max_iter", "decompose", tv.max_iter),
      SCTMD_INT("tv.prox_iter", "decompose", tv.prox_iter),
      SCTMD_BOOL("tv.column_weights", "decompose", tv.weight_columns),
      SCTMD_DOUBLE("tv.tol", "decompose", tv.tol),
      SCTMD_BOOL("tv.nonneg", "decompose", tv.nonneg),
      Key{"methods", "decompose",
          [](RunConfig& c, const std::string& v, const fs::path&) {
            c.methods.clear();
            for (const auto& m : split_list(v)) {
              if (m != "tv" && m != "coarse" && m != "roi") throw InputError("unknown method '" + m + "'");
              if (!c.has_method(m)) c.methods.push_back(m);
            }
          },
          [](const RunConfig& c) { return join(c.methods); }},

      SCTMD_PATH("out", "evaluate", out),
      SCTMD_BOOL("eval.png", "evaluate", write_png),
      SCTMD_DOUBLES("sweep.t", "evaluate", sweep_t),
      SCTMD_DOUBLES("sweep.theta", "evaluate", sweep_theta),
      SCTMD_DOUBLES("sweep.sigma2", "evaluate", sweep_sigma2),
  };
  return table;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value, const fs::path& base_dir,
                    const std::string& where) {
  for (const auto& k : keys()) {
    if (key != k.name) continue;
    try {
      k.set(*this, value, base_dir);
    } catch (const InputError& e) {
      throw InputError(where + ": " + key + ": " + e.what());
    }
    return;
  }
  throw InputError(where + ": unknown key '" + key + "'");
}

RunConfig RunConfig::parse(const std::string& text, const std::string& source, const fs::path& base_dir) {
  RunConfig c;
  c.phantom = c.spectrum = c.material_dir = fs::path();
  c.out = base_dir / "out";
  std::istringstream in(text);
  std::string line;
  std::map<std::string, int> seen;
  for (int ln = 1; std::getline(in, line); ++ln) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string where = source + ":" + std::to_string(ln);
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(where + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (auto it = seen.find(key); it != seen.end())
      throw InputError(where + ": duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    seen[key] = ln;
    if (value.empty()) throw InputError(where + ": empty value for '" + key + "'");
    c.set(key, value, base_dir, where);
  }
  for (const char* required : {"phantom", "spectrum", "material_dir", "materials", "bins"})
    if (!seen.count(required)) throw InputError(source + ": missing required key '" + required + "'");
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("config file not found: " + path.string());
  return parse(read_text_file(path), path.string(), fs::absolute(path).parent_path());
}

void RunConfig::validate() const {
  auto file = [](const fs::path& p, const char* what) {
    if (!fs::is_regular_file(p)) throw InputError(std::string(what) + " file not found: " + p.string());
  };
  file(phantom, "phantom");
  file(spectrum, "spectrum");
  if (materials.empty()) throw InputError("materials list is empty");
  for (const auto& m : materials) file(material_file(m), "material table");
  if (bins.empty()) throw InputError("bins list is empty");
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (!(bins[i].hi_kev > bins[i].lo_kev)) throw InputError("bin " + bin_label(bins[i]) + " is empty");
    if (i > 0 && bins[i].lo_kev < bins[i - 1].hi_kev) throw InputError("bins overlap or are not increasing");
  }
  if (!(photons_per_bin > 0.0)) throw InputError("photons_per_bin must be positive");
  if (n_views < 1 || n_detectors < 1 || !(detector_spacing_cm > 0.0))
    throw InputError("geometry needs n_views >= 1, n_detectors >= 1, detector_spacing_cm > 0");
  sart.validate();
  if (gmm_components < 1) throw InputError("gmm.components must be >= 1");
  kernel.validate();
  AdmmParams a = admm;
  a.lambda = 0.0;
  a.validate();
  if (!(lambda_scale >= 0.0)) throw InputError("admm.lambda_scale must be >= 0");
  if (!(rpt_threshold >= 0.0 && rpt_threshold <= 1.0)) throw InputError("rpt.threshold must lie in [0, 1]");
  if (!(presence_eps >= 0.0)) throw InputError("rpt.presence_eps must be >= 0");
  if (!(fine_beta >= 0.0 && fine_beta <= 1.0)) throw InputError("fine.beta must lie in [0, 1]");
  tv.validate();
  if (methods.empty()) throw InputError("methods list is empty");
  for (double t : sweep_t)
    if (!(t >= 0.0 && t <= 1.0)) throw InputError("sweep.t values must lie in [0, 1]");
  for (double t : sweep_theta)
    if (!(t >= 0.0 && t <= 1.0)) throw InputError("sweep.theta values must lie in [0, 1]");
  for (double s : sweep_sigma2)
    if (!(s > 0.0)) throw InputError("sweep.sigma2 values must be positive");
}

bool RunConfig::has_method(const std::string& m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

fs::path RunConfig::material_file(const std::string& name) const { return material_dir / (name + ".tsv"); }

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& k : keys()) out += std::string(k.name) + " = " + k.get(*this) + "\n";
  return out;
}

std::string RunConfig::stage_settings(const std::string& stage) const {
  std::string out;
  for (const auto& k : keys())
    if (stage == k.stage) out += std::string(k.name) + " = " + k.get(*this) + "\n";
  return out;
}

}  // namespace sctmd
