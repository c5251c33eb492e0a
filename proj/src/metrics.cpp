#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sctmd/errors.hpp"
#include "sctmd/metrics.hpp"

namespace sctmd {

double normalized_euclidean(std::span<const double> x, std::span<const double> gt) {
  if (x.size() != gt.size()) throw InputError("normalized_euclidean: shape mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - gt[i]) * (x[i] - gt[i]);
    den += gt[i] * gt[i];
  }
  if (!(den > 0.0)) throw InputError("normalized_euclidean: ground truth is zero");
  return std::sqrt(num) / std::sqrt(den);
}

std::vector<char> object_region(const DensityMaps& gt) {
  std::vector<char> region(gt.maps.pixels(), 0);
  for (int a = 0; a < gt.maps.channels; ++a) {
    auto ch = gt.maps.channel(a);
    for (std::size_t p = 0; p < ch.size(); ++p)
      if (ch[p] > 0.0) region[p] = 1;
  }
  return region;
}

std::vector<Rates> fp_fn_rates(const DensityMaps& x, const DensityMaps& gt, double presence_eps) {
  if (x.maps.width != gt.maps.width || x.maps.height != gt.maps.height)
    throw InputError("fp_fn_rates: shape mismatch");
  std::vector<char> region = object_region(gt);
  std::size_t n_region = 0;
  for (char r : region) n_region += r;
  if (n_region == 0) throw InputError("fp_fn_rates: empty evaluation region");

  std::vector<Rates> out(x.maps.channels);
  for (int a = 0; a < x.maps.channels; ++a) {
    int g = gt.material_index(x.material_names[a]);
    auto xc = x.maps.channel(a);
    std::size_t fp = 0, fn = 0;
    for (std::size_t p = 0; p < region.size(); ++p) {
      if (!region[p]) continue;
      bool have = xc[p] > presence_eps;
      bool truth = g >= 0 && gt.maps.at(g, p) > 0.0;
      if (have && !truth) ++fp;
      if (!have && truth) ++fn;
    }
    out[a] = {double(fp) / double(n_region), double(fn) / double(n_region)};
  }
  return out;
}

const MaterialScore& EvalReport::score(const std::string& material) const {
  for (const auto& s : scores)
    if (s.material == material) return s;
  throw InputError("report for " + method + " has no material " + material);
}

EvalReport evaluate(const DensityMaps& x, const DensityMaps& gt, const std::string& method, double presence_eps,
                    std::map<std::string, std::string> metadata) {
  EvalReport r;
  r.method = method;
  r.metadata = std::move(metadata);
  std::vector<Rates> rates = fp_fn_rates(x, gt, presence_eps);
  for (int a = 0; a < x.maps.channels; ++a) {
    MaterialScore s;
    s.material = x.material_names[a];
    int g = gt.material_index(s.material);
    s.error_m = std::numeric_limits<double>::quiet_NaN();
    if (g >= 0) {
      auto gc = gt.maps.channel(g);
      double den = 0.0;
      for (double v : gc) den += v * v;
      if (den > 0.0) s.error_m = normalized_euclidean(x.maps.channel(a), gc);
    }
    s.fp = rates[a].fp;
    s.fn = rates[a].fn;
    r.scores.push_back(s);
  }
  return r;
}

std::string format_g6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string reports_csv(std::span<const EvalReport> reports) {
  std::string out = "method,material,error_m,fp,fn\n";
  for (const auto& r : reports)
    for (const auto& s : r.scores)
      out += r.method + "," + s.material + "," + format_g6(s.error_m) + "," + format_g6(s.fp) + "," +
             format_g6(s.fn) + "\n";
  return out;
}

std::string reports_table(std::span<const EvalReport> reports) {
  if (reports.empty()) return "";
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head = {"material", "metric"};
  for (const auto& r : reports) head.push_back(r.method);
  rows.push_back(head);
  const char* metrics[] = {"error_m", "fp", "fn"};
  for (const auto& s0 : reports.front().scores) {
    for (int m = 0; m < 3; ++m) {
      std::vector<std::string> row = {s0.material, metrics[m]};
      for (const auto& r : reports) {
        const MaterialScore& s = r.score(s0.material);
        row.push_back(format_g6(m == 0 ? s.error_m : m == 1 ? s.fp : s.fn));
      }
      rows.push_back(row);
    }
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      os << row[c] << std::string(width[c] - row[c].size(), ' ');
    }
    os << "\n";
  }
  return os.str();
}

Comparison compare_methods(std::span<const EvalReport> reports) {
  for (const auto& r : reports)
    if (r.metadata != reports.front().metadata)
      throw InputError("reports for " + reports.front().method + " and " + r.method + " have different metadata");
  return {reports_table(reports), reports_csv(reports)};
}

}  // namespace sctmd
