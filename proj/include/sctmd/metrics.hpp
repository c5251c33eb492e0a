#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sctmd/image.hpp"

namespace sctmd {

/// |x - gt|_2 / |gt|_2. Throws InputError on a shape mismatch or zero |gt|.
double normalized_euclidean(std::span<const double> x, std::span<const double> gt);

struct Rates {
  double fp = 0.0;
  double fn = 0.0;
};

/// Pixels where any ground-truth material is present.
std::vector<char> object_region(const DensityMaps& gt);

/// Per material of `x` (matched to `gt` by name; a material missing from gt is
/// absent everywhere): FP/FN counts inside the object region divided by its size.
/// Decomposed presence is x > presence_eps, ground-truth presence is gt > 0.
std::vector<Rates> fp_fn_rates(const DensityMaps& x, const DensityMaps& gt, double presence_eps);

struct MaterialScore {
  std::string material;
  double error_m = 0.0;  // NaN when the material is absent from the ground truth
  double fp = 0.0;
  double fn = 0.0;
};

struct EvalReport {
  std::string method;
  std::vector<MaterialScore> scores;
  std::map<std::string, std::string> metadata;

  const MaterialScore& score(const std::string& material) const;
};

EvalReport evaluate(const DensityMaps& x, const DensityMaps& gt, const std::string& method, double presence_eps,
                    std::map<std::string, std::string> metadata = {});

/// %.6g, the fixed CSV number format.
std::string format_g6(double v);

/// `method,material,error_m,fp,fn` header plus one row per method and material.
std::string reports_csv(std::span<const EvalReport> reports);

/// Aligned text table: one row per material and metric, one column per method.
std::string reports_table(std::span<const EvalReport> reports);

struct Comparison {
  std::string text;
  std::string csv;
};

/// Throws InputError when the reports' metadata differ.
Comparison compare_methods(std::span<const EvalReport> reports);

}  // namespace sctmd
