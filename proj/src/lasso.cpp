#include <algorithm>
#include <cmath>

#include "sctmd/decomp.hpp"
#include "sctmd/errors.hpp"

namespace sctmd {

namespace {

constexpr int kRhoSteps = 30;  // rho is kept within rho0 * 2^[-30, 30]

inline double shrink(double v, double t, bool nonneg) {
  if (nonneg) return std::max(0.0, v - t);
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

void AdmmParams::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lasso lambda must be finite and >= 0");
  if (!(rho > 0.0)) throw InputError("ADMM rho must be positive");
  if (max_iter < 1) throw InputError("ADMM max_iter must be >= 1");
  if (!(tol_primal > 0.0) || !(tol_dual > 0.0)) throw InputError("ADMM tolerances must be positive");
}

double lasso_objective(const Eigen::MatrixXd& m, const Eigen::MatrixXd& y, const Eigen::MatrixXd& x, double lambda,
                       bool weight_columns) {
  double l1 = weight_columns ? (m.colwise().norm().transpose().asDiagonal() * x).cwiseAbs().sum() : x.cwiseAbs().sum();
  return 0.5 * (y - m * x).squaredNorm() + lambda * l1;
}

LassoResult lasso_admm(const Eigen::MatrixXd& m, const Eigen::MatrixXd& y, const AdmmParams& params) {
  params.validate();
  const Eigen::Index B = m.rows(), M = m.cols(), N = y.cols();
  if (y.rows() != B) throw InputError("lasso: y has " + std::to_string(y.rows()) + " rows, M has " + std::to_string(B));
  LassoResult out;
  out.x = Eigen::MatrixXd::Zero(M, N);
  if (M == 0 || N == 0) return out;
  if (B < M) out.warnings.push_back("underdetermined system: fewer bins than materials");

  Eigen::VectorXd d = m.colwise().norm().transpose();
  for (Eigen::Index a = 0; a < M; ++a)
    if (!(d(a) > 0.0)) throw NumericalError("lasso: zero column in decomposition matrix");
  const Eigen::MatrixXd a_mat = m * d.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd ata = a_mat.transpose() * a_mat;
  // per-coordinate threshold in u = D x
  const Eigen::VectorXd lam =
      params.weight_columns ? Eigen::VectorXd::Constant(M, params.lambda) : Eigen::VectorXd(params.lambda * d.cwiseInverse());

  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors(2 * kRhoSteps + 1);
  for (int k = -kRhoSteps; k <= kRhoSteps; ++k) {
    double rho = std::ldexp(params.rho, k);
    factors[k + kRhoSteps].compute(ata + rho * Eigen::MatrixXd::Identity(M, M));
  }
  const Eigen::MatrixXd aty = a_mat.transpose() * y;

  std::size_t unconverged = 0;
  int max_it = 0;
#pragma omp parallel for schedule(dynamic, 256) reduction(+ : unconverged) reduction(max : max_it)
  for (Eigen::Index p = 0; p < N; ++p) {
    Eigen::VectorXd u(M), z = Eigen::VectorXd::Zero(M), w = Eigen::VectorXd::Zero(M), z_prev(M);
    const Eigen::VectorXd b = aty.col(p);
    int k = 0;
    bool done = false;
    int it = 0;
    for (; it < params.max_iter; ++it) {
      double rho = std::ldexp(params.rho, k);
      u = factors[k + kRhoSteps].solve(b + rho * (z - w));
      z_prev = z;
      for (Eigen::Index a = 0; a < M; ++a) z(a) = shrink(u(a) + w(a), lam(a) / rho, params.nonneg);
      w += u - z;
      double r = (u - z).norm();
      double s = rho * (z - z_prev).norm();
      if (r < params.tol_primal && s < params.tol_dual) {
        done = true;
        ++it;
        break;
      }
      if (params.adapt_rho) {
        if (r > 10.0 * s && k < kRhoSteps) {
          ++k;
          w *= 0.5;
        } else if (s > 10.0 * r && k > -kRhoSteps) {
          --k;
          w *= 2.0;
        }
      }
    }
    if (!done) ++unconverged;
    max_it = std::max(max_it, it);
    out.x.col(p) = z.cwiseQuotient(d);
  }
  out.unconverged = unconverged;
  out.converged = unconverged == 0;
  out.max_iterations = max_it;
  if (!out.converged)
    out.warnings.push_back("ADMM iteration cap reached on " + std::to_string(unconverged) + " of " +
                           std::to_string(N) + " pixels");
  return out;
}

}  // namespace sctmd
