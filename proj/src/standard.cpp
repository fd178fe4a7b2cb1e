#include "dopt/standard.hpp"

#include <cmath>
#include <stdexcept>

namespace dopt {

StandardResult solve_standard_multiplicative(const DesignInstance& instance,
                                             const StandardOptions& opts) {
  if (!(opts.target_eff > 0.0 && opts.target_eff < 1.0))
    throw std::invalid_argument("target_eff must lie in (0, 1)");

  std::vector<int> subset;
  if (opts.restrict_to) {
    subset = *opts.restrict_to;
  } else {
    subset.resize(static_cast<size_t>(instance.n()));
    for (int i = 0; i < instance.n(); ++i) subset[static_cast<size_t>(i)] = i;
  }
  const int k = static_cast<int>(subset.size());
  if (k == 0) throw std::invalid_argument("restriction subset is empty");

  // Reduce to the subspace spanned by the restricted regressors.
  Eigen::MatrixXd Ft(instance.m(), k);
  for (int i = 0; i < k; ++i)
    Ft.col(i) = instance.point(subset[static_cast<size_t>(i)]).f;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Ft);
  const int r = static_cast<int>(qr.rank());
  if (r == 0)
    throw std::domain_error("restricted regressors are all zero");
  Eigen::MatrixXd Q =
      Eigen::MatrixXd(qr.householderQ()).leftCols(r);  // m x r orthobasis
  Eigen::MatrixXd G = Q.transpose() * Ft;              // r x k reduced regressors

  Eigen::VectorXd w = Eigen::VectorXd::Constant(k, 1.0 / k);
  double eff = 0.0;
  long t = 0;
  for (;; ++t) {
    Eigen::MatrixXd M = G * w.asDiagonal() * G.transpose();
    M = 0.5 * (M + M.transpose().eval());
    Eigen::MatrixXd L;
    if (!cholesky_factor(M, L))
      throw std::domain_error("standard multiplicative iterate became singular");
    Eigen::MatrixXd Y = L.triangularView<Eigen::Lower>().solve(G);
    Eigen::VectorXd d = Y.colwise().squaredNorm().transpose();
    eff = r / d.maxCoeff();
    if (eff >= opts.target_eff || t >= opts.max_iters) break;
    w = w.cwiseProduct(d) / r;
  }

  StandardResult result;
  result.design.w = Eigen::VectorXd::Zero(instance.n());
  for (int i = 0; i < k; ++i)
    result.design.w(subset[static_cast<size_t>(i)]) = w(i);
  result.iterations = t;
  result.eff_lb = std::min(eff, 1.0);
  result.subspace_dim = r;
  return result;
}

double compute_v0(const DesignInstance& instance, const CostPartition& part) {
  if (part.zero.empty()) return 0.0;

  Eigen::MatrixXd Ft(instance.m(), part.n_zero());
  for (int i = 0; i < part.n_zero(); ++i)
    Ft.col(i) = instance.point(part.zero[static_cast<size_t>(i)]).f;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Ft);
  if (qr.rank() < instance.m()) return 0.0;  // full-model determinant is singular

  StandardOptions opts;
  opts.target_eff = 0.999999;
  opts.restrict_to = part.zero;
  StandardResult res = solve_standard_multiplicative(instance, opts);
  return info_matrix(instance, res.design).phi;
}

}  // namespace dopt
