#include "dopt/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace dopt {

DesignInstance::DesignInstance(int m, std::vector<DesignPoint> points)
    : m_(m), points_(std::move(points)) {
  if (m_ < 1) throw std::invalid_argument("parameter dimension m must be >= 1");
  const int n = static_cast<int>(points_.size());
  if (n < 1) throw std::invalid_argument("design space must contain at least one point");

  F_.resize(n, m_);
  c_.resize(n);
  std::unordered_set<std::string> seen;
  for (int i = 0; i < n; ++i) {
    const DesignPoint& p = points_[static_cast<size_t>(i)];
    if (p.f.size() != m_)
      throw std::invalid_argument("regressor of point '" + p.id + "' has wrong length");
    if (p.f.norm() == 0.0)
      throw std::invalid_argument("regressor of point '" + p.id + "' is zero");
    if (!(p.cost > 0.0))
      throw std::invalid_argument("cost of point '" + p.id + "' must be positive");
    if (!seen.insert(p.id).second)
      throw std::invalid_argument("duplicate point id '" + p.id + "'");
    F_.row(i) = p.f.transpose();
    c_(i) = p.cost;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(F_);
  if (qr.rank() < m_)
    throw std::invalid_argument("regressors do not span R^m (rank " +
                                std::to_string(qr.rank()) + " < " + std::to_string(m_) + ")");
}

bool cholesky_factor(const Eigen::MatrixXd& M, Eigen::MatrixXd& L) {
  const int m = static_cast<int>(M.rows());
  const double floor = 1e-12 * M.trace() / m;
  if (!(floor > 0.0)) return false;
  L = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    double pivot = M(j, j) - L.row(j).head(j).squaredNorm();
    if (!(pivot >= floor)) return false;
    L(j, j) = std::sqrt(pivot);
    for (int i = j + 1; i < m; ++i) {
      double s = M(i, j) - L.row(i).head(j).dot(L.row(j).head(j));
      L(i, j) = s / L(j, j);
    }
  }
  return true;
}

CostPartition partition(const DesignInstance& instance, double tol_one) {
  CostPartition part;
  std::vector<double> dp, dm;
  for (int i = 0; i < instance.n(); ++i) {
    const double c = instance.costs()(i);
    if (c > 1.0 + tol_one) {
      part.plus.push_back(i);
      dp.push_back(c - 1.0);
    } else if (c < 1.0 - tol_one) {
      part.minus.push_back(i);
      dm.push_back(1.0 - c);
    } else {
      part.zero.push_back(i);
    }
  }
  part.delta_plus = Eigen::Map<Eigen::VectorXd>(dp.data(), static_cast<long>(dp.size()));
  part.delta_minus = Eigen::Map<Eigen::VectorXd>(dm.data(), static_cast<long>(dm.size()));
  return part;
}

InformationState info_matrix(const DesignInstance& instance, const Design& design) {
  if (design.w.size() != instance.n())
    throw std::invalid_argument("design length does not match instance");
  const Eigen::MatrixXd& F = instance.regressors();
  InformationState state;
  state.M = F.transpose() * design.w.asDiagonal() * F;
  state.M = 0.5 * (state.M + state.M.transpose().eval());  // enforce exact symmetry
  if (cholesky_factor(state.M, state.L)) {
    state.regular = true;
    state.logdet = 2.0 * state.L.diagonal().array().log().sum();
    state.phi = std::exp(state.logdet / instance.m());
  } else {
    state.regular = false;
    state.logdet = -std::numeric_limits<double>::infinity();
    state.phi = 0.0;
  }
  return state;
}

Eigen::VectorXd variance_function(const DesignInstance& instance,
                                  const InformationState& state) {
  if (!state.regular)
    throw std::domain_error("variance function requested for a singular information matrix");
  // d_x = || L^{-1} f(x) ||^2
  Eigen::MatrixXd Y = state.L.triangularView<Eigen::Lower>().solve(
      instance.regressors().transpose());
  return Y.colwise().squaredNorm().transpose();
}

namespace {

Eigen::MatrixXd delta_block(const CostPartition& part, const Eigen::VectorXd& d,
                            int row0, int rows) {
  const int nm = part.n_minus();
  Eigen::ArrayXd a(rows), ida(rows);
  for (int i = 0; i < rows; ++i) {
    a(i) = d(part.plus[static_cast<size_t>(row0 + i)]) / part.delta_plus(row0 + i);
    ida(i) = 1.0 / part.delta_plus(row0 + i);
  }
  Eigen::ArrayXd b(nm), idb(nm);
  for (int j = 0; j < nm; ++j) {
    b(j) = d(part.minus[static_cast<size_t>(j)]) / part.delta_minus(j);
    idb(j) = 1.0 / part.delta_minus(j);
  }
  Eigen::MatrixXd num = a.matrix() * Eigen::RowVectorXd::Ones(nm);
  num.array().rowwise() += b.transpose();
  Eigen::MatrixXd den = ida.matrix() * Eigen::RowVectorXd::Ones(nm);
  den.array().rowwise() += idb.transpose();
  return num.array() / den.array();
}

}  // namespace

Eigen::MatrixXd weighted_variances(const CostPartition& part,
                                   const Eigen::VectorXd& d) {
  return delta_block(part, d, 0, part.n_plus());
}

void weighted_variances_blocked(
    const CostPartition& part, const Eigen::VectorXd& d, int block_rows,
    const std::function<void(int, const Eigen::MatrixXd&)>& visit) {
  if (block_rows < 1) throw std::invalid_argument("block_rows must be >= 1");
  const int np = part.n_plus();
  for (int row0 = 0; row0 < np; row0 += block_rows) {
    const int rows = std::min(block_rows, np - row0);
    visit(row0, delta_block(part, d, row0, rows));
  }
}

double s_of(const Design& design, const CostPartition& part) {
  double s = 0.0;
  for (int i = 0; i < part.n_plus(); ++i)
    s += part.delta_plus(i) * design.w(part.plus[static_cast<size_t>(i)]);
  return s;
}

std::pair<double, double> feasibility_residuals(const Design& design,
                                                const DesignInstance& instance) {
  const double size_res = std::abs(design.w.sum() - 1.0);
  const double cost_res = std::abs(instance.costs().dot(design.w) - 1.0);
  return {size_res, cost_res};
}

}  // namespace dopt
