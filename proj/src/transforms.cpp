#include "dopt/transforms.hpp"

#include <cmath>
#include <stdexcept>

namespace dopt {

Eigen::VectorXd normalize_costs(const Eigen::VectorXd& raw_costs, long N, double B) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (!(B > 0.0)) throw std::invalid_argument("budget B must be positive");
  if ((raw_costs.array() <= 0.0).any())
    throw std::invalid_argument("all raw costs must be positive");
  return (static_cast<double>(N) / B) * raw_costs;
}

std::pair<DesignInstance, BackMap> general_two_constraint_to_canonical(
    int m, const std::vector<DesignPoint>& points, const Eigen::VectorXd& c1,
    const Eigen::VectorXd& c2) {
  const long n = static_cast<long>(points.size());
  if (c1.size() != n || c2.size() != n)
    throw std::invalid_argument("constraint coefficient length does not match point count");
  if ((c1.array() <= 0.0).any() || (c2.array() <= 0.0).any())
    throw std::invalid_argument("all constraint coefficients must be positive");

  BackMap back;
  back.kind = BackMapKind::GeneralTwoConstraint;
  back.scale = c1.cwiseInverse();

  std::vector<DesignPoint> transformed;
  transformed.reserve(points.size());
  for (long i = 0; i < n; ++i) {
    const DesignPoint& p = points[static_cast<size_t>(i)];
    transformed.push_back({p.id, p.f / std::sqrt(c1(i)), c2(i) / c1(i)});
  }
  return {DesignInstance(m, std::move(transformed)), std::move(back)};
}

std::pair<DesignInstance, BackMap> cost_only_to_standard(const DesignInstance& instance) {
  BackMap back;
  back.kind = BackMapKind::CostScaling;
  back.scale = instance.costs().cwiseInverse();

  std::vector<DesignPoint> transformed;
  transformed.reserve(static_cast<size_t>(instance.n()));
  for (int i = 0; i < instance.n(); ++i) {
    const DesignPoint& p = instance.point(i);
    transformed.push_back({p.id, p.f / std::sqrt(p.cost), 1.0});
  }
  return {DesignInstance(instance.m(), std::move(transformed)), std::move(back)};
}

Eigen::VectorXd trace_constraint_costs(const DesignInstance& instance,
                                       const Eigen::MatrixXd& Sigma, double v) {
  if (!(v > 0.0)) throw std::invalid_argument("trace target v must be positive");
  if (Sigma.rows() != instance.m() || Sigma.cols() != instance.m())
    throw std::invalid_argument("Sigma dimension does not match the model");
  Eigen::MatrixXd L;
  if (!cholesky_factor(Sigma, L))
    throw std::invalid_argument("Sigma must be positive definite");

  Eigen::VectorXd costs(instance.n());
  for (int i = 0; i < instance.n(); ++i) {
    const Eigen::VectorXd& f = instance.point(i).f;
    costs(i) = f.dot(Sigma * f) / v;
  }
  return costs;
}

CostRegime classify_regime(const CostPartition& part) {
  if (part.plus.empty()) return CostRegime::AllLow;
  if (part.minus.empty()) return CostRegime::AllHigh;
  return CostRegime::Mixed;
}

}  // namespace dopt
