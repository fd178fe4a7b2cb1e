#pragma once

#include "dopt/model.hpp"

namespace dopt {

enum class BackMapKind { Identity, CostScaling, GeneralTwoConstraint };

/// Recovers weights in the original problem from weights of a transformed
/// instance: w_original = w_transformed (componentwise *) scale.
struct BackMap {
  BackMapKind kind = BackMapKind::Identity;
  Eigen::VectorXd scale;

  Design apply(const Design& design) const {
    return Design{design.w.cwiseProduct(scale)};
  }
};

/// c_x = (N/B) * C_x.
Eigen::VectorXd normalize_costs(const Eigen::VectorXd& raw_costs, long N, double B);

/// Reduces max phi s.t. sum c1 w <= 1, sum c2 w <= 1 to the canonical
/// size-and-cost form: f = f_orig / sqrt(c1), c = c2 / c1, w_orig = w / c1.
std::pair<DesignInstance, BackMap> general_two_constraint_to_canonical(
    int m, const std::vector<DesignPoint>& points, const Eigen::VectorXd& c1,
    const Eigen::VectorXd& c2);

/// Reduces the cost-only problem (sum c w = 1) to the standard simplex
/// problem via g = f / sqrt(c); a simplex design v maps back to w = v / c.
std::pair<DesignInstance, BackMap> cost_only_to_standard(const DesignInstance& instance);

/// Costs c_x = f(x)^T Sigma f(x) / v, so that sum c w = 1 pins
/// tr(Sigma M(w)) = v.
Eigen::VectorXd trace_constraint_costs(const DesignInstance& instance,
                                       const Eigen::MatrixXd& Sigma, double v);

enum class CostRegime { AllLow, AllHigh, Mixed };

CostRegime classify_regime(const CostPartition& part);

}  // namespace dopt
