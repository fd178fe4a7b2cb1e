#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace dopt {

/// One candidate trial condition: a regressor vector and a normalized cost.
struct DesignPoint {
  std::string id;
  Eigen::VectorXd f;
  double cost = 1.0;
};

/// Finite design space. Validates the regularity assumptions on
/// construction: nonzero regressors spanning R^m, positive costs,
/// unique ids.
class DesignInstance {
 public:
  DesignInstance(int m, std::vector<DesignPoint> points);

  int m() const { return m_; }
  int n() const { return static_cast<int>(points_.size()); }
  const DesignPoint& point(int i) const { return points_[static_cast<size_t>(i)]; }
  const std::vector<DesignPoint>& points() const { return points_; }

  /// n x m stacked regressor matrix.
  const Eigen::MatrixXd& regressors() const { return F_; }
  const Eigen::VectorXd& costs() const { return c_; }

 private:
  int m_;
  std::vector<DesignPoint> points_;
  Eigen::MatrixXd F_;
  Eigen::VectorXd c_;
};

/// Nonnegative weight vector over the design points.
struct Design {
  Eigen::VectorXd w;
};

/// Index partition of the design space by cost: X+ (c > 1), X- (c < 1),
/// X0 (c = 1), with the cost margins delta attached to X+ and X-.
struct CostPartition {
  std::vector<int> plus;
  std::vector<int> minus;
  std::vector<int> zero;
  Eigen::VectorXd delta_plus;   // c - 1, aligned with `plus`
  Eigen::VectorXd delta_minus;  // 1 - c, aligned with `minus`

  int n_plus() const { return static_cast<int>(plus.size()); }
  int n_minus() const { return static_cast<int>(minus.size()); }
  int n_zero() const { return static_cast<int>(zero.size()); }
  int n() const { return n_plus() + n_minus() + n_zero(); }
  long n_tilde() const {
    return static_cast<long>(n_plus()) * n_minus() + n_zero();
  }
};

/// Information matrix M(w) with its triangular factorization and the
/// D-criterion value phi = det^{1/m} M. A numerically singular M is a
/// valid state (regular == false, phi == 0), not an error.
struct InformationState {
  Eigen::MatrixXd M;
  Eigen::MatrixXd L;  // lower Cholesky factor, valid iff regular
  bool regular = false;
  double logdet = 0.0;
  double phi = 0.0;
};

/// Lower Cholesky factorization with a relative pivot floor
/// 1e-12 * trace(M)/m; a pivot below the floor marks M singular.
bool cholesky_factor(const Eigen::MatrixXd& M, Eigen::MatrixXd& L);

CostPartition partition(const DesignInstance& instance, double tol_one = 0.0);

InformationState info_matrix(const DesignInstance& instance, const Design& design);

/// d_x = f(x)^T M^{-1} f(x), via triangular solves against the stored factor.
Eigen::VectorXd variance_function(const DesignInstance& instance,
                                  const InformationState& state);

/// Weighted variances Delta[i,j] = (dp_i * dm_j ... ), an n+ x n- matrix with
/// Delta[i,j] = (delta+_i * d-_j + delta-_j * d+_i) / (delta+_i + delta-_j),
/// built by the outer-sum form.
Eigen::MatrixXd weighted_variances(const CostPartition& part,
                                   const Eigen::VectorXd& d);

/// Row-blocked evaluation of the weighted-variance matrix for memory-capped
/// callers; the callback receives (first_row, block) for consecutive blocks.
void weighted_variances_blocked(
    const CostPartition& part, const Eigen::VectorXd& d, int block_rows,
    const std::function<void(int, const Eigen::MatrixXd&)>& visit);

/// S(w) = sum over X+ of delta_x * w_x.
double s_of(const Design& design, const CostPartition& part);

/// (|sum w - 1|, |sum c w - 1|).
std::pair<double, double> feasibility_residuals(const Design& design,
                                                const DesignInstance& instance);

}  // namespace dopt
