#pragma once

#include <optional>
#include <vector>

#include "dopt/model.hpp"

namespace dopt {

struct StandardOptions {
  double target_eff = 0.999999;
  long max_iters = 200000;
  // When set, the solve is restricted to these point indices; the model is
  // reduced to the subspace spanned by their regressors.
  std::optional<std::vector<int>> restrict_to;
};

struct StandardResult {
  Design design;  // full-length weight vector, zero outside the restriction
  long iterations = 0;
  double eff_lb = 0.0;
  int subspace_dim = 0;
};

/// Classic multiplicative algorithm w <- w * d / m' for the standard
/// (single-simplex) approximate D-optimal problem, with the D-efficiency
/// stopping bound m' / max_x d_x.
StandardResult solve_standard_multiplicative(const DesignInstance& instance,
                                             const StandardOptions& opts);

/// v0 of the convergence guard: the optimal standard D-criterion value over
/// designs supported on X0 (in the full m-dimensional model). Zero when X0
/// is empty or its regressors do not span R^m.
double compute_v0(const DesignInstance& instance, const CostPartition& part);

}  // namespace dopt
