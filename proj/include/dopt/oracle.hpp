#pragma once

#include <optional>
#include <vector>

#include "dopt/model.hpp"

namespace dopt {

/// An extreme vector of the feasible polytope: a weighted X+/X- pair or an
/// X0 singleton.
struct ExtremePoint {
  enum class Kind { Pair, Singleton };
  Kind kind = Kind::Singleton;
  int plus_index = -1;   // instance index, Pair only
  int minus_index = -1;  // instance index, Pair only
  int zero_index = -1;   // instance index, Singleton only
  Eigen::VectorXd vector;
};

/// All n+ * n- pair vectors followed by all n0 singletons (count n_tilde).
std::vector<ExtremePoint> extreme_points(const CostPartition& part);

enum class Example1Mode { Inequality, Equality };

/// Closed-form optimum for the two-point model f(1) = (1,0), f(2) = (1,1).
/// Absent when the equality-mode problem is infeasible or singular.
/// The middle branch returns the unique solution of
/// {w1 + w2 = 1, c1 w1 + c2 w2 = 1}, i.e. w1 = (c2-1)/(c2-c1).
std::optional<Design> example1_solution(double c1, double c2, Example1Mode mode);

struct FrankWolfeOptions {
  long iterations = 5000;
  // Away steps trade the textbook vertex-direction scheme for linear
  // convergence and exact support identification; used for tight-tolerance
  // reference solves.
  bool away_steps = false;
  double gap_tol = 0.0;  // early stop when max q.d(w) - m falls below this
};

/// Vertex-direction reference solver over the constraint polytope: scans all
/// extreme points for the steepest one and golden-sections the segment toward
/// it. Ground truth for tests; not performance-tuned.
Design frank_wolfe_reference(const DesignInstance& instance, const CostPartition& part,
                             const FrankWolfeOptions& opts);

}  // namespace dopt
