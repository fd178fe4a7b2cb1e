#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dopt/model.hpp"

namespace dopt {

inline constexpr long kNoDeletion = std::numeric_limits<long>::max();

struct SolverOptions {
  double target_eff = 0.99999;
  long deletion_interval = 16;  // kNoDeletion disables point removal
  long max_iters = 200000;
  double tol_one = 0.0;
  double tol_feas = 1e-9;
  double cost_bump = 0.0;  // when > 0, X0 costs become 1 + cost_bump
  std::uint64_t seed = 0;  // reserved; no randomized tie-handling by default
};

enum class SolveStatus { Converged, MaxIters, CollapsedToX0, ShortcutSize, ShortcutCost };

const char* to_string(SolveStatus status);

struct DeletionEvent {
  long iter = 0;
  std::vector<std::string> removed_ids;
};

struct TracePoint {
  long iter = 0;
  double phi = 0.0;
  double eff_lb = 0.0;
  int active_n = 0;
  double elapsed_s = 0.0;
};

struct SolverReport {
  Design design;  // over original ids; deleted points carry weight 0
  double phi = 0.0;
  double eff_lb = 0.0;
  long iterations = 0;
  std::vector<DeletionEvent> deletions;
  std::vector<TracePoint> trace;
  SolveStatus status = SolveStatus::Converged;
  // X0 nonempty and phi(w0) <= v0: the sufficient condition keeping S(w)
  // bounded away from zero is not certified, so the run may collapse to X0.
  bool guard_warning = false;
  double min_s = std::numeric_limits<double>::infinity();
};

/// Barycenter of the extreme vectors of the feasible polytope; strictly
/// positive and feasible for both equality constraints. Requires the Mixed
/// regime.
Design initial_design(const CostPartition& part);

/// One multiplicative step w <- w (*) d_pi(w) of the barycentric algorithm.
Design barycentric_update(const DesignInstance& instance, const CostPartition& part,
                          const Design& design);

/// epsilon = max(max Delta, max d over X0) - m, clamped at 0;
/// eff_lb = m / (m + epsilon).
std::pair<double, double> epsilon_and_bounds(const CostPartition& part,
                                             const Eigen::MatrixXd& Delta,
                                             const Eigen::VectorXd& d_zero, int m);

struct EquivalenceResult {
  bool optimal = false;
  double slack_zero = 0.0;  // max over X0 of d - m; -inf when X0 empty
  double slack_pm = 0.0;    // max (d-m)/delta over X+ plus max over X-
};

EquivalenceResult equivalence_check(const CostPartition& part, const Eigen::VectorXd& d,
                                    int m, double tol);

/// Deletion threshold h_m(eps) = m (1 + eps/2 - sqrt(eps (4 + eps - 4/m)) / 2).
double h_threshold(int m, double epsilon);

/// Indices (into the instance) certified to lie outside the support of every
/// optimal design: X+ rows / X- columns of Delta whose max is below the
/// threshold, and X0 points with d below it.
std::vector<int> delete_redundant(const CostPartition& part, const Eigen::MatrixXd& Delta,
                                  const Eigen::VectorXd& d_zero, double epsilon, int m);

/// Stratum rescaling restoring both equality constraints after deletion.
Design renormalize(const Design& design, const CostPartition& part);

/// Convex mixture w** = gamma w* + (1 - gamma) w_s with gamma = (beta-1)/(beta-alpha),
/// turning a size-tight solution into one tight in both constraints. With
/// approximate inputs the output is near-feasible only; residuals are on the
/// order of the inputs' own constraint errors.
Design mix_to_equality(const Design& w_star, const Design& w_s,
                       const DesignInstance& instance);

/// Solves the equality-constrained problem (both constraints tight) by the
/// barycentric algorithm with efficiency certification, redundant-point
/// deletion every `deletion_interval` iterations, and renormalization.
SolverReport solve_equality(const DesignInstance& instance, const SolverOptions& opts);

/// Solves the inequality-constrained problem: regime shortcuts first, the
/// equality solve only when both constraints must be active.
SolverReport solve_inequality(const DesignInstance& instance, const SolverOptions& opts);

}  // namespace dopt
