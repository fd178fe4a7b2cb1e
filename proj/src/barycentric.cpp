#include "dopt/barycentric.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "dopt/standard.hpp"
#include "dopt/transforms.hpp"

namespace dopt {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::CollapsedToX0: return "CollapsedToX0";
    case SolveStatus::ShortcutSize: return "ShortcutSize";
    case SolveStatus::ShortcutCost: return "ShortcutCost";
  }
  return "Unknown";
}

Design initial_design(const CostPartition& part) {
  if (part.plus.empty() || part.minus.empty())
    throw std::domain_error("initial design requires nonempty X+ and X-");
  const double inv_nt = 1.0 / static_cast<double>(part.n_tilde());

  Design design;
  design.w = Eigen::VectorXd::Zero(part.n());
  for (int i = 0; i < part.n_plus(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < part.n_minus(); ++j)
      sum += part.delta_minus(j) / (part.delta_plus(i) + part.delta_minus(j));
    design.w(part.plus[static_cast<size_t>(i)]) = inv_nt * sum;
  }
  for (int j = 0; j < part.n_minus(); ++j) {
    double sum = 0.0;
    for (int i = 0; i < part.n_plus(); ++i)
      sum += part.delta_plus(i) / (part.delta_plus(i) + part.delta_minus(j));
    design.w(part.minus[static_cast<size_t>(j)]) = inv_nt * sum;
  }
  for (int x0 : part.zero) design.w(x0) = inv_nt;
  return design;
}

namespace {

// w <- w (*) d_pi(w) given the already-evaluated Delta, d and S(w).
Eigen::VectorXd apply_update(const CostPartition& part, const Eigen::MatrixXd& Delta,
                             const Eigen::VectorXd& d, double s, const Eigen::VectorXd& w,
                             int m) {
  const int np = part.n_plus();
  const int nm = part.n_minus();
  const double scale = 1.0 / (m * s);

  Eigen::VectorXd wm_dm(nm), wp_dp(np);
  for (int j = 0; j < nm; ++j)
    wm_dm(j) = w(part.minus[static_cast<size_t>(j)]) * part.delta_minus(j);
  for (int i = 0; i < np; ++i)
    wp_dp(i) = w(part.plus[static_cast<size_t>(i)]) * part.delta_plus(i);

  Eigen::VectorXd t_plus = Delta * wm_dm;
  Eigen::VectorXd t_minus = Delta.transpose() * wp_dp;

  Eigen::VectorXd out = w;
  for (int i = 0; i < np; ++i) {
    const int x = part.plus[static_cast<size_t>(i)];
    out(x) = w(x) * t_plus(i) * scale;
  }
  for (int j = 0; j < nm; ++j) {
    const int x = part.minus[static_cast<size_t>(j)];
    out(x) = w(x) * t_minus(j) * scale;
  }
  for (int x0 : part.zero) out(x0) = w(x0) * d(x0) / m;
  return out;
}

}  // namespace

Design barycentric_update(const DesignInstance& instance, const CostPartition& part,
                          const Design& design) {
  InformationState state = info_matrix(instance, design);
  if (!state.regular)
    throw std::domain_error("barycentric update on a singular information matrix");
  const double s = s_of(design, part);
  if (!(s > 0.0))
    throw std::domain_error("barycentric update with S(w) = 0; collapse to X0 instead");
  Eigen::VectorXd d = variance_function(instance, state);
  Eigen::MatrixXd Delta = weighted_variances(part, d);
  return Design{apply_update(part, Delta, d, s, design.w, instance.m())};
}

std::pair<double, double> epsilon_and_bounds(const CostPartition& part,
                                             const Eigen::MatrixXd& Delta,
                                             const Eigen::VectorXd& d_zero, int m) {
  double worst = -std::numeric_limits<double>::infinity();
  if (Delta.size() > 0) worst = Delta.maxCoeff();
  if (d_zero.size() > 0) worst = std::max(worst, d_zero.maxCoeff());
  (void)part;
  double eps = std::max(worst - m, 0.0);
  return {eps, m / (m + eps)};
}

EquivalenceResult equivalence_check(const CostPartition& part, const Eigen::VectorXd& d,
                                    int m, double tol) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  EquivalenceResult res;

  res.slack_zero = neg_inf;
  for (int x0 : part.zero) res.slack_zero = std::max(res.slack_zero, d(x0) - m);

  double max_plus = neg_inf, max_minus = neg_inf;
  for (int i = 0; i < part.n_plus(); ++i)
    max_plus = std::max(max_plus,
                        (d(part.plus[static_cast<size_t>(i)]) - m) / part.delta_plus(i));
  for (int j = 0; j < part.n_minus(); ++j)
    max_minus = std::max(
        max_minus, (d(part.minus[static_cast<size_t>(j)]) - m) / part.delta_minus(j));
  res.slack_pm = max_plus + max_minus;

  res.optimal = (part.zero.empty() || res.slack_zero <= tol) &&
                (part.plus.empty() || part.minus.empty() || res.slack_pm <= tol);
  return res;
}

double h_threshold(int m, double epsilon) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be nonnegative");
  return m * (1.0 + epsilon / 2.0 -
              std::sqrt(epsilon * (4.0 + epsilon - 4.0 / m)) / 2.0);
}

std::vector<int> delete_redundant(const CostPartition& part, const Eigen::MatrixXd& Delta,
                                  const Eigen::VectorXd& d_zero, double epsilon, int m) {
  const double h = h_threshold(m, epsilon);
  std::vector<int> removed;
  if (Delta.size() > 0) {
    Eigen::VectorXd row_max = Delta.rowwise().maxCoeff();
    Eigen::VectorXd col_max = Delta.colwise().maxCoeff().transpose();
    for (int i = 0; i < part.n_plus(); ++i)
      if (row_max(i) < h) removed.push_back(part.plus[static_cast<size_t>(i)]);
    for (int j = 0; j < part.n_minus(); ++j)
      if (col_max(j) < h) removed.push_back(part.minus[static_cast<size_t>(j)]);
  }
  for (int k = 0; k < part.n_zero(); ++k)
    if (d_zero(k) < h) removed.push_back(part.zero[static_cast<size_t>(k)]);
  std::sort(removed.begin(), removed.end());
  return removed;
}

Design renormalize(const Design& design, const CostPartition& part) {
  double s_p = 0.0, s_m = 0.0, s_0 = 0.0, sd_p = 0.0, sd_m = 0.0;
  for (int i = 0; i < part.n_plus(); ++i) {
    const double wx = design.w(part.plus[static_cast<size_t>(i)]);
    s_p += wx;
    sd_p += part.delta_plus(i) * wx;
  }
  for (int j = 0; j < part.n_minus(); ++j) {
    const double wx = design.w(part.minus[static_cast<size_t>(j)]);
    s_m += wx;
    sd_m += part.delta_minus(j) * wx;
  }
  for (int x0 : part.zero) s_0 += design.w(x0);
  const double s = s_p + s_m + s_0;

  double h_p = 1.0, h_m = 1.0, h_0 = 1.0;
  if (s_p > 0.0 && s_m > 0.0) {
    const double cross = s_p * sd_m + s_m * sd_p;
    if (s_0 > 0.0) {
      h_p = sd_m * (s_p + s_m) / (s * cross);
      h_m = sd_p * (s_p + s_m) / (s * cross);
      h_0 = 1.0 / s;
    } else {
      h_p = sd_m / cross;
      h_m = sd_p / cross;
    }
  } else if (s_p == 0.0 && s_m == 0.0) {
    if (!(s_0 > 0.0)) throw std::domain_error("renormalize: design has no weight");
    h_0 = 1.0 / s_0;
  } else {
    throw std::domain_error(
        "renormalize: weight in only one of X+/X-; equality constraints unsatisfiable");
  }

  Design out = design;
  for (int x : part.plus) out.w(x) *= h_p;
  for (int x : part.minus) out.w(x) *= h_m;
  for (int x : part.zero) out.w(x) *= h_0;
  return out;
}

Design mix_to_equality(const Design& w_star, const Design& w_s,
                       const DesignInstance& instance) {
  constexpr double tol = 1e-7;
  if (std::abs(w_star.w.sum() - 1.0) > tol || std::abs(w_s.w.sum() - 1.0) > tol)
    throw std::invalid_argument("mix_to_equality: both designs must have unit size");
  const double alpha = instance.costs().dot(w_star.w);
  const double beta = instance.costs().dot(w_s.w);
  if (alpha > 1.0 + tol)
    throw std::invalid_argument("mix_to_equality: w* must satisfy the cost constraint");
  if (!(beta > 1.0))
    throw std::invalid_argument("mix_to_equality: w_s must violate the cost constraint");
  const double gamma = (beta - 1.0) / (beta - alpha);
  return Design{gamma * w_star.w + (1.0 - gamma) * w_s.w};
}

namespace {

struct ActiveProblem {
  // Original indices of the still-active points, ascending.
  std::vector<int> active;
  DesignInstance sub;
  CostPartition part;

  ActiveProblem(const DesignInstance& full, std::vector<int> indices, double tol_one)
      : active(std::move(indices)), sub(make_sub(full, active)), part(partition(sub, tol_one)) {}

  static DesignInstance make_sub(const DesignInstance& full, const std::vector<int>& idx) {
    std::vector<DesignPoint> pts;
    pts.reserve(idx.size());
    for (int i : idx) pts.push_back(full.point(i));
    return DesignInstance(full.m(), std::move(pts));
  }
};

SolverReport collapse_to_x0(const DesignInstance& instance, const std::vector<int>& zero_idx,
                            const SolverOptions& opts, SolverReport report,
                            const std::chrono::steady_clock::time_point& start) {
  StandardOptions sopts;
  sopts.target_eff = opts.target_eff;
  sopts.max_iters = opts.max_iters;
  sopts.restrict_to = zero_idx;
  StandardResult res = solve_standard_multiplicative(instance, sopts);
  report.design = res.design;
  report.phi = info_matrix(instance, res.design).phi;
  report.eff_lb = res.eff_lb;
  report.iterations += res.iterations;
  report.status = SolveStatus::CollapsedToX0;
  report.trace.push_back({report.iterations, report.phi, report.eff_lb,
                          static_cast<int>(zero_idx.size()),
                          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                              .count()});
  return report;
}

}  // namespace

SolverReport solve_equality(const DesignInstance& instance_in, const SolverOptions& opts) {
  if (!(opts.target_eff > 0.0 && opts.target_eff < 1.0))
    throw std::invalid_argument("target_eff must lie in (0, 1)");
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  // Optional conservative bump of unit costs, making X0 empty.
  const DesignInstance* instance = &instance_in;
  std::optional<DesignInstance> bumped;
  if (opts.cost_bump > 0.0) {
    CostPartition full_part = partition(instance_in, opts.tol_one);
    std::vector<DesignPoint> pts(instance_in.points());
    for (int x0 : full_part.zero) pts[static_cast<size_t>(x0)].cost = 1.0 + opts.cost_bump;
    bumped.emplace(instance_in.m(), std::move(pts));
    instance = &*bumped;
  }

  const int n = instance->n();
  const int m = instance->m();

  std::vector<int> all(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
  ActiveProblem ap(*instance, all, opts.tol_one);

  if (ap.part.plus.empty() || ap.part.minus.empty())
    throw std::domain_error("solve_equality requires the Mixed regime; use solve_inequality");

  SolverReport report;
  Design w = initial_design(ap.part);

  if (!ap.part.zero.empty()) {
    const double v0 = compute_v0(*instance, ap.part);
    const double phi0 = info_matrix(*instance, w).phi;
    report.guard_warning = phi0 <= v0;
  }

  const long trace_every =
      opts.deletion_interval == kNoDeletion ? 16 : opts.deletion_interval;

  auto expand = [&](const Eigen::VectorXd& wc) {
    Design full;
    full.w = Eigen::VectorXd::Zero(n);
    for (size_t i = 0; i < ap.active.size(); ++i)
      full.w(ap.active[i]) = wc(static_cast<long>(i));
    return full;
  };

  for (long t = 0;; ++t) {
    InformationState state = info_matrix(ap.sub, w);
    if (!state.regular)
      throw std::domain_error("barycentric iterate became singular");
    const double s = s_of(w, ap.part);
    report.min_s = std::min(report.min_s, s);
    if (!(s > 0.0))
      return collapse_to_x0(*instance, ap.active, opts, std::move(report), start);

    Eigen::VectorXd d = variance_function(ap.sub, state);
    Eigen::MatrixXd Delta = weighted_variances(ap.part, d);
    Eigen::VectorXd d_zero(ap.part.n_zero());
    for (int k = 0; k < ap.part.n_zero(); ++k)
      d_zero(k) = d(ap.part.zero[static_cast<size_t>(k)]);

    auto [eps, eff] = epsilon_and_bounds(ap.part, Delta, d_zero, m);
    const bool converged = eff >= opts.target_eff;
    const bool out_of_iters = t >= opts.max_iters;
    if (converged || out_of_iters || t % trace_every == 0)
      report.trace.push_back(
          {t, state.phi, eff, static_cast<int>(ap.active.size()), elapsed()});

    if (converged || out_of_iters) {
      report.design = expand(w.w);
      report.phi = state.phi;
      report.eff_lb = eff;
      report.iterations = t;
      report.status = converged ? SolveStatus::Converged : SolveStatus::MaxIters;
      return report;
    }

    w.w = apply_update(ap.part, Delta, d, s, w.w, m);

    const bool delete_now =
        opts.deletion_interval != kNoDeletion && t % opts.deletion_interval == 0;
    if (delete_now) {
      std::vector<int> removed = delete_redundant(ap.part, Delta, d_zero, eps, m);
      if (!removed.empty()) {
        DeletionEvent event;
        event.iter = t;
        for (int i : removed) {
          event.removed_ids.push_back(ap.sub.point(i).id);
          w.w(i) = 0.0;
        }
        report.deletions.push_back(std::move(event));

        // If a whole stratum went away, the equality constraints force all
        // remaining X+/X- weight to zero and the problem reduces to standard
        // D-optimality on the surviving X0 points.
        std::vector<bool> gone(ap.active.size(), false);
        for (int i : removed) gone[static_cast<size_t>(i)] = true;
        size_t removed_plus = 0, removed_minus = 0;
        for (int i : ap.part.plus) removed_plus += gone[static_cast<size_t>(i)] ? 1 : 0;
        for (int i : ap.part.minus) removed_minus += gone[static_cast<size_t>(i)] ? 1 : 0;
        if (removed_plus == static_cast<size_t>(ap.part.n_plus()) ||
            removed_minus == static_cast<size_t>(ap.part.n_minus())) {
          std::vector<int> zero_orig;
          for (int i : ap.part.zero)
            if (!gone[static_cast<size_t>(i)])
              zero_orig.push_back(ap.active[static_cast<size_t>(i)]);
          report.iterations = t;
          return collapse_to_x0(*instance, zero_orig, opts, std::move(report), start);
        }

        w = renormalize(w, ap.part);
        auto [r_size, r_cost] = feasibility_residuals(w, ap.sub);
        if (r_size > opts.tol_feas || r_cost > opts.tol_feas) {
          w.w /= w.w.sum();
          w = renormalize(w, ap.part);
        }

        std::vector<int> keep_orig;
        Eigen::VectorXd w_next(static_cast<long>(ap.active.size() - removed.size()));
        {
          size_t r = 0;
          long out = 0;
          for (size_t i = 0; i < ap.active.size(); ++i) {
            if (r < removed.size() && removed[r] == static_cast<int>(i)) {
              ++r;
              continue;
            }
            keep_orig.push_back(ap.active[i]);
            w_next(out++) = w.w(static_cast<long>(i));
          }
        }
        ap = ActiveProblem(*instance, std::move(keep_orig), opts.tol_one);
        w.w = std::move(w_next);
      }
    }
  }
}

SolverReport solve_inequality(const DesignInstance& instance, const SolverOptions& opts) {
  const CostPartition part = partition(instance, opts.tol_one);
  const CostRegime regime = classify_regime(part);
  const double slack = 1e-9;

  StandardOptions sopts;
  sopts.target_eff = opts.target_eff;
  sopts.max_iters = opts.max_iters;

  auto shortcut_report = [&](const Design& design, long iterations, double eff_lb,
                             SolveStatus status) {
    SolverReport report;
    report.design = design;
    report.phi = info_matrix(instance, design).phi;
    report.eff_lb = eff_lb;
    report.iterations = iterations;
    report.status = status;
    return report;
  };

  if (regime == CostRegime::AllLow) {
    StandardResult res = solve_standard_multiplicative(instance, sopts);
    return shortcut_report(res.design, res.iterations, res.eff_lb,
                           SolveStatus::ShortcutSize);
  }
  if (regime == CostRegime::AllHigh) {
    auto [standard, back] = cost_only_to_standard(instance);
    StandardResult res = solve_standard_multiplicative(standard, sopts);
    return shortcut_report(back.apply(res.design), res.iterations, res.eff_lb,
                           SolveStatus::ShortcutCost);
  }

  // Mixed: a single-constraint optimum that happens to satisfy the other
  // constraint solves the two-constraint problem.
  StandardResult size_res = solve_standard_multiplicative(instance, sopts);
  if (instance.costs().dot(size_res.design.w) <= 1.0 + slack)
    return shortcut_report(size_res.design, size_res.iterations, size_res.eff_lb,
                           SolveStatus::ShortcutSize);

  auto [standard, back] = cost_only_to_standard(instance);
  StandardResult cost_res = solve_standard_multiplicative(standard, sopts);
  Design cost_design = back.apply(cost_res.design);
  if (cost_design.w.sum() <= 1.0 + slack)
    return shortcut_report(cost_design, cost_res.iterations, cost_res.eff_lb,
                           SolveStatus::ShortcutCost);

  return solve_equality(instance, opts);
}

}  // namespace dopt
