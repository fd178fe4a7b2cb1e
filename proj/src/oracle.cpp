#include "dopt/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dopt {

std::vector<ExtremePoint> extreme_points(const CostPartition& part) {
  const long nt = part.n_tilde();
  if (nt > 1000000)
    throw std::invalid_argument("extreme-point enumeration guard: n_tilde > 1e6");
  const int n = part.n();

  std::vector<ExtremePoint> points;
  points.reserve(static_cast<size_t>(nt));
  for (int i = 0; i < part.n_plus(); ++i) {
    for (int j = 0; j < part.n_minus(); ++j) {
      ExtremePoint q;
      q.kind = ExtremePoint::Kind::Pair;
      q.plus_index = part.plus[static_cast<size_t>(i)];
      q.minus_index = part.minus[static_cast<size_t>(j)];
      q.vector = Eigen::VectorXd::Zero(n);
      const double denom = part.delta_plus(i) + part.delta_minus(j);
      q.vector(q.plus_index) = part.delta_minus(j) / denom;
      q.vector(q.minus_index) = part.delta_plus(i) / denom;
      points.push_back(std::move(q));
    }
  }
  for (int x0 : part.zero) {
    ExtremePoint q;
    q.kind = ExtremePoint::Kind::Singleton;
    q.zero_index = x0;
    q.vector = Eigen::VectorXd::Zero(n);
    q.vector(x0) = 1.0;
    points.push_back(std::move(q));
  }
  return points;
}

std::optional<Design> example1_solution(double c1, double c2, Example1Mode mode) {
  auto design = [](double w1, double w2) {
    Design d;
    d.w = Eigen::Vector2d(w1, w2);
    return d;
  };

  if (mode == Example1Mode::Inequality) {
    if (c1 + c2 <= 2.0) return design(0.5, 0.5);
    if (0.5 / c1 + 0.5 / c2 <= 1.0) return design(0.5 / c1, 0.5 / c2);
    // Unique point satisfying both equalities; see the equality branch.
    const double w1 = (c2 - 1.0) / (c2 - c1);
    return design(w1, 1.0 - w1);
  }

  if (c1 == 1.0 && c2 == 1.0) return design(0.5, 0.5);
  if (c1 == c2) return std::nullopt;  // constraints parallel and inconsistent
  const double w1 = (c2 - 1.0) / (c2 - c1);
  const double w2 = 1.0 - w1;
  if (w1 > 0.0 && w2 > 0.0) return design(w1, w2);
  return std::nullopt;
}

namespace {

double logdet_or_neg_inf(const Eigen::MatrixXd& M) {
  Eigen::MatrixXd L;
  if (!cholesky_factor(M, L)) return -std::numeric_limits<double>::infinity();
  return 2.0 * L.diagonal().array().log().sum();
}

// Golden-section maximization of fn on [0, hi] to absolute x-tolerance 1e-12.
double golden_section_max(const std::function<double(double)>& fn, double hi) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = 0.0, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  while (b - a > 1e-12) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = fn(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = fn(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Design frank_wolfe_reference(const DesignInstance& instance, const CostPartition& part,
                             const FrankWolfeOptions& opts) {
  if (part.plus.empty() && part.minus.empty() && part.zero.empty())
    throw std::invalid_argument("empty partition");
  const int m = instance.m();
  const int n = instance.n();
  const Eigen::MatrixXd& F = instance.regressors();

  std::vector<ExtremePoint> extremes = extreme_points(part);
  const size_t k = extremes.size();

  // Rank-<=2 information matrices of the extreme points.
  std::vector<Eigen::MatrixXd> Mq(k);
  for (size_t i = 0; i < k; ++i) {
    const ExtremePoint& q = extremes[i];
    Mq[i] = Eigen::MatrixXd::Zero(m, m);
    if (q.kind == ExtremePoint::Kind::Pair) {
      Mq[i] += q.vector(q.plus_index) * F.row(q.plus_index).transpose() * F.row(q.plus_index);
      Mq[i] += q.vector(q.minus_index) * F.row(q.minus_index).transpose() * F.row(q.minus_index);
    } else {
      Mq[i] = F.row(q.zero_index).transpose() * F.row(q.zero_index);
    }
  }

  // Start at the barycenter (uniform coordinates over the extreme vectors).
  Eigen::VectorXd lambda = Eigen::VectorXd::Constant(static_cast<long>(k), 1.0 / k);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (size_t i = 0; i < k; ++i) w += lambda(static_cast<long>(i)) * extremes[i].vector;

  for (long t = 0; t < opts.iterations; ++t) {
    Eigen::MatrixXd M = F.transpose() * w.asDiagonal() * F;
    M = 0.5 * (M + M.transpose().eval());
    Eigen::MatrixXd L;
    if (!cholesky_factor(M, L))
      throw std::domain_error("frank-wolfe iterate became singular");
    Eigen::MatrixXd Y = L.triangularView<Eigen::Lower>().solve(F.transpose());
    Eigen::VectorXd d = Y.colwise().squaredNorm().transpose();

    // Directional-derivative scores q.d(w); lowest index wins ties.
    double best = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    size_t best_i = 0, worst_i = k;
    for (size_t i = 0; i < k; ++i) {
      const ExtremePoint& q = extremes[i];
      double score;
      if (q.kind == ExtremePoint::Kind::Pair)
        score = q.vector(q.plus_index) * d(q.plus_index) +
                q.vector(q.minus_index) * d(q.minus_index);
      else
        score = d(q.zero_index);
      if (score > best) {
        best = score;
        best_i = i;
      }
      if (opts.away_steps && lambda(static_cast<long>(i)) > 0.0 && score < worst) {
        worst = score;
        worst_i = i;
      }
    }
    if (opts.gap_tol > 0.0 && best - m <= opts.gap_tol) break;

    const double base = logdet_or_neg_inf(M);
    bool away = false;
    if (opts.away_steps && worst_i < k) {
      const double lam_v = lambda(static_cast<long>(worst_i));
      away = (m - worst > best - m) && lam_v < 1.0;
    }

    bool stepped = false;
    if (away) {
      const double lam_v = lambda(static_cast<long>(worst_i));
      const double alpha_max = lam_v / (1.0 - lam_v);
      const Eigen::MatrixXd& Mv = Mq[worst_i];
      auto g = [&](double a) { return logdet_or_neg_inf((1.0 + a) * M - a * Mv); };
      double alpha = golden_section_max(g, alpha_max);
      if (g(alpha) < base) alpha = 0.0;
      if (alpha > 0.0) {
        lambda *= (1.0 + alpha);
        lambda(static_cast<long>(worst_i)) = lam_v * (1.0 + alpha) - alpha;
        if (lambda(static_cast<long>(worst_i)) < 1e-12)
          lambda(static_cast<long>(worst_i)) = 0.0;  // drop step
        w = (1.0 + alpha) * w - alpha * extremes[worst_i].vector;
        w = w.cwiseMax(0.0);
        stepped = true;
      } else if (lam_v < 1e-12) {
        // Numerical dust: remove the coordinate outright so it cannot be
        // re-selected and stall the iteration.
        lambda(static_cast<long>(worst_i)) = 0.0;
      }
    }
    if (!stepped) {
      // Vertex-direction step, also the fallback when the away segment
      // yields no improvement.
      const Eigen::MatrixXd& Ms = Mq[best_i];
      auto g = [&](double a) { return logdet_or_neg_inf((1.0 - a) * M + a * Ms); };
      double alpha = golden_section_max(g, 1.0);
      if (g(alpha) < base) alpha = 0.0;  // exact line search never moves downhill
      if (alpha > 0.0) {
        lambda *= (1.0 - alpha);
        lambda(static_cast<long>(best_i)) += alpha;
        w = (1.0 - alpha) * w + alpha * extremes[best_i].vector;
      }
    }
  }
  return Design{w};
}

}  // namespace dopt
