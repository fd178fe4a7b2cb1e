#include "dopt/instances.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dopt {

double SplitMix64::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double r = std::sqrt(-2.0 * std::log(u1));
  have_spare_ = true;
  spare_ = r * std::sin(2.0 * M_PI * u2);
  return r * std::cos(2.0 * M_PI * u2);
}

DesignInstance quadratic_grid_instance(int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  const double scale = grid_size - 1.0;
  std::vector<DesignPoint> points;
  points.reserve(static_cast<size_t>(grid_size) * grid_size);
  for (int x = 1; x <= grid_size * grid_size; ++x) {
    const int i = (x - 1) / grid_size;
    const int j = (x - 1) % grid_size;
    const double r1 = i / scale;
    const double r2 = j / scale;
    Eigen::VectorXd f(6);
    f << 1.0, r1, r2, r1 * r1, r2 * r2, r1 * r2;
    // Evaluated over a common denominator so grid points with
    // 6 r1 + r2 = 0.9 land in X0 exactly.
    const double cost = (6.0 * i + j + 0.1 * scale) / scale;
    points.push_back({"x" + std::to_string(x), std::move(f), cost});
  }
  return DesignInstance(6, std::move(points));
}

DesignInstance random_instance(const RandomSpec& spec) {
  const int n_plus = spec.n_plus();
  const int n_minus = spec.n_minus();
  const int n_zero = spec.n_zero();
  if (spec.n < 1 || n_plus < 0 || n_minus < 0 || n_zero < 0 ||
      !(spec.p0 >= 0.0 && spec.p0 <= 1.0) || !(spec.ppm >= 0.0 && spec.ppm <= 1.0))
    throw std::invalid_argument("invalid random-instance proportions");
  if (spec.n < spec.m)
    throw std::invalid_argument("need n >= m for a regular instance");

  SplitMix64 rng(spec.seed);
  std::vector<double> costs;
  costs.reserve(static_cast<size_t>(spec.n));
  for (int i = 0; i < n_plus; ++i) costs.push_back(1.0 - std::log(rng.uniform_open()));
  for (int i = 0; i < n_minus; ++i) costs.push_back(rng.uniform_open());
  for (int i = 0; i < n_zero; ++i) costs.push_back(1.0);

  for (int attempt = 0;; ++attempt) {
    std::vector<DesignPoint> points;
    points.reserve(static_cast<size_t>(spec.n));
    for (int i = 0; i < spec.n; ++i) {
      Eigen::VectorXd f(spec.m);
      for (int k = 0; k < spec.m; ++k) f(k) = rng.normal();
      if (f.norm() == 0.0) f(0) = 1.0;
      points.push_back({"x" + std::to_string(i + 1), std::move(f),
                        costs[static_cast<size_t>(i)]});
    }
    try {
      return DesignInstance(spec.m, std::move(points));
    } catch (const std::invalid_argument&) {
      if (attempt >= 16)
        throw std::runtime_error("random_instance: rank-deficient after retry budget");
    }
  }
}

}  // namespace dopt
