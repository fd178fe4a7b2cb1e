#pragma once

#include <cstdint>

#include "dopt/model.hpp"

namespace dopt {

/// SplitMix64: a 64-bit counter-based generator (Steele, Lea & Flood 2014).
/// Chosen so any implementation can reproduce streams from the seed alone.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    for (;;) {
      double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
      if (u > 0.0 && u < 1.0) return u;
    }
  }

  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct RandomSpec {
  int n = 600;
  int m = 4;
  double p0 = 0.5;   // fraction of unit-cost points
  double ppm = 0.5;  // n+ / (n+ + n-) among non-unit-cost points
  std::uint64_t seed = 0;

  int n_plus() const { return static_cast<int>((1.0 - p0) * ppm * n); }
  int n_minus() const { return static_cast<int>((1.0 - p0) * (1.0 - ppm) * n); }
  int n_zero() const { return n - n_plus() - n_minus(); }
};

/// Full quadratic model on a grid_size x grid_size grid over [0,1]^2 with
/// costs 0.1 + 6 r1 + r2 (m = 6).
DesignInstance quadratic_grid_instance(int grid_size = 101);

/// Seed-deterministic random family: X+ costs 1 + Exp(1), X- costs U(0,1),
/// X0 costs exactly 1, standard normal regressors.
DesignInstance random_instance(const RandomSpec& spec);

}  // namespace dopt
