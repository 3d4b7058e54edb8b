#pragma once

#include <cstdint>
#include <random>

#include "slidekit/field.hpp"

namespace slidekit::sampling {

// Independent stream per (seed, index); draws never depend on scheduling.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index);

  double uniform();  // [0, 1), 53 random bits
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi);  // inclusive

 private:
  std::mt19937_64 engine_;
};

// sum_m c_m/|m|^2 cos(pi m.x/rho + theta_m) over m in {0..4}^n \ {0},
// c_m ~ U(-1,1), theta_m ~ U(0, 2 pi), times the window (1 - |x|^2/rho^2)_+^2.
// Vanishes identically outside B_rho.
ScalarField random_bump(const Grid& grid, double rho, Stream& rng);

// Positive multiple of psi with grid C^{0,1} norm equal to target.
ScalarField scale_to_norm(const ScalarField& psi, double target);

// Positive multiple of psi with max adjacent slope equal to target.
ScalarField scale_to_slope(const ScalarField& psi, double target);

}  // namespace slidekit::sampling
