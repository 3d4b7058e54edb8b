#include "slidekit/sampling.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "slidekit/deformation.hpp"
#include "slidekit/parallel.hpp"

namespace slidekit::sampling {

Stream::Stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  engine_.seed(seq);
}

double Stream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

int Stream::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

ScalarField random_bump(const Grid& grid, double rho, Stream& rng) {
  if (!(rho > 0.0)) throw Error("random field window radius must be positive");
  const int n = grid.dim();
  struct Mode {
    Vec k;
    double amp;
    double phase;
  };
  std::vector<Mode> modes;
  const int per = 5;
  int total = 1;
  for (int a = 0; a < n; ++a) total *= per;
  for (int code = 1; code < total; ++code) {
    Vec m(n);
    int rest = code;
    for (int a = 0; a < n; ++a) {
      m[a] = rest % per;
      rest /= per;
    }
    const double c = rng.uniform(-1.0, 1.0);
    const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    modes.push_back({m * (std::numbers::pi / rho), c / m.squaredNorm(), th});
  }
  std::vector<double> v(grid.size(), 0.0);
  parallel::for_each(grid.size(), [&](std::size_t i) {
    const Vec x = grid.position(i);
    const double w = 1.0 - x.squaredNorm() / (rho * rho);
    if (w <= 0.0) return;
    double s = 0.0;
    for (const auto& md : modes) s += md.amp * std::cos(md.k.dot(x) + md.phase);
    v[i] = s * w * w;
  });
  return {grid, std::move(v)};
}

ScalarField scale_to_norm(const ScalarField& psi, double target) {
  const double norm = lipschitz_norm(psi).norm();
  if (!(norm > 0.0)) throw Error("cannot rescale a zero field");
  std::vector<double> v = psi.values();
  const double s = target / norm;
  for (double& x : v) x *= s;
  return psi.with_values(std::move(v));
}

ScalarField scale_to_slope(const ScalarField& psi, double target) {
  const double slope = lipschitz_norm(psi).slope;
  if (!(slope > 0.0)) throw Error("cannot rescale a constant field");
  std::vector<double> v = psi.values();
  const double s = target / slope;
  for (double& x : v) x *= s;
  return psi.with_values(std::move(v));
}

}  // namespace slidekit::sampling
