#pragma once

#include <cstddef>
#include <vector>

namespace slidekit::parallel {

// Worker count used by every parallel loop. Results never depend on it.
void set_threads(int n);
int threads();

inline constexpr std::size_t kTile = 2048;

// Runs body(i) for i in [0, n). Iterations must be independent.
template <class Body>
void for_each(std::size_t n, Body&& body) {
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

double pairwise(const double* values, std::size_t n);

// Sum of term(i) over [0, n). Tiles have a fixed size and partials are
// combined by a fixed pairwise tree, so the rounding is the same for any
// worker count.
template <class Term>
double sum(std::size_t n, Term&& term) {
  const std::size_t tiles = (n + kTile - 1) / kTile;
  std::vector<double> partial(tiles, 0.0);
  for_each(tiles, [&](std::size_t t) {
    const std::size_t lo = t * kTile;
    const std::size_t hi = lo + kTile < n ? lo + kTile : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[t] = s;
  });
  return pairwise(partial.data(), partial.size());
}

}  // namespace slidekit::parallel
