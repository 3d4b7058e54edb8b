#include "slidekit/parallel.hpp"

#include <algorithm>

namespace slidekit::parallel {
namespace {
int g_threads = 1;
}

void set_threads(int n) { g_threads = std::max(1, n); }
int threads() { return g_threads; }

double pairwise(const double* values, std::size_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return values[0];
  const std::size_t half = n / 2;
  return pairwise(values, half) + pairwise(values + half, n - half);
}

}  // namespace slidekit::parallel
