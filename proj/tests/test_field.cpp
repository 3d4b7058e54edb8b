#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "slidekit/field.hpp"

using namespace slidekit;

namespace {

double kink(const Vec& x) { return std::tanh(x[0] / std::numbers::sqrt2); }

double kink_slope(double s) {
  const double c = std::cosh(s / std::numbers::sqrt2);
  return 1.0 / (std::numbers::sqrt2 * c * c);
}

Vec v1(double a) {
  Vec x(1);
  x << a;
  return x;
}

}  // namespace

TEST_CASE("from_function samples node positions") {
  const Grid g = Grid::uniform(2, -1.0, 1.0, 0.5);
  const ScalarField zero = from_function(g, [](const Vec&) { return 0.0; });
  for (double v : zero.values()) CHECK(v == 0.0);

  Vec o(1), h(1);
  o << 0.0;
  h << 0.5;
  const Grid line(1, o, h, {5, 1, 1});
  const ScalarField u = from_function(line, [](const Vec& x) { return x[0]; });
  const double expect[] = {0.0, 0.5, 1.0, 1.5, 2.0};
  for (std::size_t i = 0; i < 5; ++i) CHECK(u[i] == expect[i]);

  CHECK_THROWS_AS(from_function(g, [](const Vec&) { return std::numeric_limits<double>::quiet_NaN(); }), Error);
}

TEST_CASE("grid layout and validation") {
  const Grid g = Grid::cell_centered(1, -1.0, 1.0, 0.5);
  CHECK(g.extent(0) == 4);
  CHECK(g.coordinate(0, 0) == doctest::Approx(-0.75));
  Vec o(1), h(1);
  o << 0.0;
  h << -1.0;
  CHECK_THROWS_AS(Grid(1, o, h, {3, 1, 1}), Error);
  h << 1.0;
  CHECK_THROWS_AS(Grid(1, o, h, {1, 1, 1}), Error);
  const Grid split(3, Vec::Zero(3), Vec::Ones(3), {3, 3, 3}, 2);
  CHECK_FALSE(split.translation_invariant(0));
  CHECK(split.translation_invariant(1));
  CHECK(split.translation_invariant(2));
}

TEST_CASE("gradient is exact on linears and quadratics") {
  const Grid g = Grid::uniform(2, -1.0, 1.0, 0.1);
  const ScalarField lin = from_function(g, [](const Vec& x) { return 0.7 * x[0] - 1.3 * x[1] + 0.2; });
  const VectorField dl = gradient(lin);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(dl.component(i, 0) - 0.7) <= 1e-12);
    CHECK(std::abs(dl.component(i, 1) + 1.3) <= 1e-12);
  }
  const ScalarField quad = from_function(g, [](const Vec& x) { return x[1] * x[1]; });
  const VectorField dq = gradient(quad);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.multi_index(i);
    if (idx[1] == 0 || idx[1] + 1 == g.extent(1)) continue;
    CHECK(std::abs(dq.component(i, 1) - 2.0 * g.coordinate(i, 1)) <= 1e-12);
  }
}

TEST_CASE("gradient of the kink matches the analytic slope") {
  const Grid g = Grid::uniform(1, -8.0, 8.0, 1e-3);
  const VectorField d = gradient(from_function(g, kink));
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(d.component(i, 0) - kink_slope(g.coordinate(i, 0))));
  CHECK(worst <= 1e-5);
}

TEST_CASE("gradient is linear in the field") {
  const Grid g = Grid::uniform(2, -1.0, 1.0, 0.05);
  const ScalarField u = from_function(g, [](const Vec& x) { return std::sin(3 * x[0]) * x[1]; });
  const ScalarField v = from_function(g, [](const Vec& x) { return std::exp(x[0] - x[1]); });
  const VectorField gu = gradient(u), gv = gradient(v), gs = gradient(add(add(u, u, 1.5), v, -2.0));
  for (std::size_t k = 0; k < gs.data().size(); ++k)
    CHECK(std::abs(gs.data()[k] - (2.5 * gu.data()[k] - 2.0 * gv.data()[k])) <= 1e-12);
}

TEST_CASE("lattice operations") {
  const Grid g = Grid::uniform(1, -1.0, 1.0, 0.1);
  const ScalarField u = from_function(g, [](const Vec& x) { return std::sin(4 * x[0]); });
  const ScalarField v = from_function(g, [](const Vec& x) { return x[0]; });
  const ScalarField w = from_function(g, [](const Vec& x) { return -x[0]; });
  const ScalarField uu = pointwise_max(u, u);
  const ScalarField ab = pointwise_max(v, w);
  const ScalarField mx = pointwise_max(u, v), mn = pointwise_min(u, v);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(uu[i] == u[i]);
    CHECK(ab[i] == std::abs(g.coordinate(i, 0)));
    CHECK(mx[i] + mn[i] == u[i] + v[i]);
  }
  CHECK_THROWS_AS(pointwise_max(u, from_function(Grid::uniform(1, -1.0, 1.0, 0.2), kink)), Error);
}

TEST_CASE("sample interpolates multilinearly") {
  const Grid g = Grid::uniform(2, -1.0, 1.0, 0.1);
  const ScalarField u = from_function(g, [](const Vec& x) { return std::cos(x[0]) + x[1] * x[1]; });
  for (std::size_t i = 0; i < g.size(); i += 7) CHECK(sample(u, g.position(i)) == u[i]);
  const ScalarField lin = from_function(g, [](const Vec& x) { return 2.0 * x[0] - 0.5 * x[1] + 1.0; });
  Vec x(2);
  x << 0.123, -0.771;
  CHECK(std::abs(sample(lin, x) - (2.0 * 0.123 + 0.5 * 0.771 + 1.0)) <= 1e-12);
  x << 1.5, 0.0;
  CHECK_THROWS_AS(sample(u, x), Error);

  const ScalarField k = from_function(Grid::uniform(1, -4.0, 4.0, 1e-3), kink);
  CHECK(std::abs(sample(k, v1(0.35)) - std::tanh(0.35 / std::numbers::sqrt2)) <= 1e-6);
}

TEST_CASE("interpolation error is second order") {
  auto worst = [](double h) {
    const ScalarField k = from_function(Grid::uniform(1, -4.0, 4.0, h), kink);
    double e = 0.0;
    for (double s = -3.0 + 0.37 * h; s < 3.0; s += 0.913 * h)
      e = std::max(e, std::abs(sample(k, v1(s)) - std::tanh(s / std::numbers::sqrt2)));
    return e;
  };
  const double ratio = worst(0.02) / worst(0.01);
  CHECK(ratio >= 3.4);
  CHECK(ratio <= 4.6);
}

TEST_CASE("field files round trip") {
  Vec o(2), h(2);
  o << -1.0, 0.25;
  h << 0.5, 0.125;
  const Grid g(2, o, h, {4, 3, 1}, 2);
  const ScalarField u = from_function(g, [](const Vec& x) { return std::exp(x[0]) / 3.0 + x[1]; });
  std::stringstream ss;
  write_field(ss, u);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "2 0.5 0.125 -1 0.25 4 3 2");
  ss.seekg(0);
  const ScalarField back = read_field(ss);
  CHECK(back.grid() == g);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(back[i] == u[i]);

  std::stringstream bad("2 0.5 0.5 0 0 2 2 1\n1\n2\n3\n");
  CHECK_THROWS_AS(read_field(bad), Error);
}
