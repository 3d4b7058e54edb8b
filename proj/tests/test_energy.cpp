#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "slidekit/energy.hpp"
#include "slidekit/sampling.hpp"

using namespace slidekit;

namespace {

constexpr double pi = std::numbers::pi;

std::size_t nodes_in_ball(const Grid& g, double R) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.position(i).norm() <= R * (1.0 + 1e-12)) ++c;
  return c;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// (1 - |x - c|^2/rho^2)_+^3, nonnegative and C^2.
ScalarField cap(const Grid& g, double cx, double cy, double rho) {
  return from_function(g, [=](const Vec& x) {
    const double s = 1.0 - ((x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy)) / (rho * rho);
    return s > 0.0 ? s * s * s : 0.0;
  });
}

// Centered differences, one-sided on faces: h^2 sum |D g|^2.
double dirichlet_by_hand(const ScalarField& g) {
  const Grid& gr = g.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < gr.size(); ++i) {
    const auto idx = gr.multi_index(i);
    for (int a = 0; a < gr.dim(); ++a) {
      if (idx[a] == 0 || idx[a] + 1 == gr.extent(a)) continue;
      const double d = (g[i + gr.stride(a)] - g[i - gr.stride(a)]) / (2.0 * gr.spacing(a));
      acc += d * d;
    }
  }
  return acc * gr.cell_volume();
}

}  // namespace

TEST_CASE("energy of constant and linear fields") {
  const Grid g = Grid::uniform(2, -3.0, 3.0, 0.05);
  const Integrand ac = catalog("allen_cahn", {{"n", 2}});
  const ScalarField zero = from_function(g, [](const Vec&) { return 0.0; });
  for (double R : {1.0, 2.0, 2.9}) {
    const double e = energy(zero, ac, R);
    CHECK(rel(e, 0.25 * static_cast<double>(nodes_in_ball(g, R)) * 0.0025) <= 1e-12);
    CHECK(rel(e, 0.25 * pi * R * R) <= 0.01);
  }
  const ScalarField one = from_function(g, [](const Vec&) { return 1.0; });
  CHECK(energy(one, ac, 2.0) == 0.0);

  const Integrand di = catalog("dirichlet", {{"n", 2}});
  const ScalarField lin = from_function(g, [](const Vec& x) { return 0.6 * x[0] - 0.8 * x[1]; });
  CHECK(rel(energy(lin, di, 2.0), 0.5 * static_cast<double>(nodes_in_ball(g, 2.0)) * 0.0025) <= 1e-12);

  std::size_t cells = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.multi_index(i);
    if (idx[0] + 1 == g.extent(0) || idx[1] + 1 == g.extent(1)) continue;
    Vec c = g.position(i);
    c.array() += 0.025;
    if (c.norm() <= 2.0) ++cells;
  }
  CHECK(rel(energy(lin, di, 2.0, {Scheme::trapezoid}), 0.5 * static_cast<double>(cells) * 0.0025) <= 1e-12);

  CHECK_THROWS_AS(energy(lin, di, 3.5), Error);
  CHECK_THROWS_AS(energy(lin, catalog("dirichlet", {{"n", 3}}), 1.0), Error);
  CHECK_THROWS_AS(energy(lin, di, 0.0), Error);
}

TEST_CASE("shells add up to the ball energy") {
  const Grid g = Grid::uniform(2, -5.0, 5.0, 0.05);
  const Integrand ac = catalog("allen_cahn", {{"n", 2}});
  const ScalarField u = from_function(g, [](const Vec& x) { return std::tanh((x[0] + 0.3 * x[1]) / 1.4); });
  const std::vector<double> radii{0.5, 1.0, 2.0, 3.0, 4.5};
  const EnergyReport rep = growth_profile(u, ac, radii);
  for (std::size_t j = 0; j < radii.size(); ++j) CHECK(rel(rep.energy[j], energy(u, ac, radii[j])) <= 1e-12);
  for (std::size_t j = 1; j < radii.size(); ++j) CHECK(rep.growth[j] > rep.growth[j - 1]);

  CHECK_THROWS_AS(growth_profile(u, ac, {}), Error);
  CHECK_THROWS_AS(growth_profile(u, ac, {2.0, 1.0}), Error);
  CHECK_THROWS_AS(growth_profile(u, ac, {-1.0, 1.0}), Error);
}

TEST_CASE("growth of a linear Dirichlet field") {
  const Grid g = Grid::uniform(2, -41.0, 41.0, 0.25);
  const Integrand di = catalog("dirichlet", {{"n", 2}});
  const ScalarField lin = from_function(g, [](const Vec& x) { return 0.6 * x[0] + 0.8 * x[1]; });
  const std::vector<double> radii{5.0, 10.0, 20.0, 40.0};
  const EnergyReport rep = growth_profile(lin, di, radii);
  for (std::size_t j = 0; j < radii.size(); ++j)
    CHECK(rel(rep.growth[j], static_cast<double>(nodes_in_ball(g, radii[j])) * 0.0625) <= 1e-12);
  CHECK(std::abs(rep.exponent - 2.0) <= 0.01);
  CHECK(rel(rep.constant, pi) <= 0.02);
  // a(r) ~ pi r^2 sits exactly at the depth-0 bound r * pi_0(r) = r^2.
  CHECK(check_growth(rep, 0).pass);

  std::ostringstream csv;
  write_report_csv(csv, rep);
  const std::string text = csv.str();
  CHECK(text.rfind("r,a_r,E_r,ratio\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("growth check against synthetic reports") {
  EnergyReport lin;
  lin.radii = {10, 20, 40, 80, 160};
  for (double r : lin.radii) lin.growth.push_back(3.0 * r * r);
  const GrowthCheck c0 = check_growth(lin, 0);
  CHECK(c0.pass);
  CHECK(c0.constant == doctest::Approx(3.0));
  CHECK(std::abs(c0.trend) <= 1e-12);
  EnergyReport rl;
  rl.radii = {1e2, 1e4, 1e6, 1e8, 1e10};
  for (double r : rl.radii) rl.growth.push_back(r * r * std::log(r));
  const GrowthCheck c1 = check_growth(rl, 1);
  CHECK(c1.pass);
  CHECK(c1.constant == doctest::Approx(1.0));
  EnergyReport quad;
  quad.radii = lin.radii;
  for (double r : quad.radii) quad.growth.push_back(r * r * r);
  const GrowthCheck cq = check_growth(quad, 0);
  CHECK_FALSE(cq.pass);
  CHECK(cq.trend == doctest::Approx(1.0));
  CHECK_THROWS_AS(check_growth(EnergyReport{}, 0), Error);
}

TEST_CASE("boundary energy on the trace") {
  Vec o(2), h(2);
  o << 0.0, -3.0;
  h << 0.1, 0.1;
  const Grid g(2, o, h, {20, 61, 1}, 2);
  BoundaryIntegrand one;
  one.value = [](double, const Vec&) { return 1.0; };
  const ScalarField u = from_function(g, [](const Vec& x) { return x[0] + x[1]; });
  CHECK(boundary_energy(u, one, 1.0) == doctest::Approx(21 * 0.1).epsilon(1e-12));

  o << 0.05, -3.0;
  const Grid off(2, o, h, {20, 61, 1}, 2);
  BoundaryIntegrand id;
  id.value = [](double z, const Vec&) { return z * z; };
  const ScalarField w = from_function(off, [](const Vec& x) { return x[0]; });
  CHECK(std::abs(boundary_energy(w, id, 1.0)) <= 1e-28);

  CHECK_THROWS_AS(boundary_energy(from_function(Grid::uniform(2, -1.0, 1.0, 0.1), [](const Vec&) { return 0.0; }), one, 0.5),
                  Error);
  CHECK_THROWS_AS(boundary_energy(u, BoundaryIntegrand{}, 1.0), Error);
}

TEST_CASE("singular weight guard") {
  const Integrand wd = catalog("weighted_dirichlet", {{"n", 2}, {"s", 0.5}});
  Vec o(2), h(2);
  h << 0.1, 0.1;
  o << 0.05, -3.0;
  const Grid half(2, o, h, {30, 61, 1}, 2);
  const ScalarField u = from_function(half, [](const Vec& x) { return x[1]; });
  const double e = energy(u, wd, 1.0, {Scheme::midpoint, true});
  double oracle = 0.0;
  for (std::size_t i = 0; i < half.size(); ++i)
    if (half.position(i).norm() <= 1.0) oracle += std::pow(half.coordinate(i, 0), 0.5) * 0.01;  // x_0^{1-s} |p|^2
  CHECK(rel(e, oracle) <= 1e-12);

  o << 0.0, -3.0;
  const Grid touching(2, o, h, {30, 61, 1}, 2);
  CHECK_THROWS_AS(energy(from_function(touching, [](const Vec& x) { return x[1]; }), wd, 1.0), Error);
  CHECK_THROWS_AS(energy(from_function(touching, [](const Vec& x) { return x[1]; }), catalog("dirichlet", {{"n", 2}}),
                         1.0, {Scheme::midpoint, true}),
                  Error);
}

TEST_CASE("second difference of sliding") {
  const Grid g = Grid::uniform(2, -21.0, 21.0, 0.05);
  const Integrand di = catalog("dirichlet", {{"n", 2}});
  const ScalarField u = from_function(g, [](const Vec& x) { return x[1]; });
  const double R = 20.0;
  CHECK(second_difference(u, di, CutoffProfile(R, 0.0, 0)) == 0.0);

  const ScalarField k = from_function(g, [](const Vec& x) { return std::tanh((0.3 * x[0] + x[1]) / 1.5); });
  const Integrand ac = catalog("allen_cahn", {{"n", 2}});
  const double plus = second_difference(k, ac, CutoffProfile(R, 0.4, 0));
  const double minus = second_difference(k, ac, CutoffProfile(R, -0.4, 0));
  CHECK(std::abs(plus - minus) <= 1e-12 * std::abs(plus));

  // For u = x_n under Dirichlet the pulled-back density is
  //   t^2 d^2 / (1 - t^2 d^2 cos^2 phi),  d = psi'(r) = -2/(r log R),
  // whose angular integral is 2 pi t^2 d^2 / sqrt(1 - t^2 d^2).
  const double t = 0.5;
  auto radial = [&](double r) {
    const double d = -2.0 / (r * std::log(R));
    return 2.0 * pi * r * t * t * d * d / std::sqrt(1.0 - t * t * d * d);
  };
  const double a = std::sqrt(R), b = R;
  const int m = 20000;
  double oracle = 0.0;
  for (int j = 0; j < m; ++j) {
    const double r = a + (b - a) * (j + 0.5) / m;
    oracle += radial(r) * (b - a) / m;
  }
  CHECK(rel(second_difference(u, di, CutoffProfile(R, t, 0)), oracle) <= 0.01);
}

TEST_CASE("first and second variations") {
  const Grid g = Grid::uniform(2, -1.2, 1.2, 0.02);
  const Integrand di = catalog("dirichlet", {{"n", 2}});
  const ScalarField lin = from_function(g, [](const Vec& x) { return 0.7 * x[0] - 0.2 * x[1]; });
  sampling::Stream rng(12, 0);
  const ScalarField bump = sampling::random_bump(g, 0.9, rng);
  CHECK(std::abs(first_variation_L(bump, lin, di, 1.0)) <= 1e-12);
  CHECK(rel(second_variation_Q(bump, lin, di, 1.0), dirichlet_by_hand(bump)) <= 1e-12);
  const ScalarField twice = add(bump, bump, 1.0);
  CHECK(rel(second_variation_Q(twice, lin, di, 1.0), 4.0 * second_variation_Q(bump, lin, di, 1.0)) <= 1e-12);
  CHECK_THROWS_AS(second_variation_Q(bump, lin, di, 0.5), Error);

  // The kink is critical: L vanishes to discretization accuracy.
  const Grid line = Grid::uniform(1, -12.0, 12.0, 1e-3);
  const Integrand ac = catalog("allen_cahn", {{"n", 1}});
  const ScalarField kink = from_function(line, [](const Vec& x) { return std::tanh(x[0] / std::numbers::sqrt2); });
  sampling::Stream r1(13, 0);
  const ScalarField g1 = sampling::scale_to_norm(sampling::random_bump(line, 3.0, r1), 1.0);
  CHECK(std::abs(first_variation_L(g1, kink, ac, 3.0)) <= 1e-6);
}

TEST_CASE("lattice energy identity") {
  const Grid g = Grid::uniform(2, -3.0, 3.0, 0.05);
  const Integrand ac = catalog("allen_cahn", {{"n", 2}});
  const ScalarField a = from_function(g, [](const Vec& x) { return std::tanh(x[0] + 0.2 * x[1]); });
  CHECK(energy_identity_check(a, a, ac, 2.5) <= 1e-14);
  const ScalarField p = cap(g, -1.0, 0.0, 0.8), q = cap(g, 1.0, 0.0, 0.8);
  CHECK(energy_identity_check(p, q, ac, 2.5) <= 1e-10);
  CHECK(energy_identity_check(p, q, ac, 2.5, {Scheme::trapezoid}) <= 1e-10);
  CHECK_THROWS_AS(energy_identity_check(a, from_function(Grid::uniform(2, -3.0, 3.0, 0.1), [](const Vec&) { return 0.0; }),
                                        ac, 2.0),
                  Error);
}
