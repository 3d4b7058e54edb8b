#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "slidekit/sampling.hpp"
#include "slidekit/solver.hpp"

using namespace slidekit;

namespace {

double kink(double s) { return std::tanh(s / std::numbers::sqrt2); }

Grid periodic_grid(std::size_t m0, std::size_t m1, double h) {
  return Grid(2, Vec::Zero(2), Vec::Constant(2, h), {m0, m1, 1});
}

}  // namespace

TEST_CASE("flow relaxes a step to the kink") {
  const Grid g = Grid::uniform(1, -10.0, 10.0, 0.05);
  const Integrand ac = catalog("allen_cahn", {{"n", 1}});
  const ScalarField u0 = from_function(g, [](const Vec& x) { return x[0] > 0 ? 1.0 : (x[0] < 0 ? -1.0 : 0.0); });
  FlowConfig cfg;
  cfg.dt = 1e-3;
  cfg.max_steps = 200000;
  cfg.tol = 1e-9;
  const FlowResult r = gradient_flow(ac, u0, cfg);
  CHECK(r.converged);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(r.u[i] - kink(g.coordinate(i, 0))));
  CHECK(worst <= 5e-3);
  for (std::size_t k = 1; k < r.energy.size(); ++k) CHECK(r.energy[k] <= r.energy[k - 1] + 1e-14);
  CHECK(r.residual.size() == r.steps + 1);
  CHECK(r.residual.back() <= cfg.tol);

  std::ostringstream csv;
  write_history_csv(csv, r);
  const std::string text = csv.str();
  CHECK(text.rfind("step,residual,energy\n0,", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == r.residual.size() + 1);
}

TEST_CASE("critical data stays put") {
  const ScalarField het = heteroclinic_1d({}, 10.0, 0.05);
  FlowConfig cfg;
  cfg.dt = 1e-3;
  cfg.tol = 1e-8;
  const FlowResult r = gradient_flow(catalog("allen_cahn", {{"n", 1}}), het, cfg);
  CHECK(r.converged);
  CHECK(r.steps <= 10);
}

TEST_CASE("Dirichlet flow reaches the linear solution") {
  const Grid g = Grid::uniform(2, 0.0, 1.0, 0.1);
  const Integrand di = catalog("dirichlet", {{"n", 2}});
  auto lin = [](const Vec& x) { return 0.5 + 2.0 * x[0] - x[1]; };
  const ScalarField exact = from_function(g, lin);
  const ScalarField u0 = from_function(g, [&](const Vec& x) {
    // zero on both fixed layers of every face
    auto b = [](double t) { return std::max(0.0, (t - 0.15) * (0.85 - t)); };
    return lin(x) + 40.0 * b(x[0]) * b(x[1]);
  });
  FlowConfig cfg;
  cfg.dt = 0.0025;
  cfg.max_steps = 100000;
  cfg.tol = 1e-11;
  const FlowResult r = gradient_flow(di, u0, cfg);
  CHECK(r.converged);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(r.u[i] - exact[i]));
  CHECK(worst <= 1e-8);
  const ScalarField res = flow_residual(di, exact, {Boundary::fixed, Boundary::fixed});
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(res[i]) <= 1e-12);
}

TEST_CASE("periodic flow commutes with lattice translations") {
  const std::size_t m0 = 40, m1 = 30;
  const double h = 0.25;
  const Grid g = periodic_grid(m0, m1, h);
  const double L0 = m0 * h, L1 = m1 * h;
  auto init = [&](double x, double y) {
    return 0.3 * std::sin(2 * std::numbers::pi * x / L0) + 0.2 * std::cos(4 * std::numbers::pi * y / L1) +
           0.1 * std::sin(2 * std::numbers::pi * (x / L0 + y / L1));
  };
  const ScalarField u0 = from_function(g, [&](const Vec& x) { return init(x[0], x[1]); });
  const std::size_t s0 = 3, s1 = 5;
  const ScalarField v0 = from_function(g, [&](const Vec& x) { return init(x[0] + s0 * h, x[1] + s1 * h); });
  FlowConfig cfg;
  cfg.dt = 0.01;
  cfg.max_steps = 300;
  cfg.tol = 1e-14;
  cfg.bc = {Boundary::periodic, Boundary::periodic};
  const Integrand ac = catalog("allen_cahn", {{"n", 2}});
  const FlowResult a = gradient_flow(ac, u0, cfg), b = gradient_flow(ac, v0, cfg);
  CHECK_FALSE(a.converged);
  CHECK(a.steps == 300);
  double worst = 0.0;
  for (std::size_t i = 0; i < m0; ++i)
    for (std::size_t j = 0; j < m1; ++j)
      worst = std::max(worst, std::abs(b.u[g.flat_index({i, j, 0})] - a.u[g.flat_index({(i + s0) % m0, (j + s1) % m1, 0})]));
  CHECK(worst <= 1e-10);
  for (std::size_t k = 1; k < a.energy.size(); ++k) CHECK(a.energy[k] <= a.energy[k - 1] + 1e-12);
}

TEST_CASE("zero-flux flow keeps a constant") {
  const Grid g = Grid::uniform(2, -1.0, 1.0, 0.1);
  const ScalarField c = from_function(g, [](const Vec&) { return 1.0; });
  FlowConfig cfg;
  cfg.dt = 0.0025;
  cfg.bc = {Boundary::zero_flux, Boundary::zero_flux};
  const FlowResult r = gradient_flow(catalog("allen_cahn", {{"n", 2}}), c, cfg);
  CHECK(r.converged);
  CHECK(r.steps == 0);
}

TEST_CASE("flow input validation") {
  const Grid g = Grid::uniform(1, -1.0, 1.0, 0.1);
  const ScalarField u = from_function(g, [](const Vec& x) { return x[0]; });
  const Integrand ac = catalog("allen_cahn", {{"n", 1}});
  FlowConfig cfg;
  cfg.dt = 0.0051;
  CHECK_THROWS_WITH_AS(gradient_flow(ac, u, cfg), doctest::Contains("time step"), Error);
  cfg.dt = 0.001;
  cfg.tol = 0.0;
  CHECK_THROWS_AS(gradient_flow(ac, u, cfg), Error);
  cfg.tol = 1e-8;
  CHECK_THROWS_AS(gradient_flow(catalog("allen_cahn", {{"n", 2}}), u, cfg), Error);
  cfg.bc = {Boundary::fixed, Boundary::fixed};
  CHECK_THROWS_AS(gradient_flow(ac, u, cfg), Error);
  cfg.bc = {};
  CHECK_THROWS_AS(gradient_flow(ac, from_function(Grid::uniform(1, 0.0, 0.3, 0.1), [](const Vec&) { return 0.0; }), cfg),
                  Error);
}

TEST_CASE("flow of a concave integrand diverges") {
  // F = |p|^2 - z^2 grows the constant mode by 1 + 2 dt per step.
  const Grid g(1, Vec::Zero(1), Vec::Ones(1), {10, 1, 1});
  FlowConfig cfg;
  cfg.dt = 0.5;
  cfg.max_steps = 1000;
  cfg.bc = {Boundary::periodic};
  const ScalarField one = from_function(g, [](const Vec&) { return 1.0; });
  CHECK_THROWS_WITH_AS(gradient_flow(catalog("oned_example"), one, cfg), doctest::Contains("diverged"), Error);
}

TEST_CASE("criticality residual") {
  const Grid line = Grid::uniform(1, -8.0, 8.0, 0.01);
  const Integrand ac = catalog("allen_cahn", {{"n", 1}});
  const ScalarField k = from_function(line, [](const Vec& x) { return kink(x[0]); });
  CHECK(criticality_residual(k, ac) <= 1e-4);
  const ScalarField s = from_function(line, [](const Vec& x) { return 0.5 * std::sin(x[0]); });
  CHECK(criticality_residual(s, ac) >= 0.1);
  const Grid g = Grid::uniform(2, -1.0, 1.0, 0.05);
  const ScalarField lin = from_function(g, [](const Vec& x) { return 3.0 * x[0] - x[1]; });
  CHECK(criticality_residual(lin, catalog("dirichlet", {{"n", 2}})) <= 1e-10);
  CHECK_THROWS_AS(criticality_residual(lin, ac), Error);
}

TEST_CASE("heteroclinic connection") {
  const ScalarField u = heteroclinic_1d({}, 12.0, 0.01);
  double worst = 0.0, odd = 0.0;
  const std::size_t m = u.size();
  for (std::size_t i = 0; i < m; ++i) {
    worst = std::max(worst, std::abs(u[i] - kink(u.grid().coordinate(i, 0))));
    odd = std::max(odd, std::abs(u[i] + u[m - 1 - i]));
  }
  CHECK(worst <= 5e-4);
  CHECK(odd <= 1e-10);
  CHECK(criticality_residual(u, catalog("allen_cahn", {{"n", 1}})) <= 1e-4);

  // Wells at 0 and 2 with scale 4: the profile is 1 + tanh(x sqrt2).
  const ScalarField w = heteroclinic_1d({0.0, 2.0, 4.0}, 6.0, 0.005);
  double shifted = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    shifted = std::max(shifted, std::abs(w[i] - 1.0 - std::tanh(w.grid().coordinate(i, 0) * std::numbers::sqrt2)));
  CHECK(shifted <= 1e-3);

  const ScalarField same = heteroclinic_1d({}, 5.0, 0.05, 1.0, 1.0);
  for (std::size_t i = 0; i < same.size(); ++i) CHECK(std::abs(same[i] - 1.0) <= 1e-10);

  CHECK_THROWS_AS(heteroclinic_1d({1.0, -1.0, 1.0}, 5.0, 0.05), Error);
  CHECK_THROWS_AS(heteroclinic_1d({-1.0, 1.0, 0.0}, 5.0, 0.05), Error);
  CHECK_THROWS_AS(heteroclinic_1d({}, 5.0, 2.0), Error);
  CHECK_THROWS_AS(heteroclinic_1d({}, -1.0, 0.05), Error);
}
