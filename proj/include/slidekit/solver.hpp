#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "slidekit/field.hpp"
#include "slidekit/integrand.hpp"

namespace slidekit {

// fixed: the two outermost node layers of the face hold their values (the
// centered stencil needs both to pin every sublattice). periodic: the axis
// wraps with period extent*h. zero_flux: mirrored ghost nodes, so the
// normal gradient vanishes on the face.
enum class Boundary { fixed, periodic, zero_flux };

struct FlowConfig {
  double dt = 1e-3;
  std::size_t max_steps = 10000;
  double tol = 1e-8;
  std::vector<Boundary> bc;  // per axis; empty means fixed on every axis
  std::uint64_t seed = 0;
};

struct FlowResult {
  ScalarField u;
  std::vector<double> residual;  // sup-norm of the Euler-Lagrange residual per step
  std::vector<double> energy;    // discrete energy per step
  std::size_t steps = 0;
  bool converged = false;
};

// Discrete energy h^n sum_i F(D u_i, u_i, x_i) over the nodes whose centered
// stencil lies in the grid, D the boundary-aware centered difference.
double flow_energy(const Integrand& f, const ScalarField& u, const std::vector<Boundary>& bc);

// Gradient of flow_energy divided by h^n, i.e. -div F_p + F_z; zero on fixed nodes.
ScalarField flow_residual(const Integrand& f, const ScalarField& u, const std::vector<Boundary>& bc);

// Explicit Euler u <- u - dt * residual until sup|residual| <= tol. dt must
// not exceed min(h)^2 / (2n).
FlowResult gradient_flow(const Integrand& f, const ScalarField& u0, const FlowConfig& cfg);

void write_history_csv(std::ostream& out, const FlowResult& r);

// sup over nodes at least two layers from every face of |-div F_p + F_z|,
// F_p taken at the node gradients of the field module.
double criticality_residual(const ScalarField& u, const Integrand& f);

struct WellParams {
  double lo = -1.0;
  double hi = 1.0;
  double scale = 1.0;  // W(z) = scale/4 (z-lo)^2 (z-hi)^2
};

// Connection between the wells on [-L, L] with node spacing h and fixed end
// values (defaulting to lo and hi). Relaxed by linearly implicit pseudo-time
// steps on the same discrete energy as gradient_flow.
ScalarField heteroclinic_1d(const WellParams& w, double L, double h,
                            double left = std::numeric_limits<double>::quiet_NaN(),
                            double right = std::numeric_limits<double>::quiet_NaN());

}  // namespace slidekit
