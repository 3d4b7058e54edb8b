#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "slidekit/deformation.hpp"
#include "slidekit/field.hpp"
#include "slidekit/integrand.hpp"

namespace slidekit {

enum class Scheme { midpoint, trapezoid };

// midpoint: every node is the center of its dual cell; nodes with |x| <= R
// contribute F * cell volume. trapezoid: primal cells with center in B_R
// contribute the mean of their corner densities. The offset flag demands
// that axis 0 nodes sit at half-integer multiples of h_0, away from {x_0=0}.
struct QuadratureRule {
  Scheme scheme = Scheme::midpoint;
  bool singular_offset = false;
};

// E_R(u) = int_{Omega cap B_R} F(grad u, u, x) dx.
double energy(const ScalarField& u, const Integrand& f, double R, const QuadratureRule& q = {});

// Per-node density F at nodes inside B_R (zero elsewhere), midpoint weights
// not applied.
std::vector<double> energy_density(const ScalarField& u, const Integrand& f, double R);

// int_{{x_0=0} cap B_R} G(u, x) on the trace, midpoint in the remaining
// axes. When the first axis-0 layer is not at x_0 = 0 the trace is
// extrapolated linearly from the first two layers.
double boundary_energy(const ScalarField& u, const BoundaryIntegrand& g, double R);

struct EnergyReport {
  std::vector<double> radii;
  std::vector<double> energy;  // E_r
  std::vector<double> growth;  // a(r) = int_{B_r} |F_pp| |grad u|^2
  double exponent = 0.0;       // log-log slope over the upper half of radii
  double constant = 0.0;       // a(r) ~ constant * r^exponent
  std::vector<double> second_difference;  // optional Delta E(R,t)/t^2 per radius
};

EnergyReport growth_profile(const ScalarField& u, const Integrand& f, const std::vector<double>& radii,
                            MatrixNorm norm = MatrixNorm::spectral);

struct GrowthCheck {
  bool pass = false;
  double constant = 0.0;  // max_r a(r) / (r pi_k(r))
  double trend = 0.0;     // log-log slope of a(r)/(r pi_k(r)) over the upper half
};

GrowthCheck check_growth(const EnergyReport& rep, int k);

// CSV with header r,a_r,E_r,ratio where ratio = a_r / r^2.
void write_report_csv(std::ostream& out, const EnergyReport& rep);

// E_R(u+) + E_R(u-) - 2 E_R(u) for the slides y = x +- t psi_R(|x|) e_n,
// evaluated on the x-grid through the pullback
//   F(p - p_n t psi' x/|x| / (1 + tr A), u, x) (1 + tr A),  tr A = t psi' x_n/|x|.
double second_difference(const ScalarField& u, const Integrand& f, const CutoffProfile& c,
                         const QuadratureRule& q = {});

// L(g) = int F_p . grad g + F_z g and
// Q(g) = int grad g^T F_pp grad g + 2 g F_pz . grad g + F_zz g^2,
// derivatives at (grad u, u, x). g must vanish outside B_eta.
double first_variation_L(const ScalarField& g, const ScalarField& u, const Integrand& f, double eta);
double second_variation_Q(const ScalarField& g, const ScalarField& u, const Integrand& f, double eta);

// |E(max{a,b}) + E(min{a,b}) - E(a) - E(b)|, summed node by node.
double energy_identity_check(const ScalarField& a, const ScalarField& b, const Integrand& f, double R,
                             const QuadratureRule& q = {});

}  // namespace slidekit
