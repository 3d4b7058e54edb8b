#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slidekit/deformation.hpp"
#include "slidekit/energy.hpp"
#include "slidekit/field.hpp"
#include "slidekit/integrand.hpp"

namespace slidekit {

// v_{R,t} = max{u^-_{R,t}, u}; equals max{u(x), u(x + t e_n)} near the origin.
ScalarField build_comparison(const ScalarField& u, const CutoffProfile& c);

struct ImprovementConfig {
  Vec a;  // a_n > 0
  Vec b;  // b_n < 0
  double alpha = 0.5;
  double R = 10.0;
};

struct ImprovementResult {
  double energy_g = 0.0;   // E(g), g = max{a.x, b.x}
  double energy_w = 0.0;   // E(max{g, h0})
  double delta = 0.0;      // energy_w - energy_g
  double error_estimate = 0.0;  // |delta_h - delta_{h/2}|
  double radius = 0.0;     // ball carrying both energies
};

// h0 = 1 + alpha a.x + (1-alpha) b.x - max{0, |x'| - R}, x' all axes but the last.
ImprovementResult lemma1_improvement(const ImprovementConfig& cfg, const Integrand& f, const Grid& grid);

enum class ProbeClass { en_only, multi_direction, horizontal_vertical };

struct StabilityProbeConfig {
  double R = 1.0;
  double t = 0.05;
  std::size_t N = 100;
  std::uint64_t seed = 1;
  ProbeClass cls = ProbeClass::en_only;
  double delta = 0.1;
  std::vector<int> directions;  // multi_direction; empty means every translation-invariant axis
};

struct ProbeResult {
  double min_ratio = 0.0;       // min (E(w) - E(u)) / t^2
  std::size_t argmin = 0;
  std::vector<double> ratios;
  std::size_t rejected = 0;
};

// Empirical: sampled perturbations can falsify stability, never certify it.
ProbeResult stability_probe(const ScalarField& u, const Integrand& f, const StabilityProbeConfig& cfg);

// u(s) = cos(s + pi/2) for s <= -pi/2, 1 on (-pi/2, pi/2), cos(s - pi/2) beyond.
double exa_profile(double s);
// As exa_profile on [-pi, pi], continued linearly by s + pi and pi - s.
double exa2_profile(double s);

struct ExaSample {
  double size = 0.0;        // ||phi||_{C^{0,1}}
  double difference = 0.0;  // E_R(u + phi) - E_R(u)
  double ratio = 0.0;       // difference / size^2
  double rayleigh = 0.0;    // min over J+- of (int phi'^2 - lambda int phi^2) / int phi'^2
};

struct ExaReport {
  double R = 0.0;
  double delta = 0.0;
  double ell = 0.0;
  double lambda = 0.0;
  double min_difference = 0.0;
  double min_ratio = 0.0;
  double min_rayleigh = 0.0;
  std::vector<ExaSample> samples;
  bool pass = false;
};

ExaReport example_exa(double R, double delta, std::size_t N, std::uint64_t seed, double h = 1e-3);

struct AbsSample {
  double slope = 0.0;
  double difference = 0.0;  // E_R(v) - E_R(u)
  double dirichlet = 0.0;   // int psi'^2
};

struct AbsReport {
  double R = 0.0;
  double energy_u = 0.0;
  double energy_v = 0.0;
  double min_difference = 0.0;
  double max_gap = 0.0;  // max |difference - int psi'^2|
  std::vector<AbsSample> samples;
  bool pass = false;
};

// u = |t|, two-piece v = 2(|t| + R/2)/3 from the scaled profiles
// psi1 = -(R + t)/3 on [-R, R/2], t - R beyond; psi2 its mirror image.
AbsReport example_abs(double R, double h, std::size_t samples = 100, std::uint64_t seed = 1);

struct Exa2Report {
  double delta = 0.0;
  ProbeResult probe;
  std::size_t short_windows = 0;
  std::size_t short_violations = 0;
  std::size_t long_windows = 0;     // length-4 windows containing the plateau
  std::size_t long_violations = 0;
  bool pass = false;
};

Exa2Report example_exa2(double delta, std::size_t N, std::uint64_t seed, double h = 1e-3);

struct OneDimResult {
  Vec xi;
  double residual = 0.0;
  bool degenerate = false;
};

// Relative L2 residual of the best monotone fit u ~ f(x.xi) (per slice of
// the axes outside J); 64 bins, isotonic regression on bin means, monotone
// cubic interpolation between bin centroids.
double profile_residual(const ScalarField& u, const Vec& xi, const std::vector<int>& axes);
OneDimResult one_dimensionality(const ScalarField& u, const std::vector<int>& axes);

enum class LineMonotonicity { flat = 0, increasing = 1, decreasing = -1, mixed = 2 };

struct MonotonicityResult {
  std::vector<LineMonotonicity> lines;
  std::size_t violations = 0;
};

MonotonicityResult monotonicity_check(const ScalarField& u, int axis);

// Field on grid whose value at x is the 1D profile sampled at x[axis].
ScalarField extend_profile(const Grid& grid, const ScalarField& profile, int axis);

}  // namespace slidekit
