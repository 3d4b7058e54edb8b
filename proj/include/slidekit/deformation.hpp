#pragma once

#include <string>
#include <vector>

#include "slidekit/field.hpp"

namespace slidekit {

// Iterated logarithms and exponentials:
//   ell(0,R) = R, ell(k,R) = log ell(k-1,R)
//   exp_iter(0,s) = s, exp_iter(k,s) = exp exp_iter(k-1,s)
//   pi(k,R) = prod_{j<=k} ell(j,R), pi(-1,R) = 1
//   theta(k,R) = exp_iter(k, sqrt(ell(k,R)))
namespace iterlog {
double ell(int k, double R);
double exp_iter(int k, double s);
double pi(int k, double R);
double theta(int k, double R);
}  // namespace iterlog

// Radial sliding profile: 1 on [0, theta_k(R)], 2 - 2 ell_{k+1}(s)/ell_{k+1}(R)
// on (theta_k(R), R], 0 beyond. k = 0 is the plain logarithmic cutoff with
// inner radius sqrt(R).
class CutoffProfile {
 public:
  CutoffProfile(double radius, double shift, int log_depth = 0);

  double radius() const { return radius_; }
  double shift() const { return shift_; }
  int log_depth() const { return depth_; }
  double inner_radius() const { return inner_; }

  double value(double s) const;
  double derivative(double s) const;

 private:
  double radius_;
  double shift_;
  int depth_;
  double inner_;
  double outer_log_;  // ell_{k+1}(R)
};

double cutoff_value(const CutoffProfile& c, double s);
double cutoff_derivative(const CutoffProfile& c, double s);

struct LipschitzEstimate {
  double sup = 0.0;
  double slope = 0.0;          // max adjacent |dpsi|/h over all axes
  std::vector<double> axis;    // max adjacent |dpsi|/h per axis
  std::vector<double> axis_min;  // min adjacent dpsi/h per axis (signed)
  double norm() const { return sup > slope ? sup : slope; }
};

LipschitzEstimate lipschitz_norm(const ScalarField& psi);

// v(x) = u(x + sum_j psi_j(x) e_j), psi_j supported in B_R.
struct Deformation {
  std::vector<int> directions;
  std::vector<ScalarField> displacement;
  double delta = 0.0;   // claimed C^{0,1} bound; 0 means unbounded claim
  double radius = 0.0;  // support radius R
};

struct DeformationCheck {
  bool valid = false;
  std::string reason;
  double jacobian_sum = 0.0;  // sum_{i,j} |d_i psi_j|^2 (multi-direction)
  double min_stretch = 0.0;   // min 1 + d_j psi_j (single direction)
  double max_norm = 0.0;      // max_j |psi_j|_{C^{0,1}}
};

DeformationCheck check_deformation(const Deformation& d);
ScalarField apply(const ScalarField& u, const Deformation& d);

// Deformation displacement that acts on u's grid as sum_j psi_j e_j at
// every node, read off without validation.
Vec displacement_at(const Deformation& d, std::size_t node);

struct PiecewiseDeformation {
  std::vector<Deformation> pieces;
  std::vector<int> selector;  // node -> piece index
};

ScalarField apply_piecewise(const ScalarField& u, const PiecewiseDeformation& pd);

// Selector choosing, per node, the piece with the largest (or smallest)
// deformed value; the lattice combination is always continuous.
PiecewiseDeformation lattice_selection(const ScalarField& u, std::vector<Deformation> pieces,
                                       bool take_max);

// u^{+-}_{R,t}: the field transported by y = x + sign t psi_R(|x|) e_n,
// n the last axis.
ScalarField slide_field(const ScalarField& u, const CutoffProfile& c, int sign);

// y = x + sign t psi_R(|x|) e_n inverted for x_n at fixed y.
double invert_slide(const Vec& y, const CutoffProfile& c, int sign);

// Manifest line "directions=[..], delta=.., R=.." for a deformation.
std::string deformation_manifest(const Deformation& d);
void save_deformation(const std::string& stem, const Deformation& d);
Deformation load_deformation(const std::string& stem);

}  // namespace slidekit
