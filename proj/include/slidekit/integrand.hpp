#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "slidekit/types.hpp"

namespace slidekit {

// Energy density F(p, z, x) with the derivatives used by the first and
// second variation and by the pullback formula. x is the full node
// position; integrands that are translation invariant simply ignore the
// invariant coordinates.
struct Integrand {
  using Value = std::function<double(const Vec& p, double z, const Vec& x)>;
  using Vector = std::function<Vec(const Vec& p, double z, const Vec& x)>;
  using Matrix = std::function<Mat(const Vec& p, double z, const Vec& x)>;
  using Predicate = std::function<bool(const Vec& p, double z, const Vec& x)>;

  std::string name;
  int dim = 1;
  Value value;
  Vector grad_p;   // F_p
  Value d_z;       // F_z
  Matrix hess_pp;  // F_pp
  Vector d_pz;     // F_pz
  Value d_zz;      // F_zz
  Predicate smooth_at;  // where F_pp is valid; empty means everywhere
  bool singular_weight = false;  // weight unbounded or degenerate on {x_0 = 0}

  double F(const Vec& p, double z, const Vec& x) const { return value(p, z, x); }
  Vec Fp(const Vec& p, double z, const Vec& x) const { return grad_p(p, z, x); }
  double Fz(const Vec& p, double z, const Vec& x) const { return d_z(p, z, x); }
  Mat Fpp(const Vec& p, double z, const Vec& x) const { return hess_pp(p, z, x); }
  Vec Fpz(const Vec& p, double z, const Vec& x) const { return d_pz(p, z, x); }
  double Fzz(const Vec& p, double z, const Vec& x) const { return d_zz(p, z, x); }
  bool smooth(const Vec& p, double z, const Vec& x) const {
    return !smooth_at || smooth_at(p, z, x);
  }
};

inline constexpr double kFiniteDifferenceStep = 1e-5;

// Fills every missing derivative with centered finite differences.
Integrand complete_derivatives(Integrand f, double step = kFiniteDifferenceStep);

using ParamMap = std::map<std::string, double, std::less<>>;

// Catalog of concrete functionals. Parameters:
//   n                 dimension (default 1)
//   well_lo, well_hi  double-well minima for allen_cahn (default -1, 1)
//   well_scale        W(z) = scale/4 (z-lo)^2 (z-hi)^2 (default 1)
//   s                 weight exponent for weighted_dirichlet, in (0,1)
//   width             smoothing width for two_phase_smoothed (> 0)
Integrand catalog(std::string_view name, const ParamMap& params = {});
std::vector<std::string> catalog_names();

// Boundary density G(z, x) for the trace term.
struct BoundaryIntegrand {
  std::function<double(double z, const Vec& x)> value;
  std::function<double(double z, const Vec& x)> d_z;
};

BoundaryIntegrand complete_derivatives(BoundaryIntegrand g, double step = kFiniteDifferenceStep);

enum class MatrixNorm { spectral, frobenius };

double matrix_norm(const Mat& m, MatrixNorm norm = MatrixNorm::spectral);

struct H2Sample {
  Vec p;
  Vec q;
  double z = 0.0;
  Vec x;
};

struct H2Report {
  double worst_ratio = 0.0;
  std::size_t worst_sample = 0;
};

// Empirical constant of |F_pp(p+q)| <= C |F_pp(p)| for |q| <= |p_n|/2.
H2Report check_h2(const Integrand& f, const std::vector<H2Sample>& samples,
                  MatrixNorm norm = MatrixNorm::spectral);

}  // namespace slidekit
