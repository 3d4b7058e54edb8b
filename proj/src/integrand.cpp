#include "slidekit/integrand.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace slidekit {
namespace {

double param(const ParamMap& params, std::string_view key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Mat identity(int n, double scale) { return Mat::Identity(n, n) * scale; }

Integrand quadratic_gradient(std::string name, int n, double weight) {
  // weight * |p|^2
  Integrand f;
  f.name = std::move(name);
  f.dim = n;
  f.value = [weight](const Vec& p, double, const Vec&) { return weight * p.squaredNorm(); };
  f.grad_p = [weight](const Vec& p, double, const Vec&) -> Vec { return 2.0 * weight * p; };
  f.d_z = [](const Vec&, double, const Vec&) { return 0.0; };
  f.hess_pp = [n, weight](const Vec&, double, const Vec&) { return identity(n, 2.0 * weight); };
  f.d_pz = [n](const Vec&, double, const Vec&) -> Vec { return Vec::Zero(n); };
  f.d_zz = [](const Vec&, double, const Vec&) { return 0.0; };
  return f;
}

}  // namespace

Integrand complete_derivatives(Integrand f, double step) {
  if (!f.value) throw Error("integrand without a value evaluator");
  const int n = f.dim;
  const double h = step;
  if (!f.grad_p) {
    f.grad_p = [F = f.value, n, h](const Vec& p, double z, const Vec& x) -> Vec {
      Vec g(n);
      for (int a = 0; a < n; ++a) {
        Vec hi = p, lo = p;
        hi[a] += h;
        lo[a] -= h;
        g[a] = (F(hi, z, x) - F(lo, z, x)) / (2.0 * h);
      }
      return g;
    };
  }
  if (!f.d_z) {
    f.d_z = [F = f.value, h](const Vec& p, double z, const Vec& x) {
      return (F(p, z + h, x) - F(p, z - h, x)) / (2.0 * h);
    };
  }
  if (!f.hess_pp) {
    f.hess_pp = [G = f.grad_p, n, h](const Vec& p, double z, const Vec& x) -> Mat {
      Mat m(n, n);
      for (int b = 0; b < n; ++b) {
        Vec hi = p, lo = p;
        hi[b] += h;
        lo[b] -= h;
        m.col(b) = (G(hi, z, x) - G(lo, z, x)) / (2.0 * h);
      }
      return (0.5 * (m + m.transpose())).eval();
    };
  }
  if (!f.d_pz) {
    f.d_pz = [G = f.grad_p, h](const Vec& p, double z, const Vec& x) -> Vec {
      return (G(p, z + h, x) - G(p, z - h, x)) / (2.0 * h);
    };
  }
  if (!f.d_zz) {
    f.d_zz = [D = f.d_z, h](const Vec& p, double z, const Vec& x) {
      return (D(p, z + h, x) - D(p, z - h, x)) / (2.0 * h);
    };
  }
  return f;
}

std::vector<std::string> catalog_names() {
  return {"dirichlet", "allen_cahn", "weighted_dirichlet", "two_phase_smoothed",
          "oned_example", "oned_example2", "abs_example"};
}

Integrand catalog(std::string_view name, const ParamMap& params) {
  const double nd = param(params, "n", 1.0);
  const int n = static_cast<int>(nd);
  if (n < 1 || n > kMaxDim || static_cast<double>(n) != nd)
    throw Error(fmt::format("integrand dimension must be 1, 2 or 3 (got {})", nd));

  if (name == "dirichlet") return quadratic_gradient("dirichlet", n, 0.5);
  if (name == "abs_example") return quadratic_gradient("abs_example", n, 1.0);

  if (name == "allen_cahn") {
    const double lo = param(params, "well_lo", -1.0);
    const double hi = param(params, "well_hi", 1.0);
    const double c = param(params, "well_scale", 1.0);
    if (!(lo < hi) || !(c > 0.0)) throw Error("allen_cahn needs well_lo < well_hi and well_scale > 0");
    Integrand f = quadratic_gradient("allen_cahn", n, 0.5);
    f.value = [lo, hi, c](const Vec& p, double z, const Vec&) {
      const double w = (z - lo) * (z - hi);
      return 0.5 * p.squaredNorm() + 0.25 * c * w * w;
    };
    f.d_z = [lo, hi, c](const Vec&, double z, const Vec&) {
      return 0.5 * c * (z - lo) * (z - hi) * (2.0 * z - lo - hi);
    };
    f.d_zz = [lo, hi, c](const Vec&, double z, const Vec&) {
      const double m = 2.0 * z - lo - hi;
      return 0.5 * c * ((z - hi) * m + (z - lo) * m + 2.0 * (z - lo) * (z - hi));
    };
    return f;
  }

  if (name == "weighted_dirichlet") {
    const double s = param(params, "s", 0.5);
    if (!(s > 0.0 && s < 1.0)) throw Error(fmt::format("weighted_dirichlet needs s in (0,1), got {}", s));
    const double e = 1.0 - s;
    auto weight = [e](const Vec& x) {
      if (!(x[0] > 0.0)) throw Error("singular evaluation: weighted integrand at x_0 <= 0");
      return std::pow(x[0], e);
    };
    Integrand f = quadratic_gradient("weighted_dirichlet", n, 1.0);
    f.value = [weight](const Vec& p, double, const Vec& x) { return weight(x) * p.squaredNorm(); };
    f.grad_p = [weight](const Vec& p, double, const Vec& x) -> Vec { return 2.0 * weight(x) * p; };
    f.hess_pp = [weight, n](const Vec&, double, const Vec& x) { return identity(n, 2.0 * weight(x)); };
    f.smooth_at = [](const Vec&, double, const Vec& x) { return x[0] > 0.0; };
    f.singular_weight = true;
    return f;
  }

  if (name == "two_phase_smoothed") {
    const double eps = param(params, "width", 0.1);
    if (!(eps > 0.0)) throw Error("two_phase_smoothed needs a positive smoothing width");
    // |p|^2 + H_eps(z), H_eps(z) = (1 + tanh(z/eps))/2 standing in for 1{z>0}.
    Integrand f = quadratic_gradient("two_phase_smoothed", n, 1.0);
    f.value = [eps](const Vec& p, double z, const Vec&) {
      return p.squaredNorm() + 0.5 * (1.0 + std::tanh(z / eps));
    };
    f.d_z = [eps](const Vec&, double z, const Vec&) {
      const double c = 1.0 / std::cosh(z / eps);
      return 0.5 * c * c / eps;
    };
    f.d_zz = [eps](const Vec&, double z, const Vec&) {
      const double c = 1.0 / std::cosh(z / eps);
      return -c * c * std::tanh(z / eps) / (eps * eps);
    };
    return f;
  }

  if (name == "oned_example") {
    Integrand f = quadratic_gradient("oned_example", n, 1.0);
    f.value = [](const Vec& p, double z, const Vec&) { return p.squaredNorm() - z * z; };
    f.d_z = [](const Vec&, double z, const Vec&) { return -2.0 * z; };
    f.d_zz = [](const Vec&, double, const Vec&) { return -2.0; };
    return f;
  }

  if (name == "oned_example2") {
    Integrand f = quadratic_gradient("oned_example2", n, 1.0);
    f.value = [](const Vec& p, double z, const Vec&) {
      const double zp = std::max(z, 0.0);
      return p.squaredNorm() - zp * zp;
    };
    f.d_z = [](const Vec&, double z, const Vec&) { return -2.0 * std::max(z, 0.0); };
    f.d_zz = [](const Vec&, double z, const Vec&) { return z > 0.0 ? -2.0 : 0.0; };
    return f;
  }

  std::string valid;
  for (const auto& v : catalog_names()) valid += (valid.empty() ? "" : ", ") + v;
  throw Error(fmt::format("unknown integrand '{}' (valid: {})", name, valid));
}

BoundaryIntegrand complete_derivatives(BoundaryIntegrand g, double step) {
  if (!g.value) throw Error("boundary integrand without a value evaluator");
  if (!g.d_z) {
    g.d_z = [G = g.value, step](double z, const Vec& x) {
      return (G(z + step, x) - G(z - step, x)) / (2.0 * step);
    };
  }
  return g;
}

double matrix_norm(const Mat& m, MatrixNorm norm) {
  if (norm == MatrixNorm::frobenius) return m.norm();
  Eigen::SelfAdjointEigenSolver<Mat> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

H2Report check_h2(const Integrand& f, const std::vector<H2Sample>& samples, MatrixNorm norm) {
  H2Report report;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const double pn = std::abs(s.p[s.p.size() - 1]);
    if (s.q.norm() > 0.5 * pn * (1.0 + 1e-12))
      throw Error(fmt::format("sample {} violates |q| <= |p_n|/2", i));
    const Vec pq = s.p + s.q;
    if (!f.smooth(s.p, s.z, s.x) || !f.smooth(pq, s.z, s.x))
      throw Error(fmt::format("sample {} leaves the smoothness domain", i));
    const double base = matrix_norm(f.Fpp(s.p, s.z, s.x), norm);
    const double moved = matrix_norm(f.Fpp(pq, s.z, s.x), norm);
    const double ratio = base > 0.0 ? moved / base : (moved > 0.0 ? INFINITY : 1.0);
    if (i == 0 || ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_sample = i;
    }
  }
  return report;
}

}  // namespace slidekit
