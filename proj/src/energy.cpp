#include "slidekit/energy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "slidekit/parallel.hpp"

namespace slidekit {
namespace {

constexpr double kBallSlack = 1e-12;

bool in_ball(const Vec& x, double R) { return x.norm() <= R * (1.0 + kBallSlack); }

void require_hull(const Grid& g, double R) {
  if (!(R > 0.0)) throw Error("radius must be positive");
  for (int a = 0; a < g.dim(); ++a) {
    if (!g.translation_invariant(a)) continue;
    const double h = g.spacing(a);
    if (g.lower(a) > -R + h * (1.0 + 1e-9) || g.upper(a) < R - h * (1.0 + 1e-9))
      throw Error(fmt::format("grid hull too small: axis {} spans [{}, {}], need B_R with R={}", a,
                              g.lower(a), g.upper(a), R));
  }
}

void require_dims(const ScalarField& u, const Integrand& f) {
  if (f.dim != u.grid().dim())
    throw Error(fmt::format("integrand dimension {} does not match grid dimension {}", f.dim, u.grid().dim()));
}

void require_regular(const Grid& g, const Integrand& f, double R, const QuadratureRule& q) {
  if (q.singular_offset) {
    const double frac = g.origin(0) / g.spacing(0) - std::floor(g.origin(0) / g.spacing(0));
    if (std::abs(frac - 0.5) > 1e-9) throw Error("singular-offset rule needs axis 0 nodes at (j+1/2) h_0");
  }
  if (!f.singular_weight) return;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.coordinate(i, 0) <= 0.0 && in_ball(g.position(i), R + 2.0 * g.max_spacing()))
      throw Error("singular evaluation: a quadrature node lies on or below {x_0 = 0}");
}

// Integral of a node term over B_R under the given rule.
template <class Term>
double integrate(const Grid& g, double R, const QuadratureRule& q, Term&& term) {
  const int n = g.dim();
  const double vol = g.cell_volume();
  if (q.scheme == Scheme::midpoint) {
    const double s = parallel::sum(g.size(), [&](std::size_t i) {
      return in_ball(g.position(i), R) ? term(i) : 0.0;
    });
    return s * vol;
  }
  std::array<std::size_t, 3> cells{1, 1, 1};
  std::size_t count = 1;
  for (int a = 0; a < n; ++a) {
    cells[a] = g.extent(a) - 1;
    count *= cells[a];
  }
  const double corners = static_cast<double>(1u << n);
  const double s = parallel::sum(count, [&](std::size_t c) {
    std::array<std::size_t, 3> idx{0, 0, 0};
    std::size_t rest = c;
    for (int a = n - 1; a >= 0; --a) {
      idx[a] = rest % cells[a];
      rest /= cells[a];
    }
    const std::size_t base = g.flat_index(idx);
    Vec center = g.position(base);
    for (int a = 0; a < n; ++a) center[a] += 0.5 * g.spacing(a);
    if (!in_ball(center, R)) return 0.0;
    double acc = 0.0;
    for (unsigned k = 0; k < (1u << n); ++k) {
      std::size_t off = 0;
      for (int a = 0; a < n; ++a)
        if (k & (1u << a)) off += g.stride(a);
      acc += term(base + off);
    }
    return acc / corners;
  });
  return s * vol;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (intercept) *intercept = (sy - slope * sx) / m;
  return slope;
}

}  // namespace

double energy(const ScalarField& u, const Integrand& f, double R, const QuadratureRule& q) {
  require_dims(u, f);
  const Grid& g = u.grid();
  require_hull(g, R);
  require_regular(g, f, R, q);
  const VectorField grad = gradient(u);
  return integrate(g, R, q, [&](std::size_t i) { return f.F(grad.at(i), u[i], g.position(i)); });
}

std::vector<double> energy_density(const ScalarField& u, const Integrand& f, double R) {
  require_dims(u, f);
  const Grid& g = u.grid();
  const VectorField grad = gradient(u);
  std::vector<double> out(g.size(), 0.0);
  parallel::for_each(g.size(), [&](std::size_t i) {
    const Vec x = g.position(i);
    if (in_ball(x, R)) out[i] = f.F(grad.at(i), u[i], x);
  });
  return out;
}

double boundary_energy(const ScalarField& u, const BoundaryIntegrand& bg, double R) {
  const Grid& g = u.grid();
  if (g.split() < 2) throw Error("boundary energy needs a bounded axis (k >= 2)");
  if (!bg.value) throw Error("boundary integrand without a value evaluator");
  const double h0 = g.spacing(0);
  const double x0 = g.origin(0);
  const double shift = std::abs(x0) <= 1e-12 * h0 ? 0.0 : -x0 / h0;
  const std::size_t s0 = g.stride(0);
  double weight = 1.0;
  for (int a = 1; a < g.dim(); ++a) weight *= g.spacing(a);
  const double s = parallel::sum(s0, [&](std::size_t i) {
    Vec x = g.position(i);
    x[0] = 0.0;
    if (!in_ball(x, R)) return 0.0;
    const double z = u[i] + shift * (u[i + s0] - u[i]);
    return bg.value(z, x);
  });
  return s * weight;
}

EnergyReport growth_profile(const ScalarField& u, const Integrand& f, const std::vector<double>& radii,
                            MatrixNorm norm) {
  require_dims(u, f);
  if (radii.empty()) throw Error("radii list empty");
  for (std::size_t j = 0; j < radii.size(); ++j) {
    if (!(radii[j] > 0.0)) throw Error("radii must be positive");
    if (j > 0 && !(radii[j] > radii[j - 1])) throw Error("radii must be strictly increasing");
  }
  const Grid& g = u.grid();
  require_hull(g, radii.back());
  require_regular(g, f, radii.back(), {});
  const VectorField grad = gradient(u);
  const std::size_t m = radii.size();
  const std::size_t tiles = (g.size() + parallel::kTile - 1) / parallel::kTile;
  std::vector<double> pe(tiles * m, 0.0), pa(tiles * m, 0.0);
  parallel::for_each(tiles, [&](std::size_t t) {
    const std::size_t lo = t * parallel::kTile;
    const std::size_t hi = std::min(g.size(), lo + parallel::kTile);
    for (std::size_t i = lo; i < hi; ++i) {
      const Vec x = g.position(i);
      const double r = x.norm();
      const auto it = std::lower_bound(radii.begin(), radii.end(), r / (1.0 + kBallSlack));
      if (it == radii.end()) continue;
      const std::size_t j = static_cast<std::size_t>(it - radii.begin());
      const Vec p = grad.at(i);
      pe[t * m + j] += f.F(p, u[i], x);
      const double p2 = p.squaredNorm();
      if (p2 > 0.0) pa[t * m + j] += matrix_norm(f.Fpp(p, u[i], x), norm) * p2;
    }
  });
  EnergyReport rep;
  rep.radii = radii;
  const double vol = g.cell_volume();
  std::vector<double> col(tiles);
  double e = 0.0, a = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t t = 0; t < tiles; ++t) col[t] = pe[t * m + j];
    e += parallel::pairwise(col.data(), tiles) * vol;
    for (std::size_t t = 0; t < tiles; ++t) col[t] = pa[t * m + j];
    a += parallel::pairwise(col.data(), tiles) * vol;
    rep.energy.push_back(e);
    rep.growth.push_back(a);
  }
  std::vector<double> lx, ly;
  for (std::size_t j = m / 2; j < m; ++j) {
    if (rep.growth[j] > 0.0) {
      lx.push_back(std::log(radii[j]));
      ly.push_back(std::log(rep.growth[j]));
    }
  }
  if (lx.size() >= 2) {
    double icpt = 0.0;
    rep.exponent = ls_slope(lx, ly, &icpt);
    rep.constant = std::exp(icpt);
  }
  return rep;
}

GrowthCheck check_growth(const EnergyReport& rep, int k) {
  if (rep.radii.empty() || rep.growth.size() != rep.radii.size()) throw Error("empty growth report");
  GrowthCheck out;
  const std::size_t m = rep.radii.size();
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < m; ++j) {
    const double ratio = rep.growth[j] / (rep.radii[j] * iterlog::pi(k, rep.radii[j]));
    out.constant = std::max(out.constant, ratio);
    if (j >= m / 2 && ratio > 0.0) {
      lx.push_back(std::log(rep.radii[j]));
      ly.push_back(std::log(ratio));
    }
  }
  if (lx.size() >= 2) out.trend = ls_slope(lx, ly, nullptr);
  out.pass = out.trend <= 0.1;
  return out;
}

void write_report_csv(std::ostream& out, const EnergyReport& rep) {
  out << "r,a_r,E_r,ratio\n";
  for (std::size_t j = 0; j < rep.radii.size(); ++j) {
    const double r = rep.radii[j];
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", r, rep.growth[j], rep.energy[j],
                       rep.growth[j] / (r * r));
  }
}

double second_difference(const ScalarField& u, const Integrand& f, const CutoffProfile& c,
                         const QuadratureRule& q) {
  require_dims(u, f);
  const Grid& g = u.grid();
  const double R = c.radius();
  require_hull(g, R);
  require_regular(g, f, R, q);
  const int n = g.dim();
  if (!g.translation_invariant(n - 1)) throw Error("sliding axis must be translation invariant");
  const double t = c.shift();
  if (t == 0.0) return 0.0;
  const VectorField grad = gradient(u);
  return integrate(g, R, q, [&](std::size_t i) {
    const Vec x = g.position(i);
    const double r = x.norm();
    const double d = c.derivative(r);
    if (r == 0.0 || d == 0.0) return 0.0;
    const Vec p = grad.at(i);
    const Vec xhat = x / r;
    double acc = -2.0 * f.F(p, u[i], x);
    for (double tau : {t, -t}) {
      const double trA = tau * d * xhat[n - 1];
      if (!(1.0 + trA > 0.0)) throw Error("sliding map is not orientation preserving");
      const Vec qv = p - (p[n - 1] * tau * d / (1.0 + trA)) * xhat;
      acc += f.F(qv, u[i], x) * (1.0 + trA);
    }
    return acc;
  });
}

namespace {

void require_variation(const ScalarField& gf, const ScalarField& u, const Integrand& f, double eta) {
  require_dims(u, f);
  if (!(gf.grid() == u.grid())) throw Error("grid mismatch");
  require_hull(u.grid(), eta);
  const Grid& g = u.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(gf[i]) > 1e-14 && g.position(i).norm() >= eta)
      throw Error("variation field support escapes B_eta");
}

}  // namespace

double first_variation_L(const ScalarField& gf, const ScalarField& u, const Integrand& f, double eta) {
  require_variation(gf, u, f, eta);
  const Grid& g = u.grid();
  const VectorField du = gradient(u), dg = gradient(gf);
  const double reach = eta + 2.0 * g.max_spacing() * std::sqrt(static_cast<double>(g.dim()));
  return integrate(g, reach, {}, [&](std::size_t i) {
    const Vec x = g.position(i);
    const Vec p = du.at(i);
    return f.Fp(p, u[i], x).dot(dg.at(i)) + f.Fz(p, u[i], x) * gf[i];
  });
}

double second_variation_Q(const ScalarField& gf, const ScalarField& u, const Integrand& f, double eta) {
  require_variation(gf, u, f, eta);
  const Grid& g = u.grid();
  const VectorField du = gradient(u), dg = gradient(gf);
  const double reach = eta + 2.0 * g.max_spacing() * std::sqrt(static_cast<double>(g.dim()));
  return integrate(g, reach, {}, [&](std::size_t i) {
    const Vec x = g.position(i);
    const Vec p = du.at(i);
    const Vec gg = dg.at(i);
    const double z = gf[i];
    return gg.dot(f.Fpp(p, u[i], x) * gg) + 2.0 * z * f.Fpz(p, u[i], x).dot(gg) +
           f.Fzz(p, u[i], x) * z * z;
  });
}

double energy_identity_check(const ScalarField& a, const ScalarField& b, const Integrand& f, double R,
                             const QuadratureRule& q) {
  if (!(a.grid() == b.grid())) throw Error("grid mismatch");
  require_dims(a, f);
  const Grid& g = a.grid();
  require_hull(g, R);
  require_regular(g, f, R, q);
  const ScalarField hi = pointwise_max(a, b), lo = pointwise_min(a, b);
  const VectorField ga = gradient(a), gb = gradient(b), gh = gradient(hi), gl = gradient(lo);
  return std::abs(integrate(g, R, q, [&](std::size_t i) {
    const Vec x = g.position(i);
    return f.F(gh.at(i), hi[i], x) + f.F(gl.at(i), lo[i], x) - f.F(ga.at(i), a[i], x) -
           f.F(gb.at(i), b[i], x);
  }));
}

}  // namespace slidekit
