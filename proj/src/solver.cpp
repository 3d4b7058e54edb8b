#include "slidekit/solver.hpp"

#include <fmt/format.h>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <ostream>

#include "slidekit/parallel.hpp"

namespace slidekit {
namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

class Stencil {
 public:
  Stencil(const Grid& g, std::vector<Boundary> bc) : g_(g), bc_(std::move(bc)) {
    if (bc_.empty()) bc_.assign(static_cast<std::size_t>(g.dim()), Boundary::fixed);
    if (bc_.size() != static_cast<std::size_t>(g.dim())) throw Error("one boundary condition per axis required");
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t m = g.extent(a);
      if (bc_[a] == Boundary::fixed && m < 5) throw Error("fixed axis needs at least 5 nodes");
      if (bc_[a] != Boundary::fixed && m < 3) throw Error("axis needs at least 3 nodes");
    }
  }

  std::size_t index(std::size_t i, int a) const { return (i / g_.stride(a)) % g_.extent(a); }

  // Node whose value enters D u_i with sign dir (+1 or -1), or kNone.
  std::size_t neighbor(std::size_t i, int a, int dir) const {
    const std::size_t k = index(i, a), m = g_.extent(a), s = g_.stride(a);
    if (bc_[a] == Boundary::periodic) {
      if (dir > 0) return k + 1 == m ? i - k * s : i + s;
      return k == 0 ? i + (m - 1) * s : i - s;
    }
    if (dir > 0) return k + 1 == m ? kNone : i + s;
    return k == 0 ? kNone : i - s;
  }

  bool live(std::size_t i, int a) const {
    if (bc_[a] == Boundary::periodic) return true;
    const std::size_t k = index(i, a);
    return k >= 1 && k + 2 <= g_.extent(a);
  }

  bool active(std::size_t i) const {
    for (int a = 0; a < g_.dim(); ++a)
      if (bc_[a] == Boundary::fixed && !live(i, a)) return false;
    return true;
  }

  bool fixed(std::size_t i) const {
    for (int a = 0; a < g_.dim(); ++a) {
      if (bc_[a] != Boundary::fixed) continue;
      const std::size_t k = index(i, a);
      if (k <= 1 || k + 2 >= g_.extent(a)) return true;
    }
    return false;
  }

  Vec grad(const std::vector<double>& u, std::size_t i) const {
    Vec p = Vec::Zero(g_.dim());
    for (int a = 0; a < g_.dim(); ++a)
      if (live(i, a))
        p[a] = (u[neighbor(i, a, 1)] - u[neighbor(i, a, -1)]) / (2.0 * g_.spacing(a));
    return p;
  }

  const Grid& grid() const { return g_; }

 private:
  const Grid& g_;
  std::vector<Boundary> bc_;
};

struct Sweep {
  std::vector<double> residual;
  double sup = 0.0;
  double energy = 0.0;
};

Sweep sweep(const Integrand& f, const Stencil& st, const std::vector<double>& u) {
  const Grid& g = st.grid();
  const int n = g.dim();
  const std::size_t N = g.size();
  std::vector<double> flux(N * static_cast<std::size_t>(n), 0.0), fz(N, 0.0), dens(N, 0.0);
  parallel::for_each(N, [&](std::size_t i) {
    if (!st.active(i)) return;
    const Vec x = g.position(i);
    const Vec p = st.grad(u, i);
    const Vec P = f.Fp(p, u[i], x);
    for (int a = 0; a < n; ++a) flux[i * n + a] = P[a];
    fz[i] = f.Fz(p, u[i], x);
    dens[i] = f.F(p, u[i], x);
  });
  Sweep s;
  s.energy = parallel::sum(N, [&](std::size_t i) { return dens[i]; }) * g.cell_volume();
  s.residual.assign(N, 0.0);
  parallel::for_each(N, [&](std::size_t j) {
    if (st.fixed(j)) return;
    double r = st.active(j) ? fz[j] : 0.0;
    for (int a = 0; a < n; ++a) {
      const double inv = 1.0 / (2.0 * g.spacing(a));
      const std::size_t lo = st.neighbor(j, a, -1);
      if (lo != kNone && st.active(lo) && st.live(lo, a) && st.neighbor(lo, a, 1) == j)
        r += flux[lo * n + a] * inv;
      const std::size_t hi = st.neighbor(j, a, 1);
      if (hi != kNone && st.active(hi) && st.live(hi, a) && st.neighbor(hi, a, -1) == j)
        r -= flux[hi * n + a] * inv;
    }
    s.residual[j] = r;
  });
  for (double r : s.residual) s.sup = std::max(s.sup, std::abs(r));
  return s;
}

}  // namespace

double flow_energy(const Integrand& f, const ScalarField& u, const std::vector<Boundary>& bc) {
  const Stencil st(u.grid(), bc);
  return sweep(f, st, u.values()).energy;
}

ScalarField flow_residual(const Integrand& f, const ScalarField& u, const std::vector<Boundary>& bc) {
  const Stencil st(u.grid(), bc);
  return u.with_values(sweep(f, st, u.values()).residual);
}

FlowResult gradient_flow(const Integrand& f, const ScalarField& u0, const FlowConfig& cfg) {
  const Grid& g = u0.grid();
  if (f.dim != g.dim()) throw Error("integrand dimension does not match grid");
  double hmin = g.spacing(0);
  for (int a = 1; a < g.dim(); ++a) hmin = std::min(hmin, g.spacing(a));
  const double bound = hmin * hmin / (2.0 * g.dim());
  if (!(cfg.dt > 0.0) || cfg.dt > bound * (1.0 + 1e-12))
    throw Error(fmt::format("time step {} outside (0, h^2/(2n)] = (0, {}]", cfg.dt, bound));
  if (!(cfg.tol > 0.0)) throw Error("residual tolerance must be positive");
  const Stencil st(g, cfg.bc);
  std::vector<double> u = u0.values();
  FlowResult out{u0, {}, {}, 0, false};
  for (std::size_t step = 0;; ++step) {
    const Sweep s = sweep(f, st, u);
    if (!std::isfinite(s.sup) || !std::isfinite(s.energy)) throw Error("gradient flow diverged: non-finite residual");
    out.residual.push_back(s.sup);
    out.energy.push_back(s.energy);
    if (s.sup <= cfg.tol) {
      out.converged = true;
      break;
    }
    if (step >= cfg.max_steps) break;
    if (step >= 100 && s.sup > 10.0 * out.residual[step - 100])
      throw Error(fmt::format("gradient flow diverged: residual grew tenfold over 100 steps (step {})", step));
    parallel::for_each(u.size(), [&](std::size_t j) { u[j] -= cfg.dt * s.residual[j]; });
    out.steps = step + 1;
  }
  out.u = u0.with_values(std::move(u));
  return out;
}

void write_history_csv(std::ostream& out, const FlowResult& r) {
  out << "step,residual,energy\n";
  for (std::size_t i = 0; i < r.residual.size(); ++i)
    out << fmt::format("{},{:.17g},{:.17g}\n", i, r.residual[i], r.energy[i]);
}

double criticality_residual(const ScalarField& u, const Integrand& f) {
  const Grid& g = u.grid();
  const int n = g.dim();
  if (f.dim != n) throw Error("integrand dimension does not match grid");
  const VectorField grad = gradient(u);
  std::vector<double> res(g.size(), 0.0);
  parallel::for_each(g.size(), [&](std::size_t i) {
    const auto idx = g.multi_index(i);
    for (int a = 0; a < n; ++a)
      if (idx[a] < 2 || idx[a] + 3 > g.extent(a)) return;
    const Vec x = g.position(i);
    double div = 0.0;
    for (int a = 0; a < n; ++a) {
      const std::size_t s = g.stride(a);
      const double up = f.Fp(grad.at(i + s), u[i + s], g.position(i + s))[a];
      const double dn = f.Fp(grad.at(i - s), u[i - s], g.position(i - s))[a];
      div += (up - dn) / (2.0 * g.spacing(a));
    }
    res[i] = std::abs(-div + f.Fz(grad.at(i), u[i], x));
  });
  double sup = 0.0;
  for (double r : res) sup = std::max(sup, r);
  return sup;
}

ScalarField heteroclinic_1d(const WellParams& w, double L, double h, double left, double right) {
  if (!(w.lo < w.hi) || !(w.scale > 0.0)) throw Error("double well needs lo < hi and scale > 0");
  if (!(L > 0.0) || !(h > 0.0)) throw Error("heteroclinic needs L > 0 and h > 0");
  if (std::isnan(left)) left = w.lo;
  if (std::isnan(right)) right = w.hi;
  const Integrand f = catalog("allen_cahn", {{"n", 1}, {"well_lo", w.lo}, {"well_hi", w.hi}, {"well_scale", w.scale}});
  const Grid g = Grid::uniform(1, -L, L, h);
  const std::size_t m = g.extent(0);
  if (m < 8) throw Error("heteroclinic grid too coarse");
  const double hh = g.spacing(0);
  const double d = 0.5 * (w.hi - w.lo);
  const double kappa = d * std::sqrt(0.5 * w.scale);
  std::vector<double> u(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = g.coordinate(i, 0);
    u[i] = left + (right - left) * 0.5 * (1.0 + std::tanh(kappa * s));
  }
  u[0] = u[1] = left;
  u[m - 2] = u[m - 1] = right;

  const Stencil st(g, {Boundary::fixed});
  const std::size_t N = m - 4;  // free nodes 2..m-3
  const double c = 1.0 / (2.0 * hh);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;
  double dtau = 1.0;
  Sweep cur = sweep(f, st, u);
  for (int it = 0; it < 400 && cur.sup > 1e-10; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * N);
    auto add = [&](std::size_t j, std::size_t k, double v) {
      if (j < 2 || j > m - 3 || k < 2 || k > m - 3) return;
      trip.emplace_back(static_cast<int>(j - 2), static_cast<int>(k - 2), v);
    };
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const Vec x = g.position(i);
      const Vec p = st.grad(u, i);
      const double fpp = f.Fpp(p, u[i], x)(0, 0);
      const double fpz = f.Fpz(p, u[i], x)[0];
      const std::size_t nb[2] = {i - 1, i + 1};
      const double cf[2] = {-c, c};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) add(nb[a], nb[b], fpp * cf[a] * cf[b]);
        add(i, nb[a], fpz * cf[a]);
        add(nb[a], i, fpz * cf[a]);
      }
      add(i, i, f.Fzz(p, u[i], x) + 1.0 / dtau);
    }
    Eigen::SparseMatrix<double> H(static_cast<int>(N), static_cast<int>(N));
    H.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      lu.analyzePattern(H);
      analyzed = true;
    }
    lu.factorize(H);
    if (lu.info() != Eigen::Success) throw Error("heteroclinic: linear solve failed");
    Eigen::VectorXd rhs(static_cast<int>(N));
    for (std::size_t j = 0; j < N; ++j) rhs[static_cast<int>(j)] = -cur.residual[j + 2];
    const Eigen::VectorXd du = lu.solve(rhs);
    std::vector<double> next = u;
    for (std::size_t j = 0; j < N; ++j) next[j + 2] += du[static_cast<int>(j)];
    Sweep trial = sweep(f, st, next);
    if (std::isfinite(trial.sup) && trial.sup < cur.sup) {
      u = std::move(next);
      cur = std::move(trial);
      dtau = std::min(dtau * 4.0, 1e12);
    } else {
      dtau *= 0.25;
      if (dtau < 1e-8) break;
    }
  }
  if (!(cur.sup <= 1e-10))
    throw Error(fmt::format("heteroclinic relaxation did not converge (residual {})", cur.sup));
  return {g, std::move(u)};
}

}  // namespace slidekit
