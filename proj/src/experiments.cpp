#include "slidekit/experiments.hpp"

#include <fmt/format.h>

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "slidekit/parallel.hpp"
#include "slidekit/sampling.hpp"

namespace slidekit {

namespace {

constexpr double kPi = std::numbers::pi;


Grid refined(const Grid& g) {
  Vec o(g.dim()), h(g.dim());
  std::array<std::size_t, 3> ext{1, 1, 1};
  for (int a = 0; a < g.dim(); ++a) {
    o[a] = g.origin(a);
    h[a] = 0.5 * g.spacing(a);
    ext[a] = 2 * g.extent(a) - 1;
  }
  return Grid(g.dim(), o, h, ext, g.split());
}

double inscribed_radius(const Grid& g) {
  double r = INFINITY;
  for (int a = 0; a < g.dim(); ++a) r = std::min({r, -g.lower(a), g.upper(a)});
  return r;
}

}  // namespace

ScalarField build_comparison(const ScalarField& u, const CutoffProfile& c) {
  return pointwise_max(slide_field(u, c, -1), u);
}

ImprovementResult lemma1_improvement(const ImprovementConfig& cfg, const Integrand& f, const Grid& grid) {
  const int n = grid.dim();
  if (cfg.a.size() != n || cfg.b.size() != n) throw Error("gradients a, b must match the grid dimension");
  if ((cfg.a - cfg.b).norm() == 0.0) throw Error("degenerate improvement: a = b leaves no corner to cut");
  if (!(cfg.a[n - 1] > 0.0 && cfg.b[n - 1] < 0.0)) throw Error("improvement needs a_n > 0 > b_n");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw Error("mixing alpha must lie in (0,1)");
  if (!(cfg.R > 0.0)) throw Error("truncation radius must be positive");

  auto run = [&](const Grid& g, double* radius) {
    auto gfun = [&](const Vec& x) { return std::max(cfg.a.dot(x), cfg.b.dot(x)); };
    auto hfun = [&](const Vec& x) {
      const double tail = n > 1 ? std::max(0.0, x.head(n - 1).norm() - cfg.R) : 0.0;
      return 1.0 + cfg.alpha * cfg.a.dot(x) + (1.0 - cfg.alpha) * cfg.b.dot(x) - tail;
    };
    const ScalarField gf = from_function(g, gfun);
    const ScalarField w = pointwise_max(gf, from_function(g, hfun));
    const double rho = inscribed_radius(g);
    double reach = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (w[i] != gf[i]) reach = std::max(reach, g.position(i).norm());
    if (reach + 3.0 * g.max_spacing() > rho)
      throw Error(fmt::format("grid too small: modified region reaches {} but the inscribed ball has radius {}",
                              reach, rho));
    *radius = rho;
    const double eg = energy(gf, f, rho), ew = energy(w, f, rho);
    return std::array<double, 2>{eg, ew};
  };
  ImprovementResult out;
  const auto coarse = run(grid, &out.radius);
  double fine_radius = 0.0;
  const auto fine = run(refined(grid), &fine_radius);
  out.energy_g = coarse[0];
  out.energy_w = coarse[1];
  out.delta = coarse[1] - coarse[0];
  out.error_estimate = std::abs(out.delta - (fine[1] - fine[0]));
  return out;
}

ProbeResult stability_probe(const ScalarField& u, const Integrand& f, const StabilityProbeConfig& cfg) {
  if (cfg.N < 1) throw Error("probe needs at least one sample");
  if (!(cfg.t > 0.0) || !(cfg.t < cfg.delta)) throw Error("probe size t must lie in (0, delta)");
  const Grid& g = u.grid();
  const int n = g.dim();
  std::vector<int> dirs = cfg.directions;
  if (cfg.cls == ProbeClass::multi_direction && dirs.empty())
    for (int a = 0; a < n; ++a)
      if (g.translation_invariant(a)) dirs.push_back(a);
  if (cfg.cls != ProbeClass::multi_direction) dirs = {n - 1};
  const double rho = cfg.R - 3.0 * g.max_spacing();
  if (!(rho > 0.0)) throw Error("probe radius too small for the grid");
  const double e0 = energy(u, f, cfg.R);
  const double t2 = cfg.t * cfg.t;

  ProbeResult out;
  out.ratios.resize(cfg.N);
  for (std::size_t k = 0; k < cfg.N; ++k) {
    bool done = false;
    for (std::uint64_t attempt = 0; attempt < 100 && !done; ++attempt) {
      sampling::Stream rng(cfg.seed, (static_cast<std::uint64_t>(k) << 8) | attempt);
      int mode = 0;  // 0 horizontal, 1 vertical, 2 both
      if (cfg.cls == ProbeClass::horizontal_vertical) mode = rng.integer(0, 2);
      try {
        ScalarField w = u;
        if (mode != 1) {
          const int pieces = rng.integer(1, 3);
          std::vector<Deformation> defs;
          for (int p = 0; p < pieces; ++p) {
            Deformation d;
            d.directions = dirs;
            d.radius = cfg.R;
            d.delta = cfg.t;
            const double size = cfg.t * rng.uniform(0.3, 1.0) /
                                std::sqrt(static_cast<double>(dirs.size()));
            for (std::size_t j = 0; j < dirs.size(); ++j)
              d.displacement.push_back(sampling::scale_to_norm(sampling::random_bump(g, rho, rng), size));
            if (!check_deformation(d).valid) throw Error("rejected");
            defs.push_back(std::move(d));
          }
          const bool take_max = rng.uniform() < 0.5;
          w = apply_piecewise(u, lattice_selection(u, std::move(defs), take_max));
        }
        if (mode != 0) {
          const ScalarField phi =
              sampling::scale_to_norm(sampling::random_bump(g, rho, rng), cfg.t * rng.uniform(0.3, 1.0));
          w = add(w, phi);
        }
        out.ratios[k] = (energy(w, f, cfg.R) - e0) / t2;
        done = true;
      } catch (const Error&) {
        ++out.rejected;
      }
    }
    if (!done) throw Error("probe sampler rejected more than 99% of candidates");
  }
  out.min_ratio = out.ratios[0];
  for (std::size_t k = 1; k < cfg.N; ++k)
    if (out.ratios[k] < out.min_ratio) {
      out.min_ratio = out.ratios[k];
      out.argmin = k;
    }
  return out;
}

double exa_profile(double s) {
  if (s <= -kPi / 2) return std::cos(s + kPi / 2);
  if (s < kPi / 2) return 1.0;
  return std::cos(s - kPi / 2);
}

double exa2_profile(double s) {
  if (s < -kPi) return s + kPi;
  if (s > kPi) return kPi - s;
  return exa_profile(s);
}

ExaReport example_exa(double R, double delta, std::size_t N, std::uint64_t seed, double h) {
  if (!(R > kPi / 2 && R < kPi)) throw Error("example needs R in (pi/2, pi)");
  if (!(delta > 0.0 && delta < kPi / 2)) throw Error("example needs delta in (0, pi/2)");
  if (N < 1) throw Error("example needs at least one sample");
  ExaReport rep;
  rep.R = R;
  rep.delta = delta;
  rep.ell = R - kPi / 2 + delta;
  rep.lambda = kPi * kPi / (rep.ell * rep.ell);

  const Grid g = Grid::uniform(1, -R - 0.2, R + 0.2, h);
  const Integrand f = catalog("oned_example");
  const ScalarField u = from_function(g, [](const Vec& x) { return exa_profile(x[0]); });
  const double e0 = energy(u, f, R);
  const double rho = R - 3.0 * g.spacing(0);
  const double inner = kPi / 2 - delta;  // phi = 0 on [-inner, inner]

  auto rayleigh = [&](const ScalarField& phi, double a, double b) {
    double d2 = 0.0, v2 = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      const double s0 = g.coordinate(i, 0), s1 = g.coordinate(i + 1, 0);
      if (s0 >= a && s1 <= b) d2 += (phi[i + 1] - phi[i]) * (phi[i + 1] - phi[i]) / h;
      if (s0 >= a && s0 <= b) v2 += phi[i] * phi[i] * h;
    }
    return d2 > 0.0 ? (d2 - rep.lambda * v2) / d2 : 0.0;
  };

  rep.samples.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    sampling::Stream rng(seed, k);
    const ScalarField base = sampling::random_bump(g, rho, rng);
    const double ramp = delta * rng.uniform(0.2, 1.0);
    double sup = 0.0;
    for (double v : base.values()) sup = std::max(sup, std::abs(v));
    const double kslope = rng.uniform(0.5, 2.0) * 2.0 * sup / (R - kPi / 2);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = std::abs(g.coordinate(i, 0));
      const double mask = std::clamp((s - inner) / ramp, 0.0, 1.0);
      const double cap = kslope * std::max(0.0, s - kPi / 2);
      v[i] = std::min(base[i] * mask, cap);
    }
    ExaSample& smp = rep.samples[k];
    smp.size = rng.uniform(0.05, 1.0);
    const ScalarField phi = sampling::scale_to_norm(base.with_values(std::move(v)), smp.size);
    smp.difference = energy(add(u, phi), f, R) - e0;
    smp.ratio = smp.difference / (smp.size * smp.size);
    smp.rayleigh = std::min(rayleigh(phi, -R, -inner), rayleigh(phi, inner, R));
  }
  rep.min_difference = rep.samples[0].difference;
  rep.min_ratio = rep.samples[0].ratio;
  rep.min_rayleigh = rep.samples[0].rayleigh;
  for (const auto& s : rep.samples) {
    rep.min_difference = std::min(rep.min_difference, s.difference);
    rep.min_ratio = std::min(rep.min_ratio, s.ratio);
    rep.min_rayleigh = std::min(rep.min_rayleigh, s.rayleigh);
  }
  rep.pass = rep.min_ratio >= -1e-8 && rep.min_rayleigh >= -1e-12;
  return rep;
}

AbsReport example_abs(double R, double h, std::size_t samples, std::uint64_t seed) {
  if (!(R > 0.0) || !(h > 0.0) || h >= R) throw Error("abs example needs 0 < h < R");
  AbsReport rep;
  rep.R = R;
  const Grid g = Grid::uniform(1, -R, R, h);
  const Integrand f = catalog("abs_example");
  const ScalarField u = from_function(g, [](const Vec& x) { return std::abs(x[0]); });
  rep.energy_u = energy(u, f, R);

  auto psi1 = [R](const Vec& x) { return x[0] <= R / 2 ? -(R + x[0]) / 3.0 : x[0] - R; };
  auto psi2 = [R](const Vec& x) { return x[0] <= -R / 2 ? x[0] + R : (R - x[0]) / 3.0; };
  auto piece = [&](auto fn) {
    Deformation d;
    d.directions = {0};
    d.radius = R;
    d.displacement.push_back(from_function(g, fn));
    return d;
  };
  PiecewiseDeformation pd;
  pd.pieces = {piece(psi1), piece(psi2)};
  pd.selector.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) pd.selector[i] = g.coordinate(i, 0) <= 0.0 ? 0 : 1;
  rep.energy_v = energy(apply_piecewise(u, pd), f, R);

  const double rho = R - 3.0 * h;
  rep.samples.resize(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    sampling::Stream rng(seed, k);
    AbsSample& s = rep.samples[k];
    s.slope = rng.uniform(0.2, 0.9);
    Deformation d;
    d.directions = {0};
    d.radius = R;
    d.displacement.push_back(sampling::scale_to_slope(sampling::random_bump(g, rho, rng), s.slope));
    s.difference = energy(apply(u, d), f, R) - rep.energy_u;
    const VectorField dpsi = gradient(d.displacement[0]);
    s.dirichlet = parallel::sum(g.size(), [&](std::size_t i) {
      const double p = dpsi.component(i, 0);
      return p * p;
    }) * h;
  }
  rep.min_difference = samples ? rep.samples[0].difference : 0.0;
  for (const auto& s : rep.samples) {
    rep.min_difference = std::min(rep.min_difference, s.difference);
    rep.max_gap = std::max(rep.max_gap, std::abs(s.difference - s.dirichlet));
  }
  const double eu = 2.0 * R, ev = 8.0 * R / 9.0;
  rep.pass = std::abs(rep.energy_u - eu) <= 1e-3 * eu && std::abs(rep.energy_v - ev) <= 1e-3 * ev &&
             rep.min_difference >= -1e-10 && rep.energy_v < rep.energy_u;
  return rep;
}

Exa2Report example_exa2(double delta, std::size_t N, std::uint64_t seed, double h) {
  if (!(delta > 0.0 && delta < kPi / 2)) throw Error("example needs delta in (0, pi/2)");
  Exa2Report rep;
  rep.delta = delta;
  const double R = 5.0;
  const Grid g = Grid::uniform(1, -R - 1.0, R + 1.0, h);
  const Integrand f = catalog("oned_example2");
  const ScalarField u = from_function(g, [](const Vec& x) { return exa2_profile(x[0]); });
  StabilityProbeConfig cfg;
  cfg.R = R;
  cfg.t = 0.5 * delta;
  cfg.delta = delta;
  cfg.N = N;
  cfg.seed = seed;
  cfg.cls = ProbeClass::en_only;
  rep.probe = stability_probe(u, f, cfg);

  // Windows [a, a + L] classified through prefix counts of rising and falling steps.
  const std::size_t m = g.size();
  double dmax = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) dmax = std::max(dmax, std::abs(u[i + 1] - u[i]));
  const double tau = 1e-8 * dmax + 1e-14;
  std::vector<std::size_t> up(m, 0), down(m, 0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double d = u[i + 1] - u[i];
    up[i + 1] = up[i] + (d > tau ? 1 : 0);
    down[i + 1] = down[i] + (d < -tau ? 1 : 0);
  }
  auto scan = [&](double length, bool plateau_only, std::size_t* windows, std::size_t* bad) {
    const auto span = static_cast<std::size_t>(std::floor(length / h + 1e-9));
    for (std::size_t i = 0; i + span < m; ++i) {
      const double a = g.coordinate(i, 0), b = g.coordinate(i + span, 0);
      if (plateau_only && !(a <= -kPi / 2 && b >= kPi / 2)) continue;
      ++*windows;
      if (up[i + span] > up[i] && down[i + span] > down[i]) ++*bad;
    }
  };
  scan(2.0 * delta, false, &rep.short_windows, &rep.short_violations);
  scan(4.0, true, &rep.long_windows, &rep.long_violations);
  rep.pass = rep.probe.min_ratio >= -1e-8 && rep.short_violations == 0 && rep.long_windows > 0 &&
             rep.long_violations == rep.long_windows;
  return rep;
}

namespace {

struct Slices {
  std::vector<std::size_t> id;
  std::size_t count = 0;
};

Slices slice_layout(const Grid& g, const std::vector<int>& axes) {
  Slices s;
  s.id.resize(g.size());
  std::vector<std::size_t> compact(g.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.multi_index(i);
    for (int a : axes) idx[a] = 0;
    const std::size_t key = g.flat_index(idx);
    if (compact[key] == static_cast<std::size_t>(-1)) compact[key] = s.count++;
    s.id[i] = compact[key];
  }
  return s;
}

constexpr int kBins = 64;

double residual_with(const ScalarField& u, const Vec& xi, const std::vector<int>& axes, const Slices& sl,
                     bool* degenerate) {
  const Grid& g = u.grid();
  const std::size_t N = g.size();
  std::vector<double> s(N);
  for (std::size_t i = 0; i < N; ++i) {
    double acc = 0.0;
    for (int a : axes) acc += xi[a] * g.coordinate(i, a);
    s[i] = acc;
  }
  const std::size_t S = sl.count;
  std::vector<double> lo(S, INFINITY), hi(S, -INFINITY), mean(S, 0.0), cnt(S, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t k = sl.id[i];
    lo[k] = std::min(lo[k], s[i]);
    hi[k] = std::max(hi[k], s[i]);
    mean[k] += u[i];
    cnt[k] += 1.0;
  }
  for (std::size_t k = 0; k < S; ++k) mean[k] /= cnt[k];
  std::vector<double> bw(S * kBins, 0.0), bs(S * kBins, 0.0), bu(S * kBins, 0.0);
  auto bin_of = [&](std::size_t i) {
    const std::size_t k = sl.id[i];
    const double width = hi[k] - lo[k];
    int b = width > 0.0 ? static_cast<int>((s[i] - lo[k]) / width * kBins) : 0;
    return k * kBins + static_cast<std::size_t>(std::clamp(b, 0, kBins - 1));
  };
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t b = bin_of(i);
    bw[b] += 1.0;
    bs[b] += s[i];
    bu[b] += u[i];
  }
  // Pool-adjacent-violators per slice on the nonempty bins.
  std::vector<double> fit(S * kBins, 0.0), cen(S * kBins, 0.0);
  std::vector<std::vector<int>> used(S);
  for (std::size_t k = 0; k < S; ++k) {
    struct Block {
      double w, v;
      int first, last;
    };
    std::vector<Block> st;
    for (int b = 0; b < kBins; ++b) {
      const std::size_t j = k * kBins + static_cast<std::size_t>(b);
      if (bw[j] == 0.0) continue;
      used[k].push_back(b);
      cen[j] = bs[j] / bw[j];
      st.push_back({bw[j], bu[j] / bw[j], b, b});
      while (st.size() > 1 && st[st.size() - 2].v > st.back().v) {
        Block top = st.back();
        st.pop_back();
        Block& prev = st.back();
        prev.v = (prev.w * prev.v + top.w * top.v) / (prev.w + top.w);
        prev.w += top.w;
        prev.last = top.last;
      }
    }
    for (const auto& blk : st)
      for (int b = blk.first; b <= blk.last; ++b) fit[k * kBins + static_cast<std::size_t>(b)] = blk.v;
  }
  // Monotone cubic Hermite (Fritsch-Carlson) through the fitted bin centroids.
  std::vector<double> tan(S * kBins, 0.0);
  for (std::size_t k = 0; k < S; ++k) {
    const auto& ub = used[k];
    const std::size_t m = ub.size();
    auto at = [&](std::size_t q) { return k * kBins + static_cast<std::size_t>(ub[q]); };
    auto secant = [&](std::size_t q) { return (fit[at(q + 1)] - fit[at(q)]) / (cen[at(q + 1)] - cen[at(q)]); };
    if (m < 2) continue;
    tan[at(0)] = secant(0);
    tan[at(m - 1)] = secant(m - 2);
    for (std::size_t q = 1; q + 1 < m; ++q) {
      const double d0 = secant(q - 1), d1 = secant(q);
      if (d0 * d1 <= 0.0) continue;
      const double h0 = cen[at(q)] - cen[at(q - 1)], h1 = cen[at(q + 1)] - cen[at(q)];
      const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
      tan[at(q)] = (w1 + w2) / (w1 / d0 + w2 / d1);
    }
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t k = sl.id[i];
    const auto& ub = used[k];
    double val;
    const std::size_t first = k * kBins + static_cast<std::size_t>(ub.front());
    const std::size_t last = k * kBins + static_cast<std::size_t>(ub.back());
    if (s[i] <= cen[first]) {
      val = fit[first];
    } else if (s[i] >= cen[last]) {
      val = fit[last];
    } else {
      const auto it = std::upper_bound(ub.begin(), ub.end(), s[i], [&](double x, int b) {
        return x < cen[k * kBins + static_cast<std::size_t>(b)];
      });
      const std::size_t r = k * kBins + static_cast<std::size_t>(*it);
      const std::size_t l = k * kBins + static_cast<std::size_t>(*(it - 1));
      const double hl = cen[r] - cen[l];
      const double w = (s[i] - cen[l]) / hl;
      const double w2 = w * w, w3 = w2 * w;
      val = (2 * w3 - 3 * w2 + 1) * fit[l] + (w3 - 2 * w2 + w) * hl * tan[l] + (-2 * w3 + 3 * w2) * fit[r] +
            (w3 - w2) * hl * tan[r];
    }
    num += (u[i] - val) * (u[i] - val);
    den += (u[i] - mean[k]) * (u[i] - mean[k]);
  }
  *degenerate = den <= 1e-24 * static_cast<double>(N);
  return *degenerate ? 0.0 : std::sqrt(num / den);
}

void check_axes(const Grid& g, const std::vector<int>& axes) {
  if (axes.size() < 2 || axes.size() > 3) throw Error("one-dimensionality needs two or three axes");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i] < 0 || axes[i] >= g.dim()) throw Error("axis out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (axes[i] == axes[j]) throw Error("repeated axis");
  }
}

}  // namespace

double profile_residual(const ScalarField& u, const Vec& xi, const std::vector<int>& axes) {
  check_axes(u.grid(), axes);
  bool degenerate = false;
  return residual_with(u, xi, axes, slice_layout(u.grid(), axes), &degenerate);
}

OneDimResult one_dimensionality(const ScalarField& u, const std::vector<int>& axes) {
  const Grid& g = u.grid();
  check_axes(g, axes);
  const Slices sl = slice_layout(g, axes);
  const int n = g.dim();
  OneDimResult best;
  best.residual = INFINITY;
  bool degenerate = false;
  auto consider = [&](const Vec& xi) {
    const double r = residual_with(u, xi, axes, sl, &degenerate);
    if (r < best.residual) {
      best.residual = r;
      best.xi = xi;
    }
  };
  auto planar = [&](double deg) {
    Vec xi = Vec::Zero(n);
    xi[axes[0]] = std::cos(deg * kPi / 180.0);
    xi[axes[1]] = std::sin(deg * kPi / 180.0);
    return xi;
  };
  Vec probe = Vec::Zero(n);
  probe[axes[0]] = 1.0;
  residual_with(u, probe, axes, sl, &degenerate);
  if (degenerate) return {probe, 0.0, true};

  if (axes.size() == 2) {
    for (int d = 0; d < 360; ++d) consider(planar(d));
    const double c = std::atan2(best.xi[axes[1]], best.xi[axes[0]]) * 180.0 / kPi;
    for (int j = -10; j <= 10; ++j) consider(planar(c + 0.1 * j));
    return best;
  }
  // Fibonacci lattice on the sphere, then a local tangent-plane refinement.
  const int pts = 2000;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < pts; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / pts;
    const double r = std::sqrt(1.0 - z * z);
    Vec xi = Vec::Zero(n);
    xi[axes[0]] = r * std::cos(golden * i);
    xi[axes[1]] = r * std::sin(golden * i);
    xi[axes[2]] = z;
    consider(xi);
  }
  Eigen::Vector3d c(best.xi[axes[0]], best.xi[axes[1]], best.xi[axes[2]]);
  Eigen::Vector3d e1 = c.unitOrthogonal(), e2 = c.cross(e1);
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j) {
      const Eigen::Vector3d d = (c + (0.2 * kPi / 180.0) * (i * e1 + j * e2)).normalized();
      Vec xi = Vec::Zero(n);
      for (int a = 0; a < 3; ++a) xi[axes[a]] = d[a];
      consider(xi);
    }
  return best;
}

MonotonicityResult monotonicity_check(const ScalarField& u, int axis) {
  const Grid& g = u.grid();
  if (axis < 0 || axis >= g.dim()) throw Error("axis out of range");
  if (!g.translation_invariant(axis)) throw Error("monotonicity is checked along translation-invariant axes");
  const std::size_t s = g.stride(axis), m = g.extent(axis);
  MonotonicityResult out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.multi_index(i)[axis] != 0) continue;
    double dmax = 0.0;
    for (std::size_t k = 0; k + 1 < m; ++k) dmax = std::max(dmax, std::abs(u[i + (k + 1) * s] - u[i + k * s]));
    const double tau = 1e-8 * dmax + 1e-14;
    bool up = false, down = false;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const double d = u[i + (k + 1) * s] - u[i + k * s];
      up |= d > tau;
      down |= d < -tau;
    }
    LineMonotonicity l = LineMonotonicity::flat;
    if (up && down) {
      l = LineMonotonicity::mixed;
      ++out.violations;
    } else if (up) {
      l = LineMonotonicity::increasing;
    } else if (down) {
      l = LineMonotonicity::decreasing;
    }
    out.lines.push_back(l);
  }
  return out;
}

ScalarField extend_profile(const Grid& grid, const ScalarField& profile, int axis) {
  if (profile.grid().dim() != 1) throw Error("profile must be one-dimensional");
  if (axis < 0 || axis >= grid.dim()) throw Error("axis out of range");
  return from_function(grid, [&](const Vec& x) {
    Vec s(1);
    s[0] = x[axis];
    return sample(profile, s);
  });
}

}  // namespace slidekit
