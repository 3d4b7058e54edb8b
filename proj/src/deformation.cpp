#include "slidekit/deformation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "slidekit/parallel.hpp"

namespace slidekit {

namespace iterlog {

double ell(int k, double R) {
  if (k < 0) throw Error("ell: depth must be nonnegative");
  double x = R;
  for (int j = 1; j <= k; ++j) {
    if (!(x > 0.0)) throw Error(fmt::format("ell({}, {}): nonpositive intermediate logarithm", k, R));
    x = std::log(x);
  }
  return x;
}

double exp_iter(int k, double s) {
  if (k < 0) throw Error("exp_iter: depth must be nonnegative");
  double x = s;
  for (int j = 1; j <= k; ++j) x = std::exp(x);
  if (!std::isfinite(x)) throw Error(fmt::format("exp_iter({}, {}) overflows", k, s));
  return x;
}

double pi(int k, double R) {
  if (k < -1) throw Error("pi: depth must be >= -1");
  double prod = 1.0;
  double x = R;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) {
      if (!(x > 0.0)) throw Error(fmt::format("pi({}, {}): nonpositive intermediate logarithm", k, R));
      x = std::log(x);
    }
    prod *= x;
  }
  return prod;
}

double theta(int k, double R) {
  const double l = ell(k, R);
  if (l < 0.0) throw Error(fmt::format("theta({}, {}): ell_k(R) is negative", k, R));
  return exp_iter(k, std::sqrt(l));
}

}  // namespace iterlog

CutoffProfile::CutoffProfile(double radius, double shift, int log_depth)
    : radius_(radius), shift_(shift), depth_(log_depth) {
  if (log_depth < 0) throw Error("cutoff log depth must be nonnegative");
  if (log_depth == 0 && !(radius > 1.0)) throw Error("cutoff radius must exceed 1 so that log R > 0");
  outer_log_ = iterlog::ell(depth_ + 1, radius_);
  if (!(outer_log_ > 0.0))
    throw Error(fmt::format("cutoff radius {} too small: ell_{}(R) <= 0", radius, depth_ + 1));
  inner_ = iterlog::theta(depth_, radius_);
  if (std::abs(shift) > 0.25 * inner_ * (1.0 + 1e-12))
    throw Error(fmt::format("cutoff shift |t|={} exceeds theta_k(R)/4={}", std::abs(shift), 0.25 * inner_));
}

double CutoffProfile::value(double s) const {
  if (s <= inner_) return 1.0;
  if (s <= radius_) return 2.0 - 2.0 * iterlog::ell(depth_ + 1, s) / outer_log_;
  return 0.0;
}

double CutoffProfile::derivative(double s) const {
  if (s <= inner_ || s >= radius_) return 0.0;
  return -2.0 / (outer_log_ * iterlog::pi(depth_, s));
}

double cutoff_value(const CutoffProfile& c, double s) { return c.value(s); }
double cutoff_derivative(const CutoffProfile& c, double s) { return c.derivative(s); }

LipschitzEstimate lipschitz_norm(const ScalarField& psi) {
  const Grid& g = psi.grid();
  const auto& v = psi.values();
  LipschitzEstimate est;
  est.axis.assign(static_cast<std::size_t>(g.dim()), 0.0);
  est.axis_min.assign(static_cast<std::size_t>(g.dim()), INFINITY);
  for (double x : v) est.sup = std::max(est.sup, std::abs(x));
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t s = g.stride(a);
    const double h = g.spacing(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.multi_index(i)[a] + 1 >= g.extent(a)) continue;
      const double d = (v[i + s] - v[i]) / h;
      est.axis[a] = std::max(est.axis[a], std::abs(d));
      est.axis_min[a] = std::min(est.axis_min[a], d);
    }
    est.slope = std::max(est.slope, est.axis[a]);
  }
  return est;
}

DeformationCheck check_deformation(const Deformation& d) {
  DeformationCheck out;
  if (d.directions.empty()) {
    out.reason = "no deformation directions";
    return out;
  }
  if (d.directions.size() != d.displacement.size()) {
    out.reason = "one displacement field per direction required";
    return out;
  }
  if (!(d.radius > 0.0)) {
    out.reason = "support radius must be positive";
    return out;
  }
  const Grid& g = d.displacement.front().grid();
  for (std::size_t j = 0; j < d.directions.size(); ++j) {
    const int axis = d.directions[j];
    if (axis < 0 || axis >= g.dim() || !g.translation_invariant(axis)) {
      out.reason = fmt::format("direction {} is not a translation-invariant axis", axis);
      return out;
    }
    if (std::count(d.directions.begin(), d.directions.end(), axis) > 1) {
      out.reason = "repeated direction";
      return out;
    }
    if (!(d.displacement[j].grid() == g)) {
      out.reason = "displacement fields live on different grids";
      return out;
    }
  }
  std::vector<LipschitzEstimate> est;
  for (const auto& psi : d.displacement) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.position(i).norm() >= d.radius && std::abs(psi[i]) > 1e-14) {
        out.reason = "displacement not supported in B_R";
        return out;
      }
    }
    est.push_back(lipschitz_norm(psi));
    out.max_norm = std::max(out.max_norm, est.back().norm());
  }
  if (d.directions.size() == 1) {
    const int axis = d.directions.front();
    out.min_stretch = 1.0 + std::min(0.0, est.front().axis_min[axis]);
    if (!(out.min_stretch > 0.0)) {
      out.reason = fmt::format("x + psi e_{} fails to be increasing along lines", axis);
      return out;
    }
  } else {
    for (const auto& e : est)
      for (int i : d.directions) out.jacobian_sum += e.axis[i] * e.axis[i];
    if (!(out.jacobian_sum < 1.0)) {
      out.reason = fmt::format("sum of squared partial derivatives {} is not below 1", out.jacobian_sum);
      return out;
    }
  }
  if (d.delta > 0.0 && out.max_norm > d.delta * (1.0 + 1e-9)) {
    out.reason = fmt::format("C^{{0,1}} norm {} exceeds declared bound {}", out.max_norm, d.delta);
    return out;
  }
  out.valid = true;
  return out;
}

Vec displacement_at(const Deformation& d, std::size_t node) {
  const Grid& g = d.displacement.front().grid();
  Vec shift = Vec::Zero(g.dim());
  for (std::size_t j = 0; j < d.directions.size(); ++j) shift[d.directions[j]] += d.displacement[j][node];
  return shift;
}

ScalarField apply(const ScalarField& u, const Deformation& d) {
  const auto check = check_deformation(d);
  if (!check.valid) throw Error("invalid deformation: " + check.reason);
  const Grid& g = u.grid();
  if (!(d.displacement.front().grid() == g)) throw Error("deformation and field grids differ");
  std::vector<double> out(g.size());
  parallel::for_each(g.size(), [&](std::size_t i) {
    out[i] = sample(u, g.position(i) + displacement_at(d, i));
  });
  return {g, std::move(out)};
}

ScalarField apply_piecewise(const ScalarField& u, const PiecewiseDeformation& pd) {
  if (pd.pieces.empty()) throw Error("piecewise deformation needs at least one piece");
  const Grid& g = u.grid();
  if (pd.selector.size() != g.size()) throw Error("selector size does not match grid");
  std::vector<ScalarField> applied;
  applied.reserve(pd.pieces.size());
  for (const auto& piece : pd.pieces) applied.push_back(apply(u, piece));
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int s = pd.selector[i];
    if (s < 0 || static_cast<std::size_t>(s) >= applied.size()) throw Error("selector index out of range");
    out[i] = applied[static_cast<std::size_t>(s)][i];
  }
  const double lip = lipschitz_norm(u).slope;
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t st = g.stride(a);
    const double bound = 10.0 * g.spacing(a) * lip + 1e-12;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.multi_index(i)[a] + 1 >= g.extent(a)) continue;
      if (pd.selector[i] == pd.selector[i + st]) continue;
      if (std::abs(out[i + st] - out[i]) > bound)
        throw Error(fmt::format("discontinuous piecewise assembly: jump {} > {} at node {}",
                                std::abs(out[i + st] - out[i]), bound, i));
    }
  }
  return {g, std::move(out)};
}

PiecewiseDeformation lattice_selection(const ScalarField& u, std::vector<Deformation> pieces,
                                       bool take_max) {
  std::vector<ScalarField> applied;
  for (const auto& piece : pieces) applied.push_back(apply(u, piece));
  PiecewiseDeformation pd;
  pd.selector.assign(u.size(), 0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    int best = 0;
    for (std::size_t p = 1; p < applied.size(); ++p) {
      const double cand = applied[p][i];
      const double cur = applied[static_cast<std::size_t>(best)][i];
      if (take_max ? cand > cur : cand < cur) best = static_cast<int>(p);
    }
    pd.selector[i] = best;
  }
  pd.pieces = std::move(pieces);
  return pd;
}

double invert_slide(const Vec& y, const CutoffProfile& c, int sign) {
  const int n = static_cast<int>(y.size());
  const double t = sign * c.shift();
  Vec x = y;
  double xn = y[n - 1];
  const double tol = 1e-12 * std::max(1.0, std::abs(y[n - 1]));
  for (int it = 0; it < 50; ++it) {
    x[n - 1] = xn;
    const double next = y[n - 1] - t * c.value(x.norm());
    if (std::abs(next - xn) <= tol) return next;
    xn = next;
  }
  throw Error("sliding map inversion did not converge in 50 iterations");
}

ScalarField slide_field(const ScalarField& u, const CutoffProfile& c, int sign) {
  if (sign != 1 && sign != -1) throw Error("slide sign must be +1 or -1");
  const Grid& g = u.grid();
  const int n = g.dim();
  if (!g.translation_invariant(n - 1)) throw Error("sliding axis must be translation invariant");
  std::vector<double> out(g.size());
  parallel::for_each(g.size(), [&](std::size_t i) {
    Vec x = g.position(i);
    x[n - 1] = invert_slide(x, c, sign);
    out[i] = sample(u, x);
  });
  return {g, std::move(out)};
}

std::string deformation_manifest(const Deformation& d) {
  std::string dirs;
  for (int j : d.directions) dirs += (dirs.empty() ? "" : " ") + std::to_string(j);
  return fmt::format("directions=[{}], delta={:.17g}, R={:.17g}", dirs, d.delta, d.radius);
}

void save_deformation(const std::string& stem, const Deformation& d) {
  std::ofstream m(stem + ".manifest");
  if (!m) throw Error("cannot write " + stem + ".manifest");
  m << deformation_manifest(d) << "\n";
  for (std::size_t j = 0; j < d.directions.size(); ++j)
    save_field(fmt::format("{}.psi{}.field", stem, d.directions[j]), d.displacement[j]);
}

Deformation load_deformation(const std::string& stem) {
  std::ifstream m(stem + ".manifest");
  if (!m) throw Error("cannot read " + stem + ".manifest");
  std::string line;
  std::getline(m, line);
  Deformation d;
  const auto open = line.find('['), close = line.find(']');
  const auto dpos = line.find("delta="), rpos = line.find("R=");
  if (open == std::string::npos || close == std::string::npos || dpos == std::string::npos ||
      rpos == std::string::npos)
    throw Error("malformed deformation manifest: " + line);
  std::istringstream dirs(line.substr(open + 1, close - open - 1));
  for (int j; dirs >> j;) d.directions.push_back(j);
  d.delta = std::stod(line.substr(dpos + 6));
  d.radius = std::stod(line.substr(rpos + 2));
  for (int j : d.directions) d.displacement.push_back(load_field(fmt::format("{}.psi{}.field", stem, j)));
  return d;
}

}  // namespace slidekit
