#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "runner.hpp"
#include "slidekit/deformation.hpp"
#include "slidekit/energy.hpp"
#include "slidekit/experiments.hpp"
#include "slidekit/parallel.hpp"
#include "slidekit/sampling.hpp"
#include "slidekit/solver.hpp"

namespace slidekit::runner {
namespace fs = std::filesystem;

namespace {

// One row per check: name, measured value, bound, verdict.
class Sheet {
 public:
  bool check(const std::string& name, double value, double bound, bool ok) {
    rows_.push_back({name, value, bound, ok});
    pass_ = pass_ && ok;
    return ok;
  }
  bool at_most(const std::string& name, double value, double bound) { return check(name, value, bound, value <= bound); }
  bool at_least(const std::string& name, double value, double bound) { return check(name, value, bound, value >= bound); }
  bool pass() const { return pass_; }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "check,value,bound,pass\n";
    for (const auto& r : rows_)
      out << r.name << ',' << format_number(r.value) << ',' << format_number(r.bound) << ',' << (r.ok ? 1 : 0)
          << '\n';
  }

  std::string failures() const {
    std::string s;
    for (const auto& r : rows_)
      if (!r.ok) s += fmt::format("{}{}={:.6g} (bound {:.6g})", s.empty() ? "" : "; ", r.name, r.value, r.bound);
    return s;
  }

 private:
  struct Row {
    std::string name;
    double value, bound;
    bool ok;
  };
  std::vector<Row> rows_;
  bool pass_ = true;
};

struct Criterion {
  int id;
  double limit;
  std::string title;
  std::function<std::string(Sheet&)> body;  // returns a short detail line
};

Grid box(int n, double lo, double hi, double h) { return Grid::uniform(n, lo, hi, h); }

// Node grid on [-R-1, R+1]^2 with spacing h1 along the interface, h2 across.
Grid interface_box(double R, double h1, double h2) {
  Vec o(2), h(2);
  o << -R - 1.0, -R - 1.0;
  h << h1, h2;
  const auto n1 = static_cast<std::size_t>(std::llround(2.0 * (R + 1.0) / h1)) + 1;
  const auto n2 = static_cast<std::size_t>(std::llround(2.0 * (R + 1.0) / h2)) + 1;
  return {2, o, h, {n1, n2, 1}, 1};
}

double kink(const Vec& x) { return std::tanh(x[x.size() - 1] / std::numbers::sqrt2); }

std::string c1(Sheet& s) {
  const AbsReport r = example_abs(2.0, 1e-3, 100, 1);
  s.at_most("E_u_rel_error", std::abs(r.energy_u - 4.0) / 4.0, 1e-3);
  s.at_most("E_v_rel_error", std::abs(r.energy_v - 16.0 / 9.0) / (16.0 / 9.0), 1e-3);
  s.at_least("min_single_difference", r.min_difference, -1e-10);
  return fmt::format("E_u={:.6f} E_v={:.6f} min single-deformation cost {:.3e}", r.energy_u, r.energy_v,
                     r.min_difference);
}

std::string c2(Sheet& s) {
  double worst_cont = 0.0, worst_deriv = 0.0, worst_id = 0.0;
  for (int k = 0; k <= 2; ++k) {
    for (double R : {20.0, 1e3, 1e6, 1e9}) {
      const CutoffProfile c(R, 0.0, k);
      const double in = iterlog::theta(k, R);
      const double outer = iterlog::ell(k + 1, R);
      // Closed branch 2 - 2 ell_{k+1}(s)/ell_{k+1}(R) at the two breakpoints.
      const double at_in = 2.0 - 2.0 * iterlog::ell(k + 1, in) / outer;
      const double at_out = 2.0 - 2.0 * iterlog::ell(k + 1, R) / outer;
      worst_cont = std::max({worst_cont, std::abs(c.value(in) - 1.0), std::abs(at_in - 1.0), std::abs(c.value(R)),
                             std::abs(at_out)});
      for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double sm = std::exp(std::log(in) + frac * (std::log(R) - std::log(in)));
        const double e = 1e-6 * sm;
        const double fd = (c.value(sm + e) - c.value(sm - e)) / (2.0 * e);
        const double d = c.derivative(sm);
        worst_deriv = std::max(worst_deriv, std::abs(fd - d) / std::abs(d));
      }
    }
    const double R = 1e6;
    worst_id = std::max(worst_id, std::abs(iterlog::ell(k + 1, iterlog::theta(k, R)) - iterlog::ell(k + 1, R) / 2.0));
  }
  s.at_most("continuity", worst_cont, 1e-12);
  s.at_most("derivative_rel_error", worst_deriv, 1e-8);
  s.at_most("halving_identity", worst_id, 1e-12);
  return fmt::format("continuity {:.1e}, derivative {:.1e}, identity {:.1e}", worst_cont, worst_deriv, worst_id);
}

std::string c3(Sheet& s) {
  const Integrand f = catalog("dirichlet", {{"n", 2}});
  std::vector<double> res;
  for (double h : {0.04, 0.02, 0.01}) {
    const Grid g = box(2, -1.2, 1.2, h);
    const ScalarField a = from_function(g, [](const Vec& x) { return 0.3 * x[0] + x[1] + 0.05; });
    const ScalarField b = from_function(g, [](const Vec& x) { return -0.4 * x[0] - 0.8 * x[1]; });
    res.push_back(energy_identity_check(a, b, f, 1.0));
    s.check(fmt::format("residual_h{}", h), res.back(), 0.0, true);
  }
  const double r1 = res[0] / res[1], r2 = res[1] / res[2];
  s.check("ratio_0.04_0.02", r1, 1.7, r1 >= 1.7 && r1 <= 2.3);
  s.check("ratio_0.02_0.01", r2, 1.7, r2 >= 1.7 && r2 <= 2.3);
  return fmt::format("residual ratios {:.3f}, {:.3f}", r1, r2);
}

std::string c4(Sheet& s) {
  const Integrand f = catalog("allen_cahn", {{"n", 2}});
  const double t = 0.1;
  std::vector<double> norm, scaled;
  for (double R : {10.0, 30.0, 100.0, 300.0}) {
    const ScalarField u = from_function(interface_box(R, 0.5, 0.05), kink);
    norm.push_back(second_difference(u, f, CutoffProfile(R, t, 0)) / (t * t));
    scaled.push_back(norm.back() * std::log(R));
    s.check(fmt::format("dE_over_t2_R{}", R), norm.back(), 0.0, true);
  }
  bool decreasing = true;
  for (std::size_t j = 1; j < norm.size(); ++j) decreasing = decreasing && norm[j] < norm[j - 1];
  s.check("strictly_decreasing", decreasing ? 1.0 : 0.0, 1.0, decreasing);
  double worst = 0.0;
  for (double v : scaled) worst = std::max(worst, v / scaled[0]);
  s.at_most("logR_scaled_over_R10", worst, 5.0);
  return fmt::format("dE/t^2 = {:.4f} {:.4f} {:.4f} {:.4f}", norm[0], norm[1], norm[2], norm[3]);
}

std::string c5(Sheet& s) {
  const Integrand ac = catalog("allen_cahn", {{"n", 2}});
  const ScalarField u = from_function(interface_box(80.0, 0.5, 0.05), kink);
  const EnergyReport rep = growth_profile(u, ac, {5, 10, 20, 40, 80});
  const GrowthCheck ck = check_growth(rep, 0);
  s.check("interface_exponent", rep.exponent, 1.0, std::abs(rep.exponent - 1.0) <= 0.15);
  s.check("interface_growth_pass", ck.pass ? 1.0 : 0.0, 1.0, ck.pass);

  const Integrand dir = catalog("dirichlet", {{"n", 3}});
  Vec o = Vec::Constant(3, -16.5), h = Vec::Constant(3, 0.25);
  const Grid g3(3, o, h, {133, 133, 133}, 1);
  const ScalarField lin = from_function(g3, [](const Vec& x) { return 0.3 * x[0] + 0.5 * x[1] - 0.2 * x[2]; });
  const EnergyReport rep3 = growth_profile(lin, dir, {2, 4, 8, 16});
  const GrowthCheck ck3 = check_growth(rep3, 0);
  s.check("linear3d_exponent", rep3.exponent, 3.0, std::abs(rep3.exponent - 3.0) <= 0.15);
  s.check("linear3d_growth_fails", ck3.pass ? 0.0 : 1.0, 1.0, !ck3.pass);
  return fmt::format("exponents {:.4f} (pass) and {:.4f} ({})", rep.exponent, rep3.exponent,
                     ck3.pass ? "pass" : "fail");
}

std::string c6(Sheet& s) {
  const Integrand ac = catalog("allen_cahn", {{"n", 1}});
  const double h = 1e-3;
  const Grid g = box(1, -12.0, 12.0, h);
  const ScalarField u = from_function(g, kink);
  const double L = 8.0, w = 2.0, eta = L + w;

  sampling::Stream rng(6, 0);
  const ScalarField bump = sampling::random_bump(g, eta - 3.0 * h, rng);
  const double q1 = second_variation_Q(bump, u, ac, eta);
  double worst = 0.0;
  for (double lambda : {3.7, -0.6, 1e3}) {
    std::vector<double> v = bump.values();
    for (double& x : v) x *= lambda;
    const double q = second_variation_Q(bump.with_values(std::move(v)), u, ac, eta);
    worst = std::max(worst, std::abs(q - lambda * lambda * q1) / std::abs(lambda * lambda * q1));
  }
  s.at_most("quadratic_scaling", worst, 1e-12);

  // u' times a plateau cutoff: 1 on [-L, L], cosine ramp of width w.
  const ScalarField du = from_function(g, [&](const Vec& x) {
    const double a = std::abs(x[0]);
    const double c = a <= L ? 1.0 : (a >= eta ? 0.0 : 0.5 * (1.0 + std::cos(std::numbers::pi * (a - L) / w)));
    const double ch = std::cosh(x[0] / std::numbers::sqrt2);
    return c / (std::numbers::sqrt2 * ch * ch);
  });
  double n2 = 0.0;
  for (double v : du.values()) n2 += v * v * h;
  const double qk = std::abs(second_variation_Q(du, u, ac, eta));
  s.at_most("kernel_Q_over_norm2", qk / n2, 1e-4);

  const Integrand dir = catalog("dirichlet", {{"n", 2}});
  const Grid g2 = box(2, -1.2, 1.2, 0.02);
  const ScalarField base = from_function(g2, [](const Vec& x) { return x[0]; });
  double qmin = INFINITY;
  for (std::uint64_t k = 0; k < 200; ++k) {
    sampling::Stream r(61, k);
    qmin = std::min(qmin, second_variation_Q(sampling::random_bump(g2, 1.0, r), base, dir, 1.0));
  }
  s.at_least("dirichlet_min_Q", qmin, 0.0);
  return fmt::format("scaling {:.1e}, |Q(u')|/|u'|^2 = {:.2e}, min Dirichlet Q {:.4f}", worst, qk / n2, qmin);
}

std::string c7(Sheet& s) {
  ImprovementConfig cfg;
  cfg.a = Vec(2);
  cfg.a << 0.0, 1.0;
  cfg.b = Vec(2);
  cfg.b << 0.0, -1.0;
  cfg.alpha = 0.5;
  cfg.R = 10.0;
  const ImprovementResult r = lemma1_improvement(cfg, catalog("dirichlet", {{"n", 2}}), box(2, -14.0, 14.0, 0.05));
  s.check("delta", r.delta, 0.0, r.delta < 0.0);
  s.check("delta_over_error", std::abs(r.delta) / r.error_estimate, 10.0,
          std::abs(r.delta) > 10.0 * r.error_estimate);
  return fmt::format("delta={:.4f} error estimate {:.4f}", r.delta, r.error_estimate);
}

std::string c8(Sheet& s) {
  const ExaReport a = example_exa(3.0, 0.5, 500, 1);
  s.at_least("exa_min_ratio", a.min_ratio, -1e-8);
  s.at_least("exa_min_rayleigh", a.min_rayleigh, -1e-12);
  const Exa2Report b = example_exa2(0.5, 300, 1);
  s.at_least("exa2_min_ratio", b.probe.min_ratio, -1e-8);
  s.check("exa2_short_violations", static_cast<double>(b.short_violations), 0.0, b.short_violations == 0);
  s.check("exa2_long_violations", static_cast<double>(b.long_violations), static_cast<double>(b.long_windows),
          b.long_windows > 0 && b.long_violations == b.long_windows);
  return fmt::format("exa min ratio {:.4f}; exa2 min ratio {:.4f}, length-4 windows non-monotone {}/{}",
                     a.min_ratio, b.probe.min_ratio, b.long_violations, b.long_windows);
}

std::string c9(Sheet& s) {
  const Integrand f = catalog("allen_cahn", {{"n", 2}});
  // x1 periodic on [-5, 5), x2 cell-centered on [-10, 10], walls pinned at the wells.
  Vec o(2), h(2);
  o << -5.0, -9.95;
  h << 0.1, 0.1;
  const Grid g(2, o, h, {100, 200, 1}, 1);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec x = g.position(i);
    const std::size_t j = g.multi_index(i)[1];
    v[i] = j < 2 ? -1.0
                 : (j >= 198 ? 1.0 : std::tanh((x[1] - 0.5 * std::sin(2.0 * std::numbers::pi * x[0] / 10.0)) /
                                               std::numbers::sqrt2));
  }
  FlowConfig cfg;
  cfg.dt = 0.0025;
  cfg.max_steps = 40000;
  cfg.tol = 1e-6;
  cfg.bc = {Boundary::periodic, Boundary::fixed};
  const FlowResult r = gradient_flow(f, ScalarField(g, std::move(v)), cfg);
  const MonotonicityResult mono = monotonicity_check(r.u, 1);
  const OneDimResult od = one_dimensionality(r.u, {0, 1});
  const double angle = std::acos(std::min(1.0, std::abs(od.xi[1]))) * 180.0 / std::numbers::pi;
  s.check("converged", r.converged ? 1.0 : 0.0, 1.0, r.converged);
  s.at_most("final_residual", r.residual.back(), 1e-6);
  s.check("monotonicity_violations", static_cast<double>(mono.violations), 0.0, mono.violations == 0);
  s.at_most("onedim_residual", od.residual, 1e-2);
  s.at_most("direction_angle_deg", angle, 1.0);
  return fmt::format("{} steps, residual {:.2e}, violations {}, 1D residual {:.2e}, angle {:.2f} deg", r.steps,
                     r.residual.back(), mono.violations, od.residual, angle);
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, 5, "abs example energies", c1},
      {2, 1, "cutoff algebra", c2},
      {3, 10, "lattice energy identity", c3},
      {4, 60, "second difference decay", c4},
      {5, 30, "growth checker", c5},
      {6, 10, "second variation", c6},
      {7, 10, "corner improvement", c7},
      {8, 30, "one-dimensional stability probes", c8},
      {9, 120, "flow, monotonicity, one-dimensionality", c9},
  };
  return list;
}

CriterionResult run_one(const Criterion& c, const std::string& dir) {
  fs::create_directories(dir);
  Sheet sheet;
  CriterionResult r;
  r.id = c.id;
  r.limit = c.limit;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.detail = c.body(sheet);
  } catch (const std::exception& e) {
    sheet.check("exception", 1.0, 0.0, false);
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  sheet.write((fs::path(dir) / fmt::format("criterion{}.csv", c.id)).string());
  r.pass = sheet.pass() && r.seconds < c.limit;
  if (!sheet.pass()) r.detail += " | failed: " + sheet.failures();
  if (r.seconds >= c.limit) r.detail += fmt::format(" | runtime {:.2f}s over {:.0f}s", r.seconds, c.limit);
  r.detail = c.title + ": " + r.detail;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void report(std::ostream* log, const CriterionResult& r) {
  if (!log) return;
  *log << fmt::format("criterion {:2d}: {} ({:.2f}s{}) {}\n", r.id, r.pass ? "PASS" : "FAIL", r.seconds,
                      r.limit > 0 ? fmt::format(", limit {:.0f}s", r.limit) : "", r.detail);
  log->flush();
}

}  // namespace

std::vector<CriterionResult> acceptance_suite(const std::string& out_dir, const std::vector<int>& which_in,
                                              std::ostream* log) {
  std::vector<int> which = which_in;
  if (which.empty())
    for (int id = 1; id <= 10; ++id) which.push_back(id);
  auto wanted = [&](int id) { return std::find(which.begin(), which.end(), id) != which.end(); };

  std::vector<CriterionResult> out;
  const int threads = parallel::threads();
  for (const auto& c : criteria()) {
    if (!wanted(c.id)) continue;
    out.push_back(run_one(c, out_dir));
    report(log, out.back());
  }
  if (!wanted(10)) return out;

  // Criterion 10: CSVs of 1..9 at 1 and 8 workers must match byte for byte.
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r10;
  r10.id = 10;
  std::vector<std::string> dirs;
  for (int t : {1, 8}) {
    const std::string dir = (fs::path(out_dir) / fmt::format("threads{}", t)).string();
    dirs.push_back(dir);
    parallel::set_threads(t);
    for (const auto& c : criteria()) {
      // Reuse the primary run when it already used this worker count.
      if (wanted(c.id) && t == threads) {
        fs::create_directories(dir);
        const std::string name = fmt::format("criterion{}.csv", c.id);
        fs::copy_file(fs::path(out_dir) / name, fs::path(dir) / name, fs::copy_options::overwrite_existing);
      } else {
        run_one(c, dir);
      }
    }
  }
  parallel::set_threads(threads);
  std::size_t same = 0;
  std::string diff;
  for (const auto& c : criteria()) {
    const std::string name = fmt::format("criterion{}.csv", c.id);
    const std::string a = slurp(fs::path(dirs[0]) / name), b = slurp(fs::path(dirs[1]) / name);
    if (!a.empty() && a == b)
      ++same;
    else
      diff += (diff.empty() ? "" : ", ") + name;
  }
  r10.pass = same == criteria().size();
  r10.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r10.detail = fmt::format("determinism: {}/{} criterion CSVs identical at 1 and 8 workers{}", same,
                           criteria().size(), diff.empty() ? "" : " (differ: " + diff + ")");
  out.push_back(r10);
  report(log, r10);
  return out;
}

}  // namespace slidekit::runner
