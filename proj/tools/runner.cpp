#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "slidekit/deformation.hpp"
#include "slidekit/energy.hpp"
#include "slidekit/experiments.hpp"
#include "slidekit/solver.hpp"

namespace slidekit::runner {
namespace fs = std::filesystem;

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

double Outcome::metric(std::string_view key) const {
  for (const auto& [k, v] : metrics)
    if (k == key) return v;
  throw ConfigError(fmt::format("experiment {} has no metric {}", name, key));
}

std::string Outcome::summary() const {
  std::string s = name + (pass ? " PASS" : " FAIL");
  for (const auto& key : summary_keys) {
    const double v = metric(key);
    const double a = std::abs(v);
    if (a == 0.0 || (a >= 1e-2 && a < 1e6))
      s += fmt::format(" {}={:.3f}", key, v);
    else
      s += fmt::format(" {}={:.3e}", key, v);
  }
  return s;
}

namespace {

struct Entry {
  std::string name;
  std::string text;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"energy",
       "E_R(u) = int over the ball B_R of F(grad u, u, x), midpoint or trapezoid quadrature with\n"
       "ball membership by cell center.\n"
       "  [energy] radii (list), scheme = midpoint|trapezoid, offset = true|false"},
      {"growth",
       "a(r) = int over B_r of |F_pp(grad u, u, x)| |grad u|^2 per radius, log-log exponent fit\n"
       "over the upper half of the radii, and the check a(r) <= C r pi_k(r).\n"
       "With t set, also the pullback second difference E_R(u+) + E_R(u-) - 2 E_R(u) over t^2.\n"
       "  [growth] radii (list), k, norm = spectral|frobenius, t"},
      {"slide",
       "u+-(y) = u(x) for y = x +- t psi_R(|x|) e_n, psi_R = 1 on [0, sqrt R],\n"
       "2 - 2 log s / log R on (sqrt R, R], 0 beyond (iterated logs for depth k >= 1).\n"
       "The slid field equals u shifted by t inside the inner ball and u outside B_R.\n"
       "  [slide] R, t, k, sign = 1|-1"},
      {"compare",
       "Comparison field v = max{u-, u} built from the downward slide; near the origin\n"
       "it equals max{u(x), u(x + t e_n)}.\n"
       "  [compare] R, t, k"},
      {"improve",
       "Corner cutting for g = max{a.x, b.x} with a_n > 0 > b_n: the plateau\n"
       "h0 = 1 + alpha a.x + (1 - alpha) b.x - max{0, |x'| - R} and w = max{g, h0}.\n"
       "A negative E(w) - E(g) shows g is not a minimizer under e_n deformations.\n"
       "  [improve] a (list), b (list), alpha, R"},
      {"probe",
       "Empirical stability probe: N random admissible perturbations w of size t\n"
       "(piecewise e_n deformations, multi-direction deformations, or horizontal\n"
       "deformations plus vertical bumps); reports min (E_R(w) - E_R(u)) / t^2.\n"
       "  [probe] R, t, N, seed, delta, class = en_only|multi_direction|horizontal_vertical,\n"
       "  directions (list), tolerance"},
      {"exa",
       "u = cos(s + pi/2) left of -pi/2, 1 on the plateau, cos(s - pi/2) beyond, F = p^2 - z^2.\n"
       "Random Lipschitz phi supported in (-R, R), nonpositive on [-pi/2, pi/2] and zero on\n"
       "[delta - pi/2, pi/2 - delta]; checks E_R(u + phi) >= E_R(u) and the Dirichlet\n"
       "eigenvalue bound with lambda = pi^2 / (R - pi/2 + delta)^2 on each side.\n"
       "  [exa] R, delta, N, seed, h"},
      {"exa2",
       "The plateau profile continued linearly past +-pi, F = p^2 - max{z, 0}^2.\n"
       "A delta-bounded e_1 probe finds no improvement while a direct scan shows\n"
       "monotonicity on windows of length 2 delta and its failure on length 4.\n"
       "  [exa2] delta, N, seed, h"},
      {"abs",
       "u = |t| with F = p^2 on (-R, R): every single deformation costs int psi'^2 >= 0,\n"
       "while the two-piece deformation v = 2(|t| + R/2)/3 has E_R(v) = (8/9) R < 2 R.\n"
       "  [abs] R, h, samples, seed"},
      {"solve",
       "Explicit gradient flow u <- u - dt (-div F_p + F_z) until the sup residual meets tol,\n"
       "then monotonicity and one-dimensionality of the result. method = heteroclinic\n"
       "relaxes the 1D connection between the wells instead.\n"
       "  [solve] method = flow|heteroclinic, dt, max_steps, tol, bc (per axis:\n"
       "  fixed|periodic|zero_flux), monotone_axis, L, h"},
      {"onedim",
       "Best direction xi and relative L2 residual of the monotone fit u ~ f(x.xi)\n"
       "(64 bins, isotonic regression), plus the line monotonicity count.\n"
       "  [onedim] axes (list), monotone_axis, tolerance"},
      {"accept-all",
       "Acceptance suite: criteria 1..10, one pass/fail line each; criterion 10 reruns\n"
       "1..9 at 1 and 8 workers and compares the CSV outputs byte for byte.\n"
       "  [accept-all] criteria (list)"},
  };
  return entries;
}

std::string names_joined() {
  std::string s;
  for (const auto& e : registry()) s += (s.empty() ? "" : ", ") + e.name;
  return s;
}

std::string key(const std::string& section, const std::string& k) { return section + "." + k; }

template <class T>
std::vector<T> as_indices(const std::vector<double>& v, const std::string& what) {
  std::vector<T> out;
  for (double x : v) {
    if (x != std::floor(x) || x < 0) throw ConfigError(what + ": expected nonnegative integers");
    out.push_back(static_cast<T>(x));
  }
  return out;
}

std::ofstream open_csv(const std::string& out_dir, const std::string& name) {
  fs::create_directories(out_dir);
  const std::string path = (fs::path(out_dir) / (name + ".csv")).string();
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

void write_field_csv(std::ostream& out, const std::vector<const ScalarField*>& fields,
                     const std::vector<std::string>& names) {
  const Grid& g = fields.front()->grid();
  for (int a = 0; a < g.dim(); ++a) out << "x" << a << ',';
  for (std::size_t k = 0; k < names.size(); ++k) out << names[k] << (k + 1 < names.size() ? "," : "\n");
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int a = 0; a < g.dim(); ++a) out << format_number(g.coordinate(i, a)) << ',';
    for (std::size_t k = 0; k < fields.size(); ++k)
      out << format_number((*fields[k])[i]) << (k + 1 < fields.size() ? "," : "\n");
  }
}

ScalarField pin_last_axis(const ScalarField& u, double lo, double hi) {
  const Grid& g = u.grid();
  const int last = g.dim() - 1;
  const std::size_t m = g.extent(last);
  std::vector<double> v = u.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t j = g.multi_index(i)[last];
    if (j < 2) v[i] = lo;
    if (j + 2 >= m) v[i] = hi;
  }
  return u.with_values(std::move(v));
}

CutoffProfile make_cutoff(const Config& cfg, const std::string& s) {
  return {cfg.number(key(s, "R")), cfg.number(key(s, "t")), static_cast<int>(cfg.integer(key(s, "k"), 0))};
}

std::uint64_t seed_of(const Config& cfg, const std::string& s) {
  if (!cfg.has(key(s, "seed"))) throw ConfigError("missing key " + key(s, "seed") + " (stochastic experiment)");
  const long long v = cfg.integer(key(s, "seed"));
  if (v < 0) throw ConfigError("seed must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

std::size_t count_of(const Config& cfg, const std::string& k, long long fallback) {
  const long long v = cfg.integer(k, fallback);
  if (v < 1) throw ConfigError(k + " must be at least 1");
  return static_cast<std::size_t>(v);
}

Outcome run_energy(const Config& cfg, const std::string& out_dir) {
  const Grid g = make_grid(cfg);
  const ScalarField u = make_field(cfg, g);
  const Integrand f = make_integrand(cfg, g.dim());
  const auto radii = cfg.list("energy.radii");
  if (radii.empty()) throw ConfigError("radii list empty");
  QuadratureRule q;
  const std::string scheme = cfg.text("energy.scheme", "midpoint");
  if (scheme == "trapezoid") q.scheme = Scheme::trapezoid;
  else if (scheme != "midpoint") throw ConfigError("energy.scheme: expected midpoint or trapezoid");
  q.singular_offset = cfg.flag("energy.offset", f.singular_weight);
  auto out = open_csv(out_dir, "energy");
  out << "r,E_r\n";
  Outcome o{"energy", true, {}, {"E"}};
  for (std::size_t j = 0; j < radii.size(); ++j) {
    const double e = energy(u, f, radii[j], q);
    out << format_number(radii[j]) << ',' << format_number(e) << '\n';
    if (j == 0) o.metrics.emplace_back("E", e);
    o.metrics.emplace_back(fmt::format("E{}", j), e);
  }
  return o;
}

Outcome run_growth(const Config& cfg, const std::string& out_dir) {
  const auto radii = cfg.list("growth.radii");
  if (radii.empty()) throw ConfigError("radii list empty");
  const Grid g = make_grid(cfg);
  const ScalarField u = make_field(cfg, g);
  const Integrand f = make_integrand(cfg, g.dim());
  const std::string norm = cfg.text("growth.norm", "spectral");
  if (norm != "spectral" && norm != "frobenius") throw ConfigError("growth.norm: expected spectral or frobenius");
  EnergyReport rep =
      growth_profile(u, f, radii, norm == "spectral" ? MatrixNorm::spectral : MatrixNorm::frobenius);
  const int k = static_cast<int>(cfg.integer("growth.k", 0));
  const GrowthCheck ck = check_growth(rep, k);
  if (cfg.has("growth.t")) {
    const double t = cfg.number("growth.t");
    for (double r : radii) rep.second_difference.push_back(second_difference(u, f, CutoffProfile(r, t, k)) / (t * t));
    auto sd = open_csv(out_dir, "growth_second_difference");
    sd << "r,second_difference_over_t2\n";
    for (std::size_t j = 0; j < radii.size(); ++j)
      sd << format_number(radii[j]) << ',' << format_number(rep.second_difference[j]) << '\n';
  }
  auto out = open_csv(out_dir, "growth");
  write_report_csv(out, rep);
  return {"growth", ck.pass,
          {{"exponent", rep.exponent}, {"constant", ck.constant}, {"trend", ck.trend}},
          {"exponent", "constant"}};
}

Outcome run_slide(const Config& cfg, const std::string& out_dir) {
  const Grid g = make_grid(cfg);
  const ScalarField u = make_field(cfg, g);
  const CutoffProfile c = make_cutoff(cfg, "slide");
  const int sign = static_cast<int>(cfg.integer("slide.sign", 1));
  if (sign != 1 && sign != -1) throw ConfigError("slide.sign must be 1 or -1");
  const ScalarField v = slide_field(u, c, sign);
  const int last = g.dim() - 1;
  double inner = 0.0, outer = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec x = g.position(i);
    const double r = x.norm();
    if (r > c.radius()) outer = std::max(outer, std::abs(v[i] - u[i]));
    x[last] -= sign * c.shift();
    if (r <= c.inner_radius() / 2 && g.contains(x)) inner = std::max(inner, std::abs(v[i] - sample(u, x)));
  }
  auto out = open_csv(out_dir, "slide");
  write_field_csv(out, {&u, &v}, {"u", "slid"});
  save_field((fs::path(out_dir) / "slide.field").string(), v);
  return {"slide", inner <= 1e-8 && outer <= 1e-12,
          {{"inner_error", inner}, {"outer_error", outer}}, {"inner_error", "outer_error"}};
}

Outcome run_compare(const Config& cfg, const std::string& out_dir) {
  const Grid g = make_grid(cfg);
  const ScalarField u = make_field(cfg, g);
  const CutoffProfile c = make_cutoff(cfg, "compare");
  const ScalarField v = build_comparison(u, c);
  const int last = g.dim() - 1;
  double gap = INFINITY, mismatch = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    gap = std::min(gap, v[i] - u[i]);
    Vec x = g.position(i);
    const double r = x.norm();
    x[last] += c.shift();
    if (r <= c.inner_radius() / 4 && g.contains(x))
      mismatch = std::max(mismatch, std::abs(v[i] - std::max(u[i], sample(u, x))));
  }
  auto out = open_csv(out_dir, "compare");
  write_field_csv(out, {&u, &v}, {"u", "v"});
  return {"compare", gap >= 0.0 && mismatch <= 1e-8,
          {{"min_gap", gap}, {"inner_mismatch", mismatch}}, {"min_gap", "inner_mismatch"}};
}

Outcome run_improve(const Config& cfg, const std::string& out_dir) {
  const Grid g = make_grid(cfg);
  const Integrand f = make_integrand(cfg, g.dim());
  ImprovementConfig ic;
  const auto a = cfg.list("improve.a"), b = cfg.list("improve.b");
  ic.a = Vec::Map(a.data(), static_cast<Eigen::Index>(a.size()));
  ic.b = Vec::Map(b.data(), static_cast<Eigen::Index>(b.size()));
  ic.alpha = cfg.number("improve.alpha", 0.5);
  ic.R = cfg.number("improve.R");
  const ImprovementResult r = lemma1_improvement(ic, f, g);
  auto out = open_csv(out_dir, "improve");
  out << "E_g,E_w,delta,error_estimate,radius\n"
      << format_number(r.energy_g) << ',' << format_number(r.energy_w) << ',' << format_number(r.delta) << ','
      << format_number(r.error_estimate) << ',' << format_number(r.radius) << '\n';
  return {"improve", r.delta < 0.0 && std::abs(r.delta) > 10.0 * r.error_estimate,
          {{"E_g", r.energy_g}, {"E_w", r.energy_w}, {"delta", r.delta}, {"error", r.error_estimate}},
          {"delta", "error"}};
}

ProbeClass probe_class(const std::string& s) {
  if (s == "en_only") return ProbeClass::en_only;
  if (s == "multi_direction") return ProbeClass::multi_direction;
  if (s == "horizontal_vertical") return ProbeClass::horizontal_vertical;
  throw ConfigError("probe.class: expected en_only, multi_direction or horizontal_vertical");
}

Outcome run_probe(const Config& cfg, const std::string& out_dir) {
  const Grid g = make_grid(cfg);
  const ScalarField u = make_field(cfg, g);
  const Integrand f = make_integrand(cfg, g.dim());
  StabilityProbeConfig pc;
  pc.R = cfg.number("probe.R");
  pc.t = cfg.number("probe.t");
  pc.N = count_of(cfg, "probe.N", 100);
  pc.seed = seed_of(cfg, "probe");
  pc.delta = cfg.number("probe.delta", 2.0 * pc.t);
  pc.cls = probe_class(cfg.text("probe.class", "en_only"));
  pc.directions = as_indices<int>(cfg.list("probe.directions", {}), "probe.directions");
  const double tol = cfg.number("probe.tolerance", 1e-3);
  const ProbeResult r = stability_probe(u, f, pc);
  auto out = open_csv(out_dir, "probe");
  out << "sample,ratio\n";
  for (std::size_t k = 0; k < r.ratios.size(); ++k) out << k << ',' << format_number(r.ratios[k]) << '\n';
  return {"probe", r.min_ratio >= -tol,
          {{"min_ratio", r.min_ratio},
           {"argmin", static_cast<double>(r.argmin)},
           {"rejected", static_cast<double>(r.rejected)}},
          {"min_ratio"}};
}

Outcome run_exa(const Config& cfg, const std::string& out_dir) {
  const ExaReport r = example_exa(cfg.number("exa.R"), cfg.number("exa.delta"), count_of(cfg, "exa.N", 500),
                                  seed_of(cfg, "exa"), cfg.number("exa.h", 1e-3));
  auto out = open_csv(out_dir, "exa");
  out << "sample,size,difference,ratio,rayleigh\n";
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    const auto& s = r.samples[k];
    out << k << ',' << format_number(s.size) << ',' << format_number(s.difference) << ','
        << format_number(s.ratio) << ',' << format_number(s.rayleigh) << '\n';
  }
  return {"exa", r.pass,
          {{"lambda", r.lambda}, {"min_difference", r.min_difference}, {"min_ratio", r.min_ratio},
           {"min_rayleigh", r.min_rayleigh}},
          {"min_ratio", "min_rayleigh"}};
}

Outcome run_exa2(const Config& cfg, const std::string& out_dir) {
  const Exa2Report r = example_exa2(cfg.number("exa2.delta"), count_of(cfg, "exa2.N", 300), seed_of(cfg, "exa2"),
                                    cfg.number("exa2.h", 1e-3));
  auto out = open_csv(out_dir, "exa2");
  out << "sample,ratio\n";
  for (std::size_t k = 0; k < r.probe.ratios.size(); ++k)
    out << k << ',' << format_number(r.probe.ratios[k]) << '\n';
  return {"exa2", r.pass,
          {{"min_ratio", r.probe.min_ratio},
           {"short_windows", static_cast<double>(r.short_windows)},
           {"short_violations", static_cast<double>(r.short_violations)},
           {"long_windows", static_cast<double>(r.long_windows)},
           {"long_violations", static_cast<double>(r.long_violations)}},
          {"min_ratio", "short_violations", "long_violations"}};
}

Outcome run_abs(const Config& cfg, const std::string& out_dir) {
  const AbsReport r = example_abs(cfg.number("abs.R"), cfg.number("abs.h"), count_of(cfg, "abs.samples", 100),
                                  seed_of(cfg, "abs"));
  auto out = open_csv(out_dir, "abs");
  out << "sample,slope,difference,dirichlet\n";
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    const auto& s = r.samples[k];
    out << k << ',' << format_number(s.slope) << ',' << format_number(s.difference) << ','
        << format_number(s.dirichlet) << '\n';
  }
  return {"abs", r.pass,
          {{"E_u", r.energy_u}, {"E_v", r.energy_v}, {"min_difference", r.min_difference}, {"max_gap", r.max_gap}},
          {"E_u", "E_v"}};
}

Boundary boundary_of(const std::string& s) {
  if (s == "fixed") return Boundary::fixed;
  if (s == "periodic") return Boundary::periodic;
  if (s == "zero_flux") return Boundary::zero_flux;
  throw ConfigError("solve.bc: expected fixed, periodic or zero_flux, got '" + s + "'");
}

std::vector<std::string> words(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

Metrics shape_metrics(const ScalarField& u, int axis) {
  Metrics m;
  const MonotonicityResult mono = monotonicity_check(u, axis);
  m.emplace_back("violations", static_cast<double>(mono.violations));
  if (u.grid().dim() >= 2) {
    std::vector<int> axes;
    for (int a = 0; a < u.grid().dim(); ++a) axes.push_back(a);
    const OneDimResult od = one_dimensionality(u, axes);
    const double c = std::min(1.0, std::abs(od.xi[axis]));
    m.emplace_back("onedim_residual", od.residual);
    m.emplace_back("angle_deg", std::acos(c) * 180.0 / std::numbers::pi);
  }
  return m;
}

Outcome run_solve(const Config& cfg, const std::string& out_dir) {
  const std::string method = cfg.text("solve.method", "flow");
  if (method == "heteroclinic") {
    WellParams w;
    w.lo = cfg.number("integrand.well_lo", -1.0);
    w.hi = cfg.number("integrand.well_hi", 1.0);
    w.scale = cfg.number("integrand.well_scale", 1.0);
    const ScalarField u = heteroclinic_1d(w, cfg.number("solve.L"), cfg.number("solve.h"));
    double odd = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) odd = std::max(odd, std::abs(u[i] + u[u.size() - 1 - i] - w.lo - w.hi));
    auto out = open_csv(out_dir, "solve");
    write_field_csv(out, {&u}, {"u"});
    save_field((fs::path(out_dir) / "solve.field").string(), u);
    const Integrand f = catalog("allen_cahn", {{"n", 1}, {"well_lo", w.lo}, {"well_hi", w.hi}, {"well_scale", w.scale}});
    return {"solve", true, {{"symmetry_error", odd}, {"residual", criticality_residual(u, f)}}, {"residual"}};
  }
  if (method != "flow") throw ConfigError("solve.method: expected flow or heteroclinic");
  const Grid g = make_grid(cfg);
  const ScalarField u0 = make_field(cfg, g);
  const Integrand f = make_integrand(cfg, g.dim());
  FlowConfig fc;
  fc.dt = cfg.number("solve.dt");
  fc.max_steps = count_of(cfg, "solve.max_steps", 10000);
  fc.tol = cfg.number("solve.tol", 1e-8);
  if (cfg.has("solve.bc"))
    for (const auto& w : words(cfg.text("solve.bc"))) fc.bc.push_back(boundary_of(w));
  const FlowResult r = gradient_flow(f, u0, fc);
  auto out = open_csv(out_dir, "solve");
  write_history_csv(out, r);
  save_field((fs::path(out_dir) / "solve.field").string(), r.u);
  Outcome o{"solve", r.converged,
            {{"residual", r.residual.empty() ? 0.0 : r.residual.back()},
             {"steps", static_cast<double>(r.steps)},
             {"converged", r.converged ? 1.0 : 0.0}},
            {"residual", "steps"}};
  const int axis = static_cast<int>(cfg.integer("solve.monotone_axis", g.dim() - 1));
  for (auto& m : shape_metrics(r.u, axis)) o.metrics.push_back(m);
  return o;
}

Outcome run_onedim(const Config& cfg, const std::string& out_dir) {
  const Grid g = make_grid(cfg);
  const ScalarField u = make_field(cfg, g);
  std::vector<int> axes = as_indices<int>(cfg.list("onedim.axes", {}), "onedim.axes");
  if (axes.empty())
    for (int a = 0; a < g.dim(); ++a) axes.push_back(a);
  const OneDimResult od = one_dimensionality(u, axes);
  const int axis = static_cast<int>(cfg.integer("onedim.monotone_axis", g.dim() - 1));
  const MonotonicityResult mono = monotonicity_check(u, axis);
  auto out = open_csv(out_dir, "onedim");
  out << "line,pattern\n";
  for (std::size_t k = 0; k < mono.lines.size(); ++k) out << k << ',' << static_cast<int>(mono.lines[k]) << '\n';
  Outcome o{"onedim", od.residual <= cfg.number("onedim.tolerance", 1e-2),
            {{"residual", od.residual},
             {"degenerate", od.degenerate ? 1.0 : 0.0},
             {"violations", static_cast<double>(mono.violations)}},
            {"residual"}};
  for (int a = 0; a < g.dim(); ++a) o.metrics.emplace_back(fmt::format("xi{}", a), od.xi.size() > a ? od.xi[a] : 0.0);
  return o;
}

Outcome run_accept(const Config& cfg, const std::string& out_dir) {
  std::vector<int> which = as_indices<int>(cfg.list("accept-all.criteria", {}), "accept-all.criteria");
  for (int id : which)
    if (id < 1 || id > 10) throw ConfigError("accept-all.criteria: ids run from 1 to 10");
  const auto results = acceptance_suite(out_dir, which);
  Outcome o{"accept-all", true, {}, {"passed", "failed"}};
  double passed = 0, failed = 0;
  auto out = open_csv(out_dir, "accept-all");
  out << "criterion,pass,detail\n";
  for (const auto& r : results) {
    (r.pass ? passed : failed) += 1;
    o.pass = o.pass && r.pass;
    out << r.id << ',' << (r.pass ? "PASS" : "FAIL") << ",\"" << r.detail << "\"\n";
    o.metrics.emplace_back(fmt::format("criterion{}", r.id), r.pass ? 1.0 : 0.0);
  }
  o.metrics.emplace_back("passed", passed);
  o.metrics.emplace_back("failed", failed);
  return o;
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.push_back(e.name);
  return out;
}

std::string describe(std::string_view name) {
  for (const auto& e : registry())
    if (e.name == name) return e.name + ": " + e.text;
  throw ConfigError(fmt::format("unknown experiment '{}'; valid names: {}", name, names_joined()));
}

Grid make_grid(const Config& cfg) {
  const int split = static_cast<int>(cfg.integer("grid.split", 1));
  if (cfg.has("grid.origin")) {
    const auto o = cfg.list("grid.origin"), h = cfg.list("grid.spacing"), e = cfg.list("grid.extent");
    const std::size_t n = o.size();
    if (n < 1 || n > 3 || h.size() != n || e.size() != n)
      throw ConfigError("grid.origin, grid.spacing and grid.extent need one entry per axis (1 to 3)");
    std::array<std::size_t, 3> ext{1, 1, 1};
    const auto ei = as_indices<std::size_t>(e, "grid.extent");
    std::copy(ei.begin(), ei.end(), ext.begin());
    return {static_cast<int>(n), Vec::Map(o.data(), static_cast<Eigen::Index>(n)),
            Vec::Map(h.data(), static_cast<Eigen::Index>(n)), ext, split};
  }
  const int n = static_cast<int>(cfg.integer("grid.dim"));
  if (n < 1 || n > 3) throw ConfigError("grid.dim must be 1, 2 or 3");
  auto per_axis = [&](const std::string& k) {
    auto v = cfg.list(k);
    if (v.size() == 1) v.assign(static_cast<std::size_t>(n), v[0]);
    if (v.size() != static_cast<std::size_t>(n)) throw ConfigError(k + ": need 1 or dim entries");
    return v;
  };
  const auto lo = per_axis("grid.lower"), hi = per_axis("grid.upper"), h = per_axis("grid.h");
  const std::string layout = cfg.text("grid.layout", "node");
  if (layout != "node" && layout != "cell") throw ConfigError("grid.layout: expected node or cell");
  Vec origin(n), spacing(n);
  std::array<std::size_t, 3> ext{1, 1, 1};
  for (int a = 0; a < n; ++a) {
    if (!(h[a] > 0.0) || !(hi[a] > lo[a])) throw ConfigError("grid: need h > 0 and upper > lower");
    const double cells = (hi[a] - lo[a]) / h[a];
    const double rc = std::round(cells);
    if (std::abs(cells - rc) > 1e-9 * std::max(1.0, rc)) throw ConfigError("grid: h must divide upper - lower");
    spacing[a] = h[a];
    if (layout == "node") {
      origin[a] = lo[a];
      ext[a] = static_cast<std::size_t>(rc) + 1;
    } else {
      origin[a] = lo[a] + 0.5 * h[a];
      ext[a] = static_cast<std::size_t>(rc);
    }
  }
  return {n, origin, spacing, ext, split};
}

ScalarField make_field(const Config& cfg, const Grid& grid) {
  const std::string profile = cfg.text("field.profile");
  const int n = grid.dim();
  ScalarField u(grid, std::vector<double>(grid.size(), 0.0));
  auto direction = [&]() {
    Vec d = Vec::Zero(n);
    d[n - 1] = 1.0;
    if (cfg.has("field.direction")) {
      const auto v = cfg.list("field.direction");
      if (v.size() != static_cast<std::size_t>(n)) throw ConfigError("field.direction: need dim entries");
      d = Vec::Map(v.data(), n);
    }
    return d;
  };
  if (profile == "tanh") {
    const Vec d = direction();
    const double w = cfg.number("field.width", std::numbers::sqrt2), s = cfg.number("field.shift", 0.0);
    u = from_function(grid, [&](const Vec& x) { return std::tanh((d.dot(x) - s) / w); });
  } else if (profile == "wave") {
    const double w = cfg.number("field.width", std::numbers::sqrt2), a = cfg.number("field.amplitude"),
                 p = cfg.number("field.period");
    if (n < 2) throw ConfigError("field.profile wave needs dim >= 2");
    u = from_function(grid, [&](const Vec& x) {
      return std::tanh((x[n - 1] - a * std::sin(2.0 * std::numbers::pi * x[0] / p)) / w);
    });
  } else if (profile == "step") {
    const double a = cfg.number("field.amplitude", 1.0);
    u = from_function(grid, [&](const Vec& x) { return x[n - 1] > 0 ? a : (x[n - 1] < 0 ? -a : 0.0); });
  } else if (profile == "linear") {
    const Vec d = direction();
    const double c = cfg.number("field.offset", 0.0);
    u = from_function(grid, [&](const Vec& x) { return d.dot(x) + c; });
  } else if (profile == "abs") {
    const int axis = static_cast<int>(cfg.integer("field.axis", n - 1));
    if (axis < 0 || axis >= n) throw ConfigError("field.axis out of range");
    u = from_function(grid, [&](const Vec& x) { return std::abs(x[axis]); });
  } else if (profile == "radial") {
    u = from_function(grid, [](const Vec& x) { return x.squaredNorm(); });
  } else if (profile == "constant") {
    const double c = cfg.number("field.value");
    u = from_function(grid, [&](const Vec&) { return c; });
  } else if (profile == "file") {
    fs::path p = cfg.text("field.path");
    if (p.is_relative()) p = fs::path(cfg.base_dir()) / p;
    u = load_field(p.string());
    if (!(u.grid() == grid)) throw ConfigError("field file grid differs from [grid]");
  } else {
    throw ConfigError("field.profile: expected tanh, wave, step, linear, abs, radial, constant or file");
  }
  if (cfg.has("field.pin")) {
    const auto pin = cfg.list("field.pin");
    if (pin.size() != 2) throw ConfigError("field.pin: need two values (low face, high face)");
    u = pin_last_axis(u, pin[0], pin[1]);
  }
  return u;
}

Integrand make_integrand(const Config& cfg, int dim) {
  const std::string name = cfg.text("integrand.name");
  ParamMap params{{"n", static_cast<double>(dim)}};
  for (const auto& [k, v] : cfg.section("integrand")) {
    if (k == "name") continue;
    params[k] = cfg.number("integrand." + k);
  }
  if (params["n"] != dim) throw ConfigError("integrand.n differs from the grid dimension");
  try {
    return catalog(name, params);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

Outcome run_experiment(const Config& cfg, const std::string& out_dir) {
  const std::string name = cfg.experiment();
  if (name == "energy") return run_energy(cfg, out_dir);
  if (name == "growth") return run_growth(cfg, out_dir);
  if (name == "slide") return run_slide(cfg, out_dir);
  if (name == "compare") return run_compare(cfg, out_dir);
  if (name == "improve") return run_improve(cfg, out_dir);
  if (name == "probe") return run_probe(cfg, out_dir);
  if (name == "exa") return run_exa(cfg, out_dir);
  if (name == "exa2") return run_exa2(cfg, out_dir);
  if (name == "abs") return run_abs(cfg, out_dir);
  if (name == "solve") return run_solve(cfg, out_dir);
  if (name == "onedim") return run_onedim(cfg, out_dir);
  if (name == "accept-all") return run_accept(cfg, out_dir);
  throw ConfigError(fmt::format("unknown experiment '{}'; valid names: {}", name, names_joined()));
}

std::vector<std::string> check_assertions(const Config& cfg, const Outcome& o) {
  std::vector<std::string> failures;
  bool expect_pass = true;
  for (const auto& [k, v] : cfg.section("assert")) {
    if (k == "expect") {
      if (v != "PASS" && v != "FAIL") throw ConfigError("assert.expect: expected PASS or FAIL");
      expect_pass = v == "PASS";
      continue;
    }
    const bool lo = k.ends_with("_min"), hi = k.ends_with("_max");
    if (!lo && !hi) throw ConfigError("assert." + k + ": keys end in _min or _max");
    const std::string metric = k.substr(0, k.size() - 4);
    const double bound = cfg.number("assert." + k);
    const double value = o.metric(metric);
    if (lo && !(value >= bound)) failures.push_back(fmt::format("{} = {} below {}", metric, value, bound));
    if (hi && !(value <= bound)) failures.push_back(fmt::format("{} = {} above {}", metric, value, bound));
  }
  if (o.pass != expect_pass)
    failures.push_back(fmt::format("{} reported {}, expected {}", o.name, o.pass ? "PASS" : "FAIL",
                                   expect_pass ? "PASS" : "FAIL"));
  return failures;
}

int run(const std::string& config_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  try {
    const Config cfg = Config::load(config_path);
    const Outcome o = run_experiment(cfg, out_dir);
    out << o.summary() << '\n';
    const auto failures = check_assertions(cfg, o);
    for (const auto& f : failures) err << "assertion failed: " << f << '\n';
    return failures.empty() ? 0 : 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace slidekit::runner
