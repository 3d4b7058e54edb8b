// Python bindings: grids and fields as numpy arrays, the integrand catalog,
// energies, the gradient flow and the worked examples.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "slidekit/deformation.hpp"
#include "slidekit/energy.hpp"
#include "slidekit/experiments.hpp"
#include "slidekit/parallel.hpp"
#include "slidekit/solver.hpp"

namespace py = pybind11;
using namespace slidekit;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::vector<py::ssize_t> shape_of(const Grid& g) {
  std::vector<py::ssize_t> s;
  for (int a = 0; a < g.dim(); ++a) s.push_back(static_cast<py::ssize_t>(g.extent(a)));
  return s;
}

Array values_of(const ScalarField& u) {
  Array out(shape_of(u.grid()));
  std::copy(u.values().begin(), u.values().end(), out.mutable_data());
  return out;
}

ScalarField field_from(const Grid& g, const Array& values) {
  if (static_cast<std::size_t>(values.size()) != g.size())
    throw Error("field needs " + std::to_string(g.size()) + " values, got " + std::to_string(values.size()));
  return {g, std::vector<double>(values.data(), values.data() + values.size())};
}

Array coordinates(const Grid& g) {
  Array out({static_cast<py::ssize_t>(g.size()), static_cast<py::ssize_t>(g.dim())});
  double* d = out.mutable_data();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int a = 0; a < g.dim(); ++a) *d++ = g.coordinate(i, a);
  return out;
}

Boundary boundary_from(const std::string& s) {
  if (s == "fixed") return Boundary::fixed;
  if (s == "periodic") return Boundary::periodic;
  if (s == "zero_flux") return Boundary::zero_flux;
  throw Error("unknown boundary '" + s + "' (valid: fixed, periodic, zero_flux)");
}

QuadratureRule rule_from(const std::string& scheme, bool offset) {
  if (scheme == "midpoint") return {Scheme::midpoint, offset};
  if (scheme == "trapezoid") return {Scheme::trapezoid, offset};
  throw Error("unknown scheme '" + scheme + "' (valid: midpoint, trapezoid)");
}

}  // namespace

PYBIND11_MODULE(_slidekit, m) {
  m.doc() = "Sliding deformations, discrete energies and gradient flows on node lattices.";
  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def("set_threads", &parallel::set_threads, py::arg("n"));
  m.def("threads", &parallel::threads);

  py::class_<Grid>(m, "Grid")
      .def(py::init([](int dim, const std::vector<double>& origin, const std::vector<double>& spacing,
                       const std::vector<std::size_t>& extent, int split) {
             if (extent.size() != static_cast<std::size_t>(dim)) throw Error("one extent per axis required");
             std::array<std::size_t, 3> e{1, 1, 1};
             std::copy(extent.begin(), extent.end(), e.begin());
             return Grid(dim, to_vec(origin), to_vec(spacing), e, split);
           }),
           py::arg("dim"), py::arg("origin"), py::arg("spacing"), py::arg("extent"), py::arg("split") = 1)
      .def_static("uniform", &Grid::uniform, py::arg("dim"), py::arg("lower"), py::arg("upper"), py::arg("h"),
                  py::arg("split") = 1)
      .def_static("cell_centered", &Grid::cell_centered, py::arg("dim"), py::arg("lower"), py::arg("upper"),
                  py::arg("h"), py::arg("split") = 1)
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("split", &Grid::split)
      .def_property_readonly("size", &Grid::size)
      .def_property_readonly("shape", &shape_of)
      .def("spacing", &Grid::spacing, py::arg("axis"))
      .def("origin", &Grid::origin, py::arg("axis"))
      .def("upper", &Grid::upper, py::arg("axis"))
      .def("coordinates", &coordinates)
      .def("__eq__", &Grid::operator==);

  py::class_<ScalarField>(m, "Field")
      .def(py::init(&field_from), py::arg("grid"), py::arg("values"))
      .def_property_readonly("grid", &ScalarField::grid)
      .def_property_readonly("values", &values_of)
      .def("__len__", &ScalarField::size)
      .def("sample", [](const ScalarField& u, const std::vector<double>& x) { return sample(u, to_vec(x)); });

  m.def("from_function", [](const Grid& g, const std::function<double(const Vec&)>& f) { return from_function(g, f); },
        py::arg("grid"), py::arg("f"), "Field with value f(x) at every node x (x a numpy vector).");
  m.def("gradient", [](const ScalarField& u) {
    const VectorField d = gradient(u);
    Array out({static_cast<py::ssize_t>(u.size()), static_cast<py::ssize_t>(u.grid().dim())});
    std::copy(d.data().begin(), d.data().end(), out.mutable_data());
    return out;
  });
  m.def("pointwise_max", &pointwise_max);
  m.def("pointwise_min", &pointwise_min);
  m.def("load_field", &load_field, py::arg("path"));
  m.def("save_field", &save_field, py::arg("path"), py::arg("field"));

  // Arguments arrive as plain dynamic vectors and are copied into the
  // inline-storage types the core uses.
  auto eval = [](auto member) {
    return [member](const Integrand& f, const Eigen::VectorXd& p, double z, const Eigen::VectorXd& x) {
      if (p.size() != f.dim || x.size() != f.dim) throw Error("p and x must have the integrand dimension");
      return (f.*member)(Vec(p), z, Vec(x));
    };
  };
  auto as_dense = [](auto member) {
    return [member](const Integrand& f, const Eigen::VectorXd& p, double z, const Eigen::VectorXd& x) {
      if (p.size() != f.dim || x.size() != f.dim) throw Error("p and x must have the integrand dimension");
      return Eigen::MatrixXd((f.*member)(Vec(p), z, Vec(x)));
    };
  };
  py::class_<Integrand>(m, "Integrand")
      .def_readonly("name", &Integrand::name)
      .def_readonly("dim", &Integrand::dim)
      .def("F", eval(&Integrand::F), py::arg("p"), py::arg("z"), py::arg("x"))
      .def("Fz", eval(&Integrand::Fz), py::arg("p"), py::arg("z"), py::arg("x"))
      .def("Fzz", eval(&Integrand::Fzz), py::arg("p"), py::arg("z"), py::arg("x"))
      .def("Fp", as_dense(&Integrand::Fp), py::arg("p"), py::arg("z"), py::arg("x"))
      .def("Fpz", as_dense(&Integrand::Fpz), py::arg("p"), py::arg("z"), py::arg("x"))
      .def("Fpp", as_dense(&Integrand::Fpp), py::arg("p"), py::arg("z"), py::arg("x"));
  m.def("catalog", [](const std::string& name, const std::map<std::string, double>& params) {
    return catalog(name, ParamMap(params.begin(), params.end()));
  }, py::arg("name"), py::arg("params") = std::map<std::string, double>{});
  m.def("catalog_names", &catalog_names);

  m.def("ell", &iterlog::ell, py::arg("k"), py::arg("R"));
  m.def("theta", &iterlog::theta, py::arg("k"), py::arg("R"));
  py::class_<CutoffProfile>(m, "Cutoff")
      .def(py::init<double, double, int>(), py::arg("R"), py::arg("t") = 0.0, py::arg("k") = 0)
      .def_property_readonly("inner_radius", &CutoffProfile::inner_radius)
      .def("value", py::vectorize(&CutoffProfile::value))
      .def("derivative", py::vectorize(&CutoffProfile::derivative));
  m.def("slide_field", &slide_field, py::arg("u"), py::arg("cutoff"), py::arg("sign"));

  m.def("energy", [](const ScalarField& u, const Integrand& f, double R, const std::string& scheme, bool offset) {
    return energy(u, f, R, rule_from(scheme, offset));
  }, py::arg("u"), py::arg("f"), py::arg("R"), py::arg("scheme") = "midpoint", py::arg("offset") = false);
  m.def("growth_profile", [](const ScalarField& u, const Integrand& f, const std::vector<double>& radii) {
    const EnergyReport r = growth_profile(u, f, radii);
    py::dict d;
    d["radii"] = r.radii;
    d["energy"] = r.energy;
    d["growth"] = r.growth;
    d["exponent"] = r.exponent;
    d["constant"] = r.constant;
    return d;
  }, py::arg("u"), py::arg("f"), py::arg("radii"));
  m.def("second_difference", [](const ScalarField& u, const Integrand& f, const CutoffProfile& c) {
    return second_difference(u, f, c);
  }, py::arg("u"), py::arg("f"), py::arg("cutoff"));

  m.def("gradient_flow", [](const Integrand& f, const ScalarField& u0, double dt, std::size_t max_steps, double tol,
                            const std::vector<std::string>& bc) {
    FlowConfig cfg;
    cfg.dt = dt;
    cfg.max_steps = max_steps;
    cfg.tol = tol;
    for (const auto& b : bc) cfg.bc.push_back(boundary_from(b));
    const FlowResult r = [&] {
      py::gil_scoped_release release;
      return gradient_flow(f, u0, cfg);
    }();
    py::dict d;
    d["u"] = r.u;
    d["residual"] = r.residual;
    d["energy"] = r.energy;
    d["steps"] = r.steps;
    d["converged"] = r.converged;
    return d;
  }, py::arg("f"), py::arg("u0"), py::arg("dt"), py::arg("max_steps") = 10000, py::arg("tol") = 1e-8,
        py::arg("bc") = std::vector<std::string>{});
  m.def("criticality_residual", &criticality_residual, py::arg("u"), py::arg("f"));
  m.def("heteroclinic_1d", [](double lo, double hi, double scale, double L, double h) {
    return heteroclinic_1d({lo, hi, scale}, L, h);
  }, py::arg("lo") = -1.0, py::arg("hi") = 1.0, py::arg("scale") = 1.0, py::arg("L") = 10.0, py::arg("h") = 0.01);

  m.def("example_abs", [](double R, double h, std::size_t samples, std::uint64_t seed) {
    const AbsReport r = example_abs(R, h, samples, seed);
    py::dict d;
    d["E_u"] = r.energy_u;
    d["E_v"] = r.energy_v;
    d["min_difference"] = r.min_difference;
    d["max_gap"] = r.max_gap;
    d["pass"] = r.pass;
    return d;
  }, py::arg("R") = 2.0, py::arg("h") = 1e-3, py::arg("samples") = 100, py::arg("seed") = 1);
  m.def("example_exa", [](double R, double delta, std::size_t N, std::uint64_t seed) {
    const ExaReport r = example_exa(R, delta, N, seed);
    py::dict d;
    d["lambda"] = r.lambda;
    d["ell"] = r.ell;
    d["min_difference"] = r.min_difference;
    d["min_ratio"] = r.min_ratio;
    d["min_rayleigh"] = r.min_rayleigh;
    d["pass"] = r.pass;
    return d;
  }, py::arg("R") = 3.0, py::arg("delta") = 0.5, py::arg("N") = 100, py::arg("seed") = 1);
  m.def("lemma1_improvement", [](const Vec& a, const Vec& b, double alpha, double R, const Integrand& f,
                                 const Grid& g) {
    const ImprovementResult r = lemma1_improvement({a, b, alpha, R}, f, g);
    py::dict d;
    d["E_g"] = r.energy_g;
    d["E_w"] = r.energy_w;
    d["delta"] = r.delta;
    d["error"] = r.error_estimate;
    return d;
  }, py::arg("a"), py::arg("b"), py::arg("alpha"), py::arg("R"), py::arg("f"), py::arg("grid"));
  m.def("one_dimensionality", [](const ScalarField& u, const std::vector<int>& axes) {
    const OneDimResult r = one_dimensionality(u, axes);
    py::dict d;
    d["xi"] = r.xi;
    d["residual"] = r.residual;
    d["degenerate"] = r.degenerate;
    return d;
  }, py::arg("u"), py::arg("axes"));
  m.def("monotonicity_violations", [](const ScalarField& u, int axis) { return monotonicity_check(u, axis).violations; },
        py::arg("u"), py::arg("axis"));
}
