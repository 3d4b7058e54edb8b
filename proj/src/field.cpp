#include "slidekit/field.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "slidekit/parallel.hpp"

namespace slidekit {

Grid::Grid(int dim, const Vec& origin, const Vec& spacing,
           const std::array<std::size_t, 3>& extent, int split)
    : dim_(dim), split_(split) {
  if (dim < 1 || dim > kMaxDim) throw Error(fmt::format("grid dimension {} not in 1..3", dim));
  if (origin.size() != dim || spacing.size() != dim)
    throw Error("grid origin/spacing size does not match dimension");
  if (split < 1 || split > dim) throw Error(fmt::format("split index k={} not in 1..{}", split, dim));
  for (int a = 0; a < dim; ++a) {
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw Error(fmt::format("grid spacing on axis {} must be positive", a));
    if (extent[a] < 2) throw Error(fmt::format("grid extent on axis {} must be at least 2", a));
    if (!std::isfinite(origin[a])) throw Error("grid origin must be finite");
    origin_[a] = origin[a];
    spacing_[a] = spacing[a];
    extent_[a] = extent[a];
  }
  size_ = 1;
  for (int a = dim - 1; a >= 0; --a) {
    stride_[a] = size_;
    size_ *= extent_[a];
  }
}

Grid Grid::uniform(int dim, double lower, double upper, double h, int split) {
  if (!(upper > lower) || !(h > 0.0)) throw Error("uniform grid needs lower < upper and h > 0");
  const auto cells = static_cast<std::size_t>(std::llround((upper - lower) / h));
  Vec o = Vec::Constant(dim, lower);
  Vec s = Vec::Constant(dim, h);
  return Grid(dim, o, s, {cells + 1, cells + 1, cells + 1}, split);
}

Grid Grid::cell_centered(int dim, double lower, double upper, double h, int split) {
  if (!(upper > lower) || !(h > 0.0)) throw Error("cell-centered grid needs lower < upper and h > 0");
  const auto cells = static_cast<std::size_t>(std::llround((upper - lower) / h));
  Vec o = Vec::Constant(dim, lower + 0.5 * h);
  Vec s = Vec::Constant(dim, h);
  return Grid(dim, o, s, {cells, cells, cells}, split);
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= spacing_[a];
  return v;
}

double Grid::max_spacing() const {
  double h = 0.0;
  for (int a = 0; a < dim_; ++a) h = std::max(h, spacing_[a]);
  return h;
}

std::array<std::size_t, 3> Grid::multi_index(std::size_t flat) const {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = flat / stride_[a];
    flat %= stride_[a];
  }
  return idx;
}

std::size_t Grid::flat_index(const std::array<std::size_t, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) flat += idx[a] * stride_[a];
  return flat;
}

double Grid::coordinate(std::size_t flat, int axis) const {
  const std::size_t i = (flat / stride_[axis]) % extent_[axis];
  return origin_[axis] + spacing_[axis] * static_cast<double>(i);
}

Vec Grid::position(std::size_t flat) const {
  Vec x(dim_);
  for (int a = 0; a < dim_; ++a) x[a] = coordinate(flat, a);
  return x;
}

bool Grid::contains(const Vec& x, double slack) const {
  for (int a = 0; a < dim_; ++a) {
    const double tol = slack * spacing_[a];
    if (x[a] < lower(a) - tol || x[a] > upper(a) + tol) return false;
  }
  return true;
}

bool Grid::operator==(const Grid& other) const {
  if (dim_ != other.dim_ || split_ != other.split_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (extent_[a] != other.extent_[a] || origin_[a] != other.origin_[a] ||
        spacing_[a] != other.spacing_[a])
      return false;
  }
  return true;
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw Error(fmt::format("field has {} values, grid has {} nodes", values_.size(), grid_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw Error("field values must be finite");
}

VectorField::VectorField(Grid grid, std::vector<double> components)
    : grid_(std::move(grid)), data_(std::move(components)) {
  if (data_.size() != grid_.size() * static_cast<std::size_t>(grid_.dim()))
    throw Error("vector field component count does not match grid");
  for (double v : data_)
    if (!std::isfinite(v)) throw Error("vector field components must be finite");
}

Vec VectorField::at(std::size_t node) const {
  const int n = grid_.dim();
  Vec p(n);
  for (int a = 0; a < n; ++a) p[a] = component(node, a);
  return p;
}

ScalarField from_function(const Grid& grid, const std::function<double(const Vec&)>& f) {
  std::vector<double> values(grid.size());
  parallel::for_each(grid.size(), [&](std::size_t i) { values[i] = f(grid.position(i)); });
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw Error(fmt::format("non-finite sample at node {}", i));
  return {grid, std::move(values)};
}

VectorField gradient(const ScalarField& u) {
  const Grid& g = u.grid();
  const int n = g.dim();
  const auto& val = u.values();
  std::vector<double> out(g.size() * static_cast<std::size_t>(n));
  parallel::for_each(g.size(), [&](std::size_t i) {
    const auto idx = g.multi_index(i);
    for (int a = 0; a < n; ++a) {
      const std::size_t s = g.stride(a);
      const std::size_t m = g.extent(a);
      const double h = g.spacing(a);
      double d;
      if (m == 2) {
        d = idx[a] == 0 ? (val[i + s] - val[i]) / h : (val[i] - val[i - s]) / h;
      } else if (idx[a] == 0) {
        d = (-3.0 * val[i] + 4.0 * val[i + s] - val[i + 2 * s]) / (2.0 * h);
      } else if (idx[a] == m - 1) {
        d = (3.0 * val[i] - 4.0 * val[i - s] + val[i - 2 * s]) / (2.0 * h);
      } else {
        d = (val[i + s] - val[i - s]) / (2.0 * h);
      }
      out[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)] = d;
    }
  });
  return {g, std::move(out)};
}

namespace {

template <class Op>
ScalarField combine(const ScalarField& u, const ScalarField& v, Op op) {
  if (!(u.grid() == v.grid())) throw Error("grid mismatch");
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(u[i], v[i]);
  return {u.grid(), std::move(out)};
}

}  // namespace

ScalarField pointwise_max(const ScalarField& u, const ScalarField& v) {
  return combine(u, v, [](double a, double b) { return std::max(a, b); });
}

ScalarField pointwise_min(const ScalarField& u, const ScalarField& v) {
  return combine(u, v, [](double a, double b) { return std::min(a, b); });
}

ScalarField add(const ScalarField& u, const ScalarField& v, double scale) {
  return combine(u, v, [scale](double a, double b) { return a + scale * b; });
}

double sample(const ScalarField& u, const Vec& x) {
  const Grid& g = u.grid();
  const int n = g.dim();
  if (x.size() != n) throw Error("sample point dimension mismatch");
  if (!g.contains(x)) {
    std::ostringstream os;
    os << x.transpose();
    throw Error("sample point outside grid hull: " + os.str());
  }
  std::array<std::size_t, 3> cell{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) {
    double t = (x[a] - g.origin(a)) / g.spacing(a);
    const double r = std::round(t);
    // Snap near-node coordinates so node positions return node values exactly.
    if (std::abs(t - r) <= 1e-9) t = r;
    const double top = static_cast<double>(g.extent(a) - 1);
    t = std::clamp(t, 0.0, top);
    auto c = static_cast<std::size_t>(std::floor(t));
    if (c >= g.extent(a) - 1) c = g.extent(a) - 2;
    cell[a] = c;
    frac[a] = t - static_cast<double>(c);
  }
  const auto& val = u.values();
  const std::size_t base = g.flat_index(cell);
  double acc = 0.0;
  for (unsigned corner = 0; corner < (1u << n); ++corner) {
    double w = 1.0;
    std::size_t off = 0;
    for (int a = 0; a < n; ++a) {
      if (corner & (1u << a)) {
        w *= frac[a];
        off += g.stride(a);
      } else {
        w *= 1.0 - frac[a];
      }
    }
    if (w != 0.0) acc += w * val[base + off];
  }
  return acc;
}

void write_field(std::ostream& out, const ScalarField& u) {
  const Grid& g = u.grid();
  const int n = g.dim();
  std::string header = fmt::format("{}", n);
  for (int a = 0; a < n; ++a) header += fmt::format(" {:.17g}", g.spacing(a));
  for (int a = 0; a < n; ++a) header += fmt::format(" {:.17g}", g.origin(a));
  for (int a = 0; a < n; ++a) header += fmt::format(" {}", g.extent(a));
  header += fmt::format(" {}\n", g.split());
  out << header;
  for (double v : u.values()) out << fmt::format("{:.17g}\n", v);
}

ScalarField read_field(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("field file: missing header");
  std::replace(line.begin(), line.end(), ',', ' ');
  std::istringstream hs(line);
  int n = 0;
  if (!(hs >> n) || n < 1 || n > kMaxDim) throw Error("field file: bad dimension");
  Vec h(n), o(n);
  std::array<std::size_t, 3> ext{1, 1, 1};
  for (int a = 0; a < n; ++a) hs >> h[a];
  for (int a = 0; a < n; ++a) hs >> o[a];
  for (int a = 0; a < n; ++a) hs >> ext[a];
  int k = 0;
  if (!(hs >> k)) throw Error("field file: truncated header");
  Grid grid(n, o, h, ext, k);
  std::vector<double> values;
  values.reserve(grid.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) throw Error("field file: bad value '" + line + "'");
    values.push_back(v);
  }
  return {grid, std::move(values)};
}

void save_field(const std::string& path, const ScalarField& u) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_field(out, u);
}

ScalarField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  return read_field(in);
}

}  // namespace slidekit
