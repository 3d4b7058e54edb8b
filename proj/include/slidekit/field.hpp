#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "slidekit/types.hpp"

namespace slidekit {

// Rectangular node lattice over a truncation of Omega = U x R^{n-k+1}.
// Axes are zero-based; axes with index >= k-1 are translation invariant,
// the first k-1 axes discretize the bounded factor U.
class Grid {
 public:
  Grid(int dim, const Vec& origin, const Vec& spacing, const std::array<std::size_t, 3>& extent,
       int split = 1);

  // Nodes lower, lower+h, ..., upper on every axis.
  static Grid uniform(int dim, double lower, double upper, double h, int split = 1);
  // Nodes at the centers of the cells partitioning [lower, upper] on every axis.
  static Grid cell_centered(int dim, double lower, double upper, double h, int split = 1);

  int dim() const { return dim_; }
  int split() const { return split_; }
  std::size_t size() const { return size_; }
  std::size_t extent(int axis) const { return extent_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double origin(int axis) const { return origin_[axis]; }
  double lower(int axis) const { return origin_[axis]; }
  double upper(int axis) const {
    return origin_[axis] + spacing_[axis] * static_cast<double>(extent_[axis] - 1);
  }
  std::size_t stride(int axis) const { return stride_[axis]; }
  double cell_volume() const;
  double max_spacing() const;
  bool translation_invariant(int axis) const { return axis + 1 >= split_; }

  std::array<std::size_t, 3> multi_index(std::size_t flat) const;
  std::size_t flat_index(const std::array<std::size_t, 3>& idx) const;
  double coordinate(std::size_t flat, int axis) const;
  Vec position(std::size_t flat) const;
  bool contains(const Vec& x, double slack = 1e-12) const;

  bool operator==(const Grid& other) const;

 private:
  int dim_;
  int split_;
  std::array<double, 3> origin_{};
  std::array<double, 3> spacing_{};
  std::array<std::size_t, 3> extent_{1, 1, 1};
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::size_t size_ = 1;
};

// Node values of a scalar function, row-major (last axis fastest).
class ScalarField {
 public:
  ScalarField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  ScalarField with_values(std::vector<double> values) const { return {grid_, std::move(values)}; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

// n components per node, interleaved.
class VectorField {
 public:
  VectorField(Grid grid, std::vector<double> components);

  const Grid& grid() const { return grid_; }
  Vec at(std::size_t node) const;
  double component(std::size_t node, int axis) const {
    return data_[node * static_cast<std::size_t>(grid_.dim()) + static_cast<std::size_t>(axis)];
  }
  const std::vector<double>& data() const { return data_; }

 private:
  Grid grid_;
  std::vector<double> data_;
};

ScalarField from_function(const Grid& grid, const std::function<double(const Vec&)>& f);

// Centered differences inside, one-sided second order on the faces.
VectorField gradient(const ScalarField& u);

ScalarField pointwise_max(const ScalarField& u, const ScalarField& v);
ScalarField pointwise_min(const ScalarField& u, const ScalarField& v);

// u + scale * v on a shared grid.
ScalarField add(const ScalarField& u, const ScalarField& v, double scale = 1.0);

// Multilinear interpolation; throws for points outside the node hull.
double sample(const ScalarField& u, const Vec& x);

// Text format: header "n h.. origin.. extent.. k", then one value per line.
void write_field(std::ostream& out, const ScalarField& u);
ScalarField read_field(std::istream& in);
void save_field(const std::string& path, const ScalarField& u);
ScalarField load_field(const std::string& path);

}  // namespace slidekit
