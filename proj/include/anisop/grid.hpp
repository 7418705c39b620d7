#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

namespace anisop {

/// Interval [0,L] or rectangle [0,L1]x[0,L2].
struct Domain {
  int dim = 1;
  std::array<double, 2> lengths = {1.0, 1.0};

  static Domain interval(double L) { return {1, {L, 0.0}}; }
  static Domain rectangle(double L1, double L2) { return {2, {L1, L2}}; }

  double measure() const { return dim == 1 ? lengths[0] : lengths[0] * lengths[1]; }

  nlohmann::json to_json() const;
  static Domain from_json(const nlohmann::json& j);
};

/// One simplex: vertex ids, measure, and the (constant) gradients of its hat
/// functions. 1D cells use nv = 2 and the x-component only.
struct Cell {
  std::array<int, 3> v = {-1, -1, -1};
  int nv = 0;
  double measure = 0.0;
  std::array<std::array<double, 2>, 3> grad{};
};

/// Structured triangulation of a rectangle (fixed diagonal, lower-left to
/// upper-right) or uniform subdivision of an interval. resolution = cells per
/// axis.
struct Grid {
  Domain domain;
  int resolution = 0;
  std::vector<std::array<double, 2>> vertices;
  std::vector<Cell> cells;
  std::vector<bool> boundary_mask;
  double h = 0.0;  // max cell diameter

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_interior() const;
  std::vector<int> interior_indices() const;

  nlohmann::json structure_json() const;
};

Grid build_grid(const Domain& domain, int resolution);

/// Nodal P1 field on a grid; Dirichlet data lives in the boundary entries.
struct DiscreteField {
  const Grid* grid = nullptr;
  std::vector<double> values;

  DiscreteField() = default;
  explicit DiscreteField(const Grid& g, double fill = 0.0)
      : grid(&g), values(g.vertices.size(), fill) {}

  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
  int size() const { return static_cast<int>(values.size()); }

  double max_abs() const;
  double min_interior() const;

  void write_csv(const std::string& path) const;
};

/// Lumped nodal quadrature: w_i = sum_{T ni i} |T|/(d+1); sum w_i = |Omega|.
struct QuadratureRule {
  std::vector<double> weights;
};

QuadratureRule lumped_mass(const Grid& grid);

/// Exact Euclidean distance to the boundary of the rectangle/interval.
DiscreteField distance_field(const Grid& grid);

double distance_to_boundary(const Grid& grid, const std::array<double, 2>& x);
double distance_to_corners(const Grid& grid, const std::array<double, 2>& x);

}  // namespace anisop
