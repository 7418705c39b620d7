#include "anisop/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "anisop/io.hpp"

namespace anisop {

nlohmann::json Domain::to_json() const {
  if (dim == 1) return {{"kind", "interval"}, {"lengths", {lengths[0]}}};
  return {{"kind", "rectangle"}, {"lengths", {lengths[0], lengths[1]}}};
}

Domain Domain::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto len = j.at("lengths").get<std::vector<double>>();
  if (kind == "interval") {
    if (len.size() != 1) throw std::invalid_argument("interval needs 1 length");
    return interval(len[0]);
  }
  if (kind == "rectangle") {
    if (len.size() != 2) throw std::invalid_argument("rectangle needs 2 lengths");
    return rectangle(len[0], len[1]);
  }
  throw std::invalid_argument("Domain: unknown kind '" + kind + "'");
}

int Grid::n_interior() const {
  int n = 0;
  for (bool b : boundary_mask)
    if (!b) ++n;
  return n;
}

std::vector<int> Grid::interior_indices() const {
  std::vector<int> idx;
  idx.reserve(vertices.size());
  for (int i = 0; i < n_vertices(); ++i)
    if (!boundary_mask[i]) idx.push_back(i);
  return idx;
}

nlohmann::json Grid::structure_json() const {
  nlohmann::json j;
  j["domain"] = domain.to_json();
  j["resolution"] = resolution;
  j["n_vertices"] = n_vertices();
  j["n_cells"] = cells.size();
  j["h"] = h;
  return j;
}

Grid build_grid(const Domain& domain, int resolution) {
  if (resolution < 1) throw std::invalid_argument("build_grid: resolution >= 1");
  for (int a = 0; a < domain.dim; ++a)
    if (!(domain.lengths[a] > 0.0))
      throw std::invalid_argument("build_grid: lengths must be positive");

  Grid g;
  g.domain = domain;
  g.resolution = resolution;
  const int n = resolution;

  if (domain.dim == 1) {
    const double L = domain.lengths[0];
    const double dx = L / n;
    g.vertices.resize(n + 1);
    g.boundary_mask.assign(n + 1, false);
    for (int i = 0; i <= n; ++i) g.vertices[i] = {i * dx, 0.0};
    g.boundary_mask[0] = g.boundary_mask[n] = true;
    g.cells.resize(n);
    for (int i = 0; i < n; ++i) {
      Cell c;
      c.nv = 2;
      c.v = {i, i + 1, -1};
      c.measure = dx;
      c.grad[0] = {-1.0 / dx, 0.0};
      c.grad[1] = {1.0 / dx, 0.0};
      g.cells[i] = c;
    }
    g.h = dx;
    return g;
  }

  const double L1 = domain.lengths[0], L2 = domain.lengths[1];
  const double dx = L1 / n, dy = L2 / n;
  g.vertices.resize((n + 1) * (n + 1));
  g.boundary_mask.assign((n + 1) * (n + 1), false);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const int id = j * (n + 1) + i;
      g.vertices[id] = {i * dx, j * dy};
      if (i == 0 || i == n || j == 0 || j == n) g.boundary_mask[id] = true;
    }
  g.cells.reserve(2 * n * n);
  auto add_tri = [&](int a, int b, int c) {
    Cell cell;
    cell.nv = 3;
    cell.v = {a, b, c};
    const auto &p0 = g.vertices[a], &p1 = g.vertices[b], &p2 = g.vertices[c];
    const double d1x = p1[0] - p0[0], d1y = p1[1] - p0[1];
    const double d2x = p2[0] - p0[0], d2y = p2[1] - p0[1];
    const double det = d1x * d2y - d1y * d2x;
    cell.measure = det / 2.0;
    if (!(cell.measure > 0.0))
      throw std::runtime_error("build_grid: nonpositive cell measure");
    cell.grad[1] = {d2y / det, -d2x / det};
    cell.grad[2] = {-d1y / det, d1x / det};
    cell.grad[0] = {-cell.grad[1][0] - cell.grad[2][0],
                    -cell.grad[1][1] - cell.grad[2][1]};
    g.cells.push_back(cell);
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int v00 = j * (n + 1) + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + (n + 1);
      const int v11 = v01 + 1;
      add_tri(v00, v10, v11);  // diagonal v00 -> v11
      add_tri(v00, v11, v01);
    }
  g.h = std::sqrt(dx * dx + dy * dy);
  return g;
}

double DiscreteField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double DiscreteField::min_interior() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i)
    if (!grid->boundary_mask[i]) m = std::min(m, values[i]);
  return m;
}

void DiscreteField::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  if (grid->domain.dim == 1) {
    out << "x,value\n";
    for (int i = 0; i < size(); ++i)
      out << fmt_g17(grid->vertices[i][0]) << ',' << fmt_g17(values[i]) << '\n';
  } else {
    out << "x,y,value\n";
    for (int i = 0; i < size(); ++i)
      out << fmt_g17(grid->vertices[i][0]) << ',' << fmt_g17(grid->vertices[i][1])
          << ',' << fmt_g17(values[i]) << '\n';
  }
}

QuadratureRule lumped_mass(const Grid& grid) {
  QuadratureRule q;
  q.weights.assign(grid.vertices.size(), 0.0);
  for (const auto& c : grid.cells)
    for (int k = 0; k < c.nv; ++k) q.weights[c.v[k]] += c.measure / c.nv;
  return q;
}

double distance_to_boundary(const Grid& grid, const std::array<double, 2>& x) {
  const auto& L = grid.domain.lengths;
  double d = std::min(x[0], L[0] - x[0]);
  if (grid.domain.dim == 2) d = std::min({d, x[1], L[1] - x[1]});
  return std::max(d, 0.0);
}

double distance_to_corners(const Grid& grid, const std::array<double, 2>& x) {
  if (grid.domain.dim == 1) {
    // "corners" of an interval are its endpoints
    return std::min(x[0], grid.domain.lengths[0] - x[0]);
  }
  const auto& L = grid.domain.lengths;
  double best = std::numeric_limits<double>::infinity();
  for (double cx : {0.0, L[0]})
    for (double cy : {0.0, L[1]}) {
      const double dx = x[0] - cx, dy = x[1] - cy;
      best = std::min(best, std::sqrt(dx * dx + dy * dy));
    }
  return best;
}

DiscreteField distance_field(const Grid& grid) {
  DiscreteField d(grid);
  for (int i = 0; i < d.size(); ++i)
    d[i] = distance_to_boundary(grid, grid.vertices[i]);
  return d;
}

}  // namespace anisop
