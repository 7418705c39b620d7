#include "anisop/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace anisop {

namespace {
void check_field(const Grid& grid, const DiscreteField& u) {
  if (u.grid != &grid || u.size() != grid.n_vertices())
    throw std::invalid_argument("field does not belong to this grid");
}
}  // namespace

Vec cell_gradient(const Grid& grid, const DiscreteField& u, const Cell& c) {
  const int d = grid.domain.dim;
  Vec g = Vec::Zero(d);
  for (int k = 0; k < c.nv; ++k)
    for (int a = 0; a < d; ++a) g[a] += u[c.v[k]] * c.grad[k][a];
  return g;
}

double energy(const Grid& grid, const FinslerSpec& norm, double p,
              const DiscreteField& u) {
  if (!(p > 1.0)) throw std::invalid_argument("energy: p must be > 1");
  check_field(grid, u);
  double E = 0.0;
  for (const auto& c : grid.cells) {
    const double H = norm.evaluate(cell_gradient(grid, u, c));
    E += c.measure * std::pow(H, p);
  }
  return E / p;
}

DiscreteField energy_gradient(const Grid& grid, const FinslerSpec& norm,
                              double p, const DiscreteField& u) {
  if (!(p > 1.0)) throw std::invalid_argument("energy_gradient: p must be > 1");
  check_field(grid, u);
  const int d = grid.domain.dim;
  DiscreteField G(grid);
  for (const auto& c : grid.cells) {
    Vec a = norm.flux(p, cell_gradient(grid, u, c));
    for (int k = 0; k < c.nv; ++k) {
      double dot = 0.0;
      for (int ax = 0; ax < d; ++ax) dot += a[ax] * c.grad[k][ax];
      G[c.v[k]] += c.measure * dot;
    }
  }
  for (int i = 0; i < G.size(); ++i)
    if (grid.boundary_mask[i]) G[i] = 0.0;
  return G;
}

double seminorm_p(const Grid& grid, const FinslerSpec& norm, double p,
                  const DiscreteField& u) {
  return std::pow(p * energy(grid, norm, p, u), 1.0 / p);
}

double lp_norm(const Grid& grid, const QuadratureRule& quad, double p,
               const DiscreteField& u) {
  check_field(grid, u);
  double s = 0.0;
  for (int i = 0; i < u.size(); ++i)
    s += quad.weights[i] * std::pow(std::abs(u[i]), p);
  return std::pow(s, 1.0 / p);
}

SpMat flux_jacobian_matrix(const Grid& grid, const FinslerSpec& norm, double p,
                           const DiscreteField& u,
                           const std::vector<int>& interior, double clamp) {
  check_field(grid, u);
  const int d = grid.domain.dim;
  std::vector<int> pos(grid.n_vertices(), -1);
  for (int k = 0; k < static_cast<int>(interior.size()); ++k)
    pos[interior[k]] = k;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(grid.cells.size() * 9);
  for (const auto& c : grid.cells) {
    Vec g = cell_gradient(grid, u, c);
    if (g.norm() < clamp) {
      if (g.norm() == 0.0) {
        g = Vec::Zero(d);
        g[0] = clamp;
      } else {
        g *= clamp / g.norm();
      }
    }
    Mat J = norm.flux_jacobian(p, g);
    for (int a = 0; a < c.nv; ++a) {
      const int ia = pos[c.v[a]];
      if (ia < 0) continue;
      Vec ga(d);
      for (int ax = 0; ax < d; ++ax) ga[ax] = c.grad[a][ax];
      for (int b = 0; b < c.nv; ++b) {
        const int ib = pos[c.v[b]];
        if (ib < 0) continue;
        Vec gb(d);
        for (int ax = 0; ax < d; ++ax) gb[ax] = c.grad[b][ax];
        trips.emplace_back(ia, ib, c.measure * ga.dot(J * gb));
      }
    }
  }
  SpMat K(interior.size(), interior.size());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

SpMat p2_stiffness_matrix(const Grid& grid, const std::vector<int>& interior) {
  const int d = grid.domain.dim;
  std::vector<int> pos(grid.n_vertices(), -1);
  for (int k = 0; k < static_cast<int>(interior.size()); ++k)
    pos[interior[k]] = k;
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& c : grid.cells)
    for (int a = 0; a < c.nv; ++a) {
      const int ia = pos[c.v[a]];
      if (ia < 0) continue;
      for (int b = 0; b < c.nv; ++b) {
        const int ib = pos[c.v[b]];
        if (ib < 0) continue;
        double dot = 0.0;
        for (int ax = 0; ax < d; ++ax) dot += c.grad[a][ax] * c.grad[b][ax];
        trips.emplace_back(ia, ib, c.measure * dot);
      }
    }
  SpMat K(interior.size(), interior.size());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

}  // namespace anisop
