#pragma once

#include <Eigen/Sparse>

#include "anisop/finsler.hpp"
#include "anisop/grid.hpp"

namespace anisop {

using SpMat = Eigen::SparseMatrix<double>;

/// Gradient of the P1 field on one cell (constant there).
Vec cell_gradient(const Grid& grid, const DiscreteField& u, const Cell& c);

/// (1/p) sum_T |T| H^p(grad u|_T); exact for P1 fields.
double energy(const Grid& grid, const FinslerSpec& norm, double p,
              const DiscreteField& u);

/// Exact nodal gradient of `energy`; boundary entries are zero.
DiscreteField energy_gradient(const Grid& grid, const FinslerSpec& norm,
                              double p, const DiscreteField& u);

/// ( sum_T |T| H^p(grad u|_T) )^{1/p}
double seminorm_p(const Grid& grid, const FinslerSpec& norm, double p,
                  const DiscreteField& u);

/// ( sum_i w_i |u_i|^p )^{1/p}
double lp_norm(const Grid& grid, const QuadratureRule& quad, double p,
               const DiscreteField& u);

/// Interior-block linearization of `energy_gradient`:
///   K_ij = sum_T |T| grad(lambda_i)' [da/dxi](grad u|_T) grad(lambda_j)
/// Cell gradients with |grad u| < clamp are evaluated at norm `clamp`
/// (degenerate/singular p-Laplacian guard; set below discretization error).
/// Indices follow `interior`: row/col k corresponds to node interior[k].
SpMat flux_jacobian_matrix(const Grid& grid, const FinslerSpec& norm, double p,
                           const DiscreteField& u,
                           const std::vector<int>& interior,
                           double clamp = 1e-10);

/// Interior-block P1 stiffness for the euclidean p=2 operator (independent
/// assembly path used as an oracle against energy_gradient).
SpMat p2_stiffness_matrix(const Grid& grid, const std::vector<int>& interior);

}  // namespace anisop
