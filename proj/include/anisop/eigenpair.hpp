#pragma once

#include <cstdint>

#include "anisop/fem.hpp"

namespace anisop {

/// First Dirichlet eigenpair of the anisotropic p-Laplacian:
/// energy_gradient(phi1) = lambda1 * w_i * phi1_i^{p-1} at interior nodes,
/// with lumped L^p normalization ||phi1||_p = 1.
struct EigenReport {
  double lambda1 = 0.0;
  DiscreteField phi1;
  double rayleigh_residual = 0.0;  // relative nodal residual of the eigen system
  int iterations = 0;

  nlohmann::json to_json() const;
};

/// Inverse-power iteration with damped-Newton inner solves. The iterate u_k
/// is normalized in the lumped L^p norm; the inner step minimizes
///   energy(v) - lambda_k sum_i w_i |u_k|^{p-2} u_k v_i
/// (strictly convex). Stops when the eigenvalue is stationary to `tol`
/// relative and the nodal eigen-residual is below 10*tol relative.
EigenReport first_eigenpair(const Grid& grid, const FinslerSpec& norm, double p,
                            double tol = 1e-8, int max_iter = 200);

/// p * energy(u) / ||u||_p^p ; >= lambda1 for admissible u.
double rayleigh_quotient(const Grid& grid, const FinslerSpec& norm, double p,
                         const DiscreteField& u);

/// Classification + evidence for integrals of powers of a field that decays
/// linearly at the boundary (Hopf behavior): finite iff r > -1. The strip
/// estimates integrate over {d > eps_j} for halving eps_j; decreasing
/// increments under refinement confirm a finite value, growing ones a
/// divergent one.
struct PowerIntegralReport {
  double r = 0.0;
  bool finite = false;         // analytic verdict r > -1
  double estimate = 0.0;       // last strip value (meaningless when divergent)
  std::vector<double> strip_eps;
  std::vector<double> strip_values;
  double increment_ratio = 0.0;  // last-increment / previous-increment
  bool saturating = false;

  nlohmann::json to_json() const;
};

PowerIntegralReport power_integral(const Grid& grid, const QuadratureRule& quad,
                                   const DiscreteField& phi1, double r);

/// Shared strip-refinement protocol for a nodal integrand: values of
/// sum_{d(x_i) > eps_j} w_i * g_i over halving strips.
struct StripEstimate {
  std::vector<double> eps;
  std::vector<double> values;
  double increment_ratio = 0.0;
  bool saturating = false;
};

StripEstimate strip_refinement(const Grid& grid, const QuadratureRule& quad,
                               const std::vector<double>& integrand);

}  // namespace anisop
