#include "anisop/eigenpair.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace anisop {

nlohmann::json EigenReport::to_json() const {
  return {{"lambda1", lambda1},
          {"rayleigh_residual", rayleigh_residual},
          {"iterations", iterations}};
}

namespace {

// residual of the inner convex problem: energy_gradient(v) - rhs (interior)
double inner_residual_norm(const DiscreteField& G, const Vec& rhs,
                           const std::vector<int>& interior) {
  double m = 0.0;
  for (size_t k = 0; k < interior.size(); ++k)
    m = std::max(m, std::abs(G[interior[k]] - rhs[k]));
  return m;
}

}  // namespace

EigenReport first_eigenpair(const Grid& grid, const FinslerSpec& norm, double p,
                            double tol, int max_iter) {
  if (!(p > 1.0)) throw std::invalid_argument("first_eigenpair: p must be > 1");
  if (!(tol > 0.0)) throw std::invalid_argument("first_eigenpair: tol must be > 0");
  const auto interior = grid.interior_indices();
  const int m = static_cast<int>(interior.size());
  if (m < 2)
    throw std::invalid_argument("first_eigenpair: grid too coarse (< 2 interior nodes)");
  const auto quad = lumped_mass(grid);

  // positive start with the right boundary decay
  DiscreteField u = distance_field(grid);
  {
    const double nrm = lp_norm(grid, quad, p, u);
    for (auto& v : u.values) v /= nrm;
  }
  double lambda = p * energy(grid, norm, p, u);  // ||u||_p = 1

  DiscreteField phi = u;
  double rel_residual = std::numeric_limits<double>::infinity();
  int outer = 0;
  for (outer = 1; outer <= max_iter; ++outer) {
    // rhs_i = lambda * w_i * |u_i|^{p-2} u_i
    Vec rhs(m);
    double rhs_scale = 0.0;
    for (int k = 0; k < m; ++k) {
      const int i = interior[k];
      const double ui = u[i];
      rhs[k] = lambda * quad.weights[i] * std::pow(std::abs(ui), p - 2.0) * ui;
      rhs_scale = std::max(rhs_scale, std::abs(rhs[k]));
    }

    // damped Newton on the strictly convex inner problem, warm start at u.
    // The outer loop only needs ~1e-7 relative accuracy; 1e-10 relative here
    // keeps the inner residual well clear of the factorization floor. The
    // Jacobian clamp adapts to the iterate's gradient scale: for p < 2 a
    // fixed tiny clamp blows the diagonal up at degenerate cells and stalls
    // the step there (the residual stays exact; only the step metric changes).
    DiscreteField v = u;
    const double inner_tol = 1e-10 * std::max(rhs_scale, 1e-300);
    double prev_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
      DiscreteField G = energy_gradient(grid, norm, p, v);
      const double res_now = inner_residual_norm(G, rhs, interior);
      if (res_now <= inner_tol) break;
      if (res_now >= prev_res) break;  // numerical floor
      prev_res = res_now;
      double gmax = 0.0;
      for (const auto& c : grid.cells)
        gmax = std::max(gmax, cell_gradient(grid, v, c).norm());
      const double clamp = std::max(1e-10, 1e-2 * gmax);
      SpMat K = flux_jacobian_matrix(grid, norm, p, v, interior, clamp);
      double maxdiag = 0.0;
      for (int k = 0; k < m; ++k) maxdiag = std::max(maxdiag, K.coeff(k, k));
      const double mu = 1e-12 * std::max(1.0, maxdiag);
      SpMat I(m, m);
      I.setIdentity();
      K += mu * I;
      Eigen::SparseLU<SpMat> lu(K);
      if (lu.info() != Eigen::Success)
        throw std::runtime_error("first_eigenpair: inner factorization failed");
      Vec res(m);
      for (int k = 0; k < m; ++k) res[k] = G[interior[k]] - rhs[k];
      Vec delta = lu.solve(-res);

      // Armijo on the convex objective energy(v) - rhs.v
      auto objective = [&](const DiscreteField& w) {
        double lin = 0.0;
        for (int k = 0; k < m; ++k) lin += rhs[k] * w[interior[k]];
        return energy(grid, norm, p, w) - lin;
      };
      const double base = objective(v);
      const double slope = res.dot(delta);  // = -res'K^{-1}res <= 0
      double t = 1.0;
      DiscreteField w = v;
      for (int ls = 0; ls < 60; ++ls) {
        for (int k = 0; k < m; ++k) w[interior[k]] = v[interior[k]] + t * delta[k];
        if (objective(w) <= base + 1e-4 * t * slope) break;
        t *= 0.5;
      }
      v = w;
    }

    const double nrm = lp_norm(grid, quad, p, v);
    if (!(nrm > 0.0))
      throw std::runtime_error("first_eigenpair: iterate collapsed to zero");
    for (auto& x : v.values) x /= nrm;
    const double lambda_next = p * energy(grid, norm, p, v);

    // nodal eigen-residual, relative
    DiscreteField G = energy_gradient(grid, norm, p, v);
    double rn = 0.0, rd = 0.0;
    for (int k = 0; k < m; ++k) {
      const int i = interior[k];
      const double mass =
          lambda_next * quad.weights[i] * std::pow(std::abs(v[i]), p - 2.0) * v[i];
      const double r = G[i] - mass;
      rn += r * r;
      rd += mass * mass;
    }
    rel_residual = std::sqrt(rn / std::max(rd, 1e-300));

    const bool lambda_settled = std::abs(lambda_next - lambda) <= tol * lambda;
    phi = v;
    u = v;
    lambda = lambda_next;
    if (lambda_settled && rel_residual <= 10.0 * tol) break;
  }
  if (outer > max_iter)
    throw std::runtime_error("first_eigenpair: no convergence within max_iter");

  EigenReport rep;
  rep.lambda1 = lambda;
  rep.phi1 = phi;
  rep.rayleigh_residual = rel_residual;
  rep.iterations = outer;
  return rep;
}

double rayleigh_quotient(const Grid& grid, const FinslerSpec& norm, double p,
                         const DiscreteField& u) {
  const auto quad = lumped_mass(grid);
  const double den = std::pow(lp_norm(grid, quad, p, u), p);
  if (!(den > 0.0))
    throw std::invalid_argument("rayleigh_quotient: field is identically zero");
  return p * energy(grid, norm, p, u) / den;
}

StripEstimate strip_refinement(const Grid& grid, const QuadratureRule& quad,
                               const std::vector<double>& integrand) {
  StripEstimate est;
  const double dmax = grid.domain.dim == 1
                          ? grid.domain.lengths[0] / 2.0
                          : std::min(grid.domain.lengths[0], grid.domain.lengths[1]) / 2.0;
  double eps = dmax / 2.0;
  const DiscreteField d = distance_field(grid);
  while (eps >= grid.h) {
    double I = 0.0;
    for (int i = 0; i < grid.n_vertices(); ++i)
      if (d[i] > eps) I += quad.weights[i] * integrand[i];
    est.eps.push_back(eps);
    est.values.push_back(I);
    eps /= 2.0;
  }
  // increments scale like 2^{-(1+s)} per halving for an integrand ~ d^s:
  // below 1 the strip values saturate, above 1 they diverge. A geometric
  // mean over the last few ratios smooths nodal granularity at eps ~ h.
  const size_t n = est.values.size();
  if (n >= 3) {
    std::vector<double> incr;
    for (size_t j = 1; j < n; ++j) incr.push_back(est.values[j] - est.values[j - 1]);
    double logsum = 0.0;
    int count = 0;
    for (size_t j = incr.size() >= 4 ? incr.size() - 3 : 1; j < incr.size(); ++j) {
      if (incr[j - 1] == 0.0 || incr[j] == 0.0) continue;
      logsum += std::log(std::abs(incr[j] / incr[j - 1]));
      ++count;
    }
    est.increment_ratio = count > 0 ? std::exp(logsum / count) : 0.0;
    est.saturating = est.increment_ratio <= 0.95;
  }
  return est;
}

nlohmann::json PowerIntegralReport::to_json() const {
  return {{"r", r},
          {"finite", finite},
          {"estimate", estimate},
          {"strip_eps", strip_eps},
          {"strip_values", strip_values},
          {"increment_ratio", increment_ratio},
          {"saturating", saturating}};
}

PowerIntegralReport power_integral(const Grid& grid, const QuadratureRule& quad,
                                   const DiscreteField& phi1, double r) {
  PowerIntegralReport rep;
  rep.r = r;
  rep.finite = r > -1.0;  // linear (Hopf) boundary decay of phi1
  std::vector<double> integrand(grid.n_vertices(), 0.0);
  for (int i = 0; i < grid.n_vertices(); ++i) {
    const double v = phi1[i];
    integrand[i] = v > 0.0 ? std::pow(v, r) : (r >= 0.0 ? std::pow(v, r) : 0.0);
  }
  const auto est = strip_refinement(grid, quad, integrand);
  rep.strip_eps = est.eps;
  rep.strip_values = est.values;
  rep.increment_ratio = est.increment_ratio;
  rep.saturating = est.saturating;
  rep.estimate = est.values.empty() ? 0.0 : est.values.back();
  return rep;
}

}  // namespace anisop
