#include "anisop/singular.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anisop {

// ---------------------------------------------------------------------------
// coefficient descriptors

FieldDesc FieldDesc::constant(double c) {
  FieldDesc d;
  d.kind = Kind::Constant;
  d.value = c;
  return d;
}

FieldDesc FieldDesc::dist_power(double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("dist_power: sigma >= 0");
  FieldDesc d;
  d.kind = Kind::DistPower;
  d.sigma = sigma;
  return d;
}

FieldDesc FieldDesc::tabulated(std::vector<double> values) {
  FieldDesc d;
  d.kind = Kind::Table;
  d.table = std::move(values);
  return d;
}

std::vector<double> FieldDesc::evaluate(const Grid& grid) const {
  const int n = grid.n_vertices();
  std::vector<double> out(n, 0.0);
  switch (kind) {
    case Kind::Constant:
      std::fill(out.begin(), out.end(), value);
      break;
    case Kind::DistPower: {
      const DiscreteField d = distance_field(grid);
      for (int i = 0; i < n; ++i)
        out[i] = sigma == 0.0 ? 1.0
                 : d[i] > 0.0 ? std::pow(d[i], -sigma)
                              : std::numeric_limits<double>::infinity();
      break;
    }
    case Kind::Table:
      if (static_cast<int>(table.size()) != n)
        throw std::invalid_argument("FieldDesc: table size != vertex count");
      out = table;
      break;
  }
  return out;
}

bool FieldDesc::is_zero() const {
  switch (kind) {
    case Kind::Constant:
      return value == 0.0;
    case Kind::DistPower:
      return false;
    case Kind::Table:
      return std::all_of(table.begin(), table.end(),
                         [](double v) { return v == 0.0; });
  }
  return false;
}

nlohmann::json FieldDesc::to_json() const {
  switch (kind) {
    case Kind::Constant:
      return {{"kind", "constant"}, {"value", value}};
    case Kind::DistPower:
      return {{"kind", "dist_power"}, {"sigma", sigma}};
    case Kind::Table:
      return {{"kind", "table"}, {"values", table}};
  }
  return {};
}

FieldDesc FieldDesc::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return constant(j.at("value").get<double>());
  if (kind == "dist_power") return dist_power(j.at("sigma").get<double>());
  if (kind == "table")
    return tabulated(j.at("values").get<std::vector<double>>());
  throw std::invalid_argument("FieldDesc: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// problem spec

namespace {
bool nonnegative(const FieldDesc& d) {
  if (d.kind == FieldDesc::Kind::Constant) return d.value >= 0.0;
  if (d.kind == FieldDesc::Kind::Table)
    return std::all_of(d.table.begin(), d.table.end(),
                       [](double v) { return v >= 0.0; });
  return true;  // dist_power is positive by construction
}
}  // namespace

void ProblemSpec::validate() const {
  if (!(p > 1.0)) throw std::invalid_argument("ProblemSpec: p must be > 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("ProblemSpec: gamma must be > 0");
  if (theta < 0.0 || !(theta < p - 1.0))
    throw std::invalid_argument("ProblemSpec: need 0 <= theta < p-1");
  if (norm.dim() != domain.dim)
    throw std::invalid_argument("ProblemSpec: norm dimension != domain dimension");
  if (resolution < 1) throw std::invalid_argument("ProblemSpec: resolution >= 1");
  if (!nonnegative(f) || !nonnegative(h))
    throw std::invalid_argument("ProblemSpec: f and h must be nonnegative");
}

nlohmann::json ProblemSpec::to_json() const {
  return {{"p", p},           {"gamma", gamma},   {"theta", theta},
          {"norm", norm.to_json()}, {"f", f.to_json()}, {"h", h.to_json()},
          {"domain", domain.to_json()}, {"resolution", resolution}};
}

ProblemSpec ProblemSpec::from_json(const nlohmann::json& j) {
  ProblemSpec s;
  s.p = j.at("p").get<double>();
  s.gamma = j.at("gamma").get<double>();
  s.theta = j.value("theta", 0.0);
  s.norm = FinslerSpec::from_json(j.at("norm"));
  s.f = FieldDesc::from_json(j.at("f"));
  s.h = j.contains("h") ? FieldDesc::from_json(j.at("h"))
                        : FieldDesc::constant(0.0);
  s.domain = Domain::from_json(j.at("domain"));
  s.resolution = j.at("resolution").get<int>();
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// regularized solve

namespace {

struct NodalRhs {
  // truncated coefficients and the lumped weights they act through
  std::vector<double> f_t, h_t, w;
  double cap = 0.0;     // 1/eps
  double eps = 0.0;
  double gamma = 0.0, theta = 0.0;

  double b(int i, double ui) const {
    const double up = std::max(ui, 0.0);
    const double sing = f_t[i] / std::pow(up + eps, gamma);
    const double subl = h_t[i] * std::min(std::pow(up, theta), cap);
    return w[i] * (sing + subl);
  }

  double db(int i, double ui) const {
    if (ui <= 0.0) return 0.0;
    const double up = ui;
    double d = -gamma * f_t[i] / std::pow(up + eps, gamma + 1.0);
    if (theta > 0.0 && std::pow(up, theta) < cap)
      d += h_t[i] * theta * std::pow(up, theta - 1.0);
    return w[i] * d;
  }
};

NodalRhs make_rhs(const ProblemSpec& problem, const Grid& grid, double eps) {
  NodalRhs r;
  r.eps = eps;
  r.cap = 1.0 / eps;
  r.gamma = problem.gamma;
  r.theta = problem.theta;
  r.w = lumped_mass(grid).weights;
  r.f_t = problem.f.evaluate(grid);
  r.h_t = problem.h.evaluate(grid);
  for (auto& v : r.f_t) v = std::clamp(v, -r.cap, r.cap);
  for (auto& v : r.h_t) v = std::clamp(v, -r.cap, r.cap);
  return r;
}

double residual_inf(const DiscreteField& G, const std::vector<int>& interior) {
  double m = 0.0;
  for (int i : interior) m = std::max(m, std::abs(G[i]));
  return m;
}

double residual_2(const DiscreteField& G, const std::vector<int>& interior) {
  double s = 0.0;
  for (int i : interior) s += G[i] * G[i];
  return std::sqrt(s);
}

DiscreteField assemble_G(const Grid& grid, const ProblemSpec& pr,
                         const NodalRhs& rhs, const DiscreteField& u) {
  DiscreteField G = energy_gradient(grid, pr.norm, pr.p, u);
  for (int i = 0; i < G.size(); ++i)
    if (!grid.boundary_mask[i]) G[i] -= rhs.b(i, u[i]);
  return G;
}

double rhs_scale(const Grid& grid, const NodalRhs& rhs, const DiscreteField& u) {
  double s = 1.0;
  for (int i = 0; i < u.size(); ++i)
    if (!grid.boundary_mask[i]) s = std::max(s, std::abs(rhs.b(i, u[i])));
  return s;
}

}  // namespace

SolveReport solve_regularized(const ProblemSpec& problem, const Grid& grid,
                              double epsilon, const DiscreteField* warm_start,
                              const SolveOptions& options) {
  problem.validate();
  if (!(epsilon > 0.0))
    throw std::invalid_argument("solve_regularized: epsilon must be > 0");
  const auto interior = grid.interior_indices();
  const int m = static_cast<int>(interior.size());
  if (m < 1) throw std::invalid_argument("solve_regularized: no interior nodes");

  SolveReport rep;
  rep.epsilon = epsilon;
  rep.warned_f_zero = problem.f.is_zero();

  DiscreteField u = warm_start ? *warm_start : distance_field(grid);
  if (warm_start) {
    if (warm_start->grid != &grid)
      throw std::invalid_argument("solve_regularized: warm start on wrong grid");
    for (int i : interior)
      if (!((*warm_start)[i] > 0.0))
        throw std::invalid_argument(
            "solve_regularized: warm start must be positive on the interior");
  }
  for (int i = 0; i < u.size(); ++i)
    if (grid.boundary_mask[i]) u[i] = 0.0;

  const NodalRhs rhs = make_rhs(problem, grid, epsilon);

  if (options.picard) {
    // energy-descent fixed point: minimize E(v) - <b(u_k), v>, then damp
    for (int it = 0; it < options.picard_max_iter; ++it) {
      DiscreteField G = assemble_G(grid, problem, rhs, u);
      rep.newton_iters = it;
      if (residual_inf(G, interior) <= options.tol * rhs_scale(grid, rhs, u)) {
        rep.converged = true;
        break;
      }
      Vec lin(m);
      for (int k = 0; k < m; ++k) lin[k] = rhs.b(interior[k], u[interior[k]]);
      // inner convex minimization by damped Newton
      DiscreteField v = u;
      double prev_rinf = std::numeric_limits<double>::infinity();
      for (int in = 0; in < 60; ++in) {
        DiscreteField Gi = energy_gradient(grid, problem.norm, problem.p, v);
        double rinf = 0.0;
        for (int k = 0; k < m; ++k)
          rinf = std::max(rinf, std::abs(Gi[interior[k]] - lin[k]));
        if (rinf <= 1e-12 * std::max(1.0, lin.cwiseAbs().maxCoeff())) break;
        if (rinf >= prev_rinf) break;  // numerical floor
        prev_rinf = rinf;
        SpMat K = flux_jacobian_matrix(grid, problem.norm, problem.p, v, interior);
        Eigen::SparseLU<SpMat> lu(K);
        if (lu.info() != Eigen::Success)
          throw std::runtime_error("picard: factorization failed");
        Vec res(m);
        for (int k = 0; k < m; ++k) res[k] = Gi[interior[k]] - lin[k];
        Vec delta = lu.solve(-res);
        for (int k = 0; k < m; ++k) v[interior[k]] += delta[k];
      }
      for (int k = 0; k < m; ++k) {
        const int i = interior[k];
        u[i] = 0.5 * u[i] + 0.5 * std::max(v[i], epsilon * 1e-6);
      }
    }
  } else {
    double best_res = std::numeric_limits<double>::infinity();
    DiscreteField best = u;
    for (int it = 0; it < options.max_iter; ++it) {
      DiscreteField G = assemble_G(grid, problem, rhs, u);
      const double scale = rhs_scale(grid, rhs, u);
      const double rinf = residual_inf(G, interior);
      if (rinf < best_res) {
        best_res = rinf;
        best = u;
      }
      rep.newton_iters = it;
      if (rinf <= options.tol * scale) {
        rep.converged = true;
        break;
      }

      SpMat K = flux_jacobian_matrix(grid, problem.norm, problem.p, u, interior);
      double maxdiag = 0.0;
      for (int k = 0; k < m; ++k) maxdiag = std::max(maxdiag, K.coeff(k, k));
      std::vector<Eigen::Triplet<double>> diag;
      diag.reserve(m);
      const double mu = 1e-12 * std::max(1.0, maxdiag);
      for (int k = 0; k < m; ++k)
        diag.emplace_back(k, k, mu - rhs.db(interior[k], u[interior[k]]));
      SpMat D(m, m);
      D.setFromTriplets(diag.begin(), diag.end());
      K += D;

      Eigen::SparseLU<SpMat> lu(K);
      if (lu.info() != Eigen::Success)
        throw std::runtime_error("solve_regularized: factorization failed");
      Vec g(m);
      for (int k = 0; k < m; ++k) g[k] = G[interior[k]];
      Vec delta = lu.solve(-g);

      // keep the singular denominator finite: u_i > -eps/2 along the step
      double tmax = 1.0;
      for (int k = 0; k < m; ++k)
        if (delta[k] < 0.0) {
          const double bound = (-0.499 * epsilon - u[interior[k]]) / delta[k];
          if (bound > 0.0) tmax = std::min(tmax, bound);
        }

      const double base = residual_2(G, interior);
      double t = tmax;
      DiscreteField trial = u;
      bool accepted = false;
      for (int ls = 0; ls < 50; ++ls) {
        for (int k = 0; k < m; ++k)
          trial[interior[k]] = u[interior[k]] + t * delta[k];
        DiscreteField Gt = assemble_G(grid, problem, rhs, trial);
        if (residual_2(Gt, interior) <= (1.0 - 1e-4 * t) * base) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      u = trial;
      if (!accepted && t < 1e-14) break;  // stalled
    }
    if (!rep.converged) u = best;
    DiscreteField G = assemble_G(grid, problem, rhs, u);
    if (residual_inf(G, interior) <= options.tol * rhs_scale(grid, rhs, u))
      rep.converged = true;
  }

  DiscreteField Gfin = assemble_G(grid, problem, rhs, u);
  rep.final_residual = residual_inf(Gfin, interior) / rhs_scale(grid, rhs, u);
  rep.u = u;
  rep.energy_value = energy(grid, problem.norm, problem.p, u);
  rep.seminorm = seminorm_p(grid, problem.norm, problem.p, u);
  rep.min_u_interior = u.min_interior();
  if (problem.gamma > 1.0 && rep.min_u_interior > 0.0)
    rep.nehari_defect = nehari_defect(problem, grid, u);
  return rep;
}

nlohmann::json SolveReport::to_json() const {
  nlohmann::json j = {{"epsilon", epsilon},
                      {"newton_iters", newton_iters},
                      {"final_residual", final_residual},
                      {"energy", energy_value},
                      {"seminorm", seminorm},
                      {"min_u_interior", min_u_interior},
                      {"converged", converged}};
  if (nehari_defect) j["nehari_defect"] = *nehari_defect;
  if (warned_f_zero) j["warning"] = "f is identically zero";
  return j;
}

ContinuationReport solve_continuation(const ProblemSpec& problem,
                                      const Grid& grid,
                                      const std::vector<double>& schedule,
                                      const SolveOptions& options) {
  if (schedule.empty())
    throw std::invalid_argument("solve_continuation: empty schedule");
  for (size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0.0))
      throw std::invalid_argument("solve_continuation: epsilons must be > 0");
    if (k > 0 && !(schedule[k] < schedule[k - 1]))
      throw std::invalid_argument(
          "solve_continuation: schedule must be strictly decreasing");
  }

  ContinuationReport rep;
  rep.schedule = schedule;
  const DiscreteField* warm = nullptr;
  for (double eps : schedule) {
    SolveReport step = solve_regularized(problem, grid, eps, warm, options);
    rep.steps.push_back(std::move(step));
    if (!rep.steps.back().converged) {
      rep.aborted = true;
      break;
    }
    warm = &rep.steps.back().u;
  }

  const size_t n = rep.steps.size();
  if (n >= 3) {
    const double s2 = rep.steps[n - 1].seminorm;
    const double s1 = rep.steps[n - 2].seminorm;
    const double s0 = rep.steps[n - 3].seminorm;
    rep.saturation_flag = std::abs(s2 - s1) < 0.01 * s2 &&
                          std::abs(s1 - s0) < 0.01 * s1;
    // least squares of p*log(seminorm) against log(1/eps), last half
    const size_t start = std::min(n / 2, n - 3);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(n - start);
    for (size_t k = start; k < n; ++k) {
      const double x = std::log(1.0 / schedule[k]);
      const double y = problem.p * std::log(rep.steps[k].seminorm);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    rep.growth_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return rep;
}

nlohmann::json ContinuationReport::to_json() const {
  nlohmann::json steps_j = nlohmann::json::array();
  for (const auto& s : steps) steps_j.push_back(s.to_json());
  return {{"schedule", schedule},
          {"steps", steps_j},
          {"saturation_flag", saturation_flag},
          {"growth_exponent", growth_exponent},
          {"aborted", aborted}};
}

// ---------------------------------------------------------------------------
// variational objects (gamma > 1)

EnergyJValue energy_J(const ProblemSpec& problem, const Grid& grid,
                      const DiscreteField& u) {
  if (!(problem.gamma > 1.0))
    throw std::invalid_argument("energy_J: defined for gamma > 1 only");
  const auto w = lumped_mass(grid).weights;
  const auto f = problem.f.evaluate(grid);
  const auto h = problem.h.evaluate(grid);
  EnergyJValue out;
  double sing = 0.0, subl = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    if (grid.boundary_mask[i]) continue;
    if (u[i] < 0.0)
      throw std::domain_error("energy_J: field must be nonnegative");
    if (u[i] == 0.0) {
      if (f[i] > 0.0) {
        out.infinite = true;
        return out;
      }
      continue;
    }
    sing += w[i] * f[i] * std::pow(u[i], 1.0 - problem.gamma);
    subl += w[i] * h[i] * std::pow(u[i], problem.theta + 1.0);
  }
  out.value = energy(grid, problem.norm, problem.p, u) +
              sing / (problem.gamma - 1.0) - subl / (problem.theta + 1.0);
  return out;
}

double nehari_defect(const ProblemSpec& problem, const Grid& grid,
                     const DiscreteField& u) {
  if (!(problem.gamma > 1.0))
    throw std::invalid_argument("nehari_defect: defined for gamma > 1 only");
  const auto w = lumped_mass(grid).weights;
  const auto f = problem.f.evaluate(grid);
  const auto h = problem.h.evaluate(grid);
  double sing = 0.0, subl = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    if (grid.boundary_mask[i]) continue;
    if (u[i] < 0.0)
      throw std::domain_error("nehari_defect: field must be nonnegative");
    if (u[i] == 0.0) {
      if (f[i] > 0.0)
        throw std::domain_error("nehari_defect: u vanishes where f > 0");
      continue;
    }
    sing += w[i] * f[i] * std::pow(u[i], 1.0 - problem.gamma);
    subl += w[i] * h[i] * std::pow(u[i], problem.theta + 1.0);
  }
  return problem.p * energy(grid, problem.norm, problem.p, u) - sing - subl;
}

nlohmann::json CompatibilityReport::to_json() const {
  return {{"value", value},
          {"finite", finite},
          {"strip_eps", strips.eps},
          {"strip_values", strips.values},
          {"increment_ratio", strips.increment_ratio}};
}

CompatibilityReport compatibility_integral(const ProblemSpec& problem,
                                           const Grid& grid,
                                           const DiscreteField& u0) {
  if (!(problem.gamma > 1.0))
    throw std::invalid_argument("compatibility_integral: gamma > 1 required");
  const auto quad = lumped_mass(grid);
  const auto f = problem.f.evaluate(grid);
  CompatibilityReport rep;
  std::vector<double> integrand(grid.n_vertices(), 0.0);
  double total = 0.0;
  bool hit_zero = false;
  for (int i = 0; i < grid.n_vertices(); ++i) {
    if (grid.boundary_mask[i]) continue;
    if (u0[i] < 0.0)
      throw std::domain_error("compatibility_integral: u0 must be >= 0");
    if (u0[i] == 0.0) {
      if (f[i] > 0.0) hit_zero = true;
      continue;
    }
    integrand[i] = f[i] * std::pow(u0[i], 1.0 - problem.gamma);
    total += quad.weights[i] * integrand[i];
  }
  rep.strips = strip_refinement(grid, quad, integrand);
  rep.value = total;
  rep.finite = !hit_zero && rep.strips.saturating;
  if (hit_zero) rep.value = std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace anisop
