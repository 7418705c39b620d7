#include "anisop/experiments.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "anisop/io.hpp"

namespace anisop {

ExistencePrediction predict_existence(double p, double gamma, double m) {
  if (!(p > 1.0)) throw std::invalid_argument("predict_existence: p must be > 1");
  if (!(gamma > 0.0))
    throw std::invalid_argument("predict_existence: gamma must be > 0");
  if (!(m > 1.0)) throw std::invalid_argument("predict_existence: m must be > 1");
  const bool m_finite = std::isfinite(m);
  if (m_finite && !(gamma > 1.0))
    throw std::invalid_argument(
        "predict_existence: the finite-m criterion assumes gamma > 1");
  ExistencePrediction out;
  out.threshold = 2.0 + 1.0 / (p - 1.0) - (m_finite ? p / ((p - 1.0) * m) : 0.0);
  out.exists = gamma < out.threshold;  // strict
  return out;
}

BarrierExponent barrier_exponent(double p, double gamma) {
  if (!(p > 1.0)) throw std::invalid_argument("barrier_exponent: p must be > 1");
  if (gamma < 0.0)
    throw std::invalid_argument("barrier_exponent: gamma must be >= 0");
  const double threshold = 2.0 + 1.0 / (p - 1.0);
  if (!(gamma < threshold))
    throw std::domain_error(
        "barrier_exponent: gamma >= 2 + 1/(p-1); the barrier power of phi1 "
        "leaves the energy space");
  BarrierExponent out;
  if (gamma > 1.0) {
    out.regime = BarrierExponent::Regime::GammaGt1;
    out.eta = p / (gamma + p - 1.0);
  } else {
    out.regime = BarrierExponent::Regime::GammaLe1;
    out.lower_exp = 1.0;
    out.t_lo = (p - 1.0) / p;
    out.t_hi = 1.0;
  }
  return out;
}

nlohmann::json BarrierConstants::to_json() const {
  return {{"s1", s1},
          {"s2", s2},
          {"s2_strip", s2_strip},
          {"s2_bulk", s2_bulk},
          {"c_bar", c_bar},
          {"min_strip_gradient", min_strip_gradient},
          {"eta", eta},
          {"g_min", g_min},
          {"g_max", g_max}};
}

BarrierConstants compute_barrier_constants(const EigenReport& eigen,
                                           const ProblemSpec& problem,
                                           const Grid& grid, double strip_eps,
                                           const DiscreteField* u,
                                           double corner_radius) {
  problem.validate();
  if (!(problem.gamma > 1.0))
    throw std::invalid_argument(
        "compute_barrier_constants: constants implemented for gamma > 1");
  if (!(strip_eps > 2.0 * grid.h))
    throw std::invalid_argument(
        "compute_barrier_constants: strip_eps must exceed 2h");
  if (corner_radius < 0.0) corner_radius = 4.0 * grid.h;

  const auto& norm = problem.norm;
  const double p = problem.p;
  const double gamma = problem.gamma;
  const double eta = barrier_exponent(p, gamma).eta;
  const double alpha = norm.alpha_lower_bound();

  // g = f + h u^{gamma+theta}; bounds over interior nodes
  const auto f = problem.f.evaluate(grid);
  const auto hh = problem.h.evaluate(grid);
  const bool need_u = !problem.h.is_zero();
  if (need_u && !u)
    throw std::invalid_argument(
        "compute_barrier_constants: nonzero h requires the solved field u");
  double g_min = std::numeric_limits<double>::infinity(), g_max = 0.0;
  for (int i = 0; i < grid.n_vertices(); ++i) {
    if (grid.boundary_mask[i]) continue;
    double g = f[i];
    if (need_u) g += hh[i] * std::pow(std::max((*u)[i], 0.0), gamma + problem.theta);
    g_min = std::min(g_min, g);
    g_max = std::max(g_max, g);
  }
  if (!(g_min > 0.0))
    throw std::domain_error("compute_barrier_constants: g must be bounded below "
                            "by a positive constant");

  // per-cell |grad phi1| and H(grad phi1); strip = cells with centroid in
  // {d < strip_eps}, corner balls excluded (polygonal-corner artifact)
  const DiscreteField& phi = eigen.phi1;
  double min_strip_grad = std::numeric_limits<double>::infinity();
  int strip_cells = 0;
  std::vector<double> cell_Hgrad(grid.cells.size(), 0.0);
  for (size_t c = 0; c < grid.cells.size(); ++c) {
    const auto& cell = grid.cells[c];
    std::array<double, 2> centroid = {0.0, 0.0};
    for (int k = 0; k < cell.nv; ++k) {
      centroid[0] += grid.vertices[cell.v[k]][0] / cell.nv;
      centroid[1] += grid.vertices[cell.v[k]][1] / cell.nv;
    }
    Vec g = cell_gradient(grid, phi, cell);
    cell_Hgrad[c] = norm.evaluate(g);
    if (distance_to_boundary(grid, centroid) < strip_eps &&
        distance_to_corners(grid, centroid) > corner_radius) {
      ++strip_cells;
      min_strip_grad = std::min(min_strip_grad, g.norm());
    }
  }
  if (strip_cells == 0)
    throw std::domain_error("compute_barrier_constants: strip contains no cells");
  if (!(min_strip_grad > 0.0))
    throw std::domain_error(
        "compute_barrier_constants: degenerate discrete Hopf gradient "
        "(min strip |grad phi1| = 0)");

  BarrierConstants out;
  out.eta = eta;
  out.g_min = g_min;
  out.g_max = g_max;
  out.min_strip_gradient = min_strip_grad;
  const double expo = 1.0 / (gamma + p - 1.0);
  out.s2_strip = std::pow(
      g_max / (std::pow(eta, p - 1.0) * (1.0 - eta) * std::pow(alpha, p) *
               std::pow(min_strip_grad, p)),
      expo);

  double min_bulk_phi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.n_vertices(); ++i)
    if (distance_to_boundary(grid, grid.vertices[i]) >= strip_eps)
      min_bulk_phi = std::min(min_bulk_phi, phi[i]);
  if (!(min_bulk_phi > 0.0))
    throw std::domain_error("compute_barrier_constants: phi1 vanishes away "
                            "from the boundary strip");
  out.s2_bulk = std::pow(
      g_max / (std::pow(eta, p - 1.0) * eigen.lambda1 * std::pow(min_bulk_phi, p)),
      expo);
  out.s2 = std::max(out.s2_strip, out.s2_bulk);

  // Cbar = max over nodes of eta^{p-1}[(1-eta)(p-1) H^p(grad phi1) + lambda1 phi1^p]
  // nodal H(grad phi1) = max over adjacent cells (Cbar is itself a max)
  std::vector<double> nodal_H(grid.n_vertices(), 0.0);
  for (size_t c = 0; c < grid.cells.size(); ++c)
    for (int k = 0; k < grid.cells[c].nv; ++k) {
      const int i = grid.cells[c].v[k];
      nodal_H[i] = std::max(nodal_H[i], cell_Hgrad[c]);
    }
  double cbar = 0.0;
  for (int i = 0; i < grid.n_vertices(); ++i) {
    const double kern =
        std::pow(eta, p - 1.0) *
        ((1.0 - eta) * (p - 1.0) * std::pow(nodal_H[i], p) +
         eigen.lambda1 * std::pow(std::max(phi[i], 0.0), p));
    cbar = std::max(cbar, kern);
  }
  out.c_bar = cbar;
  out.s1 = std::pow(g_min / cbar, expo);
  return out;
}

nlohmann::json BarrierReport::to_json() const {
  return {{"eta", eta},
          {"s1", s1},
          {"s2", s2},
          {"lower_violation_fraction", lower_violation_fraction},
          {"upper_violation_fraction", upper_violation_fraction},
          {"checked_nodes", checked_nodes},
          {"excluded_nodes", excluded_nodes},
          {"inconsistent_constants", inconsistent_constants}};
}

BarrierReport barrier_check(const DiscreteField& u, const EigenReport& eigen,
                            double s1, double s2, double eta, double slack,
                            double exclusion_radius, double corner_radius) {
  const Grid& grid = *u.grid;
  if (corner_radius < 0.0) corner_radius = 2.0 * exclusion_radius;
  BarrierReport rep;
  rep.eta = eta;
  rep.s1 = s1;
  rep.s2 = s2;
  rep.inconsistent_constants = s1 > s2;
  int lower = 0, upper = 0;
  for (int i = 0; i < grid.n_vertices(); ++i) {
    const auto& x = grid.vertices[i];
    if (distance_to_boundary(grid, x) <= exclusion_radius ||
        distance_to_corners(grid, x) <= corner_radius) {
      ++rep.excluded_nodes;
      continue;
    }
    ++rep.checked_nodes;
    const double barrier = std::pow(std::max(eigen.phi1[i], 0.0), eta);
    if (s1 * barrier - slack > u[i]) ++lower;
    if (u[i] > s2 * barrier + slack) ++upper;
  }
  if (rep.checked_nodes > 0) {
    rep.lower_violation_fraction = static_cast<double>(lower) / rep.checked_nodes;
    rep.upper_violation_fraction = static_cast<double>(upper) / rep.checked_nodes;
  }
  return rep;
}

nlohmann::json ComparisonResult::to_json() const {
  return {{"max_violation", max_violation}, {"pass", pass}};
}

ComparisonResult comparison_check(const ProblemSpec& problem1,
                                  const ProblemSpec& problem2, const Grid& grid,
                                  double epsilon, double tolerance) {
  problem1.validate();
  problem2.validate();
  if (problem1.p != problem2.p)
    throw std::invalid_argument("comparison_check: problems must share p");
  if (problem1.norm.to_json() != problem2.norm.to_json())
    throw std::invalid_argument("comparison_check: problems must share the norm");
  const auto f1 = problem1.f.evaluate(grid), f2 = problem2.f.evaluate(grid);
  const auto h1 = problem1.h.evaluate(grid), h2 = problem2.h.evaluate(grid);
  for (int i = 0; i < grid.n_vertices(); ++i) {
    if (grid.boundary_mask[i]) continue;
    if (f1[i] > f2[i] || h1[i] > h2[i])
      throw std::invalid_argument(
          "comparison_check: requires f1 <= f2 and h1 <= h2 nodally");
  }
  const SolveReport r1 = solve_regularized(problem1, grid, epsilon);
  const SolveReport r2 = solve_regularized(problem2, grid, epsilon);
  ComparisonResult out;
  for (int i = 0; i < grid.n_vertices(); ++i)
    out.max_violation =
        std::max(out.max_violation, r1.u[i] - r2.u[i]);
  out.max_violation = std::max(out.max_violation, 0.0);
  out.pass = out.max_violation <= tolerance;
  return out;
}

nlohmann::json SweepRow::to_json() const {
  nlohmann::json j = {{"value", value},
                      {"growth_exponent", growth_exponent},
                      {"saturated", saturated},
                      {"predicted_exists", predicted_exists},
                      {"classification", classification},
                      {"solve_failed", solve_failed}};
  return j;
}

nlohmann::json SweepReport::to_json() const {
  nlohmann::json rows_j = nlohmann::json::array();
  for (const auto& r : rows) rows_j.push_back(r.to_json());
  return {{"parameter", parameter},
          {"predicted_threshold", predicted_threshold},
          {"rows", rows_j}};
}

std::string SweepReport::to_csv() const {
  std::ostringstream out;
  out << "value,growth_exponent,saturated,predicted_exists\n";
  for (const auto& r : rows)
    out << fmt_g17(r.value) << ',' << fmt_g17(r.growth_exponent) << ','
        << (r.saturated ? 1 : 0) << ',' << (r.predicted_exists ? 1 : 0) << '\n';
  return out.str();
}

namespace {

std::string classify(double growth_exponent) {
  if (growth_exponent <= kBoundedSlope) return "bounded";
  if (growth_exponent >= kBlowupSlope) return "blow-up";
  return "inconclusive";
}

void run_indexed(int n, int threads, const std::function<void(int)>& work) {
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) work(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        work(i);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace

SweepReport gamma_sweep(const ProblemSpec& problem_template, const Grid& grid,
                        const std::vector<double>& gamma_values,
                        const std::vector<double>& schedule, int threads) {
  {
    const auto f = problem_template.f.evaluate(grid);
    double fmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.n_vertices(); ++i)
      if (!grid.boundary_mask[i]) fmin = std::min(fmin, f[i]);
    if (!(fmin > 0.0))
      throw std::invalid_argument(
          "gamma_sweep: f must be bounded below by a positive constant");
  }
  SweepReport rep;
  rep.parameter = "gamma";
  rep.predicted_threshold =
      predict_existence(problem_template.p, 1.0,
                        std::numeric_limits<double>::infinity())
          .threshold;
  rep.rows.resize(gamma_values.size());
  run_indexed(static_cast<int>(gamma_values.size()), threads, [&](int k) {
    ProblemSpec problem = problem_template;
    problem.gamma = gamma_values[k];
    SweepRow row;
    row.value = problem.gamma;
    row.predicted_exists =
        predict_existence(problem.p, problem.gamma,
                          std::numeric_limits<double>::infinity())
            .exists;
    try {
      const auto cont = solve_continuation(problem, grid, schedule);
      row.solve_failed = cont.aborted;
      row.growth_exponent = cont.growth_exponent;
      row.saturated = cont.saturation_flag;
      row.classification = classify(cont.growth_exponent);
    } catch (const std::exception&) {
      row.solve_failed = true;
      row.classification = "failed";
    }
    rep.rows[k] = row;
  });
  return rep;
}

SweepReport summability_sweep(double p, double gamma,
                              const std::vector<double>& m_values,
                              double delta_m, const Grid& grid,
                              const FinslerSpec& norm, double theta,
                              const std::vector<double>& schedule,
                              int threads) {
  if (!(gamma > 1.0))
    throw std::invalid_argument("summability_sweep: gamma > 1 required");
  if (!(delta_m > 0.0 && delta_m < 1.0))
    throw std::invalid_argument("summability_sweep: delta_m in (0,1)");
  const EigenReport eig = first_eigenpair(grid, norm, p);

  SweepReport rep;
  rep.parameter = "m";
  rep.predicted_threshold =
      2.0 + 1.0 / (p - 1.0);  // the m -> inf envelope of the family
  rep.rows.resize(m_values.size());
  run_indexed(static_cast<int>(m_values.size()), threads, [&](int k) {
    const double m = m_values[k];
    SweepRow row;
    row.value = m;
    const double sigma = (1.0 - delta_m) / m;
    if (sigma * m >= 1.0)
      throw std::invalid_argument("summability_sweep: sigma*m >= 1 (f not in L^m)");
    const auto pred = predict_existence(p, gamma, m);
    row.predicted_exists = pred.exists;

    ProblemSpec problem;
    problem.p = p;
    problem.gamma = gamma;
    problem.theta = theta;
    problem.norm = norm;
    problem.f = FieldDesc::dist_power(sigma);
    problem.h = FieldDesc::constant(0.0);
    problem.domain = grid.domain;
    problem.resolution = grid.resolution;

    // compatibility probe at u0 = phi1^t, t the midpoint of the admissible
    // window ((p-1)/p, 1/((gamma-1) m')) when it is nonempty
    const double mprime = m / (m - 1.0);
    const double t_lo = (p - 1.0) / p;
    const double t_hi = 1.0 / ((gamma - 1.0) * mprime);
    const double t = t_hi > t_lo ? 0.5 * (t_lo + t_hi) : t_lo * 1.01;
    DiscreteField u0(grid);
    for (int i = 0; i < grid.n_vertices(); ++i)
      u0[i] = std::pow(std::max(eig.phi1[i], 0.0), t);
    try {
      row.compatibility_finite =
          compatibility_integral(problem, grid, u0).finite;
      const auto cont = solve_continuation(problem, grid, schedule);
      row.solve_failed = cont.aborted;
      row.growth_exponent = cont.growth_exponent;
      row.saturated = cont.saturation_flag;
      row.classification = classify(cont.growth_exponent);
    } catch (const std::exception&) {
      row.solve_failed = true;
      row.classification = "failed";
    }
    rep.rows[k] = row;
  });
  return rep;
}

}  // namespace anisop
