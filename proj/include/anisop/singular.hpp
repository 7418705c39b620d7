#pragma once

#include <optional>
#include <vector>

#include "anisop/eigenpair.hpp"
#include "anisop/fem.hpp"

namespace anisop {

/// Coefficient descriptor for f and h: a constant, a distance power
/// d(x)^{-sigma}, or tabulated nodal values.
struct FieldDesc {
  enum class Kind { Constant, DistPower, Table };
  Kind kind = Kind::Constant;
  double value = 0.0;   // constant
  double sigma = 0.0;   // dist_power exponent, >= 0
  std::vector<double> table;

  static FieldDesc constant(double c);
  static FieldDesc dist_power(double sigma);
  static FieldDesc tabulated(std::vector<double> values);

  /// Nodal evaluation; dist_power yields +inf at boundary nodes when
  /// sigma > 0 (truncated by the solver, skipped by interior quadratures).
  std::vector<double> evaluate(const Grid& grid) const;
  bool is_zero() const;

  nlohmann::json to_json() const;
  static FieldDesc from_json(const nlohmann::json& j);
};

/// Full instance of the singular problem
///   -div(H^{p-1}(grad u) grad H(grad u)) = f u^{-gamma} + h u^{theta}
/// with Dirichlet zero data.
struct ProblemSpec {
  double p = 2.0;
  double gamma = 1.0;
  double theta = 0.0;
  FinslerSpec norm = FinslerSpec::euclidean(1);
  FieldDesc f = FieldDesc::constant(1.0);
  FieldDesc h = FieldDesc::constant(0.0);
  Domain domain = Domain::interval(1.0);
  int resolution = 64;

  void validate() const;  // throws on contract violations
  nlohmann::json to_json() const;
  static ProblemSpec from_json(const nlohmann::json& j);
};

struct SolveOptions {
  double tol = 1e-10;  // on ||G||_inf relative to max(1, ||b||_inf)
  int max_iter = 100;
  bool picard = false;  // energy-descent fixed point instead of Newton
  int picard_max_iter = 2000;
};

struct SolveReport {
  DiscreteField u;
  double epsilon = 0.0;
  int newton_iters = 0;
  double final_residual = 0.0;  // ||G||_inf / scale at the returned iterate
  double energy_value = 0.0;
  double seminorm = 0.0;
  double min_u_interior = 0.0;
  std::optional<double> nehari_defect;  // gamma > 1 only
  bool converged = false;
  bool warned_f_zero = false;

  nlohmann::json to_json() const;  // scalars only; u exports via write_csv
};

/// Solves the epsilon-regularized nodal system
///   G(u)_i = energy_gradient(u)_i
///            - w_i [ T_{1/eps}(f_i) / (max(u_i,0)+eps)^gamma
///                  + T_{1/eps}(h_i) T_{1/eps}(max(u_i,0)^theta) ] = 0
/// at interior nodes by damped Newton (exact flux linearization + mu*I),
/// backtracking on ||G||_2, step clipping keeping u_i > -eps/2.
SolveReport solve_regularized(const ProblemSpec& problem, const Grid& grid,
                              double epsilon,
                              const DiscreteField* warm_start = nullptr,
                              const SolveOptions& options = {});

struct ContinuationReport {
  std::vector<double> schedule;
  std::vector<SolveReport> steps;
  bool saturation_flag = false;
  double growth_exponent = 0.0;  // slope of log(seminorm^p) vs log(1/eps)
  bool aborted = false;          // an inner solve failed; partial report

  nlohmann::json to_json() const;
};

/// Warm-started sweep over a strictly decreasing epsilon schedule; the
/// growth exponent is a least-squares fit over the last half of the schedule
/// (at least 3 points).
ContinuationReport solve_continuation(const ProblemSpec& problem,
                                      const Grid& grid,
                                      const std::vector<double>& schedule,
                                      const SolveOptions& options = {});

/// Lumped value of the energy functional
///   J(u) = (1/p) int H^p(grad u) + 1/(gamma-1) int f u^{1-gamma}
///          - 1/(theta+1) int h u^{theta+1}
/// over interior nodes (Dirichlet boundary carries no mass). gamma > 1 only.
struct EnergyJValue {
  double value = 0.0;
  bool infinite = false;  // some interior node has f > 0 and u = 0
};

EnergyJValue energy_J(const ProblemSpec& problem, const Grid& grid,
                      const DiscreteField& u);

/// Radial derivative of the energy at u (membership defect of the natural
/// constraint): D(u) = p*energy(u) - int f u^{1-gamma} - int h u^{theta+1}.
double nehari_defect(const ProblemSpec& problem, const Grid& grid,
                     const DiscreteField& u);

struct CompatibilityReport {
  double value = 0.0;  // lumped interior integral
  bool finite = false;
  StripEstimate strips;

  nlohmann::json to_json() const;
};

/// Lumped int f u0^{1-gamma} with strip-refinement divergence detection.
CompatibilityReport compatibility_integral(const ProblemSpec& problem,
                                           const Grid& grid,
                                           const DiscreteField& u0);

}  // namespace anisop
