#pragma once

#include "anisop/singular.hpp"

namespace anisop {

/// Sharp existence threshold for finite-energy solutions:
///   2 + 1/(p-1) - p/((p-1) m),   m = +inf drops the last term.
/// The finite-m branch requires gamma > 1.
struct ExistencePrediction {
  bool exists = false;
  double threshold = 0.0;
};

ExistencePrediction predict_existence(double p, double gamma, double m);

/// Barrier exponents of the sandwich s1*phi1^e <= u <= s2*phi1^e'.
/// gamma > 1: both exponents equal eta = p/(gamma+p-1); gamma <= 1: lower
/// exponent 1 and any upper exponent t in ((p-1)/p, 1). Accepted only below
/// the existence threshold (the barrier must lie in the energy space).
struct BarrierExponent {
  enum class Regime { GammaGt1, GammaLe1 };
  Regime regime = Regime::GammaGt1;
  double eta = 0.0;       // gamma > 1
  double lower_exp = 1.0; // gamma <= 1
  double t_lo = 0.0, t_hi = 1.0;
};

BarrierExponent barrier_exponent(double p, double gamma);

/// Sub/supersolution constants from the eigenpair data (gamma > 1):
///   s2 = max over the boundary strip and the bulk of
///        (M / (eta^{p-1}(1-eta) alpha^p min_strip |grad phi1|^p))^{1/(gamma+p-1)}
///        (M / (eta^{p-1} lambda1 min_bulk phi1^p))^{1/(gamma+p-1)}
///   s1 = (m / Cbar)^{1/(gamma+p-1)},
///        Cbar = max_nodes eta^{p-1}[(1-eta)(p-1) H^p(grad phi1) + lambda1 phi1^p]
/// with m, M the bounds of g = f + h u^{gamma+theta}. Strip minima are taken
/// over cells outside corner balls (radius corner_radius); the polygonal
/// corners are a discretization artifact where the discrete Hopf gradient
/// degenerates. A zero post-exclusion strip gradient is still reported as an
/// error.
struct BarrierConstants {
  double s1 = 0.0;
  double s2 = 0.0;
  double s2_strip = 0.0;
  double s2_bulk = 0.0;
  double c_bar = 0.0;
  double min_strip_gradient = 0.0;
  double eta = 0.0;
  double g_min = 0.0, g_max = 0.0;

  nlohmann::json to_json() const;
};

BarrierConstants compute_barrier_constants(const EigenReport& eigen,
                                           const ProblemSpec& problem,
                                           const Grid& grid, double strip_eps,
                                           const DiscreteField* u = nullptr,
                                           double corner_radius = -1.0);

/// Pointwise check of s1*phi1^eta - slack <= u <= s2*phi1^eta + slack at
/// nodes farther than exclusion_radius from the boundary and corner_radius
/// from the corners.
struct BarrierReport {
  double eta = 0.0;
  double s1 = 0.0, s2 = 0.0;
  double lower_violation_fraction = 0.0;
  double upper_violation_fraction = 0.0;
  int checked_nodes = 0;
  int excluded_nodes = 0;
  bool inconsistent_constants = false;  // s1 > s2

  nlohmann::json to_json() const;
};

BarrierReport barrier_check(const DiscreteField& u, const EigenReport& eigen,
                            double s1, double s2, double eta, double slack,
                            double exclusion_radius,
                            double corner_radius = -1.0);

/// Solves both problems at the same epsilon and measures max (u1 - u2)^+.
/// Requires f1 <= f2 and h1 <= h2 nodally.
struct ComparisonResult {
  double max_violation = 0.0;
  bool pass = false;

  nlohmann::json to_json() const;
};

ComparisonResult comparison_check(const ProblemSpec& problem1,
                                  const ProblemSpec& problem2, const Grid& grid,
                                  double epsilon, double tolerance = 1e-8);

/// One row of a parameter sweep.
struct SweepRow {
  double value = 0.0;  // gamma or m
  double growth_exponent = 0.0;
  bool saturated = false;
  bool predicted_exists = false;
  std::string classification;  // bounded | blow-up | inconclusive
  bool solve_failed = false;
  bool compatibility_finite = false;  // summability sweep only

  nlohmann::json to_json() const;
};

struct SweepReport {
  std::string parameter;  // "gamma" or "m"
  double predicted_threshold = 0.0;
  std::vector<SweepRow> rows;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Classification thresholds on the continuation growth exponent.
inline constexpr double kBoundedSlope = 0.05;
inline constexpr double kBlowupSlope = 0.2;

SweepReport gamma_sweep(const ProblemSpec& problem_template, const Grid& grid,
                        const std::vector<double>& gamma_values,
                        const std::vector<double>& schedule,
                        int threads = 1);

/// Per m: f = d^{-sigma(m)} with sigma(m) = (1 - delta_m)/m (so f is in L^m),
/// compatibility verdict at u0 = phi1^t for the best admissible t, a
/// continuation run, and the predicted threshold.
SweepReport summability_sweep(double p, double gamma,
                              const std::vector<double>& m_values,
                              double delta_m, const Grid& grid,
                              const FinslerSpec& norm, double theta,
                              const std::vector<double>& schedule,
                              int threads = 1);

}  // namespace anisop
