#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include <json.hpp>

namespace anisop {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Parametric family of norms H on R^N used as the anisotropy of the
/// operator div(H^{p-1}(grad u) grad H(grad u)).
///
/// Supported kinds:
///   euclidean    H(xi) = |xi|
///   ellipse      H(xi) = sqrt(xi' A xi), A symmetric positive definite
///   smoothed_q   H(xi) = (sum_i (xi_i^2 + delta^2)^{q/2})^{1/q} - delta N^{1/q}
///                (the offset keeps H(0) = 0; for delta > 0 positive
///                1-homogeneity only holds asymptotically)
///
/// All kinds are even, C^2 away from 0, and uniformly elliptic on tangent
/// directions, so they satisfy the structural assumptions the solver needs.
class FinslerSpec {
 public:
  enum class Kind { Euclidean, Ellipse, SmoothedQ };

  static FinslerSpec euclidean(int dim);
  static FinslerSpec ellipse(const Mat& A);            // dim from A
  static FinslerSpec smoothed_q(int dim, double q, double delta = 0.0);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double q() const { return q_; }
  double delta() const { return delta_; }
  const Mat& A() const { return A_; }

  /// True when exact 1-homogeneity fails (smoothed_q with delta > 0); such
  /// specs are excluded from homogeneity-based assertions.
  bool approximate_homogeneous() const {
    return kind_ == Kind::SmoothedQ && delta_ > 0.0;
  }

  double evaluate(const Vec& xi) const;
  Vec gradient(const Vec& xi) const;    // throws on xi == 0
  Mat hessian(const Vec& xi) const;     // closed form, xi != 0

  /// p-flux a(xi) = H^{p-1}(xi) grad H(xi), continuously extended by a(0)=0.
  Vec flux(double p, const Vec& xi) const;
  /// da/dxi = (p-1) H^{p-2} gradH gradH' + H^{p-1} D2H, xi != 0.
  Mat flux_jacobian(double p, const Vec& xi) const;

  /// Closed-form constant alpha with alpha |xi| <= H(xi) (exactly homogeneous
  /// kinds only).
  double alpha_lower_bound() const;

  nlohmann::json to_json() const;
  static FinslerSpec from_json(const nlohmann::json& j);

 private:
  FinslerSpec() = default;
  void check_xi(const Vec& xi) const;

  Kind kind_ = Kind::Euclidean;
  int dim_ = 0;
  Mat A_;             // ellipse only
  double q_ = 2.0;    // smoothed_q only
  double delta_ = 0.0;
};

/// Empirical verification of the structural assumptions on sampled sphere
/// points: two-sided norm bounds, tangential Hessian ellipticity (central
/// finite differences, one code path for every kind), evenness.
struct AssumptionReport {
  double alpha_emp = 0.0;
  double beta_emp = 0.0;
  double min_tangential_hessian = 0.0;  // NaN when dim == 1 (no tangent)
  double evenness_defect = 0.0;
  int n_samples = 0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

AssumptionReport check_assumptions(const FinslerSpec& norm, int n_samples,
                                   std::uint64_t seed);

/// Sampled constants of the structure inequalities of the flux:
///   c_mono: min over pairs of
///           [a(x)-a(y)].(x-y) / ((|x|+|y|)^{p-2} |x-y|^2)
///   c_lip:  max over pairs of
///           |a(x)-a(y)| / ((|x|+|y|)^{p-2} |x-y|)
///   c_conv: min over pairs of the convexity-gap ratio
///           (H^p(x) - H^p(y) - p H^{p-1}(y) gradH(y).(x-y)) / k(x,y)
///           with k = H^p(x-y) if p >= 2, else (H(x)+H(y))^{p-2} H^2(x-y).
/// Degenerate pairs x == y are skipped (both sides vanish).
struct InequalityReport {
  double c_mono = 0.0;
  double c_lip = 0.0;
  double c_conv = 0.0;
  double min_mono_gap = 0.0;  // min of LHS itself, sign check
  double min_conv_gap = 0.0;
  int n_pairs = 0;
  int skipped = 0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

InequalityReport verify_vector_inequalities(const FinslerSpec& norm, double p,
                                            int n_pairs, std::uint64_t seed);

}  // namespace anisop
