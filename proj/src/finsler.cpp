#include "anisop/finsler.hpp"

#include <cmath>
#include <stdexcept>

#include "anisop/rng.hpp"

namespace anisop {

FinslerSpec FinslerSpec::euclidean(int dim) {
  if (dim < 1) throw std::invalid_argument("euclidean: dim must be >= 1");
  FinslerSpec s;
  s.kind_ = Kind::Euclidean;
  s.dim_ = dim;
  return s;
}

FinslerSpec FinslerSpec::ellipse(const Mat& A) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw std::invalid_argument("ellipse: A must be square");
  if (!A.isApprox(A.transpose(), 1e-12))
    throw std::invalid_argument("ellipse: A must be symmetric");
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("ellipse: A must be positive definite");
  FinslerSpec s;
  s.kind_ = Kind::Ellipse;
  s.dim_ = static_cast<int>(A.rows());
  s.A_ = A;
  return s;
}

FinslerSpec FinslerSpec::smoothed_q(int dim, double q, double delta) {
  if (dim < 1) throw std::invalid_argument("smoothed_q: dim must be >= 1");
  if (!(q > 1.0)) throw std::invalid_argument("smoothed_q: q must be > 1");
  if (delta < 0.0) throw std::invalid_argument("smoothed_q: delta must be >= 0");
  FinslerSpec s;
  s.kind_ = Kind::SmoothedQ;
  s.dim_ = dim;
  s.q_ = q;
  s.delta_ = delta;
  return s;
}

void FinslerSpec::check_xi(const Vec& xi) const {
  if (xi.size() != dim_)
    throw std::invalid_argument("FinslerSpec: argument dimension mismatch");
}

double FinslerSpec::evaluate(const Vec& xi) const {
  check_xi(xi);
  switch (kind_) {
    case Kind::Euclidean:
      return xi.norm();
    case Kind::Ellipse:
      return std::sqrt(xi.dot(A_ * xi));
    case Kind::SmoothedQ: {
      // scaled power sum to avoid overflow for large q
      const double s = std::max(xi.cwiseAbs().maxCoeff(), delta_);
      if (s == 0.0) return 0.0;
      double acc = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double t = xi[i] / s, d = delta_ / s;
        acc += std::pow(t * t + d * d, q_ / 2.0);
      }
      const double offset = delta_ * std::pow(static_cast<double>(dim_), 1.0 / q_);
      return s * std::pow(acc, 1.0 / q_) - offset;
    }
  }
  return 0.0;
}

Vec FinslerSpec::gradient(const Vec& xi) const {
  check_xi(xi);
  if (xi.norm() == 0.0)
    throw std::domain_error("FinslerSpec::gradient: singular point xi = 0");
  switch (kind_) {
    case Kind::Euclidean:
      return xi / xi.norm();
    case Kind::Ellipse: {
      Vec Axi = A_ * xi;
      return Axi / std::sqrt(xi.dot(Axi));
    }
    case Kind::SmoothedQ: {
      const double s = std::max(xi.cwiseAbs().maxCoeff(), std::max(delta_, 1e-300));
      double S = 0.0;
      Vec g(dim_);
      for (int i = 0; i < dim_; ++i) {
        const double t = xi[i] / s, d = delta_ / s;
        const double w = t * t + d * d;
        S += std::pow(w, q_ / 2.0);
        g[i] = t * std::pow(w, q_ / 2.0 - 1.0);
      }
      // grad H = S^{1/q-1} xi_i w_i^{q/2-1}; scaling drops out
      return std::pow(S, 1.0 / q_ - 1.0) * g;
    }
  }
  return Vec::Zero(dim_);
}

Mat FinslerSpec::hessian(const Vec& xi) const {
  check_xi(xi);
  if (xi.norm() == 0.0)
    throw std::domain_error("FinslerSpec::hessian: singular point xi = 0");
  switch (kind_) {
    case Kind::Euclidean: {
      const double n = xi.norm();
      Vec u = xi / n;
      return (Mat::Identity(dim_, dim_) - u * u.transpose()) / n;
    }
    case Kind::Ellipse: {
      Vec Axi = A_ * xi;
      const double H = std::sqrt(xi.dot(Axi));
      return A_ / H - (Axi * Axi.transpose()) / (H * H * H);
    }
    case Kind::SmoothedQ: {
      const double s = std::max(xi.cwiseAbs().maxCoeff(), std::max(delta_, 1e-300));
      double S = 0.0;
      Vec g(dim_);      // xi_i w_i^{q/2-1}, scaled variables
      Vec diag(dim_);   // w^{q/2-1} + (q-2) t^2 w^{q/2-2}
      for (int i = 0; i < dim_; ++i) {
        const double t = xi[i] / s, d = delta_ / s;
        const double w = t * t + d * d;
        S += std::pow(w, q_ / 2.0);
        g[i] = t * std::pow(w, q_ / 2.0 - 1.0);
        diag[i] = std::pow(w, q_ / 2.0 - 1.0) +
                  (q_ - 2.0) * t * t * std::pow(w, q_ / 2.0 - 2.0);
      }
      Mat D2 = (1.0 - q_) * std::pow(S, 1.0 / q_ - 2.0) * (g * g.transpose());
      D2 += std::pow(S, 1.0 / q_ - 1.0) * Mat(diag.asDiagonal());
      return D2 / s;  // H is s * G(xi/s) - const, so D2H = D2G(xi/s)/s
    }
  }
  return Mat::Zero(dim_, dim_);
}

Vec FinslerSpec::flux(double p, const Vec& xi) const {
  if (!(p > 1.0)) throw std::invalid_argument("flux: p must be > 1");
  check_xi(xi);
  if (xi.norm() == 0.0) return Vec::Zero(dim_);  // continuous extension
  const double H = evaluate(xi);
  if (H == 0.0) return Vec::Zero(dim_);
  return std::pow(H, p - 1.0) * gradient(xi);
}

Mat FinslerSpec::flux_jacobian(double p, const Vec& xi) const {
  if (!(p > 1.0)) throw std::invalid_argument("flux_jacobian: p must be > 1");
  check_xi(xi);
  const double H = evaluate(xi);
  Vec g = gradient(xi);
  Mat D2 = hessian(xi);
  return (p - 1.0) * std::pow(H, p - 2.0) * (g * g.transpose()) +
         std::pow(H, p - 1.0) * D2;
}

double FinslerSpec::alpha_lower_bound() const {
  switch (kind_) {
    case Kind::Euclidean:
      return 1.0;
    case Kind::Ellipse: {
      Eigen::SelfAdjointEigenSolver<Mat> es(A_);
      return std::sqrt(es.eigenvalues().minCoeff());
    }
    case Kind::SmoothedQ:
      if (delta_ > 0.0)
        throw std::domain_error(
            "alpha_lower_bound: smoothed_q with delta > 0 has no linear "
            "lower bound at the origin");
      // l_q vs l_2 comparison on R^N
      return q_ >= 2.0 ? std::pow(static_cast<double>(dim_), 1.0 / q_ - 0.5)
                       : 1.0;
  }
  return 1.0;
}

nlohmann::json FinslerSpec::to_json() const {
  nlohmann::json j;
  j["dim"] = dim_;
  switch (kind_) {
    case Kind::Euclidean:
      j["kind"] = "euclidean";
      break;
    case Kind::Ellipse: {
      j["kind"] = "ellipse";
      std::vector<double> a;
      for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c) a.push_back(A_(r, c));
      j["A"] = a;
      break;
    }
    case Kind::SmoothedQ:
      j["kind"] = "smoothed_q";
      j["q"] = q_;
      j["delta"] = delta_;
      break;
  }
  return j;
}

FinslerSpec FinslerSpec::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int dim = j.at("dim").get<int>();
  if (kind == "euclidean") return euclidean(dim);
  if (kind == "ellipse") {
    const auto a = j.at("A").get<std::vector<double>>();
    if (static_cast<int>(a.size()) != dim * dim)
      throw std::invalid_argument("FinslerSpec: A has wrong size");
    Mat A(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) A(r, c) = a[r * dim + c];
    return ellipse(A);
  }
  if (kind == "smoothed_q")
    return smoothed_q(dim, j.at("q").get<double>(),
                      j.value("delta", 0.0));
  throw std::invalid_argument("FinslerSpec: unknown kind '" + kind + "'");
}

nlohmann::json AssumptionReport::to_json() const {
  return {{"alpha_emp", alpha_emp},
          {"beta_emp", beta_emp},
          {"min_tangential_hessian", min_tangential_hessian},
          {"evenness_defect", evenness_defect},
          {"n_samples", n_samples},
          {"seed", seed}};
}

AssumptionReport check_assumptions(const FinslerSpec& norm, int n_samples,
                                   std::uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("check_assumptions: n_samples must be >= 1");
  const int dim = norm.dim();
  CounterRng rng(seed);
  AssumptionReport rep;
  rep.n_samples = n_samples;
  rep.seed = seed;
  rep.alpha_emp = std::numeric_limits<double>::infinity();
  rep.beta_emp = 0.0;
  rep.min_tangential_hessian = std::numeric_limits<double>::infinity();
  rep.evenness_defect = 0.0;

  const double step = 1e-5;  // central-difference step on the unit sphere
  for (int k = 0; k < n_samples; ++k) {
    const auto pt = rng.on_sphere(static_cast<std::uint64_t>(k), dim);
    Vec xi = Eigen::Map<const Vec>(pt.data(), dim);
    const double H = norm.evaluate(xi);
    rep.alpha_emp = std::min(rep.alpha_emp, H);
    rep.beta_emp = std::max(rep.beta_emp, H);
    rep.evenness_defect =
        std::max(rep.evenness_defect, std::abs(H - norm.evaluate(-xi)));

    if (dim < 2) continue;  // no tangential directions in 1D
    // FD Hessian (single code path for every kind), restricted to the
    // tangent space of grad H at xi
    Mat D2(dim, dim);
    for (int a = 0; a < dim; ++a) {
      Vec ea = Vec::Zero(dim);
      ea[a] = step;
      Vec gp = norm.gradient(xi + ea);
      Vec gm = norm.gradient(xi - ea);
      D2.col(a) = (gp - gm) / (2.0 * step);
    }
    D2 = 0.5 * (D2 + D2.transpose());
    Vec g = norm.gradient(xi);
    Vec gn = g / g.norm();
    for (int t = 0; t < std::max(1, dim - 1); ++t) {
      Vec zeta(dim);
      for (int i = 0; i < dim; ++i)
        zeta[i] = rng.normal(
            static_cast<std::uint64_t>((k + 1)) * 7919u + t * dim + i + 1);
      zeta -= zeta.dot(gn) * gn;
      const double nz = zeta.norm();
      if (nz < 1e-12) continue;
      zeta /= nz;
      rep.min_tangential_hessian =
          std::min(rep.min_tangential_hessian, zeta.dot(D2 * zeta));
    }
  }
  if (dim < 2)
    rep.min_tangential_hessian = std::numeric_limits<double>::quiet_NaN();
  return rep;
}

nlohmann::json InequalityReport::to_json() const {
  return {{"c_mono", c_mono},       {"c_lip", c_lip},
          {"c_conv", c_conv},       {"min_mono_gap", min_mono_gap},
          {"min_conv_gap", min_conv_gap}, {"n_pairs", n_pairs},
          {"skipped", skipped},     {"seed", seed}};
}

InequalityReport verify_vector_inequalities(const FinslerSpec& norm, double p,
                                            int n_pairs, std::uint64_t seed) {
  if (!(p > 1.0))
    throw std::invalid_argument("verify_vector_inequalities: p must be > 1");
  if (n_pairs < 1)
    throw std::invalid_argument("verify_vector_inequalities: n_pairs >= 1");
  const int dim = norm.dim();
  CounterRng rng(seed);
  InequalityReport rep;
  rep.n_pairs = n_pairs;
  rep.seed = seed;
  rep.c_mono = std::numeric_limits<double>::infinity();
  rep.c_conv = std::numeric_limits<double>::infinity();
  rep.min_mono_gap = std::numeric_limits<double>::infinity();
  rep.min_conv_gap = std::numeric_limits<double>::infinity();
  rep.c_lip = 0.0;

  for (int k = 0; k < n_pairs; ++k) {
    Vec x(dim), y(dim);
    for (int i = 0; i < dim; ++i) {
      x[i] = rng.normal(static_cast<std::uint64_t>(k) * 2 * dim + i);
      y[i] = rng.normal(static_cast<std::uint64_t>(k) * 2 * dim + dim + i);
    }
    // exercise pairs with one zero argument as well
    if (k % 17 == 0) y.setZero();
    if ((x - y).norm() == 0.0 || x.norm() + y.norm() == 0.0) {
      ++rep.skipped;
      continue;
    }
    Vec ax = norm.flux(p, x), ay = norm.flux(p, y);
    const double mono = (ax - ay).dot(x - y);
    const double kern = std::pow(x.norm() + y.norm(), p - 2.0);
    const double dn = (x - y).norm();
    rep.min_mono_gap = std::min(rep.min_mono_gap, mono);
    rep.c_mono = std::min(rep.c_mono, mono / (kern * dn * dn));
    rep.c_lip = std::max(rep.c_lip, (ax - ay).norm() / (kern * dn));

    const double Hx = norm.evaluate(x), Hy = norm.evaluate(y);
    const double Hd = norm.evaluate(x - y);
    double lin = 0.0;
    if (Hy > 0.0)
      lin = p * std::pow(Hy, p - 1.0) * norm.gradient(y).dot(x - y);
    const double gap = std::pow(Hx, p) - std::pow(Hy, p) - lin;
    rep.min_conv_gap = std::min(rep.min_conv_gap, gap);
    const double denom = p >= 2.0
                             ? std::pow(Hd, p)
                             : std::pow(Hx + Hy, p - 2.0) * Hd * Hd;
    if (denom > 0.0) rep.c_conv = std::min(rep.c_conv, gap / denom);
  }
  return rep;
}

}  // namespace anisop
