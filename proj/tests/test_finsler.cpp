#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anisop/finsler.hpp"
#include "anisop/rng.hpp"

using namespace anisop;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Mat diag_4_1() {
  Mat A(2, 2);
  A << 4.0, 0.0, 0.0, 1.0;
  return A;
}

// central finite differences of H, the independent check of gradient()
Vec fd_gradient(const FinslerSpec& n, const Vec& xi, double step) {
  Vec g(xi.size());
  for (int i = 0; i < xi.size(); ++i) {
    Vec e = Vec::Zero(xi.size());
    e[i] = step;
    g[i] = (n.evaluate(xi + e) - n.evaluate(xi - e)) / (2 * step);
  }
  return g;
}

}  // namespace

TEST_CASE("evaluate: closed-form values") {
  auto eu = FinslerSpec::euclidean(2);
  CHECK(eu.evaluate(v2(3, 4)) == doctest::Approx(5.0));
  CHECK(eu.evaluate(v2(0, 0)) == 0.0);

  auto el = FinslerSpec::ellipse(diag_4_1());
  CHECK(el.evaluate(v2(1, 0)) == doctest::Approx(2.0));
  CHECK(el.evaluate(v2(0, 1)) == doctest::Approx(1.0));

  auto sq = FinslerSpec::smoothed_q(2, 4.0, 0.0);
  CHECK(sq.evaluate(v2(1, 1)) == doctest::Approx(std::pow(2.0, 0.25)));
  CHECK(sq.evaluate(v2(0, 0)) == 0.0);

  // smoothing offset keeps H(0) = 0
  auto sqd = FinslerSpec::smoothed_q(2, 4.0, 0.1);
  CHECK(sqd.evaluate(v2(0, 0)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(sqd.approximate_homogeneous());

  CHECK_THROWS_AS(eu.evaluate(Vec::Ones(3)), std::invalid_argument);
}

TEST_CASE("gradient: values, Euler identity, 0-homogeneity") {
  auto eu = FinslerSpec::euclidean(2);
  Vec g = eu.gradient(v2(3, 4));
  CHECK(g[0] == doctest::Approx(0.6));
  CHECK(g[1] == doctest::Approx(0.8));
  CHECK_THROWS_AS(eu.gradient(v2(0, 0)), std::domain_error);

  auto el = FinslerSpec::ellipse(diag_4_1());
  CounterRng rng(7);
  for (int k = 0; k < 200; ++k) {
    Vec xi = v2(rng.normal(2 * k), rng.normal(2 * k + 1));
    if (xi.norm() == 0) continue;
    const double H = el.evaluate(xi);
    CHECK(std::abs(el.gradient(xi).dot(xi) - H) <= 1e-12 * H);
    // grad H(t xi) = grad H(xi) for t > 0, exactly for euclidean
    Vec g1 = eu.gradient(xi), g2 = eu.gradient(2.0 * xi);
    CHECK(g1 == g2);
  }
}

TEST_CASE("invariants: Euler identity and 1-homogeneity on seeded samples") {
  const auto specs = {FinslerSpec::euclidean(2),
                      FinslerSpec::ellipse(diag_4_1()),
                      FinslerSpec::smoothed_q(2, 4.0, 0.0)};
  CounterRng rng(42);
  for (const auto& n : specs) {
    REQUIRE(!n.approximate_homogeneous());
    for (int k = 0; k < 10000; ++k) {
      auto pt = rng.on_sphere(k, 2);
      Vec xi = 3.7 * Eigen::Map<const Vec>(pt.data(), 2);
      const double H = n.evaluate(xi);
      CHECK(std::abs(n.gradient(xi).dot(xi) - H) <= 1e-10 * H);
      for (double t : {1e-3, 1.0, 1e3})
        CHECK(std::abs(n.evaluate(t * xi) - t * H) <= 1e-12 * t * H);
    }
  }
}

TEST_CASE("gradient matches central differences of H") {
  const auto specs = {FinslerSpec::euclidean(2),
                      FinslerSpec::ellipse(diag_4_1()),
                      FinslerSpec::smoothed_q(2, 4.0, 0.0),
                      FinslerSpec::smoothed_q(2, 8.0, 0.05)};
  CounterRng rng(3);
  for (const auto& n : specs)
    for (int k = 0; k < 200; ++k) {
      Vec xi = v2(rng.normal(2 * k), rng.normal(2 * k + 1));
      if (xi.norm() < 1e-3) continue;
      Vec g = n.gradient(xi);
      Vec gfd = fd_gradient(n, xi, 1e-6 * xi.norm());
      CHECK((g - gfd).norm() <= 1e-6 * g.norm());
    }
}

TEST_CASE("flux: identity at p=2 euclidean, A xi for the ellipse") {
  auto eu = FinslerSpec::euclidean(2);
  CHECK((eu.flux(2.0, v2(1.5, -2.0)) - v2(1.5, -2.0)).norm() == 0.0);
  CHECK(eu.flux(2.0, v2(0, 0)).norm() == 0.0);

  // p=3 euclidean: a(xi) = |xi|^2 xi / |xi| = |xi| xi
  CHECK(eu.flux(3.0, v2(1, 0))[0] == doctest::Approx(1.0));
  CHECK(eu.flux(3.0, v2(2, 0))[0] == doctest::Approx(4.0));

  // ellipse p=2: a(xi) = A xi; oracle = finite differences of H^2/2
  auto el = FinslerSpec::ellipse(diag_4_1());
  CounterRng rng(11);
  for (int k = 0; k < 100; ++k) {
    Vec xi = v2(rng.normal(2 * k), rng.normal(2 * k + 1));
    if (xi.norm() < 1e-6) continue;
    Vec a = el.flux(2.0, xi);
    CHECK((a - diag_4_1() * xi).norm() <= 1e-12 * a.norm());
    const double step = 1e-6 * xi.norm();
    Vec afd(2);
    for (int i = 0; i < 2; ++i) {
      Vec e = Vec::Zero(2);
      e[i] = step;
      auto half = [&](const Vec& y) { return 0.5 * std::pow(el.evaluate(y), 2); };
      afd[i] = (half(xi + e) - half(xi - e)) / (2 * step);
    }
    CHECK((a - afd).norm() <= 1e-6 * a.norm());
  }

  CHECK_THROWS_AS(eu.flux(1.0, v2(1, 0)), std::invalid_argument);
}

TEST_CASE("flux is continuous at the origin") {
  auto el = FinslerSpec::ellipse(diag_4_1());
  const double p = 1.5;
  double prev = 1e300;
  for (double s = 1.0; s > 1e-12; s *= 0.1) {
    const double a = el.flux(p, v2(s, s)).norm();
    CHECK(a < prev);
    // |a(xi)| <= beta^{p-1} K |xi|^{p-1}
    CHECK(a <= std::pow(2.0, p - 1.0) * 2.0 * std::pow(v2(s, s).norm(), p - 1.0));
    prev = a;
  }
  CHECK(el.flux(p, v2(0, 0)).norm() == 0.0);
}

TEST_CASE("flux_jacobian matches finite differences of the flux") {
  const auto specs = {FinslerSpec::euclidean(2),
                      FinslerSpec::ellipse(diag_4_1()),
                      FinslerSpec::smoothed_q(2, 4.0, 0.0)};
  CounterRng rng(5);
  for (const auto& n : specs)
    for (double p : {1.5, 2.0, 3.0})
      for (int k = 0; k < 50; ++k) {
        Vec xi = v2(rng.normal(2 * k), rng.normal(2 * k + 1));
        if (xi.norm() < 0.1) continue;
        Mat J = n.flux_jacobian(p, xi);
        const double step = 1e-6 * xi.norm();
        for (int i = 0; i < 2; ++i) {
          Vec e = Vec::Zero(2);
          e[i] = step;
          Vec col = (n.flux(p, xi + e) - n.flux(p, xi - e)) / (2 * step);
          CHECK((J.col(i) - col).norm() <= 2e-5 * std::max(1.0, J.col(i).norm()));
        }
      }
}

TEST_CASE("check_assumptions: euclidean and ellipse") {
  auto eu = FinslerSpec::euclidean(2);
  auto rep = check_assumptions(eu, 2000, 1);
  CHECK(rep.alpha_emp == doctest::Approx(1.0));
  CHECK(rep.beta_emp == doctest::Approx(1.0));
  CHECK(rep.min_tangential_hessian == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(rep.evenness_defect <= 1e-15);

  auto el = FinslerSpec::ellipse(diag_4_1());
  rep = check_assumptions(el, 20000, 1);
  // extreme singular values of A^{1/2}
  CHECK(rep.alpha_emp == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rep.beta_emp == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(rep.alpha_emp >= 1.0);
  CHECK(rep.beta_emp <= 2.0);
  CHECK(rep.min_tangential_hessian > 0.0);

  // flat-ish directions near the axes, but still uniformly convex
  auto sq = FinslerSpec::smoothed_q(2, 8.0, 0.0);
  rep = check_assumptions(sq, 5000, 1);
  CHECK(rep.min_tangential_hessian > 0.0);
  CHECK(rep.min_tangential_hessian < 0.5);

  CHECK_THROWS_AS(check_assumptions(eu, 0, 1), std::invalid_argument);
}

TEST_CASE("vector inequalities: trivial p=2 identities") {
  auto eu = FinslerSpec::euclidean(2);
  // p=2 euclidean flux is the identity: monotonicity ratio is exactly 1
  auto rep = verify_vector_inequalities(eu, 2.0, 5000, 9);
  CHECK(rep.c_mono == doctest::Approx(1.0));
  CHECK(rep.c_lip == doctest::Approx(1.0));
  CHECK(rep.min_mono_gap >= 0.0);
  CHECK(rep.min_conv_gap >= 0.0);
}

TEST_CASE("vector inequalities: sampled constants stay positive") {
  auto el = FinslerSpec::ellipse(diag_4_1());
  for (double p : {1.5, 2.0, 3.0}) {
    auto rep = verify_vector_inequalities(el, p, 20000, 123);
    CAPTURE(p);
    CHECK(rep.c_mono > 0.0);
    CHECK(rep.c_conv > 0.0);
    CHECK(rep.min_mono_gap >= 0.0);
    CHECK(rep.min_conv_gap >= -1e-13);
    CHECK(rep.c_lip < 1e3);
  }
}

TEST_CASE("ellipse p=3 sampled monotonicity constant (regression)") {
  auto el = FinslerSpec::ellipse(diag_4_1());
  auto rep = verify_vector_inequalities(el, 3.0, 100000, 2024);
  CHECK(rep.c_mono > 0.0);
  // frozen sampled minimum for (seed=2024, n=1e5); reproducible by contract
  CHECK(rep.c_mono == doctest::Approx(0.501017).epsilon(1e-5));
}

TEST_CASE("json round trip") {
  const auto specs = {FinslerSpec::euclidean(1),
                      FinslerSpec::ellipse(diag_4_1()),
                      FinslerSpec::smoothed_q(2, 4.0, 0.1)};
  for (const auto& n : specs) {
    auto m = FinslerSpec::from_json(n.to_json());
    CHECK(m.to_json() == n.to_json());
    CHECK(m.dim() == n.dim());
  }
  CHECK_THROWS(FinslerSpec::from_json({{"kind", "l1"}, {"dim", 2}}));
}

TEST_CASE("construction contracts") {
  CHECK_THROWS_AS(FinslerSpec::euclidean(0), std::invalid_argument);
  CHECK_THROWS_AS(FinslerSpec::smoothed_q(2, 1.0), std::invalid_argument);
  Mat bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(FinslerSpec::ellipse(bad), std::invalid_argument);
}
