#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "anisop/fem.hpp"
#include "anisop/rng.hpp"

using namespace anisop;

namespace {

DiscreteField interpolate(const Grid& g, double (*fn)(double, double)) {
  DiscreteField u(g);
  for (int i = 0; i < u.size(); ++i)
    u[i] = fn(g.vertices[i][0], g.vertices[i][1]);
  return u;
}

DiscreteField random_interior(const Grid& g, std::uint64_t seed) {
  CounterRng rng(seed);
  DiscreteField u(g);
  for (int i = 0; i < u.size(); ++i)
    if (!g.boundary_mask[i]) u[i] = rng.normal(i);
  return u;
}

}  // namespace

TEST_CASE("build_grid: counts, mesh size, errors") {
  const Grid sq = build_grid(Domain::rectangle(1, 1), 2);
  CHECK(sq.n_vertices() == 9);
  CHECK(sq.cells.size() == 8);
  CHECK(sq.n_interior() == 1);

  const Grid in = build_grid(Domain::interval(1), 4);
  CHECK(in.n_vertices() == 5);
  CHECK(in.cells.size() == 4);
  CHECK(in.h == doctest::Approx(0.25));

  CHECK_THROWS_AS(build_grid(Domain::interval(1), 0), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(Domain::interval(-1), 4), std::invalid_argument);

  double total = 0.0;
  for (const auto& c : sq.cells) {
    CHECK(c.measure > 0.0);
    total += c.measure;
  }
  CHECK(total == doctest::Approx(1.0));  // cells tile the domain
}

TEST_CASE("energy: closed-form values") {
  auto eu1 = FinslerSpec::euclidean(1);
  const Grid in = build_grid(Domain::interval(1), 64);
  DiscreteField zero(in);
  CHECK(energy(in, eu1, 2.0, zero) == 0.0);

  DiscreteField x = interpolate(in, [](double a, double) { return a; });
  CHECK(energy(in, eu1, 2.0, x) == doctest::Approx(0.5));

  const Grid sq = build_grid(Domain::rectangle(1, 1), 16);
  auto el = FinslerSpec::ellipse([] {
    Mat A(2, 2);
    A << 4, 0, 0, 1;
    return A;
  }());
  DiscreteField xf = interpolate(sq, [](double a, double) { return a; });
  CHECK(energy(sq, el, 2.0, xf) == doctest::Approx(2.0));
}

TEST_CASE("energy_gradient: zero field, finite-difference oracle") {
  const Grid sq = build_grid(Domain::rectangle(1, 1), 8);
  auto eu = FinslerSpec::euclidean(2);
  DiscreteField zero(sq);
  CHECK(energy_gradient(sq, eu, 3.0, zero).max_abs() == 0.0);

  // directional derivatives against central differences of the energy
  for (double p : {1.7, 2.0, 3.0})
    for (int trial = 0; trial < 20; ++trial) {
      DiscreteField u = random_interior(sq, 100 + trial);
      DiscreteField G = energy_gradient(sq, eu, p, u);
      for (int dir = 0; dir < 5; ++dir) {
        DiscreteField v = random_interior(sq, 999 * (dir + 1) + trial);
        double gv = 0.0;
        for (int i = 0; i < G.size(); ++i) gv += G[i] * v[i];
        const double t = 1e-6;
        DiscreteField up = u, um = u;
        for (int i = 0; i < u.size(); ++i) {
          up[i] += t * v[i];
          um[i] -= t * v[i];
        }
        const double fd =
            (energy(sq, eu, p, up) - energy(sq, eu, p, um)) / (2 * t);
        CHECK(gv == doctest::Approx(fd).epsilon(1e-6));
      }
    }
}

TEST_CASE("energy_gradient at p=2 euclidean equals the stiffness action") {
  const Grid sq = build_grid(Domain::rectangle(1, 1), 12);
  auto eu = FinslerSpec::euclidean(2);
  const auto interior = sq.interior_indices();
  const SpMat A = p2_stiffness_matrix(sq, interior);
  for (int trial = 0; trial < 5; ++trial) {
    DiscreteField u = random_interior(sq, 55 + trial);
    DiscreteField G = energy_gradient(sq, eu, 2.0, u);
    Vec ui(interior.size());
    for (size_t k = 0; k < interior.size(); ++k) ui[k] = u[interior[k]];
    Vec Au = A * ui;
    for (size_t k = 0; k < interior.size(); ++k)
      CHECK(G[interior[k]] == doctest::Approx(Au[k]).epsilon(1e-12));
  }
}

TEST_CASE("energy is convex along segments") {
  const Grid sq = build_grid(Domain::rectangle(1, 1), 8);
  auto el = FinslerSpec::ellipse([] {
    Mat A(2, 2);
    A << 2, 0.5, 0.5, 1;
    return A;
  }());
  for (double p : {1.5, 2.5})
    for (int trial = 0; trial < 20; ++trial) {
      DiscreteField u = random_interior(sq, trial);
      DiscreteField v = random_interior(sq, 1000 + trial);
      DiscreteField mid(sq);
      for (int i = 0; i < u.size(); ++i) mid[i] = 0.5 * (u[i] + v[i]);
      CHECK(energy(sq, el, p, mid) <=
            0.5 * (energy(sq, el, p, u) + energy(sq, el, p, v)) + 1e-12);
    }
}

TEST_CASE("lumped mass: partition of measure") {
  const Grid in = build_grid(Domain::interval(1), 10);
  auto q = lumped_mass(in);
  CHECK(q.weights[0] == doctest::Approx(0.05));
  CHECK(q.weights[5] == doctest::Approx(0.1));
  CHECK(std::accumulate(q.weights.begin(), q.weights.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-14));

  const Grid sq = build_grid(Domain::rectangle(1, 1), 2);
  q = lumped_mass(sq);
  CHECK(std::accumulate(q.weights.begin(), q.weights.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  // corner (0,0): one adjacent pair of triangles, weight = 2*(1/8)/3
  CHECK(q.weights[0] == doctest::Approx(2.0 / 8.0 / 3.0));

  double total = 0.0;
  for (double w : q.weights) {
    CHECK(w > 0.0);
    total += w;
  }
  CHECK(total == doctest::Approx(sq.domain.measure()));
}

TEST_CASE("seminorm and lp norm") {
  const Grid in = build_grid(Domain::interval(1), 32);
  auto eu = FinslerSpec::euclidean(1);
  auto q = lumped_mass(in);
  DiscreteField zero(in);
  CHECK(seminorm_p(in, eu, 2.0, zero) == 0.0);
  CHECK(lp_norm(in, q, 2.0, zero) == 0.0);

  DiscreteField x = interpolate(in, [](double a, double) { return a; });
  CHECK(seminorm_p(in, eu, 3.0, x) == doctest::Approx(1.0));
  // seminorm^p = p * energy
  for (double p : {1.5, 2.0, 4.0})
    CHECK(std::pow(seminorm_p(in, eu, p, x), p) ==
          doctest::Approx(p * energy(in, eu, p, x)));
}

TEST_CASE("distance field: interval and square") {
  const Grid in = build_grid(Domain::interval(1), 10);
  auto d = distance_field(in);
  CHECK(d[3] == doctest::Approx(0.3));
  CHECK(d[0] == 0.0);
  CHECK(d[10] == 0.0);

  const Grid sq = build_grid(Domain::rectangle(1, 1), 8);
  auto d2 = distance_field(sq);
  const int center = 4 * 9 + 4;
  CHECK(d2[center] == doctest::Approx(0.5));
  for (int i = 0; i < sq.n_vertices(); ++i)
    if (sq.boundary_mask[i]) CHECK(d2[i] == 0.0);
}

TEST_CASE("field csv export") {
  const Grid in = build_grid(Domain::interval(1), 2);
  DiscreteField u(in, 1.5);
  const std::string path = "test_field_export.csv";
  u.write_csv(path);
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  CHECK(line == "x,value");
  std::getline(f, line);
  CHECK(line == "0,1.5");
  std::remove(path.c_str());
}
