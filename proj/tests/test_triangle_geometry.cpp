#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dunif/error.hpp"
#include "dunif/triangle_geometry.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace dunif;

namespace {

constexpr double pi = std::numbers::pi;
constexpr Geometry E = Geometry::Euclidean;
constexpr Geometry H = Geometry::Hyperbolic;
constexpr Geometry S = Geometry::Spherical;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Random nondegenerate triangle: sides from a random planar triangle with
// every angle above min_angle, scaled so the longest side is max_side.
TriangleSides random_sides(std::mt19937_64& rng, double min_angle, double max_side) {
  std::uniform_real_distribution<double> ang(min_angle, pi - 2 * min_angle);
  for (;;) {
    double A = ang(rng), B = ang(rng), C = pi - A - B;
    if (C < min_angle) continue;
    TriangleSides s{std::sin(A), std::sin(B), std::sin(C)};
    double k = max_side / s.max_side();
    return {s.a * k, s.b * k, s.c * k};
  }
}

int geometry_index(Geometry g) { return g == E ? 0 : g == H ? 1 : 2; }

} // namespace

TEST_CASE("angles: named examples") {
  auto eq = angles({1, 1, 1}, E);
  CHECK(eq.A == doctest::Approx(pi / 3).epsilon(1e-14));
  CHECK(eq.B == doctest::Approx(pi / 3).epsilon(1e-14));
  CHECK(eq.C == doctest::Approx(pi / 3).epsilon(1e-14));

  auto right = angles({0.03, 0.04, 0.05}, E);
  CHECK(std::abs(right.C - pi / 2) < 1e-14);
  CHECK(std::abs(right.sum() - pi) < 1e-14);

  auto h = angles({0.1, 0.1, 0.1}, H);
  CHECK(h.A < pi / 3);
  CHECK(std::abs(h.A - h.B) < 1e-15);
  CHECK(std::abs(h.B - h.C) < 1e-15);
  double ref = static_cast<double>(oracle::hyper_angle(0.1L, 0.1L, 0.1L));
  CHECK(std::abs(h.A - ref) < 1e-12);
}

TEST_CASE("angles agree with extended-precision laws of cosines") {
  std::mt19937_64 rng(7);
  for (Geometry g : {E, H, S}) {
    for (int i = 0; i < 300; ++i) {
      TriangleSides s = random_sides(rng, 0.05, g == E ? 2.0 : 0.5);
      auto a = angles(s, g);
      auto ref = oracle::angles(s.a, s.b, s.c, geometry_index(g));
      for (int k = 0; k < 3; ++k) CHECK(std::abs(a[k] - static_cast<double>(ref[k])) < 1e-11);
      if (g == E) CHECK(std::abs(a.sum() - pi) < 1e-12);
      if (g == H) CHECK(a.sum() < pi);
      if (g == S) CHECK(a.sum() > pi);
    }
  }
}

TEST_CASE("degenerate sides are rejected") {
  CHECK_THROWS_AS(angles({1, 1, 2}, E), Error);
  CHECK_THROWS_AS(angles({1, 1, 3}, H), Error);
  CHECK_THROWS_AS(angles({0, 1, 1}, E), Error);
  CHECK_THROWS_AS(angles({-1, 1, 1}, E), Error);
  CHECK_THROWS_AS(angles({3, 3, 3}, S), Error); // perimeter above 2 pi
  try {
    area({1, 2, 4}, E);
    FAIL("expected DegenerateTriangle");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateTriangle);
  }
}

TEST_CASE("area: named examples and Gauss-Bonnet cross-checks") {
  CHECK(rel(area({0.03, 0.04, 0.05}, E), 6e-4) < 1e-13);

  auto h = angles({0.1, 0.1, 0.1}, H);
  double ah = area({0.1, 0.1, 0.1}, H);
  CHECK(rel(ah, pi - h.sum()) < 1e-10);
  CHECK(rel(ah, static_cast<double>(oracle::hyper_area(0.1L, 0.1L, 0.1L))) < 1e-10);

  double as = area({0.05, 0.06, 0.07}, S);
  CHECK(rel(as, static_cast<double>(oracle::sphere_area(0.05L, 0.06L, 0.07L))) < 1e-10);
}

TEST_CASE("area ordering H < E < S for small sides") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    TriangleSides s = random_sides(rng, 0.02, 0.1);
    double e = area(s, E), h = area(s, H), sp = area(s, S);
    CHECK(h < e);
    CHECK(e < sp);
  }
}

TEST_CASE("cotangent area formula matches Heron") {
  CHECK(rel(area_via_cotangent({0.1, 0.1, 0.1}, H), area({0.1, 0.1, 0.1}, H)) < 1e-10);
  CHECK(rel(area_via_cotangent({0.05, 0.06, 0.07}, S), area({0.05, 0.06, 0.07}, S)) < 1e-10);
  TriangleSides thin{0.1, 0.1, 0.199999};
  CHECK(rel(area_via_cotangent(thin, H), area(thin, H)) < 1e-8);
  CHECK_THROWS_AS(area_via_cotangent({1, 1, 1}, E), Error);
}

TEST_CASE("midpoint triangle ratio") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    TriangleSides s = random_sides(rng, 0.05, 1.0);
    CHECK(rel(midpoint_triangle_area(s, E), 0.25 * area(s, E)) < 1e-12);
  }
  double rh = midpoint_triangle_area({0.1, 0.1, 0.1}, H) / area({0.1, 0.1, 0.1}, H);
  // Slightly above 1/4: the hyperbolic area deficit grows faster than l^2.
  CHECK(rh >= 0.2);
  CHECK(rh > 0.25);
  CHECK(std::abs(rh - static_cast<double>(oracle::midpoint_ratio(0.1L, 0.1L, 0.1L, 1))) < 1e-9);
  double rs = midpoint_triangle_area({0.02, 0.02, 0.03}, S) / area({0.02, 0.02, 0.03}, S);
  CHECK(rs >= 0.2);
  CHECK(rs <= 0.3);
  CHECK(std::abs(rs - static_cast<double>(oracle::midpoint_ratio(0.02L, 0.02L, 0.03L, 2))) < 1e-9);
}

TEST_CASE("angle derivatives: closed form and finite differences") {
  auto d = angle_derivatives({1, 1, 1}, E);
  CHECK(std::abs(d(0, 0) - 2 / std::sqrt(3.0)) < 1e-13);
  CHECK(std::abs(d(0, 1) + 1 / std::sqrt(3.0)) < 1e-13);
  CHECK(std::abs(d(0, 2) + 1 / std::sqrt(3.0)) < 1e-13);

  TriangleSides r{0.03, 0.04, 0.05};
  auto dr = angle_derivatives(r, E);
  CHECK(std::abs(dr(0, 1) + 1 / std::tan(angles(r, E).C) / r.b) < 1e-9);

  std::mt19937_64 rng(5);
  for (Geometry g : {E, H}) {
    for (int i = 0; i < 300; ++i) {
      TriangleSides s = i == 0 && g == H ? TriangleSides{0.05, 0.05, 0.05} : random_sides(rng, 0.1, g == E ? 1.0 : 0.1);
      auto j = angle_derivatives(s, g);
      double scale = j.cwiseAbs().maxCoeff();
      for (int col = 0; col < 3; ++col) {
        double h = 1e-6 * s[col];
        TriangleSides p = s, m = s;
        (col == 0 ? p.a : col == 1 ? p.b : p.c) += h;
        (col == 0 ? m.a : col == 1 ? m.b : m.c) -= h;
        auto ap = angles(p, g), am = angles(m, g);
        for (int row = 0; row < 3; ++row) CHECK(std::abs((ap[row] - am[row]) / (2 * h) - j(row, col)) <= 1e-6 * scale);
      }
    }
  }
}

TEST_CASE("conformal angle partials") {
  auto p = conformal_angle_partials({1, 1, 1}, E);
  CHECK(std::abs(p(0, 1) - 0.5 / std::sqrt(3.0)) < 1e-13);
  CHECK(std::abs(p(0, 2) - 0.5 / std::sqrt(3.0)) < 1e-13);
  CHECK(std::abs(p(0, 0) + 1 / std::sqrt(3.0)) < 1e-13);

  std::mt19937_64 rng(9);
  for (Geometry g : {E, H}) {
    for (int i = 0; i < 300; ++i) {
      TriangleSides s = i == 0 && g == H ? TriangleSides{0.05, 0.06, 0.07} : random_sides(rng, 0.1, g == E ? 1.0 : 0.1);
      auto j = conformal_angle_partials(s, g);
      if (g == E)
        for (int row = 0; row < 3; ++row) CHECK(std::abs(j.row(row).sum()) < 1e-12 * j.cwiseAbs().maxCoeff());
      double scale = j.cwiseAbs().maxCoeff();
      for (int col = 0; col < 3; ++col) {
        Eigen::Vector3d du = Eigen::Vector3d::Zero();
        du[col] = 1e-6;
        auto ap = angles(scale_triangle(s, du, g), g), am = angles(scale_triangle(s, -du, g), g);
        for (int row = 0; row < 3; ++row) CHECK(std::abs((ap[row] - am[row]) / 2e-6 - j(row, col)) <= 1e-6 * scale);
      }
    }
  }
}

TEST_CASE("scale_triangle scales sides by the vertex rule") {
  TriangleSides s{0.05, 0.06, 0.07};
  Eigen::Vector3d u(0.1, -0.2, 0.3);
  auto e = scale_triangle(s, u, E);
  CHECK(rel(e.a, std::exp((u[1] + u[2]) / 2) * s.a) < 1e-15);
  CHECK(rel(e.c, std::exp((u[0] + u[1]) / 2) * s.c) < 1e-15);
  auto h = scale_triangle(s, u, H);
  CHECK(rel(std::sinh(h.b / 2), std::exp((u[0] + u[2]) / 2) * std::sinh(s.b / 2)) < 1e-14);
  auto back = scale_triangle(h, -u, H);
  CHECK(rel(back.a, s.a) < 1e-13);
  CHECK(rel(back.b, s.b) < 1e-13);
  CHECK(rel(back.c, s.c) < 1e-13);
}

TEST_CASE("small-length limit: hyperbolic angles approach Euclidean at second order") {
  TriangleSides base{0.8, 0.9, 1.1};
  auto dev = [&](double t) {
    TriangleSides s{base.a * t, base.b * t, base.c * t};
    auto h = angles(s, H), e = angles(s, E);
    return std::abs(h.A - e.A);
  };
  double ratio = dev(0.02) / dev(0.01);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("perturbation bound examples") {
  TriangleSides eq{1, 1, 1};
  double delta = 1e-3;
  auto r = perturbation_bound_check(eq, {1 + delta, 1, 1}, pi / 3, E);
  CHECK(r.bound_ok);
  CHECK(r.angle_dev <= 24 * delta / (pi / 3));
  CHECK(r.angle_bound == doctest::Approx(24 * delta / (pi / 3)));

  auto same = perturbation_bound_check(eq, eq, pi / 3, E);
  CHECK(same.angle_dev == 0.0);
  CHECK(same.area_dev == 0.0);

  TriangleSides h{0.1, 0.1, 0.1};
  double eps = angles(h, H).min();
  double dh = eps * eps * eps / 100;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> sign(-1, 1);
  auto rh = perturbation_bound_check(h, {0.1 * (1 + dh * sign(rng)), 0.1 * (1 + dh * sign(rng)), 0.1 * (1 + dh * sign(rng))},
                                     eps, H);
  CHECK(rh.bound_ok);
}

TEST_CASE("perturbation preconditions are enforced") {
  auto expect = [](auto f) {
    try {
      f();
      FAIL("expected PreconditionViolated");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PreconditionViolated);
    }
  };
  // eps above the smallest angle
  expect([] { perturbation_bound_check({0.03, 0.04, 0.05}, {0.03, 0.04, 0.05}, 1.0, E); });
  // delta too large for eps^2/48
  expect([] { perturbation_bound_check({1, 1, 1}, {1.1, 1, 1}, pi / 3, E); });
  // hyperbolic side above 0.1
  expect([] { perturbation_bound_check({0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, 0.5, H); });
}
