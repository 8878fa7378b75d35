#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dunif/error.hpp"
#include "dunif/surface_sampling.hpp"
#include "dunif/uniformize.hpp"
#include "oracles.hpp"

#include <random>

using namespace dunif;

namespace {

MeshMetric unit_flat_torus(int n) {
  auto t = std::make_shared<const Triangulation>(grid_torus(n));
  return MeshMetric(t, std::vector<double>(t->edge_count(), oracle::unit_area_equilateral_side(n)),
                    Geometry::Euclidean);
}

ConformalFactor random_u(std::mt19937_64& rng, int n, double amp) {
  std::uniform_real_distribution<double> d(-amp, amp);
  ConformalFactor u(n);
  for (int i = 0; i < n; ++i) u[i] = d(rng);
  return u;
}

ConformalFactor mean_zero_u(std::mt19937_64& rng, int n, double amp) {
  ConformalFactor u = random_u(rng, n, amp);
  u.array() -= u.mean();
  return u * (amp / std::max(amp, u.cwiseAbs().maxCoeff()));
}

void check_monotone(const SolveReport& r) {
  for (std::size_t k = 1; k < r.residual_history.size(); ++k)
    CHECK(r.residual_history[k] < r.residual_history[k - 1]);
}

ErrorCode solve_error(const MeshMetric& m, SolveMode mode = SolveMode::Newton) {
  SolveOptions o;
  o.mode = mode;
  try {
    uniformize(m, o);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("solve accepted the input");
  return ErrorCode::InvalidInput;
}

} // namespace

TEST_CASE("flat torus is a fixed point") {
  MeshMetric m = unit_flat_torus(8);
  CHECK(mesh_area(m, ConformalFactor::Zero(64)) == doctest::Approx(1.0).epsilon(1e-14));
  auto r = uniformize_euclidean(m);
  CHECK(r.converged());
  CHECK(r.iterations <= 1);
  CHECK(r.u.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(r.area - 1.0) < 1e-12);
}

TEST_CASE("Euclidean oracle round trip") {
  std::mt19937_64 rng(11);
  MeshMetric flat = unit_flat_torus(8);
  for (int trial = 0; trial < 5; ++trial) {
    ConformalFactor u_star = mean_zero_u(rng, 64, 0.2);
    MeshMetric scaled = scale_lengths(flat, u_star);
    auto r = uniformize_euclidean(scaled);
    REQUIRE(r.converged());
    ConformalFactor diff = r.u + u_star;
    CHECK((diff.array() - diff.mean()).abs().maxCoeff() <= 1e-8);
    CHECK(r.residual_history.back() <= 1e-10);
    CHECK(curvature(scaled, r.u).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(mesh_area(scaled, r.u) - 1.0) <= 1e-12);
    CHECK(std::abs(r.u_mean_zero.sum()) < 1e-12);
    CHECK(r.area_before_normalization > 0.0);
    check_monotone(r);
  }
}

TEST_CASE("Euclidean solution is invariant under global rescaling of the input") {
  std::mt19937_64 rng(12);
  MeshMetric scaled = scale_lengths(unit_flat_torus(6), mean_zero_u(rng, 36, 0.15));
  std::vector<double> big(scaled.lengths().begin(), scaled.lengths().end());
  for (double& x : big) x *= 3.5;
  MeshMetric stretched(scaled.shared_triangulation(), big, Geometry::Euclidean);
  auto a = uniformize_euclidean(scaled), b = uniformize_euclidean(stretched);
  REQUIRE(a.converged());
  REQUIRE(b.converged());
  auto la = scaled_lengths(scaled, a.u), lb = scaled_lengths(stretched, b.u);
  for (std::size_t k = 0; k < la.size(); ++k) CHECK(std::abs(la[k] - lb[k]) <= 1e-10 * la[k]);
  CHECK(((a.u - b.u).array() - std::log(3.5)).abs().maxCoeff() < 1e-9);
}

TEST_CASE("genus checks") {
  auto tet = std::make_shared<const Triangulation>(tetrahedron());
  MeshMetric sphere(tet, std::vector<double>(6, 1.0), Geometry::Euclidean);
  CHECK(solve_error(sphere) == ErrorCode::WrongGenus);
  MeshMetric sphere_h(tet, std::vector<double>(6, 0.05), Geometry::Hyperbolic);
  CHECK(solve_error(sphere_h) == ErrorCode::WrongGenus);
  CHECK(solve_error(sphere_h, SolveMode::Flow) == ErrorCode::WrongGenus);
  auto grid = std::make_shared<const Triangulation>(grid_torus(4));
  MeshMetric torus_h(grid, std::vector<double>(grid->edge_count(), 0.05), Geometry::Hyperbolic);
  CHECK(solve_error(torus_h) == ErrorCode::WrongGenus);
  Genus2Sample g2 = build_octagon_mesh(1);
  MeshMetric g2_flat(g2.metric.shared_triangulation(),
                     std::vector<double>(g2.metric.lengths().begin(), g2.metric.lengths().end()), Geometry::Euclidean);
  CHECK(solve_error(g2_flat) == ErrorCode::WrongGenus);
}

TEST_CASE("solve options are validated") {
  SolveOptions o;
  o.tol_curvature = 0.5;
  CHECK_THROWS_AS(o.validate(), Error);
  o = {};
  o.max_iterations = 0;
  CHECK_THROWS_AS(o.validate(), Error);
  o = {};
  o.flow_steps = 0;
  CHECK_THROWS_AS(o.validate(), Error);
  o = {};
  CHECK_NOTHROW(o.validate());
}

TEST_CASE("hyperbolic octagon: fixed point and oracle recovery") {
  Genus2Sample s = sample_genus2_mesh(kOctagonMinLevel);
  int n = s.metric.triangulation().vertex_count();
  auto fixed = uniformize_hyperbolic(s.metric);
  CHECK(fixed.converged());
  CHECK(fixed.u.cwiseAbs().maxCoeff() < 1e-10);

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 3; ++trial) {
    ConformalFactor u_star = random_u(rng, n, 0.1);
    MeshMetric scaled = scale_lengths(s.metric, u_star);
    auto r = uniformize_hyperbolic(scaled);
    REQUIRE(r.converged());
    CHECK((r.u + u_star).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(r.residual_history.back() <= 1e-10);
    check_monotone(r);

    // A different initial guess reaches the same factor.
    SolveOptions o;
    o.initial_guess = random_u(rng, n, 0.02);
    auto r2 = uniformize_hyperbolic(scaled, o);
    REQUIRE(r2.converged());
    CHECK((r2.u - r.u).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("flow mode") {
  SolveOptions flow;
  flow.mode = SolveMode::Flow;

  MeshMetric flat = unit_flat_torus(6);
  auto constant = flow_solve(flat, flow);
  CHECK(constant.converged());
  CHECK(constant.u.cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(14);
  MeshMetric e = scale_lengths(unit_flat_torus(8), mean_zero_u(rng, 64, 0.2));
  auto fe = flow_solve(e, flow);
  auto ne = uniformize_euclidean(e);
  REQUIRE(fe.converged());
  CHECK(fe.mode == SolveMode::Flow);
  CHECK((fe.u - ne.u).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(fe.flow_invariant_history.size() == static_cast<std::size_t>(flow.flow_steps));
  for (double v : fe.flow_invariant_history) CHECK(v <= 1e-10);
  CHECK(fe.max_flow_speed > 0.0);

  Genus2Sample s = sample_genus2_mesh(kOctagonMinLevel);
  MeshMetric h = scale_lengths(s.metric, random_u(rng, s.metric.triangulation().vertex_count(), 0.1));
  auto fh = flow_solve(h, flow);
  auto nh = uniformize_hyperbolic(h);
  REQUIRE(fh.converged());
  CHECK((fh.u - nh.u).cwiseAbs().maxCoeff() <= 1e-8);
  for (double v : fh.flow_invariant_history) CHECK(v <= 1e-10);
}

TEST_CASE("flow midpoint satisfies the interpolation invariant") {
  std::mt19937_64 rng(15);
  MeshMetric e = scale_lengths(unit_flat_torus(6), mean_zero_u(rng, 36, 0.15));
  SolveOptions half;
  half.mode = SolveMode::Flow;
  half.flow_steps = 2;
  auto r = flow_solve(e, half);
  REQUIRE(r.converged());
  REQUIRE(r.flow_invariant_history.size() == 2);
  // Step 1 ends at t = 1/2.
  CHECK(r.flow_invariant_history[0] <= half.tol_curvature);
}
