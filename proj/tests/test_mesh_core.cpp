#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dunif/error.hpp"
#include "dunif/mesh_core.hpp"
#include "oracles.hpp"

#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <set>

using namespace dunif;

namespace {

constexpr double pi = std::numbers::pi;

ErrorCode build_error(std::vector<Face> faces) {
  try {
    Triangulation::build(std::move(faces));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("build accepted invalid faces");
  return ErrorCode::InvalidInput;
}

// Each directed edge must appear exactly once across the oriented faces.
void check_orientation(const Triangulation& t) {
  std::set<std::pair<int, int>> directed;
  for (const Face& f : t.faces())
    for (int k = 0; k < 3; ++k) CHECK(directed.insert({f[k], f[(k + 1) % 3]}).second);
  CHECK(directed.size() == static_cast<std::size_t>(2 * t.edge_count()));
}

std::shared_ptr<const Triangulation> share(Triangulation t) { return std::make_shared<const Triangulation>(std::move(t)); }

} // namespace

TEST_CASE("grid torus and tetrahedron") {
  Triangulation g = grid_torus(3);
  CHECK(g.vertex_count() == 9);
  CHECK(g.face_count() == 18);
  CHECK(g.edge_count() == 27);
  CHECK(g.euler_characteristic() == 0);
  CHECK(g.genus() == 1);
  check_orientation(g);

  Triangulation t = tetrahedron();
  CHECK(t.euler_characteristic() == 2);
  CHECK(t.genus() == 0);
  check_orientation(t);
}

TEST_CASE("adjacency tables are consistent") {
  Triangulation g = grid_torus(5);
  for (int v = 0; v < g.vertex_count(); ++v) {
    CHECK(g.vertex_neighbors(v).size() == 6);
    for (std::size_t k = 0; k < g.vertex_neighbors(v).size(); ++k) {
      int w = g.vertex_neighbors(v)[k];
      int e = g.vertex_edges(v)[k];
      CHECK(g.find_edge(v, w) == e);
      CHECK(g.find_edge(w, v) == e);
    }
  }
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    CHECK(ed.v0 < ed.v1);
    if (e > 0) CHECK(std::pair(g.edge(e - 1).v0, g.edge(e - 1).v1) < std::pair(ed.v0, ed.v1));
    const EdgeFaces& ef = g.edge_faces(e);
    for (int s = 0; s < 2; ++s) {
      CHECK(g.face_edge(ef.face[s], ef.corner[s]) == e);
      int opposite = g.face(ef.face[s])[ef.corner[s]];
      CHECK(opposite != ed.v0);
      CHECK(opposite != ed.v1);
    }
  }
  CHECK(g.find_edge(0, 0) == -1);
}

TEST_CASE("invalid connectivity is rejected with the right code") {
  // Two faces sharing all three edges plus one more face on edge {0,1}.
  CHECK(build_error({{0, 1, 2}, {0, 2, 1}, {0, 1, 3}}) == ErrorCode::NonManifoldEdge);
  // Open surface: single triangle.
  CHECK(build_error({{0, 1, 2}}) == ErrorCode::NonManifoldEdge);
  CHECK(build_error({{0, 0, 1}}) == ErrorCode::InvalidInput);
  // A repeated face raises its edges to three incidences; on its own the
  // pair closes up into a two-face pillow.
  auto tet = tetrahedron();
  std::vector<Face> dup(tet.faces().begin(), tet.faces().end());
  dup.push_back(dup[0]);
  CHECK(build_error(dup) == ErrorCode::NonManifoldEdge);
  CHECK(build_error({{0, 1, 2}, {0, 2, 1}}) == ErrorCode::DuplicateFace);
  // Two disjoint tetrahedra.
  std::vector<Face> two(tet.faces().begin(), tet.faces().end());
  for (const Face& f : tet.faces()) two.push_back({f[0] + 4, f[1] + 4, f[2] + 4});
  CHECK(build_error(two) == ErrorCode::Disconnected);
  // Two tetrahedra glued at one vertex.
  std::vector<Face> pinched(tet.faces().begin(), tet.faces().end());
  auto shift = [](int v) { return v == 0 ? 0 : v + 3; };
  for (const Face& f : tet.faces()) pinched.push_back({shift(f[0]), shift(f[1]), shift(f[2])});
  CHECK(build_error(pinched) == ErrorCode::NonManifoldVertex);
}

TEST_CASE("non-orientable surface is rejected") {
  // Minimal 6-vertex real projective plane.
  std::vector<Face> rp2 = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 1},
                           {1, 2, 4}, {2, 3, 5}, {3, 4, 1}, {4, 5, 2}, {5, 1, 3}};
  CHECK(build_error(rp2) == ErrorCode::NonOrientable);
}

TEST_CASE("inconsistently oriented faces are reoriented") {
  auto tet = tetrahedron();
  std::vector<Face> faces(tet.faces().begin(), tet.faces().end());
  std::swap(faces[2][0], faces[2][1]);
  auto t = Triangulation::build(faces);
  check_orientation(t);
}

TEST_CASE("equilateral grid torus regularity") {
  auto t = share(grid_torus(4));
  MeshMetric m(t, std::vector<double>(t->edge_count(), 1.0), Geometry::Euclidean);
  auto r = check_metric(m);
  CHECK(std::abs(r.min_angle - pi / 3) < 1e-14);
  CHECK(std::abs(r.max_opposite_angle_sum - 2 * pi / 3) < 1e-14);
  CHECK(r.is_regular(0.5, 0.5));
  CHECK_FALSE(r.is_regular(1.1, 0.5));
  CHECK_FALSE(r.is_regular(0.5, pi / 3 + 1e-9));
}

TEST_CASE("nearly degenerate face is flagged") {
  auto t = share(tetrahedron());
  std::vector<double> l(t->edge_count(), 1.0);
  // Face 0 gets lengths (1, 1, 1.999) by stretching one of its edges.
  const Face& f = t->face(0);
  int e = t->find_edge(f[0], f[1]);
  l[e] = 1.999;
  MeshMetric m(t, l, Geometry::Euclidean);
  auto r = check_metric(m);
  double ref = static_cast<double>(oracle::euclid_angle(1.0L, 1.0L, 1.999L));
  CHECK(std::abs(r.min_angle - ref) < 1e-10);
  CHECK(r.min_angle < 0.05);
  CHECK_FALSE(r.is_regular(0.1, 0.1));
}

TEST_CASE("triangle inequality violation carries the face") {
  auto t = share(tetrahedron());
  std::vector<double> l(t->edge_count(), 1.0);
  l[0] = 2.5;
  try {
    MeshMetric m(t, l, Geometry::Euclidean);
    FAIL("expected TriangleInequalityViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TriangleInequalityViolated);
    CHECK(e.index() >= 0);
    CHECK(e.index() < t->face_count());
  }
  CHECK(find_triangle_violation(*t, l) >= 0);
  std::vector<double> ok(t->edge_count(), 1.0);
  CHECK(find_triangle_violation(*t, ok) == -1);
  CHECK_THROWS_AS(MeshMetric(t, std::vector<double>(3, 1.0), Geometry::Euclidean), Error);
  CHECK_THROWS_AS(MeshMetric(t, std::vector<double>(t->edge_count(), -1.0), Geometry::Euclidean), Error);
  CHECK_THROWS_AS(MeshMetric(t, ok, Geometry::Spherical), Error);
}

TEST_CASE("hyperbolic angles are smaller than Euclidean on the same lengths") {
  auto t = share(grid_torus(5));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(0.9, 1.1);
  std::vector<double> l(t->edge_count());
  for (double& x : l) x = 0.08 * d(rng);
  auto ae = face_angles(MeshMetric(t, l, Geometry::Euclidean));
  auto ah = face_angles(MeshMetric(t, l, Geometry::Hyperbolic));
  for (std::size_t f = 0; f < ae.size(); ++f)
    for (int k = 0; k < 3; ++k) CHECK(ah[f][k] < ae[f][k]);
}
