#include "dunif/surface_sampling.hpp"

#include "dunif/error.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <unordered_map>

namespace dunif {

namespace {

using Vec3 = Eigen::Vector3d;

// Points on the hyperboloid x0^2 - x1^2 - x2^2 = 1.
double minkowski(const Vec3& a, const Vec3& b) { return a[0] * b[0] - a[1] * b[1] - a[2] * b[2]; }

Vec3 hyperbolic_midpoint(const Vec3& p, const Vec3& q) {
  Vec3 s = p + q;
  return s / std::sqrt(minkowski(s, s));
}

double hyperbolic_distance(const Vec3& p, const Vec3& q) {
  Vec3 d = p - q;
  double chord = std::sqrt(std::max(0.0, -minkowski(d, d)));
  return 2.0 * std::asinh(0.5 * chord);
}

Vec2 to_disk(const Vec3& x) { return Vec2(x[1], x[2]) / (1.0 + x[0]); }

// Edge of the subdivided octagon, identified across paired sides. The
// children split it at its midpoint: child[0] touches `start`.
struct SubEdge {
  int start = -1;
  int end = -1;
  std::array<int, 2> child{-1, -1};
  int mid = -1;
};

// Side i runs from corner i to corner i+1. forward: the side is traversed
// from the stored edge's start to its end.
struct SubFace {
  std::array<int, 3> v{};
  std::array<int, 3> edge{};
  std::array<bool, 3> forward{};
  std::array<Vec3, 3> x;
};

struct Complex {
  int vertex_count = 0;
  std::vector<SubEdge> edges;
  std::vector<SubFace> faces;
};

// The regular octagon with interior angles pi/4 split into 16 equilateral
// triangles with angles pi/4: (C, M_k, M_k+1) around the center and
// (M_k, P_k+1, M_k+1) at each corner, M_k being the midpoint of side k.
// Side k runs P_k -> P_k+1 and is glued reversed to side k+2 for k in
// {0, 1, 4, 5}. Vertex classes: 0 center, 1 octagon corner, 2..5 midpoints.
Complex base_octagon() {
  constexpr double pi = std::numbers::pi;
  double cot = 1.0 / std::tan(pi / 8.0);
  double r_corner = std::acosh(cot * cot);
  double r_mid = std::acosh(cot);
  auto point = [](double r, double theta) {
    return Vec3(std::cosh(r), std::sinh(r) * std::cos(theta), std::sinh(r) * std::sin(theta));
  };
  Vec3 center(1.0, 0.0, 0.0);
  std::array<Vec3, 8> corner, mid;
  for (int k = 0; k < 8; ++k) {
    corner[k] = point(r_corner, pi * k / 4.0);
    mid[k] = point(r_mid, pi * (2 * k + 1) / 8.0);
  }
  auto mid_class = [](int k) { return 2 + (k < 4 ? k % 2 : 2 + k % 2); };

  Complex c;
  c.vertex_count = 6;
  std::array<int, 8> spoke{}, chord{};
  for (int k = 0; k < 8; ++k) {
    spoke[k] = static_cast<int>(c.edges.size());
    c.edges.push_back({0, mid_class(k)});
  }
  for (int k = 0; k < 8; ++k) {
    chord[k] = static_cast<int>(c.edges.size());
    c.edges.push_back({mid_class(k), mid_class((k + 1) % 8)});
  }
  // Halves of side j: first P_j -> M_j, second M_j -> P_j+1.
  std::array<int, 8> first{}, second{};
  std::array<bool, 8> forward{};
  for (int k : {0, 1, 4, 5}) {
    int a = static_cast<int>(c.edges.size());
    c.edges.push_back({1, mid_class(k)});
    int b = a + 1;
    c.edges.push_back({mid_class(k), 1});
    first[k] = a;
    second[k] = b;
    forward[k] = true;
    first[k + 2] = b;
    second[k + 2] = a;
    forward[k + 2] = false;
  }
  for (int k = 0; k < 8; ++k) {
    int n = (k + 1) % 8;
    SubFace inner;
    inner.v = {0, mid_class(k), mid_class(n)};
    inner.edge = {spoke[k], chord[k], spoke[n]};
    inner.forward = {true, true, false};
    inner.x = {center, mid[k], mid[n]};
    c.faces.push_back(inner);
    SubFace outer;
    outer.v = {mid_class(k), 1, mid_class(n)};
    outer.edge = {second[k], first[n], chord[k]};
    outer.forward = {forward[k], forward[n], false};
    outer.x = {mid[k], corner[n], mid[n]};
    c.faces.push_back(outer);
  }
  return c;
}

Complex subdivide(const Complex& in) {
  Complex out;
  out.vertex_count = in.vertex_count;
  std::vector<SubEdge> parent = in.edges;
  for (auto& e : parent) {
    e.mid = out.vertex_count++;
    e.child[0] = static_cast<int>(out.edges.size());
    out.edges.push_back({e.start, e.mid});
    e.child[1] = static_cast<int>(out.edges.size());
    out.edges.push_back({e.mid, e.end});
  }
  for (const SubFace& f : in.faces) {
    std::array<int, 3> m{};
    std::array<Vec3, 3> mx;
    // Halves of side i: head (corner i -> m_i) and tail (m_i -> corner i+1).
    std::array<int, 3> head{}, tail{};
    for (int i = 0; i < 3; ++i) {
      const SubEdge& e = parent[f.edge[i]];
      m[i] = e.mid;
      mx[i] = hyperbolic_midpoint(f.x[i], f.x[(i + 1) % 3]);
      head[i] = f.forward[i] ? e.child[0] : e.child[1];
      tail[i] = f.forward[i] ? e.child[1] : e.child[0];
    }
    // Interior edges m0->m1, m1->m2, m2->m0.
    int e01 = static_cast<int>(out.edges.size());
    out.edges.push_back({m[0], m[1]});
    int e12 = e01 + 1;
    out.edges.push_back({m[1], m[2]});
    int e20 = e01 + 2;
    out.edges.push_back({m[2], m[0]});
    bool fw0 = f.forward[0], fw1 = f.forward[1], fw2 = f.forward[2];

    out.faces.push_back({{m[2], f.v[0], m[0]}, {tail[2], head[0], e20}, {fw2, fw0, false}, {mx[2], f.x[0], mx[0]}});
    out.faces.push_back({{m[0], f.v[1], m[1]}, {tail[0], head[1], e01}, {fw0, fw1, false}, {mx[0], f.x[1], mx[1]}});
    out.faces.push_back({{m[1], f.v[2], m[2]}, {tail[1], head[2], e12}, {fw1, fw2, false}, {mx[1], f.x[2], mx[2]}});
    out.faces.push_back({{m[0], m[1], m[2]}, {e01, e12, e20}, {true, true, true}, {mx[0], mx[1], mx[2]}});
  }
  return out;
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

} // namespace

Genus2Sample build_octagon_mesh(int level) {
  if (level < kOctagonSimplicialLevel)
    throw Error(ErrorCode::SubdivisionTooCoarse,
                "octagon fan is not simplicial below level " + std::to_string(kOctagonSimplicialLevel));
  if (level > 8) throw Error(ErrorCode::TooLarge, "octagon subdivision level above 8");
  Complex c = base_octagon();
  for (int k = 0; k < level; ++k) c = subdivide(c);

  std::vector<Face> faces;
  faces.reserve(c.faces.size());
  std::unordered_map<std::uint64_t, double> length;
  std::vector<Vec2> disk(c.vertex_count);
  std::vector<bool> seen(c.vertex_count, false);
  for (const SubFace& f : c.faces) {
    faces.push_back({f.v[0], f.v[1], f.v[2]});
    for (int i = 0; i < 3; ++i) {
      if (!seen[f.v[i]]) {
        seen[f.v[i]] = true;
        disk[f.v[i]] = to_disk(f.x[i]);
      }
      int j = (i + 1) % 3;
      double len = hyperbolic_distance(f.x[i], f.x[j]);
      auto [it, inserted] = length.emplace(edge_key(f.v[i], f.v[j]), len);
      if (!inserted && std::abs(it->second - len) > 1e-12 * len)
        throw Error(ErrorCode::InvalidInput, "octagon side gluing is not isometric");
    }
  }

  auto tri = std::make_shared<const Triangulation>(Triangulation::build(std::move(faces)));
  std::vector<double> lengths(tri->edge_count());
  for (int e = 0; e < tri->edge_count(); ++e) lengths[e] = length.at(edge_key(tri->edge(e).v0, tri->edge(e).v1));
  return Genus2Sample{MeshMetric(tri, std::move(lengths), Geometry::Hyperbolic), std::move(disk), level};
}

Genus2Sample sample_genus2_mesh(int level, const ConformalFactor* u_synthetic, double regularity_floor) {
  if (level < kOctagonMinLevel)
    throw Error(ErrorCode::SubdivisionTooCoarse, "level " + std::to_string(level) + " leaves edges of length >= 0.1");
  Genus2Sample s = build_octagon_mesh(level);
  if (s.metric.max_length() >= 0.1)
    throw Error(ErrorCode::SubdivisionTooCoarse, "edges of length >= 0.1 remain");
  if (u_synthetic) {
    if (u_synthetic->size() != s.metric.triangulation().vertex_count())
      throw Error(ErrorCode::InvalidInput, "synthetic factor has the wrong size");
    s.metric = scale_lengths(s.metric, *u_synthetic);
  }
  if (!check_metric(s.metric).is_regular(regularity_floor, regularity_floor))
    throw Error(ErrorCode::SubdivisionTooCoarse, "sampled mesh is below the regularity floor");
  return s;
}

ConformalFactor synthetic_genus2_factor(const Genus2Sample& s, double amplitude) {
  ConformalFactor u(static_cast<Eigen::Index>(s.disk_positions.size()));
  for (std::size_t v = 0; v < s.disk_positions.size(); ++v) {
    const Vec2& z = s.disk_positions[v];
    u[static_cast<Eigen::Index>(v)] = amplitude * std::sin(2.0 * z.x() + z.y()) * std::cos(z.x() - 2.0 * z.y());
  }
  return u;
}

} // namespace dunif
