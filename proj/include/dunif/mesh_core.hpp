#pragma once

#include "dunif/triangle_geometry.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace dunif {

using Face = std::array<int, 3>;

// Undirected edge with canonical key v0 < v1. Flows live on the v0 -> v1
// direction.
struct Edge {
  int v0 = 0;
  int v1 = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// The two faces on either side of an edge, and for each the corner slot
// (0..2) opposite to the edge.
struct EdgeFaces {
  std::array<int, 2> face{-1, -1};
  std::array<int, 2> corner{-1, -1};
};

// Closed, connected, orientable simplicial surface. Immutable once built.
class Triangulation {
public:
  // Validates and builds adjacency. Faces may be given with inconsistent
  // orientation; they are reoriented to agree with face 0.
  // Throws InvalidInput, DuplicateFace, NonManifoldEdge, NonManifoldVertex,
  // NonOrientable or Disconnected.
  static Triangulation build(std::vector<Face> faces);

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }

  std::span<const Face> faces() const { return faces_; }
  const Face& face(int f) const { return faces_[f]; }
  // Edges sorted lexicographically by (v0, v1).
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }

  // face_edge(f, k) is the edge opposite corner k of face f.
  int face_edge(int f, int k) const { return face_edges_[f][k]; }
  const EdgeFaces& edge_faces(int e) const { return edge_faces_[e]; }

  // Index of edge {i, j}, or -1.
  int find_edge(int i, int j) const;

  std::span<const int> vertex_neighbors(int v) const;
  std::span<const int> vertex_edges(int v) const;

  int euler_characteristic() const { return vertex_count() - edge_count() + face_count(); }
  int genus() const { return (2 - euler_characteristic()) / 2; }

private:
  Triangulation() = default;

  int vertex_count_ = 0;
  std::vector<Face> faces_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> face_edges_;
  std::vector<EdgeFaces> edge_faces_;
  // CSR adjacency; neighbors sorted ascending.
  std::vector<int> adj_offsets_;
  std::vector<int> adj_vertices_;
  std::vector<int> adj_edges_;
};

// n x n periodic grid, each square split along the same diagonal. Every
// vertex has degree 6, so with unit lengths the metric is flat.
// Requires n >= 3.
Triangulation grid_torus(int n);

// Tetrahedron boundary (genus 0).
Triangulation tetrahedron();

class MeshMetric {
public:
  // Throws InvalidInput (size mismatch, non-positive length, spherical tag)
  // or TriangleInequalityViolated carrying the face index.
  MeshMetric(std::shared_ptr<const Triangulation> triangulation, std::vector<double> lengths,
             Geometry geometry);

  const Triangulation& triangulation() const { return *triangulation_; }
  const std::shared_ptr<const Triangulation>& shared_triangulation() const { return triangulation_; }
  std::span<const double> lengths() const { return lengths_; }
  double length(int e) const { return lengths_[e]; }
  Geometry geometry() const { return geometry_; }

  TriangleSides face_sides(int f) const;
  double max_length() const;

private:
  std::shared_ptr<const Triangulation> triangulation_;
  std::vector<double> lengths_;
  Geometry geometry_;
};

// Relative slack used for the strict triangle inequality on meshes:
// a + b - c >= kTriangleSlack * max(a, b, c).
inline constexpr double kTriangleSlack = 1e-12;

// Index of the first face violating the slackened triangle inequality, or -1.
int find_triangle_violation(const Triangulation& t, std::span<const double> lengths);

// Inner angles of every face, corner k of face f at [f][k].
std::vector<std::array<double, 3>> face_angles(const MeshMetric& m);

struct RegularityReport {
  double min_angle = 0.0;
  int min_angle_face = -1;
  int min_angle_corner = -1;
  double max_opposite_angle_sum = 0.0;
  int max_sum_edge = -1;

  bool is_regular(double eps1, double eps2) const;
};

RegularityReport regularity_from_angles(const Triangulation& t, std::span<const std::array<double, 3>> angles);

RegularityReport check_metric(const MeshMetric& m);

} // namespace dunif
