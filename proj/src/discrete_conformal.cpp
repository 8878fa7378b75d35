#include "dunif/discrete_conformal.hpp"

#include "dunif/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dunif {

namespace {

void check_factor(const MeshMetric& m, const ConformalFactor& u) {
  if (u.size() != m.triangulation().vertex_count()) {
    throw Error(ErrorCode::InvalidInput, "conformal factor size mismatch");
  }
  if (!u.allFinite()) throw Error(ErrorCode::InvalidInput, "conformal factor has non-finite entries");
}

double cot(double x) { return std::cos(x) / std::sin(x); }

} // namespace

std::vector<double> scaled_lengths(const MeshMetric& m, const ConformalFactor& u) {
  check_factor(m, u);
  const Triangulation& t = m.triangulation();
  std::vector<double> out(t.edge_count());
  for (int e = 0; e < t.edge_count(); ++e) {
    const double f = std::exp(0.5 * (u[t.edge(e).v0] + u[t.edge(e).v1]));
    if (m.geometry() == Geometry::Euclidean) {
      out[e] = f * m.length(e);
    } else {
      out[e] = 2.0 * std::asinh(f * std::sinh(0.5 * m.length(e)));
    }
  }
  return out;
}

MeshMetric scale_lengths(const MeshMetric& m, const ConformalFactor& u) {
  return MeshMetric(m.shared_triangulation(), scaled_lengths(m, u), m.geometry());
}

CurvatureField curvature_from_angles(const Triangulation& t, std::span<const std::array<double, 3>> angles) {
  CurvatureField k = CurvatureField::Constant(t.vertex_count(), 2.0 * std::numbers::pi);
  // Fixed face order keeps the summation reproducible.
  for (int f = 0; f < t.face_count(); ++f) {
    for (int c = 0; c < 3; ++c) k[t.face(f)[c]] -= angles[f][c];
  }
  return k;
}

CurvatureField curvature(const MeshMetric& m, const ConformalFactor& u) {
  const MeshMetric scaled = scale_lengths(m, u);
  const auto a = face_angles(scaled);
  return curvature_from_angles(m.triangulation(), a);
}

SparseMatrix CurvatureJacobian::matrix(const Graph& g) const {
  SparseMatrix a = -laplacian_matrix(g, eta);
  for (int i = 0; i < g.vertex_count(); ++i) {
    if (diag.size() > 0 && diag[i] != 0.0) a.coeffRef(i, i) += diag[i];
  }
  return a;
}

CurvatureJacobian curvature_jacobian(const MeshMetric& m, const ConformalFactor& u) {
  const MeshMetric scaled = scale_lengths(m, u);
  const Triangulation& t = m.triangulation();
  const auto a = face_angles(scaled);

  CurvatureJacobian j;
  j.geometry = m.geometry();
  j.eta = EdgeWeight::Zero(t.edge_count());
  j.diag = VertexField::Zero(t.vertex_count());

  if (m.geometry() == Geometry::Euclidean) {
    for (int e = 0; e < t.edge_count(); ++e) {
      const EdgeFaces& ef = t.edge_faces(e);
      j.eta[e] = 0.5 * cot(a[ef.face[0]][ef.corner[0]]) + 0.5 * cot(a[ef.face[1]][ef.corner[1]]);
    }
    return j;
  }

  j.w = EdgeWeight::Zero(t.edge_count());
  auto tilde = [&](int f, int k) {
    const auto& th = a[f];
    return 0.5 * (std::numbers::pi + th[k] - th[(k + 1) % 3] - th[(k + 2) % 3]);
  };
  for (int e = 0; e < t.edge_count(); ++e) {
    const EdgeFaces& ef = t.edge_faces(e);
    j.w[e] = 0.5 * cot(tilde(ef.face[0], ef.corner[0])) + 0.5 * cot(tilde(ef.face[1], ef.corner[1]));
    const double th = std::tanh(0.5 * scaled.length(e));
    j.eta[e] = j.w[e] * (1.0 - th * th);
    const double d = 2.0 * j.w[e] * th * th;
    j.diag[t.edge(e).v0] += d;
    j.diag[t.edge(e).v1] += d;
  }
  return j;
}

SparseMatrix curvature_jacobian_from_partials(const MeshMetric& m, const ConformalFactor& u) {
  const MeshMetric scaled = scale_lengths(m, u);
  const Triangulation& t = m.triangulation();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * t.face_count());
  for (int f = 0; f < t.face_count(); ++f) {
    const Eigen::Matrix3d p = conformal_angle_partials(scaled.face_sides(f), m.geometry());
    const Face& fc = t.face(f);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) trip.emplace_back(fc[r], fc[c], -p(r, c));
    }
  }
  SparseMatrix out(t.vertex_count(), t.vertex_count());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

double mesh_area(const MeshMetric& m, const ConformalFactor& u) {
  const MeshMetric scaled = scale_lengths(m, u);
  double total = 0.0;
  for (int f = 0; f < scaled.triangulation().face_count(); ++f) total += area(scaled.face_sides(f), m.geometry());
  return total;
}

} // namespace dunif
