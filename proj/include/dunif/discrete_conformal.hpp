#pragma once

#include "dunif/graph_calculus.hpp"
#include "dunif/mesh_core.hpp"

#include <Eigen/Core>

#include <vector>

namespace dunif {

// Discrete conformal factor: one log-scale per vertex.
using ConformalFactor = Eigen::VectorXd;
// Angle defect per vertex, in radians.
using CurvatureField = Eigen::VectorXd;

// Vertex scaling l'_ij = exp((u_i + u_j)/2) l_ij (Euclidean) or
// sinh(l'_ij/2) = exp((u_i + u_j)/2) sinh(l_ij/2) (hyperbolic).
// Throws TriangleInequalityViolated when the scaled lengths leave the
// triangle-inequality domain.
MeshMetric scale_lengths(const MeshMetric& m, const ConformalFactor& u);

// Scaled lengths without constructing (and validating) a MeshMetric.
std::vector<double> scaled_lengths(const MeshMetric& m, const ConformalFactor& u);

// K_i = 2 pi - sum of the angles at i, in the scaled metric.
CurvatureField curvature(const MeshMetric& m, const ConformalFactor& u);
CurvatureField curvature_from_angles(const Triangulation& t, std::span<const std::array<double, 3>> angles);

// dK/du. Euclidean: -Lap_eta with cotangent weights
//   eta_ij = (cot theta^k_ij + cot theta^k'_ij) / 2.
// Hyperbolic: D - Lap_eta with
//   w_ij   = (cot tilde^k_ij + cot tilde^k'_ij) / 2,
//   eta_ij = w_ij (1 - tanh^2(l'_ij / 2)),
//   D_ii   = 2 sum_j w_ij tanh^2(l'_ij / 2),
// where tilde^k_ij = (pi + theta^k_ij - theta^i_jk - theta^j_ik) / 2.
struct CurvatureJacobian {
  Geometry geometry = Geometry::Euclidean;
  EdgeWeight eta; // per edge
  EdgeWeight w;   // hyperbolic only, empty otherwise
  VertexField diag; // D; zero for Euclidean

  // Assembled symmetric matrix D - Lap_eta.
  SparseMatrix matrix(const Graph& g) const;
};

CurvatureJacobian curvature_jacobian(const MeshMetric& m, const ConformalFactor& u);

// Independent route to dK/du: sums the per-triangle conformal angle partials.
// Used to cross-check the closed form.
SparseMatrix curvature_jacobian_from_partials(const MeshMetric& m, const ConformalFactor& u);

// Total area of the scaled mesh in its background geometry.
double mesh_area(const MeshMetric& m, const ConformalFactor& u);

} // namespace dunif
