#pragma once

#include "dunif/mesh_core.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cstdint>
#include <span>
#include <vector>

namespace dunif {

// Real value per vertex.
using VertexField = Eigen::VectorXd;
// Symmetric value per edge (eta_ij = eta_ji).
using EdgeWeight = Eigen::VectorXd;
// Antisymmetric value per edge, stored as x_{v0 v1} for the canonical v0 < v1;
// x_{v1 v0} = -x_{v0 v1} is implied.
using Flow = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Undirected, simple, connected graph.
class Graph {
public:
  // Throws InvalidInput on self-loops, repeated edges or out-of-range
  // endpoints, Disconnected when the edge graph is not connected.
  Graph(int vertex_count, std::vector<Edge> edges);
  explicit Graph(const Triangulation& t);

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }

private:
  int vertex_count_;
  std::vector<Edge> edges_;
};

// Value of a flow on the directed edge i -> j given edge e = {i, j}.
inline double flow_value(const Graph& g, const Flow& x, int e, int from) {
  return g.edge(e).v0 == from ? x[e] : -x[e];
}

// (grad x)_ij = eta_ij (x_j - x_i)
Flow gradient(const Graph& g, const EdgeWeight& eta, const VertexField& x);

// div(x)_i = sum_{j ~ i} x_ij
VertexField divergence(const Graph& g, const Flow& x);

// (Lap x)_i = sum_{j ~ i} eta_ij (x_j - x_i)
VertexField laplacian_apply(const Graph& g, const EdgeWeight& eta, const VertexField& x);

// Symmetric matrix of laplacian_apply (negative semidefinite for eta > 0).
SparseMatrix laplacian_matrix(const Graph& g, const EdgeWeight& eta);

// Factorization of the weighted Laplacian restricted to the mean-zero
// subspace: one coordinate is pinned, the reduced system is factored once,
// and solutions are re-projected to sum zero. Immutable after construction.
class MeanZeroLaplacianSolver {
public:
  // Throws SingularSystem if some eta_ij <= 0 or the factorization fails.
  MeanZeroLaplacianSolver(const Graph& g, const EdgeWeight& eta);

  // Returns x with sum(x) = 0 and Lap x = y. Throws NotMeanZero when
  // |sum y| > 1e-10 * |y|_inf, SingularSystem if the relative residual
  // exceeds 1e-10.
  VertexField solve(const VertexField& y) const;

private:
  SparseMatrix laplacian_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

VertexField solve_laplacian_mean_zero(const Graph& g, const EdgeWeight& eta, const VertexField& y);

// Solves (D - Lap_eta) x = y for a nonnegative diagonal D with at least one
// positive entry and eta > 0, a positive definite system. Throws
// SingularSystem when those conditions fail or the relative residual exceeds
// 1e-10.
VertexField solve_shifted(const Graph& g, const EdgeWeight& eta, const VertexField& diag, const VertexField& y);

// Same contract, on an already assembled symmetric matrix (used by the
// curvature Newton solver).
VertexField solve_symmetric(const SparseMatrix& a, const VertexField& y);

struct PerimeterArea {
  double perimeter = 0.0;  // sum of l_ij over edges leaving the subset
  double area = 0.0;       // sum of l_ij^2 over edges inside the subset
  double total_area = 0.0; // sum of l_ij^2 over all edges
};

// `in_subset[v]` marks membership of vertex v.
PerimeterArea perimeter_and_area(const Graph& g, const EdgeWeight& l, const std::vector<bool>& in_subset);

struct IsoperimetricResult {
  double constant = 0.0;
  std::uint32_t extremal_subset = 0; // bit v set <=> vertex v in the subset
};

inline constexpr int kMaxIsoperimetricVertices = 22;

// Smallest C with min(|V0|_l, |V|_l - |V0|_l) <= C |dV0|_l^2 over every
// nonempty proper subset V0. Exhaustive; throws TooLarge above 22 vertices.
IsoperimetricResult brute_force_isoperimetric_constant(const Graph& g, const EdgeWeight& l);

struct EllipticEstimateReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Checks |Lap_eta^{-1} div(x)|_inf <= 4 C2 sqrt(C1 + 1) / C3 * |l|_inf |V|_l^{1/2}.
// Throws HypothesisViolated unless |x_ij| <= C2 l_ij^2 and eta_ij >= C3 on
// every edge; C1 is taken as given (the caller certifies isoperimetry).
EllipticEstimateReport verify_elliptic_estimate(const Graph& g, const EdgeWeight& l, const EdgeWeight& eta,
                                                const Flow& x, double c1, double c2, double c3);

// Shifted form: |(D - Lap_eta)^{-1}(div(x) + y)|_inf
//   <= (C4 + 8 C2 sqrt(C1 + 1) / C3) |l|_inf |V|_l^{1/2},
// with the additional hypothesis |y_i| <= C4 D_ii |l|_inf |V|_l^{1/2}.
EllipticEstimateReport verify_shifted_elliptic_estimate(const Graph& g, const EdgeWeight& l, const EdgeWeight& eta,
                                                        const Flow& x, const VertexField& y,
                                                        const VertexField& diag, double c1, double c2, double c3,
                                                        double c4);

} // namespace dunif
