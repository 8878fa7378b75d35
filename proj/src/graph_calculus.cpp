#include "dunif/graph_calculus.hpp"

#include "dunif/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_set>

namespace dunif {

namespace {

constexpr double kResidualTolerance = 1e-10;

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

void check_sizes(const Graph& g, const EdgeWeight* eta, const VertexField* x) {
  if (eta && eta->size() != g.edge_count()) throw Error(ErrorCode::InvalidInput, "edge weight size mismatch");
  if (x && x->size() != g.vertex_count()) throw Error(ErrorCode::InvalidInput, "vertex field size mismatch");
}

double relative_residual(const SparseMatrix& a, const VertexField& x, const VertexField& y) {
  const double scale = std::max(inf_norm(y), std::numeric_limits<double>::min());
  return inf_norm(a * x - y) / scale;
}

} // namespace

// ==========================================================
// ========================  Graph  =========================
// ==========================================================

Graph::Graph(int vertex_count, std::vector<Edge> edges) : vertex_count_(vertex_count), edges_(std::move(edges)) {
  if (vertex_count_ <= 0) throw Error(ErrorCode::InvalidInput, "graph needs at least one vertex");
  std::unordered_set<std::uint64_t> seen;
  std::vector<int> parent(vertex_count_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  int components = vertex_count_;
  for (Edge& e : edges_) {
    if (e.v0 > e.v1) std::swap(e.v0, e.v1);
    if (e.v0 < 0 || e.v1 >= vertex_count_) throw Error(ErrorCode::InvalidInput, "edge endpoint out of range");
    if (e.v0 == e.v1) throw Error(ErrorCode::InvalidInput, "self-loop");
    const std::uint64_t key = (static_cast<std::uint64_t>(e.v0) << 32) | static_cast<std::uint32_t>(e.v1);
    if (!seen.insert(key).second) throw Error(ErrorCode::InvalidInput, "repeated edge");
    const int a = find(e.v0), b = find(e.v1);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  if (components != 1) throw Error(ErrorCode::Disconnected, "graph is not connected");
}

Graph::Graph(const Triangulation& t)
    : Graph(t.vertex_count(), std::vector<Edge>(t.edges().begin(), t.edges().end())) {}

// ==========================================================
// ====================  Operators  =========================
// ==========================================================

Flow gradient(const Graph& g, const EdgeWeight& eta, const VertexField& x) {
  check_sizes(g, &eta, &x);
  Flow out(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    out[e] = eta[e] * (x[g.edge(e).v1] - x[g.edge(e).v0]);
  }
  return out;
}

VertexField divergence(const Graph& g, const Flow& x) {
  check_sizes(g, &x, nullptr);
  VertexField out = VertexField::Zero(g.vertex_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    out[g.edge(e).v0] += x[e];
    out[g.edge(e).v1] -= x[e];
  }
  return out;
}

VertexField laplacian_apply(const Graph& g, const EdgeWeight& eta, const VertexField& x) {
  return divergence(g, gradient(g, eta, x));
}

SparseMatrix laplacian_matrix(const Graph& g, const EdgeWeight& eta) {
  check_sizes(g, &eta, nullptr);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const int i = g.edge(e).v0, j = g.edge(e).v1;
    trip.emplace_back(i, j, eta[e]);
    trip.emplace_back(j, i, eta[e]);
    trip.emplace_back(i, i, -eta[e]);
    trip.emplace_back(j, j, -eta[e]);
  }
  SparseMatrix m(g.vertex_count(), g.vertex_count());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// ==========================================================
// ====================  Linear solves  =====================
// ==========================================================

MeanZeroLaplacianSolver::MeanZeroLaplacianSolver(const Graph& g, const EdgeWeight& eta) {
  check_sizes(g, &eta, nullptr);
  for (int e = 0; e < g.edge_count(); ++e) {
    if (!(eta[e] > 0.0)) {
      throw Error(ErrorCode::SingularSystem, "edge weight must be positive on edge " + std::to_string(e), e);
    }
  }
  laplacian_ = laplacian_matrix(g, eta);
  const int n = g.vertex_count();
  if (n == 1) return;
  // -Lap with vertex 0 pinned is positive definite on a connected graph.
  SparseMatrix reduced = -laplacian_.bottomRightCorner(n - 1, n - 1);
  ldlt_.compute(reduced);
  if (ldlt_.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "factorization failed");
}

VertexField MeanZeroLaplacianSolver::solve(const VertexField& y) const {
  const int n = static_cast<int>(laplacian_.rows());
  if (y.size() != n) throw Error(ErrorCode::InvalidInput, "vertex field size mismatch");
  if (std::abs(y.sum()) > 1e-10 * inf_norm(y)) {
    throw Error(ErrorCode::NotMeanZero, "right-hand side does not sum to zero");
  }
  VertexField rhs = y.array() - y.mean();
  VertexField x = VertexField::Zero(n);
  if (n == 1) return x;

  auto pinned_solve = [&](const VertexField& r) {
    VertexField out = VertexField::Zero(n);
    out.tail(n - 1) = ldlt_.solve(-r.tail(n - 1));
    out.array() -= out.mean();
    return out;
  };
  x = pinned_solve(rhs);
  // One step of iterative refinement.
  VertexField r = rhs - laplacian_ * x;
  r.array() -= r.mean();
  x += pinned_solve(r);
  x.array() -= x.mean();

  if (relative_residual(laplacian_, x, rhs) > kResidualTolerance) {
    throw Error(ErrorCode::SingularSystem, "Laplacian solve residual above tolerance");
  }
  return x;
}

VertexField solve_laplacian_mean_zero(const Graph& g, const EdgeWeight& eta, const VertexField& y) {
  check_sizes(g, &eta, &y);
  return MeanZeroLaplacianSolver(g, eta).solve(y);
}

VertexField solve_symmetric(const SparseMatrix& a, const VertexField& y) {
  if (a.rows() != a.cols() || a.rows() != y.size()) throw Error(ErrorCode::InvalidInput, "dimension mismatch");
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "factorization failed");
  VertexField x = ldlt.solve(y);
  x += ldlt.solve(VertexField(y - a * x));
  if (!x.allFinite() || relative_residual(a, x, y) > kResidualTolerance) {
    throw Error(ErrorCode::SingularSystem, "symmetric solve residual above tolerance");
  }
  return x;
}

VertexField solve_shifted(const Graph& g, const EdgeWeight& eta, const VertexField& diag, const VertexField& y) {
  check_sizes(g, &eta, &y);
  check_sizes(g, nullptr, &diag);
  for (int e = 0; e < g.edge_count(); ++e) {
    if (!(eta[e] > 0.0)) throw Error(ErrorCode::SingularSystem, "edge weight must be positive", e);
  }
  if ((diag.array() < 0.0).any() || !(diag.maxCoeff() > 0.0)) {
    throw Error(ErrorCode::SingularSystem, "diagonal must be nonnegative with a positive entry");
  }
  SparseMatrix a = -laplacian_matrix(g, eta);
  for (int i = 0; i < g.vertex_count(); ++i) a.coeffRef(i, i) += diag[i];
  return solve_symmetric(a, y);
}

// ==========================================================
// ====================  Isoperimetry  ======================
// ==========================================================

PerimeterArea perimeter_and_area(const Graph& g, const EdgeWeight& l, const std::vector<bool>& in_subset) {
  check_sizes(g, &l, nullptr);
  if (static_cast<int>(in_subset.size()) != g.vertex_count()) {
    throw Error(ErrorCode::InvalidInput, "subset mask size mismatch");
  }
  PerimeterArea out;
  for (int e = 0; e < g.edge_count(); ++e) {
    const bool a = in_subset[g.edge(e).v0], b = in_subset[g.edge(e).v1];
    out.total_area += l[e] * l[e];
    if (a && b) out.area += l[e] * l[e];
    if (a != b) out.perimeter += l[e];
  }
  return out;
}

IsoperimetricResult brute_force_isoperimetric_constant(const Graph& g, const EdgeWeight& l) {
  check_sizes(g, &l, nullptr);
  const int n = g.vertex_count();
  if (n > kMaxIsoperimetricVertices) {
    throw Error(ErrorCode::TooLarge, "exhaustive isoperimetry is limited to " +
                                         std::to_string(kMaxIsoperimetricVertices) + " vertices");
  }
  IsoperimetricResult best;
  if (n < 2) return best;
  double total = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) total += l[e] * l[e];

  // |V|_l - |V0|_l is not the area of the complement, so V0 and its
  // complement are scored separately.
  const std::uint32_t full = (1u << n) - 1u;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    double perimeter = 0.0, area = 0.0;
    for (int e = 0; e < g.edge_count(); ++e) {
      const bool a = (mask >> g.edge(e).v0) & 1u, b = (mask >> g.edge(e).v1) & 1u;
      if (a && b) area += l[e] * l[e];
      else if (a != b) perimeter += l[e];
    }
    // Connected graphs have a nonempty boundary for every proper subset.
    const double ratio = std::min(area, total - area) / (perimeter * perimeter);
    if (ratio > best.constant) {
      best.constant = ratio;
      best.extremal_subset = mask;
    }
  }
  return best;
}

// ==========================================================
// =================  Elliptic estimate  ====================
// ==========================================================

namespace {

struct LengthScales {
  double max_length;
  double sqrt_area;
};

LengthScales check_flow_hypotheses(const Graph& g, const EdgeWeight& l, const EdgeWeight& eta, const Flow& x,
                                   double c1, double c2, double c3) {
  check_sizes(g, &l, nullptr);
  check_sizes(g, &eta, nullptr);
  check_sizes(g, &x, nullptr);
  if (!(c1 >= 0.0) || !(c2 > 0.0) || !(c3 > 0.0)) {
    throw Error(ErrorCode::HypothesisViolated, "constants must be positive");
  }
  double area = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    if (!(l[e] > 0.0)) throw Error(ErrorCode::HypothesisViolated, "lengths must be positive", e);
    if (std::abs(x[e]) > c2 * l[e] * l[e] * (1.0 + 1e-12)) {
      throw Error(ErrorCode::HypothesisViolated, "|x_ij| > C2 l_ij^2 on edge " + std::to_string(e), e);
    }
    if (eta[e] < c3) throw Error(ErrorCode::HypothesisViolated, "eta_ij < C3 on edge " + std::to_string(e), e);
    area += l[e] * l[e];
  }
  return {l.maxCoeff(), std::sqrt(area)};
}

} // namespace

EllipticEstimateReport verify_elliptic_estimate(const Graph& g, const EdgeWeight& l, const EdgeWeight& eta,
                                                const Flow& x, double c1, double c2, double c3) {
  const LengthScales s = check_flow_hypotheses(g, l, eta, x, c1, c2, c3);
  EllipticEstimateReport r;
  r.lhs = inf_norm(solve_laplacian_mean_zero(g, eta, divergence(g, x)));
  r.rhs = 4.0 * c2 * std::sqrt(c1 + 1.0) / c3 * s.max_length * s.sqrt_area;
  r.holds = r.lhs <= r.rhs;
  return r;
}

EllipticEstimateReport verify_shifted_elliptic_estimate(const Graph& g, const EdgeWeight& l, const EdgeWeight& eta,
                                                        const Flow& x, const VertexField& y,
                                                        const VertexField& diag, double c1, double c2, double c3,
                                                        double c4) {
  const LengthScales s = check_flow_hypotheses(g, l, eta, x, c1, c2, c3);
  check_sizes(g, nullptr, &y);
  check_sizes(g, nullptr, &diag);
  if (!(c4 > 0.0)) throw Error(ErrorCode::HypothesisViolated, "C4 must be positive");
  for (int i = 0; i < g.vertex_count(); ++i) {
    if (std::abs(y[i]) > c4 * diag[i] * s.max_length * s.sqrt_area) {
      throw Error(ErrorCode::HypothesisViolated, "|y_i| > C4 D_ii |l| |V|^1/2 at vertex " + std::to_string(i), i);
    }
  }
  EllipticEstimateReport r;
  r.lhs = inf_norm(solve_shifted(g, eta, diag, VertexField(divergence(g, x) + y)));
  r.rhs = (c4 + 8.0 * c2 * std::sqrt(c1 + 1.0) / c3) * s.max_length * s.sqrt_area;
  r.holds = r.lhs <= r.rhs;
  return r;
}

} // namespace dunif
