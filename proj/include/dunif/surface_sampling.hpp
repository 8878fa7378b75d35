#pragma once

#include "dunif/discrete_conformal.hpp"
#include "dunif/uniformize.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dunif {

using Vec2 = Eigen::Vector2d;

// ==========================================================
// ==================  Conformal torus  =====================
// ==========================================================

// Metric exp(2 phi) (dx^2 + dy^2) on R^2 / Z^2 with
//   phi(x, y) = alpha (cos 2 pi x + sin 2 pi y) + beta cos 2 pi (x + y) + offset.
// The uniformizing factor with unit flat area is exactly -phi.
struct ConformalTorus {
  double alpha = 0.0;
  double beta = 0.0;
  double offset = 0.0;

  double phi(const Vec2& p) const;
  Vec2 grad_phi(const Vec2& p) const;
  Eigen::Matrix2d hess_phi(const Vec2& p) const;
  // Bounds on phi over the torus.
  double phi_min() const { return offset - 2.0 * std::abs(alpha) - std::abs(beta); }
  double phi_max() const { return offset + 2.0 * std::abs(alpha) + std::abs(beta); }
  bool is_constant() const { return alpha == 0.0 && beta == 0.0; }

  // Parses "torus", "torus:amp=0.05", "torus:amp=0.05,beta=0.01,const=0.2".
  // Throws InvalidInput on unknown keys or amplitudes above 0.1.
  static ConformalTorus parse(std::string_view spec);
  std::string describe() const;
};

struct GeodesicSolverOptions {
  int initial_segments = 64;
  int max_segments = 1 << 14;
  int max_newton_iterations = 50;
  // Relative change between successive Richardson estimates.
  double tolerance = 1e-10;
};

// Length of the shortest curve from p to q in the universal cover, by
// relaxing a polyline whose nodes sit at uniform parameters along the chord
// and move along its normal. Energy sum_k exp(phi(midpoint_k)) |segment_k|
// is minimized by Newton's method (tridiagonal Hessian); the segment count
// is doubled with Richardson extrapolation until the estimate settles.
// Throws GeodesicSolverFailed.
double geodesic_length(const ConformalTorus& t, const Vec2& p, const Vec2& q, const GeodesicSolverOptions& opts = {});

// Minimized polyline energy at a fixed segment count (no extrapolation).
double polyline_energy(const ConformalTorus& t, const Vec2& p, const Vec2& q, int segments,
                       const GeodesicSolverOptions& opts = {});

// Distance on the quotient torus: minimum over the 9 nearest lattice
// translates of q (translates that cannot beat the incumbent are skipped).
double torus_distance(const ConformalTorus& t, const Vec2& p, const Vec2& q, const GeodesicSolverOptions& opts = {});

// Flat distance on R^2 / Z^2.
double flat_torus_distance(const Vec2& p, const Vec2& q);

struct TorusSample {
  MeshMetric metric;
  ConformalFactor u_bar;        // -phi at the vertices
  std::vector<Vec2> positions;  // vertex positions in [0,1)^2
};

// n x n lattice with rows offset by half a cell: vertex (i, j) sits at
// ((i + j/2) / n, j / n), and the row above the last wraps to row 0 shifted
// by n/2. Every triangle is isosceles with angles near (63.4, 63.4, 53.1)
// degrees, so the sampled meshes are strictly Delaunay. Requires even n >= 4.
// Edge lengths are torus geodesic distances in exp(2 phi) g_flat.
TorusSample sample_torus_mesh(const ConformalTorus& t, int n, const GeodesicSolverOptions& opts = {});

// Connectivity of the lattice above (shared by sample_torus_mesh).
Triangulation offset_torus_triangulation(int n);

struct PointPair {
  Vec2 x;
  Vec2 y;
};

struct CubicEstimateEntry {
  double d_g = 0.0;       // distance in exp(2 phi) g_flat
  double d_target = 0.0;  // distance after the conformal change u = -phi (flat)
  double deviation = 0.0; // |d_target - exp((u(x) + u(y)) / 2) d_g|
  double ratio = 0.0;     // deviation / d_g^3
};

struct CubicEstimateReport {
  std::vector<CubicEstimateEntry> entries; // one per input pair
  double max_ratio = 0.0;
};

CubicEstimateReport verify_cubic_estimate(const ConformalTorus& t, std::span<const PointPair> pairs,
                                          const GeodesicSolverOptions& opts = {});

// `per_scale` base points and directions, reused at each separation
// 2^-min_exponent ... 2^-max_exponent (pairs grouped by scale, coarsest first).
std::vector<PointPair> cubic_estimate_pairs(int min_exponent, int max_exponent, int per_scale, std::uint64_t seed);

// ==========================================================
// ==============  Genus-2 hyperbolic octagon  ==============
// ==========================================================

// Smallest subdivision level whose edges are all shorter than 0.1.
inline constexpr int kOctagonMinLevel = 4;
// Coarsest level at which the subdivided fan is a simplicial complex.
inline constexpr int kOctagonSimplicialLevel = 1;

struct Genus2Sample {
  MeshMetric metric;
  // Poincare-disk position of one representative of each vertex inside the
  // fundamental octagon.
  std::vector<Vec2> disk_positions;
  int level = 0;
};

// Regular octagon with interior angles pi/4 centered in the Poincare disk,
// sides paired as a b a^-1 b^-1 c d c^-1 d^-1, split into 16 equilateral
// triangles with angles pi/4 (8 around the center, one at each corner) and
// subdivided `level` times at exact hyperbolic midpoints.
// Lengths are hyperbolic distances, so the mesh is globally hyperbolic.
// Throws SubdivisionTooCoarse below kOctagonSimplicialLevel.
Genus2Sample build_octagon_mesh(int level);

// build_octagon_mesh restricted to levels with all lengths < 0.1 and the
// mesh above the regularity floor. With u_synthetic, lengths are scaled by
// the hyperbolic vertex-scaling rule, making -u_synthetic the exact
// uniformization factor. Throws SubdivisionTooCoarse.
Genus2Sample sample_genus2_mesh(int level, const ConformalFactor* u_synthetic = nullptr,
                                double regularity_floor = 1e-3);

// Smooth-ish synthetic factor amplitude * sin(2x + y) cos(x - 2y) evaluated at
// the disk positions (|value| <= amplitude).
ConformalFactor synthetic_genus2_factor(const Genus2Sample& s, double amplitude);

// ==========================================================
// ==================  Convergence study  ===================
// ==========================================================

struct StudyRow {
  int resolution = 0;
  double h = 0.0;        // |l|_inf of the sampled mesh
  double error = 0.0;    // |u - u_bar|_inf at the vertices
  double residual = 0.0; // final |K|_inf
  double runtime_ms = 0.0;
  int iterations = 0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  // Least-squares slope of log(error) against log(h); empty when every error
  // is at round-off level (<= 1e-10), where no order can be measured.
  std::optional<double> slope;
};

double least_squares_slope(std::span<const double> x, std::span<const double> y);

// Samples the torus at each resolution, uniformizes, and compares with
// u_bar = -phi. Throws InvalidInput for fewer than 3 resolutions unless
// allow_short is set.
StudyResult torus_convergence_study(const ConformalTorus& t, std::span<const int> resolutions,
                                    const SolveOptions& solve = {}, const GeodesicSolverOptions& geo = {},
                                    bool allow_short = false);

// Recovery study on the octagon: each level is scaled by the synthetic factor
// and the solver must return its negative (error is exact, not O(h)).
StudyResult genus2_recovery_study(std::span<const int> levels, double amplitude, const SolveOptions& solve = {});

} // namespace dunif
