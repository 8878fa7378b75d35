#pragma once

#include "dunif/discrete_conformal.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace dunif {

enum class SolveMode { Newton, Flow };

enum class SolveStatus {
  Converged,
  SolverDiverged,  // backtracking fell below the minimum step
  RegularityLost,  // no admissible step keeps the mesh above the regularity floor
  MaxIterations,
};

std::string_view to_string(SolveStatus s);
std::string_view to_string(SolveMode m);

struct SolveOptions {
  double tol_curvature = 1e-10; // on |K|_inf
  int max_iterations = 100;
  double backtrack_factor = 0.5;
  double min_step = 1.0 / (1 << 20);
  double regularity_eps1 = 1e-3;
  double regularity_eps2 = 1e-3;
  SolveMode mode = SolveMode::Newton;
  int flow_steps = 64;
  // After reaching the tolerance, take one more full Newton step if it
  // lowers the residual further.
  bool polish = true;
  // Initial guess; zero when empty.
  std::optional<ConformalFactor> initial_guess;

  // Throws InvalidInput when a field is out of range.
  void validate() const;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  SolveMode mode = SolveMode::Newton;
  Geometry geometry = Geometry::Euclidean;
  ConformalFactor u;
  // Euclidean: the mean-zero representative solved for before the area shift.
  ConformalFactor u_mean_zero;
  int iterations = 0;
  std::vector<double> residual_history; // |K|_inf, initial value first
  RegularityReport regularity;
  double area_before_normalization = 0.0; // Euclidean only
  double area = 0.0;                      // final mesh area
  // Flow mode diagnostics.
  double max_flow_speed = 0.0;                // max |u'|_inf over the predictor steps
  std::vector<double> flow_invariant_history; // |K(u(t_k)) - (1 - t_k) K(u_0)|_inf per step

  bool converged() const { return status == SolveStatus::Converged; }
};

// Solves K(u) = 0 on a genus-1 Euclidean mesh, then shifts u by the constant
// making the scaled mesh area 1. Throws WrongGenus, InvalidInput.
SolveReport uniformize_euclidean(const MeshMetric& m, const SolveOptions& opts = {});

// Solves K(u) = 0 on a hyperbolic mesh of genus > 1. Throws WrongGenus,
// InvalidInput.
SolveReport uniformize_hyperbolic(const MeshMetric& m, const SolveOptions& opts = {});

// Curvature-interpolation flow: integrates dK/du u' = -K(u_0) over t in [0,1]
// by explicit Euler steps, each followed by a Newton correction onto
// K(u(t_k)) = (1 - t_k) K(u_0). Dispatches on the geometry tag.
SolveReport flow_solve(const MeshMetric& m, const SolveOptions& opts = {});

// Dispatch on geometry and opts.mode.
SolveReport uniformize(const MeshMetric& m, const SolveOptions& opts = {});

} // namespace dunif
