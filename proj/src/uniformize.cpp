#include "dunif/uniformize.hpp"

#include "dunif/error.hpp"

#include <cmath>
#include <string>

namespace dunif {

std::string_view to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::Converged: return "Converged";
  case SolveStatus::SolverDiverged: return "SolverDiverged";
  case SolveStatus::RegularityLost: return "RegularityLost";
  case SolveStatus::MaxIterations: return "MaxIterations";
  }
  return "Unknown";
}

std::string_view to_string(SolveMode m) { return m == SolveMode::Newton ? "newton" : "flow"; }

void SolveOptions::validate() const {
  auto bad = [](const char* what) { throw Error(ErrorCode::InvalidInput, std::string("invalid solve option: ") + what); };
  if (!(tol_curvature > 0.0) || !(tol_curvature < 1e-2)) bad("tol_curvature must lie in (0, 1e-2)");
  if (max_iterations <= 0) bad("max_iterations must be positive");
  if (!(backtrack_factor > 0.0) || !(backtrack_factor < 1.0)) bad("backtrack_factor must lie in (0, 1)");
  if (!(min_step > 0.0) || !(min_step < 1.0)) bad("min_step must lie in (0, 1)");
  if (!(regularity_eps1 > 0.0) || !(regularity_eps2 > 0.0)) bad("regularity floor must be positive");
  if (flow_steps <= 0) bad("flow_steps must be positive");
}

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

// Curvature residual F(u) = K(u) - target at one point, with everything the
// line search needs to accept or reject it.
struct State {
  ConformalFactor u;
  CurvatureField k;
  RegularityReport regularity;
  double residual = 0.0; // |K - target|_inf
};

enum class Rejection { None, TriangleInequality, Regularity, NoDecrease };

class CurvatureSystem {
public:
  CurvatureSystem(const MeshMetric& m, const SolveOptions& opts) : m_(m), opts_(opts), graph_(m.triangulation()) {
    target_ = CurvatureField::Zero(m.triangulation().vertex_count());
  }

  void set_target(CurvatureField target) { target_ = std::move(target); }
  const CurvatureField& target() const { return target_; }

  // Evaluates K at u; `rejection` is set when u leaves the admissible region.
  std::optional<State> evaluate(ConformalFactor u, Rejection& rejection) const {
    rejection = Rejection::None;
    if (!u.allFinite()) {
      rejection = Rejection::TriangleInequality;
      return std::nullopt;
    }
    const std::vector<double> lengths = scaled_lengths(m_, u);
    for (double l : lengths) {
      if (!std::isfinite(l) || !(l > 0.0)) {
        rejection = Rejection::TriangleInequality;
        return std::nullopt;
      }
    }
    if (find_triangle_violation(m_.triangulation(), lengths) >= 0) {
      rejection = Rejection::TriangleInequality;
      return std::nullopt;
    }
    const MeshMetric scaled(m_.shared_triangulation(), lengths, m_.geometry());
    const auto angles = face_angles(scaled);
    State s;
    s.u = std::move(u);
    s.regularity = regularity_from_angles(m_.triangulation(), angles);
    s.k = curvature_from_angles(m_.triangulation(), angles);
    s.residual = inf_norm(s.k - target_);
    if (!s.regularity.is_regular(opts_.regularity_eps1, opts_.regularity_eps2)) {
      rejection = Rejection::Regularity;
    }
    return s;
  }

  // Solves J(u) d = rhs. In the Euclidean case J = -Lap_eta is singular along
  // the constants, so rhs is projected to, and d returned in, the mean-zero
  // subspace.
  ConformalFactor solve_jacobian(const State& s, const VertexField& rhs) const {
    const CurvatureJacobian j = curvature_jacobian(m_, s.u);
    if (m_.geometry() == Geometry::Euclidean) {
      VertexField r = rhs.array() - rhs.mean();
      if (inf_norm(r) == 0.0) return ConformalFactor::Zero(r.size());
      // -Lap d = r  <=>  Lap d = -r
      return MeanZeroLaplacianSolver(graph_, j.eta).solve(-r);
    }
    return solve_symmetric(j.matrix(graph_), rhs);
  }

  const Graph& graph() const { return graph_; }

private:
  const MeshMetric& m_;
  const SolveOptions& opts_;
  Graph graph_;
  CurvatureField target_;
};

// Damped Newton on K(u) = target, starting from an admissible state.
SolveStatus run_newton(const CurvatureSystem& sys, const SolveOptions& opts, State& state, int& iterations,
                       int iteration_budget, std::vector<double>* history) {
  auto newton_step = [&](bool polish) -> std::pair<bool, Rejection> {
    const ConformalFactor d = sys.solve_jacobian(state, -(state.k - sys.target()));
    Rejection worst = Rejection::NoDecrease;
    for (double alpha = 1.0; alpha >= opts.min_step; alpha *= opts.backtrack_factor) {
      Rejection why;
      auto cand = sys.evaluate(state.u + alpha * d, why);
      if (cand && why == Rejection::None && cand->residual < state.residual) {
        state = std::move(*cand);
        return {true, Rejection::None};
      }
      if (why == Rejection::Regularity) worst = Rejection::Regularity;
      if (polish) break;
    }
    return {false, worst};
  };

  while (state.residual > opts.tol_curvature) {
    if (iterations >= iteration_budget) return SolveStatus::MaxIterations;
    const auto [ok, why] = newton_step(false);
    if (!ok) return why == Rejection::Regularity ? SolveStatus::RegularityLost : SolveStatus::SolverDiverged;
    ++iterations;
    if (history) history->push_back(state.residual);
  }
  if (opts.polish && state.residual > 0.0 && iterations < iteration_budget) {
    if (newton_step(true).first) {
      ++iterations;
      if (history) history->push_back(state.residual);
    }
  }
  return SolveStatus::Converged;
}

void check_genus(const MeshMetric& m, Geometry expected) {
  if (m.geometry() != expected) {
    throw Error(ErrorCode::InvalidInput, std::string("expected a ") + std::string(to_string(expected)) + " mesh");
  }
  const int genus = m.triangulation().genus();
  if (expected == Geometry::Euclidean && genus != 1) {
    throw Error(ErrorCode::WrongGenus, "Euclidean uniformization needs genus 1, got genus " + std::to_string(genus));
  }
  if (expected == Geometry::Hyperbolic && genus < 2) {
    throw Error(ErrorCode::WrongGenus, "hyperbolic uniformization needs genus > 1, got genus " + std::to_string(genus));
  }
}

ConformalFactor initial_factor(const MeshMetric& m, const SolveOptions& opts) {
  const int n = m.triangulation().vertex_count();
  if (!opts.initial_guess) return ConformalFactor::Zero(n);
  if (opts.initial_guess->size() != n) throw Error(ErrorCode::InvalidInput, "initial guess size mismatch");
  ConformalFactor u = *opts.initial_guess;
  // Constant shifts leave Euclidean angles unchanged; solve in the mean-zero slice.
  if (m.geometry() == Geometry::Euclidean) u.array() -= u.mean();
  return u;
}

void finish_report(const MeshMetric& m, const State& state, SolveReport& report) {
  report.regularity = state.regularity;
  if (m.geometry() == Geometry::Euclidean) {
    report.u_mean_zero = state.u;
    report.area_before_normalization = mesh_area(m, state.u);
    report.u = state.u.array() - 0.5 * std::log(report.area_before_normalization);
    report.area = mesh_area(m, report.u);
  } else {
    report.u = state.u;
    report.area = mesh_area(m, report.u);
  }
}

SolveReport newton_solve(const MeshMetric& m, const SolveOptions& opts) {
  opts.validate();
  SolveReport report;
  report.mode = SolveMode::Newton;
  report.geometry = m.geometry();

  CurvatureSystem sys(m, opts);
  Rejection why;
  auto start = sys.evaluate(initial_factor(m, opts), why);
  if (!start) throw Error(ErrorCode::TriangleInequalityViolated, "initial guess leaves the triangle-inequality domain");
  State state = std::move(*start);
  report.residual_history.push_back(state.residual);
  if (why == Rejection::Regularity) {
    report.status = SolveStatus::RegularityLost;
    report.u = state.u;
    report.regularity = state.regularity;
    return report;
  }
  report.status = run_newton(sys, opts, state, report.iterations, opts.max_iterations, &report.residual_history);
  if (report.status == SolveStatus::Converged) {
    finish_report(m, state, report);
  } else {
    report.u = state.u;
    report.regularity = state.regularity;
  }
  return report;
}

} // namespace

SolveReport flow_solve(const MeshMetric& m, const SolveOptions& opts) {
  check_genus(m, m.geometry());
  opts.validate();
  SolveReport report;
  report.mode = SolveMode::Flow;
  report.geometry = m.geometry();

  CurvatureSystem sys(m, opts);
  Rejection why;
  auto start = sys.evaluate(initial_factor(m, opts), why);
  if (!start) throw Error(ErrorCode::TriangleInequalityViolated, "initial guess leaves the triangle-inequality domain");
  State state = std::move(*start);
  report.residual_history.push_back(inf_norm(state.k));
  if (why == Rejection::Regularity) {
    report.status = SolveStatus::RegularityLost;
    report.u = state.u;
    report.regularity = state.regularity;
    return report;
  }
  const CurvatureField k0 = state.k;
  const int steps = opts.flow_steps;
  const double dt = 1.0 / steps;
  // Each correction gets the full iteration budget.
  for (int step = 1; step <= steps; ++step) {
    const double t = static_cast<double>(step) / steps;
    // Predictor: u' = J(u)^{-1} (-K(u_0)).
    if (inf_norm(k0) > 0.0) {
      const ConformalFactor velocity = sys.solve_jacobian(state, -k0);
      report.max_flow_speed = std::max(report.max_flow_speed, inf_norm(velocity));
      sys.set_target((1.0 - t) * k0);
      Rejection pred_why;
      auto pred = sys.evaluate(state.u + dt * velocity, pred_why);
      if (pred && pred_why == Rejection::None) state = std::move(*pred);
      else state = *sys.evaluate(state.u, pred_why);
    } else {
      sys.set_target((1.0 - t) * k0);
      state = *sys.evaluate(state.u, why);
    }
    int used = 0;
    const SolveStatus s = run_newton(sys, opts, state, used, opts.max_iterations, nullptr);
    report.iterations += used;
    report.flow_invariant_history.push_back(state.residual);
    report.residual_history.push_back(inf_norm(state.k));
    if (s != SolveStatus::Converged) {
      report.status = s;
      report.u = state.u;
      report.regularity = state.regularity;
      return report;
    }
  }
  report.status = SolveStatus::Converged;
  finish_report(m, state, report);
  return report;
}

SolveReport uniformize_euclidean(const MeshMetric& m, const SolveOptions& opts) {
  check_genus(m, Geometry::Euclidean);
  return opts.mode == SolveMode::Flow ? flow_solve(m, opts) : newton_solve(m, opts);
}

SolveReport uniformize_hyperbolic(const MeshMetric& m, const SolveOptions& opts) {
  check_genus(m, Geometry::Hyperbolic);
  return opts.mode == SolveMode::Flow ? flow_solve(m, opts) : newton_solve(m, opts);
}

SolveReport uniformize(const MeshMetric& m, const SolveOptions& opts) {
  return m.geometry() == Geometry::Euclidean ? uniformize_euclidean(m, opts) : uniformize_hyperbolic(m, opts);
}

} // namespace dunif
