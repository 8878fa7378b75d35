#include "dunif/surface_sampling.hpp"

#include "dunif/error.hpp"

#include <chrono>
#include <cmath>

namespace dunif {

namespace {

constexpr double kRoundOffError = 1e-10;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double max_abs_diff(const ConformalFactor& a, const ConformalFactor& b) { return (a - b).lpNorm<Eigen::Infinity>(); }

std::optional<double> fit_slope(const std::vector<StudyRow>& rows) {
  std::vector<double> x, y;
  bool measurable = false;
  for (const auto& r : rows) {
    if (r.error > kRoundOffError) measurable = true;
    x.push_back(std::log(r.h));
    y.push_back(std::log(std::max(r.error, 1e-300)));
  }
  if (!measurable || rows.size() < 2) return std::nullopt;
  return least_squares_slope(x, y);
}

StudyRow require_converged(const SolveReport& rep, int resolution) {
  if (!rep.converged())
    throw Error(rep.status == SolveStatus::RegularityLost ? ErrorCode::RegularityLost : ErrorCode::SolverDiverged,
                "solve at resolution " + std::to_string(resolution) + " ended with status " +
                    std::string(to_string(rep.status)));
  StudyRow row;
  row.resolution = resolution;
  row.iterations = rep.iterations;
  row.residual = rep.residual_history.empty() ? 0.0 : rep.residual_history.back();
  return row;
}

} // namespace

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidInput, "slope needs two or more points");
  double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InvalidInput, "slope needs distinct abscissae");
  return sxy / sxx;
}

StudyResult torus_convergence_study(const ConformalTorus& t, std::span<const int> resolutions,
                                    const SolveOptions& solve, const GeodesicSolverOptions& geo, bool allow_short) {
  if (resolutions.size() < 3 && !allow_short)
    throw Error(ErrorCode::InvalidInput, "a convergence study needs at least 3 resolutions");
  StudyResult result;
  for (int n : resolutions) {
    auto start = Clock::now();
    TorusSample sample = sample_torus_mesh(t, n, geo);
    SolveReport rep = uniformize_euclidean(sample.metric, solve);
    StudyRow row = require_converged(rep, n);
    row.runtime_ms = elapsed_ms(start);
    row.h = sample.metric.max_length();
    row.error = max_abs_diff(rep.u, sample.u_bar);
    result.rows.push_back(row);
  }
  result.slope = fit_slope(result.rows);
  return result;
}

StudyResult genus2_recovery_study(std::span<const int> levels, double amplitude, const SolveOptions& solve) {
  if (levels.empty()) throw Error(ErrorCode::InvalidInput, "no levels given");
  StudyResult result;
  for (int level : levels) {
    auto start = Clock::now();
    Genus2Sample base = build_octagon_mesh(level);
    ConformalFactor u_star = synthetic_genus2_factor(base, amplitude);
    Genus2Sample sample = sample_genus2_mesh(level, &u_star, solve.regularity_eps1);
    SolveReport rep = uniformize_hyperbolic(sample.metric, solve);
    StudyRow row = require_converged(rep, level);
    row.runtime_ms = elapsed_ms(start);
    row.h = sample.metric.max_length();
    row.error = max_abs_diff(rep.u, -u_star);
    result.rows.push_back(row);
  }
  result.slope = fit_slope(result.rows);
  return result;
}

} // namespace dunif
