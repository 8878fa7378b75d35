// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include "dunif/surface_sampling.hpp"
#include "dunif/uniformize.hpp"
#include "dunif/verification.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace dunif;

namespace {

constexpr double pi = std::numbers::pi;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

double inf(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("AC%-2d %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Gauss-Bonnet residual of a mesh at u: |sum K - 2 pi chi - area| (area term
// only for hyperbolic meshes).
double gauss_bonnet_gap(const MeshMetric& m, const ConformalFactor& u) {
  double total = curvature(m, u).sum();
  double expected = 2 * pi * m.triangulation().euler_characteristic();
  if (m.geometry() == Geometry::Hyperbolic) expected += mesh_area(m, u);
  return std::abs(total - expected);
}

struct OracleInstance {
  MeshMetric metric;
  ConformalFactor u_star;
  ConformalFactor u_newton;
};

double worst_gauss_bonnet = 0.0;

void track(const MeshMetric& m, const ConformalFactor& u) {
  worst_gauss_bonnet = std::max(worst_gauss_bonnet, gauss_bonnet_gap(m, u));
}

std::vector<OracleInstance> euclidean_recovery(std::mt19937_64& rng) {
  const int n = 16;
  auto t = std::make_shared<const Triangulation>(grid_torus(n));
  MeshMetric flat(t, std::vector<double>(t->edge_count(), oracle::unit_area_equilateral_side(n)), Geometry::Euclidean);
  std::uniform_real_distribution<double> d(-0.2, 0.2);
  std::vector<OracleInstance> out;
  double worst_err = 0, worst_res = 0, worst_time = 0;
  int rejected = 0;
  bool ok = std::abs(mesh_area(flat, ConformalFactor::Zero(n * n)) - 1.0) < 1e-13;
  while (out.size() < 20) {
    ConformalFactor u_star(n * n);
    for (int i = 0; i < n * n; ++i) u_star[i] = d(rng);
    u_star.array() -= u_star.mean();
    if (inf(u_star) > 0.2) u_star *= 0.2 / inf(u_star);
    MeshMetric scaled = scale_lengths(flat, u_star);
    if (!check_metric(scaled).is_regular(0.05, 0.05)) {
      ++rejected;
      continue;
    }
    track(scaled, ConformalFactor::Zero(n * n));
    auto start = Clock::now();
    SolveReport r = uniformize_euclidean(scaled);
    double elapsed = seconds_since(start);
    ConformalFactor diff = r.u + u_star;
    double err = inf((diff.array() - diff.mean()).matrix());
    double res = inf(curvature(scaled, r.u));
    track(scaled, r.u);
    ok = ok && r.converged() && err <= 1e-8 && res <= 1e-10 && elapsed < 5.0;
    worst_err = std::max(worst_err, err);
    worst_res = std::max(worst_res, res);
    worst_time = std::max(worst_time, elapsed);
    out.push_back({scaled, u_star, r.u});
  }
  report(1, ok,
         fmt("Euclidean recovery, 20 solves on 16x16 torus (%d draws rejected): max error %.2e (<=1e-8), "
             "max |K| %.2e (<=1e-10), slowest %.3fs (<5s)",
             rejected, worst_err, worst_res, worst_time));
  return out;
}

std::vector<OracleInstance> hyperbolic_recovery(std::mt19937_64& rng) {
  Genus2Sample base = sample_genus2_mesh(kOctagonMinLevel);
  const int nv = base.metric.triangulation().vertex_count();
  std::uniform_real_distribution<double> d(-0.1, 0.1);
  std::vector<OracleInstance> out;
  double worst_err = 0, worst_res = 0, worst_time = 0;
  int rejected = 0;
  bool ok = base.metric.max_length() < 0.1;
  while (out.size() < 20) {
    ConformalFactor u_star(nv);
    for (int i = 0; i < nv; ++i) u_star[i] = d(rng);
    MeshMetric scaled = scale_lengths(base.metric, u_star);
    if (!check_metric(scaled).is_regular(1e-3, 1e-3)) {
      ++rejected;
      continue;
    }
    track(scaled, ConformalFactor::Zero(nv));
    auto start = Clock::now();
    SolveReport r = uniformize_hyperbolic(scaled);
    double elapsed = seconds_since(start);
    double err = inf(r.u + u_star);
    double res = inf(curvature(scaled, r.u));
    track(scaled, r.u);
    ok = ok && r.converged() && err <= 1e-8 && res <= 1e-10 && elapsed < 30.0;
    worst_err = std::max(worst_err, err);
    worst_res = std::max(worst_res, res);
    worst_time = std::max(worst_time, elapsed);
    out.push_back({scaled, u_star, r.u});
  }
  report(2, ok,
         fmt("Hyperbolic recovery, 20 solves on the level-%d octagon mesh (V=%d, max length %.4f, %d rejected): "
             "max error %.2e (<=1e-8), max |K| %.2e (<=1e-10), slowest %.3fs (<30s)",
             kOctagonMinLevel, nv, base.metric.max_length(), rejected, worst_err, worst_res, worst_time));
  return out;
}

void convergence_order() {
  ConformalTorus t = ConformalTorus::parse("torus:amp=0.05");
  std::vector<int> res{8, 16, 32, 64};
  auto start = Clock::now();
  StudyResult r = torus_convergence_study(t, res);
  double elapsed = seconds_since(start);
  for (int n : res) {
    TorusSample s = sample_torus_mesh(t, n);
    track(s.metric, ConformalFactor::Zero(n * n));
  }
  std::string rows;
  for (const auto& row : r.rows) rows += fmt(" n=%d:h=%.4f,err=%.3e", row.resolution, row.h, row.error);
  bool ok = r.slope && *r.slope >= 0.9 && elapsed < 600.0;
  report(3, ok, fmt("Convergence order, slope %.4f (>=0.9), total %.1fs (<600s);%s", r.slope.value_or(NAN), elapsed,
                    rows.c_str()));
}

void cubic_estimate() {
  ConformalTorus t = ConformalTorus::parse("torus:amp=0.05");
  const int per_scale = 16, lo = 3, hi = 7, scales = hi - lo + 1;
  auto pairs = cubic_estimate_pairs(lo, hi, per_scale, kDefaultSeed);
  CubicEstimateReport r = verify_cubic_estimate(t, pairs);
  std::vector<double> max_dev(scales, 0), max_ratio(scales, 0);
  for (int s = 0; s < scales; ++s)
    for (int k = 0; k < per_scale; ++k) {
      const auto& e = r.entries[s * per_scale + k];
      max_dev[s] = std::max(max_dev[s], e.deviation);
      max_ratio[s] = std::max(max_ratio[s], e.ratio);
    }
  double spread = *std::max_element(max_ratio.begin(), max_ratio.end()) /
                  *std::min_element(max_ratio.begin(), max_ratio.end());
  bool ok = spread <= 3.0;
  std::string shrink;
  for (int s = 0; s + 1 < scales; ++s) {
    double f = max_dev[s] / max_dev[s + 1];
    ok = ok && f >= 5.0 && f <= 12.0;
    shrink += fmt(" %.2f", f);
  }
  std::string ratios;
  for (double x : max_ratio) ratios += fmt(" %.4f", x);
  report(4, ok,
         fmt("Cubic estimate, d=2^-%d..2^-%d, %d pairs per scale: max ratio per scale%s (spread %.2f <= 3); "
             "deviation shrink per halving%s (in [5,12])",
             lo, hi, per_scale, ratios.c_str(), spread, shrink.c_str()));
}

void suite_line(int id, const std::string& label, const std::vector<SuiteResult>& suites) {
  bool ok = true;
  std::string detail = label + ":";
  for (const auto& s : suites) {
    ok = ok && s.passed;
    detail += fmt(" [%s n=%d worst=%.3e", s.name.c_str(), s.instances, s.worst);
    if (s.tolerance > 0) detail += fmt(" tol=%.0e", s.tolerance);
    detail += "]";
    if (!s.passed) detail += " " + s.detail;
  }
  report(id, ok, detail);
}

void gauss_bonnet_line() {
  double worst_area = 0;
  for (int level = kOctagonSimplicialLevel; level <= 5; ++level) {
    Genus2Sample s = build_octagon_mesh(level);
    ConformalFactor zero = ConformalFactor::Zero(s.metric.triangulation().vertex_count());
    track(s.metric, zero);
    worst_area = std::max(worst_area, std::abs(mesh_area(s.metric, zero) - 4 * pi) / (4 * pi));
  }
  SuiteResult gb = gauss_bonnet_suite(kDefaultSeed + 9, 100);
  bool ok = gb.passed && worst_gauss_bonnet <= 1e-9 && worst_area <= 1e-6;
  report(9, ok,
         fmt("Gauss-Bonnet: worst gap over all meshes generated here %.2e (<=1e-9), random suite %d instances worst "
             "%.2e, octagon area rel. error %.2e (<=1e-6) at levels %d..5",
             worst_gauss_bonnet, gb.instances, gb.worst, worst_area, kOctagonSimplicialLevel));
}

void flow_agreement(const std::vector<OracleInstance>& e, const std::vector<OracleInstance>& h) {
  SolveOptions o;
  o.mode = SolveMode::Flow;
  double worst_gap = 0, worst_inv = 0;
  bool ok = true;
  int solved = 0;
  for (const auto* set : {&e, &h}) {
    for (const auto& inst : *set) {
      SolveReport r = flow_solve(inst.metric, o);
      ok = ok && r.converged();
      if (!r.converged()) continue;
      ++solved;
      worst_gap = std::max(worst_gap, inf(r.u - inst.u_newton));
      for (double v : r.flow_invariant_history) worst_inv = std::max(worst_inv, v);
      ok = ok && static_cast<int>(r.flow_invariant_history.size()) == o.flow_steps;
    }
  }
  ok = ok && worst_gap <= 1e-8 && worst_inv <= 1e-10;
  report(10, ok,
         fmt("Flow/Newton agreement on %d oracle instances (%d steps each): max endpoint gap %.2e (<=1e-8), "
             "max |K(u(t)) - (1-t)K(u0)| %.2e (<=1e-10)",
             solved, o.flow_steps, worst_gap, worst_inv));
}

} // namespace

int main() {
  std::mt19937_64 rng(kDefaultSeed);
  auto total = Clock::now();
  auto euclidean = euclidean_recovery(rng);
  auto hyperbolic = hyperbolic_recovery(rng);
  convergence_order();
  cubic_estimate();
  const std::uint64_t s = kDefaultSeed;
  suite_line(5, "Jacobian, 100 Euclidean + 100 hyperbolic", {jacobian_suite(s + 5, 100)});
  suite_line(6, "Graph calculus", {green_identity_suite(s + 6, 1000), laplacian_inverse_suite(s + 60, 200)});
  suite_line(7, "Elliptic estimate, 200 graphs with |V|<=18", {elliptic_estimate_suite(s + 7, 200, 18)});
  suite_line(8, "Triangle lemmas",
             {perturbation_suite(s + 8, 1000), triangle_area_suite(s + 80, 1000), heron_suite(s + 800, 1000)});
  gauss_bonnet_line();
  flow_agreement(euclidean, hyperbolic);
  std::printf("%d of 10 criteria passed in %.1fs\n", 10 - failures, seconds_since(total));
  return failures == 0 ? 0 : 1;
}
