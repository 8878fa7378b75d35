#include "dunif/verification.hpp"

#include "dunif/discrete_conformal.hpp"
#include "dunif/error.hpp"
#include "dunif/graph_calculus.hpp"
#include "dunif/surface_sampling.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace dunif {

namespace {

constexpr double kPi = std::numbers::pi;

class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool coin() { return integer(0, 1) == 1; }
  double sign() { return coin() ? 1.0 : -1.0; }

private:
  std::mt19937_64 gen_;
};

// Tracks the worst value of a checked quantity and the first failure.
class Tally {
public:
  Tally(std::string name, double tolerance) {
    result_.name = std::move(name);
    result_.tolerance = tolerance;
    result_.passed = true;
  }

  // Records `value`, failing when it exceeds `limit`.
  void check(double value, double limit, const std::string& what) {
    result_.worst = std::max(result_.worst, value);
    if (!(value <= limit)) fail(what, value, limit);
  }

  void fail(const std::string& what, double value, double limit) {
    if (!result_.passed) return;
    result_.passed = false;
    std::ostringstream os;
    os.precision(6);
    os << "instance " << result_.instances << ": " << what << " = " << value << " exceeds " << limit;
    result_.detail = os.str();
  }

  void fail(const std::string& what) {
    if (!result_.passed) return;
    result_.passed = false;
    result_.detail = "instance " + std::to_string(result_.instances) + ": " + what;
  }

  void next() { ++result_.instances; }
  SuiteResult result() const { return result_; }

private:
  SuiteResult result_;
};

Graph random_graph(Rng& rng, int n, double extra_edge_probability) {
  std::set<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) {
    int u = rng.integer(0, v - 1);
    edges.insert({u, v});
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform(0.0, 1.0) < extra_edge_probability) edges.insert({i, j});
  std::vector<Edge> list;
  for (auto [i, j] : edges) list.push_back({i, j});
  return Graph(n, std::move(list));
}

Eigen::VectorXd random_vector(Rng& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

// Triangle with every Euclidean angle >= min_angle and longest side max_side.
TriangleSides random_triangle(Rng& rng, double min_angle, double max_side) {
  double a = rng.uniform(min_angle, kPi - 2.0 * min_angle);
  double b = rng.uniform(min_angle, kPi - a - min_angle);
  double c = kPi - a - b;
  TriangleSides s{std::sin(a), std::sin(b), std::sin(c)};
  double scale = max_side / s.max_side();
  return {s.a * scale, s.b * scale, s.c * scale};
}

// Angle sum from half-angle formulas in extended precision, so that the
// angle defect (excess) of a small triangle keeps its relative accuracy.
long double angle_sum_extended(const TriangleSides& s, Geometry g) {
  auto f = [g](long double x) { return g == Geometry::Hyperbolic ? std::sinh(x) : std::sin(x); };
  long double a = s.a, b = s.b, c = s.c;
  long double p = (a + b + c) / 2;
  long double fs = f(p), fa = f(p - a), fb = f(p - b), fc = f(p - c);
  return 2 * (std::atan(std::sqrt(fb * fc / (fs * fa))) + std::atan(std::sqrt(fa * fc / (fs * fb))) +
              std::atan(std::sqrt(fa * fb / (fs * fc))));
}

double rel_diff(double x, double y) { return std::abs(x - y) / std::max(std::abs(x), std::abs(y)); }

// Grid torus with independently perturbed lengths around `base`.
MeshMetric perturbed_torus(Rng& rng, int n, double base, double spread, Geometry geometry) {
  auto tri = std::make_shared<const Triangulation>(grid_torus(n));
  std::vector<double> lengths(tri->edge_count());
  for (double& l : lengths) l = base * (1.0 + rng.uniform(-spread, spread));
  return MeshMetric(tri, std::move(lengths), geometry);
}

} // namespace

std::string_view to_string(VerifyFault f) {
  switch (f) {
  case VerifyFault::None: return "none";
  case VerifyFault::JacobianSign: return "jacobian-sign";
  }
  return "unknown";
}

VerifyFault parse_fault(std::string_view name) {
  if (name == "none") return VerifyFault::None;
  if (name == "jacobian-sign") return VerifyFault::JacobianSign;
  throw Error(ErrorCode::InvalidInput, "unknown fault mode '" + std::string(name) + "'");
}

SuiteResult green_identity_suite(std::uint64_t seed, int instances) {
  Rng rng(seed);
  Tally tally("green-identity", 1e-12);
  for (int k = 0; k < instances; ++k) {
    Graph g = random_graph(rng, rng.integer(2, 40), 0.15);
    int n = g.vertex_count();
    EdgeWeight eta = random_vector(rng, g.edge_count(), -2.0, 2.0);
    VertexField x = random_vector(rng, n, -1.0, 1.0);
    VertexField y = random_vector(rng, n, -1.0, 1.0);
    VertexField lx = laplacian_apply(g, eta, x);
    VertexField ly = laplacian_apply(g, eta, y);
    double lhs = x.dot(ly);
    double rhs = y.dot(lx);
    double scale = x.cwiseProduct(ly).cwiseAbs().sum() + y.cwiseProduct(lx).cwiseAbs().sum();
    tally.check(scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0, 1e-12, "relative Green defect");
    tally.next();
  }
  return tally.result();
}

SuiteResult laplacian_inverse_suite(std::uint64_t seed, int instances) {
  Rng rng(seed);
  Tally tally("laplacian-inverse", 1e-10);
  for (int k = 0; k < instances; ++k) {
    Graph g = random_graph(rng, rng.integer(2, 200), 0.03);
    int n = g.vertex_count();
    EdgeWeight eta = random_vector(rng, g.edge_count(), 0.01, 10.0);
    VertexField y = random_vector(rng, n, -1.0, 1.0);
    y.array() -= y.mean();
    VertexField x = solve_laplacian_mean_zero(g, eta, y);
    double yn = std::max(y.lpNorm<Eigen::Infinity>(), 1e-300);
    tally.check((laplacian_apply(g, eta, x) - y).lpNorm<Eigen::Infinity>() / yn, 1e-10, "mean-zero residual");
    tally.check(std::abs(x.sum()) / std::max(x.lpNorm<Eigen::Infinity>(), 1e-300), 1e-10, "mean of solution");

    VertexField diag = random_vector(rng, n, 0.0, 2.0);
    for (int i = 0; i < n; ++i)
      if (rng.uniform(0.0, 1.0) < 0.5) diag[i] = 0.0;
    diag[rng.integer(0, n - 1)] = rng.uniform(0.01, 2.0);
    VertexField z = random_vector(rng, n, -1.0, 1.0);
    VertexField w = solve_shifted(g, eta, diag, z);
    VertexField back = diag.cwiseProduct(w) - laplacian_apply(g, eta, w);
    tally.check((back - z).lpNorm<Eigen::Infinity>() / z.lpNorm<Eigen::Infinity>(), 1e-10, "shifted residual");
    tally.next();
  }
  return tally.result();
}

SuiteResult jacobian_suite(std::uint64_t seed, int instances_per_geometry, VerifyFault fault) {
  Rng rng(seed);
  Tally tally("jacobian", 1e-6);
  const double h = 1e-6;
  for (Geometry geometry : {Geometry::Euclidean, Geometry::Hyperbolic}) {
    bool euclid = geometry == Geometry::Euclidean;
    for (int k = 0; k < instances_per_geometry; ++k) {
      MeshMetric m = perturbed_torus(rng, rng.integer(3, 5), euclid ? 1.0 : 0.05, 0.1, geometry);
      int n = m.triangulation().vertex_count();
      ConformalFactor u = random_vector(rng, n, -0.3, 0.3);
      Graph g(m.triangulation());
      Eigen::MatrixXd jac = Eigen::MatrixXd(curvature_jacobian(m, u).matrix(g));
      Eigen::MatrixXd partials = Eigen::MatrixXd(curvature_jacobian_from_partials(m, u));
      if (fault == VerifyFault::JacobianSign) jac = -jac;
      double jmax = jac.cwiseAbs().maxCoeff();

      Eigen::MatrixXd fd(n, n);
      for (int j = 0; j < n; ++j) {
        ConformalFactor up = u, dn = u;
        up[j] += h;
        dn[j] -= h;
        fd.col(j) = (curvature(m, up) - curvature(m, dn)) / (2.0 * h);
      }
      std::string tag = euclid ? "E " : "H ";
      tally.check((fd - jac).cwiseAbs().maxCoeff() / jmax, 1e-6, tag + "finite-difference error");
      tally.check((partials - partials.transpose()).cwiseAbs().maxCoeff() / jmax, 1e-12, tag + "asymmetry");
      tally.check((partials - jac).cwiseAbs().maxCoeff() / jmax, 1e-12, tag + "assembly mismatch");
      if (euclid) tally.check(partials.rowwise().sum().cwiseAbs().maxCoeff() / jmax, 1e-12, "E row sum");
      tally.next();
    }
  }
  return tally.result();
}

SuiteResult heron_suite(std::uint64_t seed, int instances) {
  Rng rng(seed);
  Tally tally("heron", 1e-10);
  for (int k = 0; k < instances; ++k) {
    TriangleSides s = random_triangle(rng, 0.05, rng.uniform(0.001, 0.1));
    TriangleAngles e = angles(s, Geometry::Euclidean);
    tally.check(rel_diff(area(s, Geometry::Euclidean), 0.5 * s.a * s.b * std::sin(e.C)), 1e-10, "E Heron vs sine");

    const long double pi = std::numbers::pi_v<long double>;
    double ah = area(s, Geometry::Hyperbolic);
    double defect = static_cast<double>(pi - angle_sum_extended(s, Geometry::Hyperbolic));
    tally.check(rel_diff(ah, defect), 1e-10, "H Heron vs angle defect");
    tally.check(rel_diff(ah, area_via_cotangent(s, Geometry::Hyperbolic)), 1e-10, "H Heron vs cotangent form");

    double as = area(s, Geometry::Spherical);
    double excess = static_cast<double>(angle_sum_extended(s, Geometry::Spherical) - pi);
    tally.check(rel_diff(as, excess), 1e-10, "S L'Huilier vs angle excess");
    tally.check(rel_diff(as, area_via_cotangent(s, Geometry::Spherical)), 1e-10, "S L'Huilier vs cotangent form");
    tally.next();
  }
  return tally.result();
}

SuiteResult elliptic_estimate_suite(std::uint64_t seed, int graphs, int max_vertices) {
  Rng rng(seed);
  Tally tally("elliptic-estimate", 1.0);
  for (int k = 0; k < graphs; ++k) {
    Graph g = random_graph(rng, rng.integer(3, max_vertices), 0.2);
    int ne = g.edge_count();
    int nv = g.vertex_count();
    EdgeWeight l = random_vector(rng, ne, 0.5, 1.5);
    double c1 = brute_force_isoperimetric_constant(g, l).constant;
    double c2 = rng.uniform(0.1, 2.0);
    double c3 = rng.uniform(0.1, 1.0);
    EdgeWeight eta = random_vector(rng, ne, c3, 3.0 * c3);
    eta[rng.integer(0, ne - 1)] = c3;
    Flow x(ne);
    for (int e = 0; e < ne; ++e) x[e] = rng.sign() * rng.uniform(0.5, 1.0) * c2 * l[e] * l[e];

    auto plain = verify_elliptic_estimate(g, l, eta, x, c1, c2, c3);
    tally.check(plain.lhs / plain.rhs, 1.0, "plain lhs / rhs");

    double scale = l.maxCoeff() * std::sqrt(l.squaredNorm());
    double c4 = rng.uniform(0.1, 2.0);
    VertexField diag = random_vector(rng, nv, 0.05, 2.0);
    VertexField y(nv);
    for (int i = 0; i < nv; ++i) y[i] = rng.uniform(-1.0, 1.0) * (1.0 - 1e-12) * c4 * diag[i] * scale;
    auto shifted = verify_shifted_elliptic_estimate(g, l, eta, x, y, diag, c1, c2, c3, c4);
    tally.check(shifted.lhs / shifted.rhs, 1.0, "shifted lhs / rhs");
    tally.next();
  }
  return tally.result();
}

SuiteResult perturbation_suite(std::uint64_t seed, int instances_per_geometry) {
  Rng rng(seed);
  Tally tally("perturbation", 1.0);
  for (Geometry geometry : {Geometry::Euclidean, Geometry::Hyperbolic}) {
    bool euclid = geometry == Geometry::Euclidean;
    for (int k = 0; k < instances_per_geometry; ++k) {
      TriangleSides base = random_triangle(rng, 0.15, euclid ? rng.uniform(0.1, 10.0) : rng.uniform(0.005, 0.1));
      double eps = angles(base, geometry).min();
      double limit = euclid ? eps * eps / 48.0 : eps * eps * eps / 60.0;
      double delta = rng.uniform(0.0, 1.0) * limit * (1.0 - 1e-9);
      TriangleSides pert;
      int extreme = rng.integer(0, 2);
      for (int i = 0; i < 3; ++i) {
        double d = i == extreme ? rng.sign() * delta : rng.uniform(-delta, delta);
        (i == 0 ? pert.a : i == 1 ? pert.b : pert.c) = base[i] * (1.0 + d);
      }
      PerturbationReport r = perturbation_bound_check(base, pert, eps, geometry);
      std::string tag = euclid ? "E " : "H ";
      if (r.angle_bound > 0.0) tally.check(r.angle_dev / r.angle_bound, 1.0, tag + "angle deviation / bound");
      if (r.area_bound > 0.0) tally.check(r.area_dev / r.area_bound, 1.0, tag + "area deviation / bound");
      if (!r.bound_ok) tally.fail(tag + "bound_ok false");
      tally.next();
    }
  }
  return tally.result();
}

SuiteResult triangle_area_suite(std::uint64_t seed, int instances) {
  Rng rng(seed);
  Tally tally("triangle-area-bounds", 1.0);
  for (int k = 0; k < instances; ++k) {
    TriangleSides s = random_triangle(rng, 0.02, rng.uniform(0.001, 0.0999));
    double eps = angles(s, Geometry::Euclidean).min();
    for (Geometry p : {Geometry::Euclidean, Geometry::Hyperbolic, Geometry::Spherical}) {
      std::string tag(to_string(p));
      double ar = area(s, p);
      for (int i = 0; i < 3; ++i) {
        double a2 = s[i] * s[i];
        tally.check(eps / 8.0 * a2 / ar, 1.0, tag + " lower area bound ratio");
        tally.check(ar / (a2 / eps), 1.0, tag + " upper area bound ratio");
      }
      tally.check(0.2 / (midpoint_triangle_area(s, p) / ar), 1.0, tag + " midpoint ratio shortfall");
    }
    tally.next();
  }
  return tally.result();
}

SuiteResult isoperimetric_suite(std::uint64_t seed, int graphs) {
  Rng rng(seed);
  Tally tally("isoperimetric", 1e-12);
  for (int k = 0; k < graphs; ++k) {
    Graph g = random_graph(rng, rng.integer(2, 10), 0.3);
    int n = g.vertex_count();
    EdgeWeight l = random_vector(rng, g.edge_count(), 0.1, 2.0);
    double fast = brute_force_isoperimetric_constant(g, l).constant;

    // Plain enumeration over every nonempty proper subset.
    double total = l.squaredNorm();
    double oracle = 0.0;
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
      double inside = 0.0, boundary = 0.0;
      for (int e = 0; e < g.edge_count(); ++e) {
        bool a = (mask >> g.edge(e).v0) & 1u;
        bool b = (mask >> g.edge(e).v1) & 1u;
        if (a && b) inside += l[e] * l[e];
        if (a != b) boundary += l[e];
      }
      oracle = std::max(oracle, std::min(inside, total - inside) / (boundary * boundary));
    }
    tally.check(oracle > 0.0 ? rel_diff(fast, oracle) : std::abs(fast), 1e-12, "brute force vs enumeration");

    double t = rng.uniform(0.1, 10.0);
    double scaled = brute_force_isoperimetric_constant(g, EdgeWeight(t * l)).constant;
    tally.check(fast > 0.0 ? rel_diff(fast, scaled) : std::abs(scaled), 1e-12, "scale invariance");
    tally.next();
  }
  return tally.result();
}

SuiteResult gauss_bonnet_suite(std::uint64_t seed, int instances) {
  Rng rng(seed);
  Tally tally("gauss-bonnet", 1e-9);
  Genus2Sample octagon = build_octagon_mesh(kOctagonSimplicialLevel);
  for (int k = 0; k < instances; ++k) {
    int kind = k % 4;
    std::optional<MeshMetric> m;
    if (kind == 0) m = perturbed_torus(rng, rng.integer(3, 8), 1.0, 0.15, Geometry::Euclidean);
    if (kind == 1) m = perturbed_torus(rng, rng.integer(3, 8), 0.08, 0.15, Geometry::Hyperbolic);
    if (kind == 2) {
      auto tri = std::make_shared<const Triangulation>(tetrahedron());
      std::vector<double> lengths(tri->edge_count());
      for (double& l : lengths) l = 1.0 + rng.uniform(-0.15, 0.15);
      m.emplace(tri, std::move(lengths), Geometry::Euclidean);
    }
    if (kind == 3) m = octagon.metric;
    int n = m->triangulation().vertex_count();
    ConformalFactor u = random_vector(rng, n, -0.05, 0.05);
    try {
      MeshMetric scaled = scale_lengths(*m, u);
      double sum = curvature(scaled, ConformalFactor::Zero(n)).sum();
      double expected = 2.0 * kPi * scaled.triangulation().euler_characteristic();
      if (scaled.geometry() == Geometry::Hyperbolic) expected += mesh_area(scaled, ConformalFactor::Zero(n));
      tally.check(std::abs(sum - expected), 1e-9, std::string(to_string(scaled.geometry())) + " Gauss-Bonnet defect");
    } catch (const Error& e) {
      tally.fail(e.what());
    }
    tally.next();
  }
  return tally.result();
}

std::vector<SuiteResult> run_all_suites(const VerifyOptions& opts) {
  // Each suite draws from its own stream so counts can change independently.
  auto sub = [&](std::uint64_t k) { return opts.seed * 0x9E3779B97F4A7C15ull + k; };
  std::vector<SuiteResult> out;
  out.push_back(green_identity_suite(sub(1), 1000));
  out.push_back(laplacian_inverse_suite(sub(2), 200));
  out.push_back(jacobian_suite(sub(3), 100, opts.fault));
  out.push_back(heron_suite(sub(4), 1000));
  out.push_back(elliptic_estimate_suite(sub(5), 200));
  out.push_back(perturbation_suite(sub(6), 1000));
  out.push_back(triangle_area_suite(sub(7), 1000));
  out.push_back(isoperimetric_suite(sub(8), 100));
  out.push_back(gauss_bonnet_suite(sub(9), 40));
  return out;
}

} // namespace dunif
