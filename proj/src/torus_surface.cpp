#include "dunif/surface_sampling.hpp"

#include "dunif/error.hpp"
#include "dunif/parallel.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace dunif {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxAmplitude = 0.1;

double parse_number(std::string_view text, std::string_view key) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
    throw Error(ErrorCode::InvalidInput, "bad value for '" + std::string(key) + "': '" + std::string(text) + "'");
  return value;
}

} // namespace

// ---------------------------------------------------------------- surface

double ConformalTorus::phi(const Vec2& p) const {
  return alpha * (std::cos(kTwoPi * p.x()) + std::sin(kTwoPi * p.y())) + beta * std::cos(kTwoPi * (p.x() + p.y())) +
         offset;
}

Vec2 ConformalTorus::grad_phi(const Vec2& p) const {
  double s = -kTwoPi * beta * std::sin(kTwoPi * (p.x() + p.y()));
  return {-kTwoPi * alpha * std::sin(kTwoPi * p.x()) + s, kTwoPi * alpha * std::cos(kTwoPi * p.y()) + s};
}

Eigen::Matrix2d ConformalTorus::hess_phi(const Vec2& p) const {
  double k2 = kTwoPi * kTwoPi;
  double c = -k2 * beta * std::cos(kTwoPi * (p.x() + p.y()));
  Eigen::Matrix2d h;
  h << -k2 * alpha * std::cos(kTwoPi * p.x()) + c, c, c, -k2 * alpha * std::sin(kTwoPi * p.y()) + c;
  return h;
}

ConformalTorus ConformalTorus::parse(std::string_view spec) {
  constexpr std::string_view prefix = "torus";
  if (spec.substr(0, prefix.size()) != prefix)
    throw Error(ErrorCode::InvalidInput, "unknown surface '" + std::string(spec) + "'");
  std::string_view rest = spec.substr(prefix.size());
  ConformalTorus t;
  if (rest.empty()) return t;
  if (rest.front() != ':') throw Error(ErrorCode::InvalidInput, "unknown surface '" + std::string(spec) + "'");
  rest.remove_prefix(1);
  while (!rest.empty()) {
    std::size_t comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::InvalidInput, "expected key=value in '" + std::string(item) + "'");
    std::string_view key = item.substr(0, eq);
    double value = parse_number(item.substr(eq + 1), key);
    if (key == "amp" || key == "alpha")
      t.alpha = value;
    else if (key == "beta")
      t.beta = value;
    else if (key == "const" || key == "offset")
      t.offset = value;
    else
      throw Error(ErrorCode::InvalidInput, "unknown surface parameter '" + std::string(key) + "'");
  }
  if (std::abs(t.alpha) > kMaxAmplitude || std::abs(t.beta) > kMaxAmplitude)
    throw Error(ErrorCode::InvalidInput, "surface amplitudes must not exceed 0.1");
  return t;
}

std::string ConformalTorus::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "torus:amp=" << alpha << ",beta=" << beta << ",const=" << offset;
  return os.str();
}

// ---------------------------------------------------------------- geodesics

namespace {

// Polyline from p to q with nodes p + t_k (q - p) + s_k n, t_k = k/N,
// s_0 = s_N = 0.
class Polyline {
public:
  Polyline(const ConformalTorus& t, const Vec2& p, const Vec2& q, int segments)
      : t_(t), p_(p), chord_(q - p), segments_(segments) {
    double len = chord_.norm();
    normal_ = Vec2(-chord_.y(), chord_.x()) / len;
    ell_ = len / segments;
  }

  double energy(const std::vector<double>& s) const {
    double e = 0.0;
    for (int k = 0; k < segments_; ++k) {
      double d = s[k + 1] - s[k];
      e += std::exp(t_.phi(midpoint(k, s))) * std::sqrt(ell_ * ell_ + d * d);
    }
    return e;
  }

  // Gradient and tridiagonal Hessian over interior nodes 1..N-1.
  void derivatives(const std::vector<double>& s, std::vector<double>& grad, std::vector<double>& diag,
                   std::vector<double>& off) const {
    int m = segments_ - 1;
    grad.assign(m, 0.0);
    diag.assign(m, 0.0);
    off.assign(std::max(m - 1, 0), 0.0);
    for (int k = 0; k < segments_; ++k) {
      Vec2 mid = midpoint(k, s);
      double w = std::exp(t_.phi(mid));
      double g = t_.grad_phi(mid).dot(normal_);
      double h = normal_.dot(t_.hess_phi(mid) * normal_);
      double d = s[k + 1] - s[k];
      double len = std::sqrt(ell_ * ell_ + d * d);
      double f_s = w * g * len;
      double f_d = w * d / len;
      double f_ss = w * (g * g + h) * len;
      double f_sd = w * g * d / len;
      double f_dd = w * ell_ * ell_ / (len * len * len);
      // Left node k: d/ds = 0.5 d/dsigma - d/ddelta; right node k+1: 0.5 d/dsigma + d/ddelta.
      int left = k - 1;
      int right = k;
      if (left >= 0) {
        grad[left] += 0.5 * f_s - f_d;
        diag[left] += 0.25 * f_ss - f_sd + f_dd;
      }
      if (right < m) {
        grad[right] += 0.5 * f_s + f_d;
        diag[right] += 0.25 * f_ss + f_sd + f_dd;
      }
      if (left >= 0 && right < m) off[left] += 0.25 * f_ss - f_dd;
    }
  }

  int segments() const { return segments_; }
  double chord_length() const { return ell_ * segments_; }

private:
  Vec2 midpoint(int k, const std::vector<double>& s) const {
    double tm = (k + 0.5) / segments_;
    return p_ + tm * chord_ + 0.5 * (s[k] + s[k + 1]) * normal_;
  }

  const ConformalTorus& t_;
  Vec2 p_;
  Vec2 chord_;
  Vec2 normal_;
  double ell_;
  int segments_;
};

// Solves the tridiagonal system (diag + shift, off) x = rhs. Returns false
// when a pivot is not positive.
bool solve_tridiagonal(const std::vector<double>& diag, const std::vector<double>& off, double shift,
                       const std::vector<double>& rhs, std::vector<double>& x) {
  int m = static_cast<int>(diag.size());
  std::vector<double> c(m, 0.0);
  x.assign(m, 0.0);
  double piv = diag[0] + shift;
  if (!(piv > 0.0)) return false;
  if (m > 1) c[0] = off[0] / piv;
  x[0] = rhs[0] / piv;
  for (int i = 1; i < m; ++i) {
    piv = diag[i] + shift - off[i - 1] * c[i - 1];
    if (!(piv > 0.0)) return false;
    if (i < m - 1) c[i] = off[i] / piv;
    x[i] = (rhs[i] - off[i - 1] * x[i - 1]) / piv;
  }
  for (int i = m - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
  return true;
}

// Minimizes the polyline energy in place; s has N+1 entries with fixed ends.
double minimize_polyline(const Polyline& line, std::vector<double>& s, const GeodesicSolverOptions& opts) {
  int m = line.segments() - 1;
  double energy = line.energy(s);
  if (m <= 0) return energy;
  double scale = line.chord_length();
  std::vector<double> grad, diag, off, step, neg(m), trial(s.size());
  for (int it = 0; it < opts.max_newton_iterations; ++it) {
    line.derivatives(s, grad, diag, off);
    for (int i = 0; i < m; ++i) neg[i] = -grad[i];
    double max_diag = *std::max_element(diag.begin(), diag.end());
    double shift = 0.0;
    while (!solve_tridiagonal(diag, off, shift, neg, step)) {
      shift = shift == 0.0 ? 1e-8 * std::abs(max_diag) + 1e-300 : 10.0 * shift;
      if (!std::isfinite(shift) || shift > 1e8 * std::abs(max_diag))
        throw Error(ErrorCode::GeodesicSolverFailed, "polyline Hessian cannot be regularized");
    }
    double step_norm = 0.0;
    for (double v : step) step_norm = std::max(step_norm, std::abs(v));
    if (!std::isfinite(step_norm)) throw Error(ErrorCode::GeodesicSolverFailed, "non-finite Newton step");
    // Steps this small are below what the energy can resolve; take them as is.
    if (step_norm <= 1e-9 * scale) {
      for (int i = 0; i < m; ++i) s[i + 1] += step[i];
      energy = line.energy(s);
      if (step_norm <= 1e-14 * scale) return energy;
      continue;
    }
    double tau = 1.0;
    bool accepted = false;
    while (tau >= 1.0 / (1 << 30)) {
      trial = s;
      for (int i = 0; i < m; ++i) trial[i + 1] += tau * step[i];
      double e = line.energy(trial);
      if (e < energy) {
        s.swap(trial);
        energy = e;
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) return energy; // stationary to working precision
  }
  throw Error(ErrorCode::GeodesicSolverFailed, "polyline Newton iteration did not converge");
}

void check_options(const GeodesicSolverOptions& opts) {
  if (opts.initial_segments < 2 || opts.max_segments < opts.initial_segments || opts.max_newton_iterations < 1 ||
      !(opts.tolerance > 0.0))
    throw Error(ErrorCode::InvalidInput, "invalid geodesic solver options");
}

} // namespace

double polyline_energy(const ConformalTorus& t, const Vec2& p, const Vec2& q, int segments,
                       const GeodesicSolverOptions& opts) {
  check_options(opts);
  if (segments < 1) throw Error(ErrorCode::InvalidInput, "segment count must be positive");
  if ((q - p).norm() == 0.0) return 0.0;
  Polyline line(t, p, q, segments);
  std::vector<double> s(segments + 1, 0.0);
  return minimize_polyline(line, s, opts);
}

double geodesic_length(const ConformalTorus& t, const Vec2& p, const Vec2& q, const GeodesicSolverOptions& opts) {
  check_options(opts);
  if (!p.allFinite() || !q.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite endpoint");
  if ((q - p).norm() == 0.0) return 0.0;
  if (t.is_constant()) return std::exp(t.offset) * (q - p).norm();

  int n = opts.initial_segments;
  std::vector<double> s(n + 1, 0.0);
  double e_coarse = minimize_polyline(Polyline(t, p, q, n), s, opts);
  double previous = std::numeric_limits<double>::quiet_NaN();
  while (2 * n <= opts.max_segments) {
    std::vector<double> fine(2 * n + 1);
    for (int k = 0; k < n; ++k) {
      fine[2 * k] = s[k];
      fine[2 * k + 1] = 0.5 * (s[k] + s[k + 1]);
    }
    fine[2 * n] = s[n];
    n *= 2;
    double e_fine = minimize_polyline(Polyline(t, p, q, n), fine, opts);
    double estimate = (4.0 * e_fine - e_coarse) / 3.0;
    if (std::isfinite(previous) && std::abs(estimate - previous) <= opts.tolerance * estimate) return estimate;
    previous = estimate;
    e_coarse = e_fine;
    s.swap(fine);
  }
  throw Error(ErrorCode::GeodesicSolverFailed, "Richardson estimates did not settle within the segment budget");
}

double flat_torus_distance(const Vec2& p, const Vec2& q) {
  Vec2 d = q - p;
  d.x() -= std::round(d.x());
  d.y() -= std::round(d.y());
  return d.norm();
}

double torus_distance(const ConformalTorus& t, const Vec2& p, const Vec2& q, const GeodesicSolverOptions& opts) {
  Vec2 base = q - p;
  base.x() -= std::round(base.x());
  base.y() -= std::round(base.y());
  std::array<Vec2, 9> shifts;
  int idx = 0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) shifts[idx++] = base + Vec2(a, b);
  std::sort(shifts.begin(), shifts.end(), [](const Vec2& x, const Vec2& y) { return x.norm() < y.norm(); });
  double lower = std::exp(t.phi_min());
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& d : shifts) {
    if (lower * d.norm() >= best) break;
    best = std::min(best, geodesic_length(t, p, p + d, opts));
  }
  return best;
}

// ---------------------------------------------------------------- sampling

namespace {

void check_lattice_size(int n) {
  if (n < 4 || n % 2 != 0) throw Error(ErrorCode::InvalidInput, "torus resolution must be even and >= 4");
}

} // namespace

Triangulation offset_torus_triangulation(int n) {
  check_lattice_size(n);
  auto id = [n](int i, int j) {
    // Row n is row 0 shifted by n/2.
    if (j == n) {
      i += n / 2;
      j = 0;
    }
    return ((i % n + n) % n) + n * j;
  };
  std::vector<Face> faces;
  faces.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      faces.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
      faces.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Triangulation::build(std::move(faces));
}

TorusSample sample_torus_mesh(const ConformalTorus& t, int n, const GeodesicSolverOptions& opts) {
  check_options(opts);
  auto tri = std::make_shared<const Triangulation>(offset_torus_triangulation(n));
  std::vector<Vec2> pos(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double x = (i + 0.5 * j) / n;
      pos[i + n * j] = Vec2(x - std::floor(x), static_cast<double>(j) / n);
    }
  std::vector<double> lengths(tri->edge_count());
  parallel_for(tri->edge_count(), [&](int e) {
    const Edge& edge = tri->edge(e);
    lengths[e] = torus_distance(t, pos[edge.v0], pos[edge.v1], opts);
  });
  ConformalFactor u_bar(n * n);
  for (int v = 0; v < n * n; ++v) u_bar[v] = -t.phi(pos[v]);
  return TorusSample{MeshMetric(tri, std::move(lengths), Geometry::Euclidean), std::move(u_bar), std::move(pos)};
}

// ---------------------------------------------------------------- cubic estimate

CubicEstimateReport verify_cubic_estimate(const ConformalTorus& t, std::span<const PointPair> pairs,
                                          const GeodesicSolverOptions& opts) {
  CubicEstimateReport report;
  report.entries.resize(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), [&](int i) {
    const PointPair& pr = pairs[i];
    CubicEstimateEntry& out = report.entries[i];
    out.d_g = torus_distance(t, pr.x, pr.y, opts);
    out.d_target = flat_torus_distance(pr.x, pr.y);
    double scale = std::exp(-0.5 * (t.phi(pr.x) + t.phi(pr.y)));
    out.deviation = std::abs(out.d_target - scale * out.d_g);
    out.ratio = out.d_g > 0.0 ? out.deviation / (out.d_g * out.d_g * out.d_g) : 0.0;
  });
  for (const auto& e : report.entries) report.max_ratio = std::max(report.max_ratio, e.ratio);
  return report;
}

std::vector<PointPair> cubic_estimate_pairs(int min_exponent, int max_exponent, int per_scale, std::uint64_t seed) {
  if (min_exponent < 1 || max_exponent < min_exponent || per_scale < 1)
    throw Error(ErrorCode::InvalidInput, "invalid cubic-estimate pair parameters");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec2> base(per_scale);
  std::vector<Vec2> dir(per_scale);
  for (int i = 0; i < per_scale; ++i) {
    base[i] = Vec2(unit(rng), unit(rng));
    double theta = kTwoPi * unit(rng);
    dir[i] = Vec2(std::cos(theta), std::sin(theta));
  }
  std::vector<PointPair> out;
  for (int e = min_exponent; e <= max_exponent; ++e) {
    double d = std::ldexp(1.0, -e);
    for (int i = 0; i < per_scale; ++i) out.push_back({base[i], base[i] + d * dir[i]});
  }
  return out;
}

} // namespace dunif
