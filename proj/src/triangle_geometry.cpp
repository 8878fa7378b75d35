#include "dunif/triangle_geometry.hpp"

#include "dunif/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace dunif {

namespace {

constexpr double kPi = std::numbers::pi;

// Half-perimeter differences, computed from the sides directly so that a
// nearly degenerate triangle keeps full relative accuracy.
struct HalfDiffs {
  double s, sa, sb, sc;
};

HalfDiffs half_diffs(const TriangleSides& t) {
  return {0.5 * (t.a + t.b + t.c), 0.5 * (t.b + t.c - t.a), 0.5 * (t.a + t.c - t.b),
          0.5 * (t.a + t.b - t.c)};
}

// f is sinh, sin or the identity depending on the geometry.
template <class F>
TriangleAngles half_angle_angles(const HalfDiffs& h, F f) {
  const double fs = f(h.s), fa = f(h.sa), fb = f(h.sb), fc = f(h.sc);
  TriangleAngles out;
  out.A = 2.0 * std::atan2(std::sqrt(fb * fc), std::sqrt(fs * fa));
  out.B = 2.0 * std::atan2(std::sqrt(fa * fc), std::sqrt(fs * fb));
  out.C = 2.0 * std::atan2(std::sqrt(fa * fb), std::sqrt(fs * fc));
  return out;
}

double cot(double x) { return std::cos(x) / std::sin(x); }

void require_not_spherical(Geometry g, const char* what) {
  if (g == Geometry::Spherical) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + " is defined for Euclidean and hyperbolic triangles only");
  }
}

} // namespace

std::string_view to_string(Geometry g) {
  switch (g) {
  case Geometry::Euclidean: return "euclidean";
  case Geometry::Hyperbolic: return "hyperbolic";
  case Geometry::Spherical: return "spherical";
  }
  return "unknown";
}

double TriangleSides::max_side() const { return std::max({a, b, c}); }

double TriangleAngles::min() const { return std::min({A, B, C}); }

void validate_sides(const TriangleSides& t, Geometry geometry) {
  for (double x : {t.a, t.b, t.c}) {
    if (!std::isfinite(x) || x <= 0.0) {
      throw Error(ErrorCode::DegenerateTriangle, "side lengths must be positive and finite");
    }
  }
  const HalfDiffs h = half_diffs(t);
  if (h.sa <= 0.0 || h.sb <= 0.0 || h.sc <= 0.0) {
    throw Error(ErrorCode::DegenerateTriangle, "strict triangle inequality violated");
  }
  if (geometry == Geometry::Spherical && h.s >= kPi) {
    throw Error(ErrorCode::DegenerateTriangle, "spherical triangle perimeter must be below 2*pi");
  }
}

TriangleAngles angles(const TriangleSides& t, Geometry geometry) {
  validate_sides(t, geometry);
  const HalfDiffs h = half_diffs(t);
  switch (geometry) {
  case Geometry::Euclidean: return half_angle_angles(h, [](double x) { return x; });
  case Geometry::Hyperbolic: return half_angle_angles(h, [](double x) { return std::sinh(x); });
  case Geometry::Spherical: return half_angle_angles(h, [](double x) { return std::sin(x); });
  }
  return {};
}

double area(const TriangleSides& t, Geometry geometry) {
  validate_sides(t, geometry);
  const HalfDiffs h = half_diffs(t);
  switch (geometry) {
  case Geometry::Euclidean: return std::sqrt(h.s * h.sa * h.sb * h.sc);
  case Geometry::Hyperbolic: {
    const double p = std::tanh(0.5 * h.s) * std::tanh(0.5 * h.sa) * std::tanh(0.5 * h.sb) * std::tanh(0.5 * h.sc);
    return 4.0 * std::atan(std::sqrt(p));
  }
  case Geometry::Spherical: {
    const double p = std::tan(0.5 * h.s) * std::tan(0.5 * h.sa) * std::tan(0.5 * h.sb) * std::tan(0.5 * h.sc);
    return 4.0 * std::atan(std::sqrt(p));
  }
  }
  return 0.0;
}

namespace {

// Two sides x, y with included angle C.
double sas_area(double x, double y, double C, Geometry geometry) {
  const double sC = std::sin(C), cC = std::cos(C);
  switch (geometry) {
  case Geometry::Euclidean: return 0.5 * x * y * sC;
  case Geometry::Hyperbolic:
    return 2.0 * std::atan2(sC, 1.0 / (std::tanh(0.5 * x) * std::tanh(0.5 * y)) - cC);
  case Geometry::Spherical:
    return 2.0 * std::atan2(sC, 1.0 / (std::tan(0.5 * x) * std::tan(0.5 * y)) + cC);
  }
  return 0.0;
}

} // namespace

double area_via_cotangent(const TriangleSides& t, Geometry geometry) {
  if (geometry == Geometry::Euclidean) {
    throw Error(ErrorCode::InvalidInput, "area_via_cotangent is defined for hyperbolic and spherical triangles only");
  }
  const TriangleAngles ang = angles(t, geometry);
  return sas_area(t.a, t.b, ang.C, geometry);
}

double midpoint_triangle_area(const TriangleSides& t, Geometry geometry) {
  const TriangleAngles ang = angles(t, geometry);
  return sas_area(0.5 * t.a, 0.5 * t.b, ang.C, geometry);
}

Eigen::Matrix3d angle_derivatives(const TriangleSides& t, Geometry geometry) {
  require_not_spherical(geometry, "angle_derivatives");
  const TriangleAngles ang = angles(t, geometry);
  // "Radius" factor: the side itself (Euclidean) or its sinh (hyperbolic).
  auto rho = [&](double x) { return geometry == Geometry::Euclidean ? x : std::sinh(x); };
  const std::array<double, 3> side{t.a, t.b, t.c};
  const std::array<double, 3> angle{ang.A, ang.B, ang.C};

  Eigen::Matrix3d d;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    // dA/da = 1 / (rho(b) sin C), dA/db = -cot C / rho(b), dA/dc = -cot B / rho(c)
    d(i, i) = 1.0 / (rho(side[j]) * std::sin(angle[k]));
    d(i, j) = -cot(angle[k]) / rho(side[j]);
    d(i, k) = -cot(angle[j]) / rho(side[k]);
  }
  return d;
}

Eigen::Matrix3d conformal_angle_partials(const TriangleSides& t, Geometry geometry) {
  require_not_spherical(geometry, "conformal_angle_partials");
  const TriangleAngles ang = angles(t, geometry);
  const std::array<double, 3> side{t.a, t.b, t.c};

  // Weight attached to the side opposite corner k:
  //   Euclidean:  1/2 cot(theta_k), same for both off-diagonal and diagonal use
  //   hyperbolic: 1/2 cot(tilde_k) (1 -/+ tanh^2(side_k / 2))
  std::array<double, 3> off{}, diag{};
  for (int k = 0; k < 3; ++k) {
    if (geometry == Geometry::Euclidean) {
      off[k] = diag[k] = 0.5 * cot(ang[k]);
    } else {
      const double th = std::tanh(0.5 * side[k]);
      const double w = 0.5 * cot(ang.tilde(k));
      off[k] = w * (1.0 - th * th);
      diag[k] = w * (1.0 + th * th);
    }
  }

  Eigen::Matrix3d d;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    // Corner j lies on side k (opposite k) together with i, and vice versa.
    d(i, j) = off[k];
    d(i, k) = off[j];
    d(i, i) = -diag[j] - diag[k];
  }
  return d;
}

TriangleSides scale_triangle(const TriangleSides& t, const Eigen::Vector3d& u, Geometry geometry) {
  require_not_spherical(geometry, "scale_triangle");
  auto scale = [&](double l, double ui, double uj) {
    const double f = std::exp(0.5 * (ui + uj));
    if (geometry == Geometry::Euclidean) return f * l;
    return 2.0 * std::asinh(f * std::sinh(0.5 * l));
  };
  return {scale(t.a, u[1], u[2]), scale(t.b, u[0], u[2]), scale(t.c, u[0], u[1])};
}

PerturbationReport perturbation_bound_check(const TriangleSides& base, const TriangleSides& perturbed,
                                            double eps, Geometry geometry) {
  require_not_spherical(geometry, "perturbation_bound_check");
  if (!(eps > 0.0)) {
    throw Error(ErrorCode::PreconditionViolated, "eps must be positive");
  }
  const TriangleAngles a0 = angles(base, geometry);
  if (a0.min() < eps) {
    throw Error(ErrorCode::PreconditionViolated, "base triangle has an angle below eps");
  }
  if (geometry == Geometry::Hyperbolic && base.max_side() > 0.1) {
    throw Error(ErrorCode::PreconditionViolated, "hyperbolic bound requires sides <= 0.1");
  }

  PerturbationReport r;
  for (int i = 0; i < 3; ++i) {
    r.delta = std::max(r.delta, std::abs(perturbed[i] - base[i]) / base[i]);
  }
  const double threshold = geometry == Geometry::Euclidean ? eps * eps / 48.0 : eps * eps * eps / 60.0;
  if (!(r.delta < threshold) && r.delta != 0.0) {
    throw Error(ErrorCode::PreconditionViolated,
                geometry == Geometry::Euclidean ? "delta must be below eps^2/48" : "delta must be below eps^3/60");
  }

  const TriangleAngles a1 = angles(perturbed, geometry);
  for (int i = 0; i < 3; ++i) {
    r.angle_dev = std::max(r.angle_dev, std::abs(a1[i] - a0[i]));
  }
  const double area0 = area(base, geometry);
  r.area_dev = std::abs(area(perturbed, geometry) - area0) / area0;

  if (geometry == Geometry::Euclidean) {
    r.angle_bound = 24.0 * r.delta / eps;
    r.area_bound = 576.0 * r.delta / (eps * eps);
  } else {
    r.angle_bound = 30.0 * r.delta / (eps * eps);
    r.area_bound = 120.0 * r.delta / (eps * eps);
  }
  r.bound_ok = r.angle_dev <= r.angle_bound && r.area_dev <= r.area_bound;
  return r;
}

} // namespace dunif
