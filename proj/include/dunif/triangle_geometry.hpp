#pragma once

#include <Eigen/Core>

#include <numbers>
#include <string_view>

namespace dunif {

// Background geometry of a triangle or a mesh. Spherical is only supported by
// the single-triangle kernel; meshes are Euclidean or hyperbolic.
enum class Geometry { Euclidean, Hyperbolic, Spherical };

std::string_view to_string(Geometry g);

// Geodesic side lengths; `a` is opposite corner A, and so on.
struct TriangleSides {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double semiperimeter() const { return 0.5 * (a + b + c); }
  double max_side() const;
  double operator[](int i) const { return i == 0 ? a : (i == 1 ? b : c); }
};

struct TriangleAngles {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;

  double operator[](int i) const { return i == 0 ? A : (i == 1 ? B : C); }
  double sum() const { return A + B + C; }
  double min() const;

  // Auxiliary angles of the hyperbolic curvature Jacobian, e.g.
  // tilde_A = (pi + A - B - C) / 2.
  double tilde_A() const { return 0.5 * (std::numbers::pi + A - B - C); }
  double tilde_B() const { return 0.5 * (std::numbers::pi + B - A - C); }
  double tilde_C() const { return 0.5 * (std::numbers::pi + C - A - B); }
  double tilde(int i) const { return i == 0 ? tilde_A() : (i == 1 ? tilde_B() : tilde_C()); }
};

// Throws DegenerateTriangle unless the sides are positive, finite and satisfy
// the strict triangle inequalities (plus a+b+c < 2*pi for spherical).
void validate_sides(const TriangleSides& sides, Geometry geometry);

// Inner angles from the half-angle tangent formulas of each geometry.
TriangleAngles angles(const TriangleSides& sides, Geometry geometry);

// Heron-type area: Euclidean Heron, hyperbolic tan^2(area/4) = prod tanh(./2),
// spherical L'Huilier.
double area(const TriangleSides& sides, Geometry geometry);

// Area from two sides and their included angle C, using
//   cot(area/2) = (coth(a/2) coth(b/2) - cos C) / sin C      (hyperbolic)
//   cot(area/2) = (cot(a/2)  cot(b/2)  + cos C) / sin C      (spherical).
// Only defined for Hyperbolic and Spherical.
double area_via_cotangent(const TriangleSides& sides, Geometry geometry);

// Area of the sub-triangle C M_a M_b, where M_a and M_b are the midpoints of
// sides a = BC and b = AC.
double midpoint_triangle_area(const TriangleSides& sides, Geometry geometry);

// d(A,B,C)/d(a,b,c); row i is the angle, column j the side. Euclidean or
// hyperbolic only.
Eigen::Matrix3d angle_derivatives(const TriangleSides& sides, Geometry geometry);

// d(A,B,C)/d(u_A,u_B,u_C) under vertex scaling, evaluated at the current
// sides. Euclidean rows sum to zero.
Eigen::Matrix3d conformal_angle_partials(const TriangleSides& sides, Geometry geometry);

// Vertex scaling of a single triangle: side a joins B and C, so it is scaled
// by exp((u_B + u_C) / 2) (Euclidean) or through sinh(a/2) (hyperbolic).
TriangleSides scale_triangle(const TriangleSides& sides, const Eigen::Vector3d& u, Geometry geometry);

struct PerturbationReport {
  double delta = 0.0;       // max_i |s'_i - s_i| / s_i
  double angle_dev = 0.0;   // max |A' - A|
  double area_dev = 0.0;    // |area' - area| / area
  double angle_bound = 0.0;
  double area_bound = 0.0;
  bool bound_ok = false;
};

// Checks the single-triangle perturbation bounds
//   Euclidean:  |A'-A| <= 24 delta / eps,    relative area change <= 576 delta / eps^2
//   hyperbolic: |A'-A| <= 30 delta / eps^2,  relative area change <= 120 delta / eps^2
// Throws PreconditionViolated when the base triangle has an angle below eps,
// delta is not below eps^2/48 (resp. eps^3/60), or (hyperbolic) a side
// exceeds 0.1.
PerturbationReport perturbation_bound_check(const TriangleSides& base, const TriangleSides& perturbed,
                                            double eps, Geometry geometry);

} // namespace dunif
