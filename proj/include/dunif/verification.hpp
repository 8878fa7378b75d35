#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dunif {

// Randomized invariant suites shared by the `verify` command, the unit tests
// and the acceptance runner. Every suite is deterministic given its seed.

enum class VerifyFault {
  None,
  // Compares finite differences against the negated curvature Jacobian; the
  // Jacobian suite must then fail.
  JacobianSign,
};

std::string_view to_string(VerifyFault f);
// Accepts "none" and "jacobian-sign"; throws InvalidInput otherwise.
VerifyFault parse_fault(std::string_view name);

struct SuiteResult {
  std::string name;
  bool passed = false;
  int instances = 0;
  double worst = 0.0;     // worst observed value of the checked quantity
  double tolerance = 0.0; // pass threshold for `worst` (0 for pure inequality suites)
  std::string detail;     // first failure, if any
};

inline constexpr std::uint64_t kDefaultSeed = 20240611;

// <x, Lap y> = <y, Lap x>, relative to sum |x_i (Lap y)_i| + |y_i (Lap x)_i|.
SuiteResult green_identity_suite(std::uint64_t seed, int instances);
// Relative residuals of the mean-zero and shifted Laplacian solves.
SuiteResult laplacian_inverse_suite(std::uint64_t seed, int instances);
// Central finite differences of K against dK/du (max|diff| / max|J|), half of
// the instances Euclidean and half hyperbolic; Euclidean row sums and
// symmetry of the per-face assembly, agreement of both assemblies.
SuiteResult jacobian_suite(std::uint64_t seed, int instances_per_geometry, VerifyFault fault = VerifyFault::None);
// Heron-type areas against angle-based and cotangent-based areas.
SuiteResult heron_suite(std::uint64_t seed, int instances);
// Both forms of the elliptic estimate on random graphs with C1 from brute force.
SuiteResult elliptic_estimate_suite(std::uint64_t seed, int graphs, int max_vertices = 18);
// Single-triangle perturbation bounds (Euclidean and hyperbolic).
SuiteResult perturbation_suite(std::uint64_t seed, int instances_per_geometry);
// Area bounds eps/8 a^2 <= area <= a^2/eps and midpoint ratio >= 1/5 in all
// three geometries, sides below 0.1.
SuiteResult triangle_area_suite(std::uint64_t seed, int instances);
// Brute-force isoperimetric constant against a plain subset enumeration,
// plus invariance under l -> t l.
SuiteResult isoperimetric_suite(std::uint64_t seed, int graphs);
// sum K = 2 pi chi (+ area when hyperbolic) on perturbed generated meshes.
SuiteResult gauss_bonnet_suite(std::uint64_t seed, int instances);

struct VerifyOptions {
  std::uint64_t seed = kDefaultSeed;
  VerifyFault fault = VerifyFault::None;
};

// Every suite at its default instance count, in a fixed order.
std::vector<SuiteResult> run_all_suites(const VerifyOptions& opts);

} // namespace dunif
