#pragma once

// Seeded samplers for initial data. Every draw comes from a named stream so
// that independent pieces of an experiment never share random numbers.

#include <cstdint>
#include <random>

#include "lhs/dynamics.hpp"
#include "lhs/geometry.hpp"

namespace lhs {

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

// Uniform point on HS^{d-1}.
CVector random_unit(Index d, Rng& rng);
// N uniform points, one per column.
CMatrix random_states(Index n, Index d, Rng& rng);
// Unit vector v with Re<z, v> = 0, uniformly distributed on that great sphere.
CVector random_tangent(const CVector& z, Rng& rng);
// spread * skew-Hermitian part of a complex Gaussian matrix.
SkewHermitian random_skew(Index d, double spread, Rng& rng);
// cos(a) z + sin(a) v with v a random tangent direction, applied to every column.
CMatrix jitter(const CMatrix& states, double angle, Rng& rng);
// N points cos(t) u + sin(t) v, t uniform on [0, theta_max], v a random tangent at u.
CMatrix sample_cap(Index n, const CVector& center, double theta_max, Rng& rng);

struct AdmissibilityCheck {
  double kappa0 = 0.0;
  double kappa1 = 0.0;
  double delta = 0.0;
  double F0 = 0.0;
  bool verdict = false;

  // 1 - 2|k1|/k0 - delta
  double bound() const;
  static AdmissibilityCheck evaluate(double kappa0, double kappa1, double delta, double F0);
};

// |k1| < k0/2 and 0 < delta < 1 - 2|k1|/k0.
bool admissible_parameters(double kappa0, double kappa1, double delta);

// N states in a cap around a random reference point whose F satisfies the strict
// admissibility bound. The cap half-angle starts at pi/4 and shrinks by 0.8 until
// the bound holds. Throws std::invalid_argument if the parameters are infeasible.
CMatrix sample_admissible_states(Index n, Index d, double kappa0, double kappa1, double delta,
                                 std::uint64_t seed, std::uint64_t stream = 0);

Ensemble sample_admissible(Index n, Index d, CouplingParams params, double delta, std::uint64_t seed,
                           const SkewHermitian* omega = nullptr);

}  // namespace lhs
