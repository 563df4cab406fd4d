#pragma once

// Right-hand sides of the Lohe Hermitian sphere (LHS) particle system
//
//   dz_j/dt = Omega_j z_j + k0 (<z_j,z_j> z_c - <z_c,z_j> z_j) + k1 (<z_j,z_c> - <z_c,z_j>) z_j,
//   z_c = (1/N) sum_k z_k,
//
// its real restriction (the Lohe sphere model) and the mean-field velocity field
// of an empirical measure.

#include <memory>
#include <span>
#include <vector>

#include "lhs/geometry.hpp"
#include "lhs/measure.hpp"

namespace lhs {

// k0: Lohe sphere coupling gain, k1: rotational coupling gain. Either sign is allowed.
struct CouplingParams {
  double kappa0 = 1.0;
  double kappa1 = 0.0;
};

// N particle states (columns of a d x N matrix) with one natural frequency each.
class Ensemble {
 public:
  Ensemble(CMatrix states, std::vector<SkewHermitian> frequencies, CouplingParams params,
           double unit_tol = kUnitTol);

  // All particles share the frequency matrix omega.
  static Ensemble homogeneous(CMatrix states, const SkewHermitian& omega, CouplingParams params,
                              double unit_tol = kUnitTol);

  // Same frequencies and parameters, new states (validated to unit_tol).
  Ensemble with_states(CMatrix states, double unit_tol = kUnitTol) const;
  Ensemble with_params(CouplingParams params) const;

  Index size() const noexcept { return states_.cols(); }
  Index dim() const noexcept { return states_.rows(); }
  const CMatrix& states() const noexcept { return states_; }
  UnitVector state(Index j) const { return UnitVector(states_.col(j), 1e-10); }
  const std::vector<SkewHermitian>& frequencies() const noexcept { return *frequencies_; }
  const SkewHermitian& frequency(Index j) const { return (*frequencies_)[static_cast<size_t>(j)]; }
  const CouplingParams& params() const noexcept { return params_; }

  // All Omega_j equal to 1e-12 in Frobenius norm.
  bool is_homogeneous() const noexcept { return homogeneous_; }

  // Uniform empirical measure over the states, with frequencies attached.
  EmpiricalMeasure empirical_measure() const;

 private:
  Ensemble() = default;

  CMatrix states_;
  std::shared_ptr<const std::vector<SkewHermitian>> frequencies_;
  CouplingParams params_;
  bool homogeneous_ = true;
};

// Low-level evaluation on a raw state matrix (states need not be exactly unit;
// <z_j, z_j> is kept in the formula). `frequencies` holds either one matrix per
// particle or a single shared matrix. With free_flow = false the Omega_j z_j term
// is dropped. Cost O(N d + N d^2) through the centroid z_c.
void lhs_rhs_into(const CMatrix& states, std::span<const SkewHermitian> frequencies,
                  const CouplingParams& params, CMatrix& out, bool free_flow = true);

// Centroid-reduced LHS vector field, one column per particle.
CMatrix lhs_rhs(const Ensemble& ens);

// The same field computed as the explicit (1/N) sum over pairs, O(N^2 d).
CMatrix lhs_rhs_pairwise(const Ensemble& ens);

// True when every state and frequency entry has |Im| <= tol.
bool is_real_ensemble(const Ensemble& ens, double tol = 1e-14);

// Real Lohe sphere field dx_j/dt = Omega_j x_j + k0 (<x_j,x_j> x_c - <x_c,x_j> x_j),
// evaluated in real arithmetic and returned with zero imaginary parts.
// Rejects ensembles that fail is_real_ensemble.
CMatrix ls_rhs(const Ensemble& ens);
void ls_rhs_into(const CMatrix& states, std::span<const SkewHermitian> frequencies,
                 const CouplingParams& params, CMatrix& out, bool free_flow = true);

// L[mu](z, Omega) = Omega z + k0 (J - <J,z> z) + k1 (<z,J> - <J,z>) z with J the
// weighted first moment of mu.
CVector mean_field_velocity(const EmpiricalMeasure& mu, const UnitVector& z,
                            const SkewHermitian& omega, const CouplingParams& params);

// Deterministic, sequential sum of columns divided by N.
CVector column_mean(const CMatrix& states);

}  // namespace lhs
