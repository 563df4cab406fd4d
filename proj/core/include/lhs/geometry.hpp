#pragma once

// Complex-vector calculus on the Hermitian sphere HS^{d-1} = { z in C^d : |z| = 1 }.
//
// Two pairings are used throughout the library:
//   hermitian_inner(w, z) = sum_i conj(w_i) z_i          (complex valued)
//   real_dot(w, z)        = embed(w) . embed(z)          (real valued)
// and they are related by hermitian_inner(z, w) = real_dot(z, w) - i real_dot(z, i w).

#include <complex>

#include <Eigen/Dense>

namespace lhs {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr Complex kImag{0.0, 1.0};

// Default tolerance on | |z| - 1 | when a unit state is constructed.
inline constexpr double kUnitTol = 1e-12;

// A state on the Hermitian sphere. Construction validates the norm; operations
// taking a UnitVector do not re-check it.
class UnitVector {
 public:
  explicit UnitVector(CVector v, double tol = kUnitTol);

  // Rescales a nonzero vector onto the sphere.
  static UnitVector normalize(const CVector& v);
  // Standard basis vector e_k (0-based) in C^d.
  static UnitVector basis(Index d, Index k);

  const CVector& vec() const noexcept { return v_; }
  Index dim() const noexcept { return v_.size(); }

  operator const CVector&() const noexcept { return v_; }  // NOLINT(google-explicit-constructor)

 private:
  CVector v_;
};

// Natural frequency matrix: A^dagger = -A.
class SkewHermitian {
 public:
  // Rejects non-square input and ||A + A^dagger||_F > 1e-12 max(1, ||A||_F).
  explicit SkewHermitian(CMatrix a);

  static SkewHermitian zero(Index d);
  // Skew-Hermitian part (A - A^dagger) / 2 of an arbitrary square matrix.
  static SkewHermitian skew_part(const CMatrix& a);

  const CMatrix& mat() const noexcept { return a_; }
  Index dim() const noexcept { return a_.rows(); }
  bool is_zero() const { return a_.isZero(0.0); }

 private:
  CMatrix a_;
};

// sum_i conj(w_i) z_i.
Complex hermitian_inner(const CVector& w, const CVector& z);

// Euclidean dot product of the real embeddings.
double real_dot(const CVector& w, const CVector& z);

// iota: C^d -> R^{2d}, interleaved (Re z_1, Im z_1, Re z_2, Im z_2, ...).
RVector embed(const CVector& z);
// Inverse of embed; rejects odd-length input.
CVector unembed(const RVector& x);

// P_z v = (z . v) z.
CVector project_radial(const UnitVector& z, const CVector& v);
// P_{z-perp} v = v - (z . v) z. Note the real dot: the phase direction i z is kept.
CVector project_tangent(const UnitVector& z, const CVector& v);
// P_{iz} v = ((i z) . v) (i z).
CVector project_phase(const UnitVector& z, const CVector& v);

// Q_z(v) = k0 (v - <v,z> z) + k1 (<z,v> - <v,z>) z.
// Equals k0 P_{z-perp} v + (k0 + 2 k1) P_{iz} v.
CVector q_map(const UnitVector& z, const CVector& v, double kappa0, double kappa1);

// exp(t * omega) by scaling and squaring of a truncated Taylor series.
CMatrix matrix_exp(const SkewHermitian& omega, double t);

}  // namespace lhs
