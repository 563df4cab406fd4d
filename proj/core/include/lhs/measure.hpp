#pragma once

#include <memory>
#include <vector>

#include "lhs/geometry.hpp"

namespace lhs {

// Weighted point cloud on the Hermitian sphere, optionally carrying one
// frequency matrix per atom (a measure on HS^{d-1} x Skew_d).
class EmpiricalMeasure {
 public:
  // atoms: d x n, one atom per column. Weights must be nonnegative and sum to 1 +- 1e-12.
  EmpiricalMeasure(CMatrix atoms, RVector weights, double unit_tol = kUnitTol);

  static EmpiricalMeasure uniform(CMatrix atoms, double unit_tol = kUnitTol);
  static EmpiricalMeasure dirac(const UnitVector& z);

  // Attaches one frequency per atom; the result is a measure on phase space.
  EmpiricalMeasure with_frequencies(std::vector<SkewHermitian> frequencies) const;

  Index size() const noexcept { return atoms_.cols(); }
  Index dim() const noexcept { return atoms_.rows(); }
  const CMatrix& atoms() const noexcept { return atoms_; }
  const RVector& weights() const noexcept { return weights_; }
  double weight(Index j) const { return weights_[j]; }
  UnitVector atom(Index j) const { return UnitVector(atoms_.col(j), 1e-10); }

  // True when all weights coincide to 1e-15 relative.
  bool is_uniform() const;

  bool has_frequencies() const noexcept { return frequencies_ != nullptr; }
  const std::vector<SkewHermitian>& frequencies() const;

 private:
  CMatrix atoms_;
  RVector weights_;
  std::shared_ptr<const std::vector<SkewHermitian>> frequencies_;
};

}  // namespace lhs
