#include "lhs/measure.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lhs {

EmpiricalMeasure::EmpiricalMeasure(CMatrix atoms, RVector weights, double unit_tol)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.cols() < 1 || atoms_.rows() < 1) {
    throw std::invalid_argument("EmpiricalMeasure: empty support");
  }
  if (weights_.size() != atoms_.cols()) {
    throw std::invalid_argument("EmpiricalMeasure: weight count does not match atom count");
  }
  double total = 0.0;
  for (Index j = 0; j < weights_.size(); ++j) {
    if (!(weights_[j] >= 0.0) || !std::isfinite(weights_[j])) {
      throw std::invalid_argument("EmpiricalMeasure: negative or non-finite weight");
    }
    total += weights_[j];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("EmpiricalMeasure: weights sum to " + std::to_string(total) +
                                ", expected 1");
  }
  for (Index j = 0; j < atoms_.cols(); ++j) {
    const double drift = std::abs(atoms_.col(j).norm() - 1.0);
    if (!(drift <= unit_tol)) {
      throw std::invalid_argument("EmpiricalMeasure: atom " + std::to_string(j) +
                                  " is off the unit sphere");
    }
  }
}

EmpiricalMeasure EmpiricalMeasure::uniform(CMatrix atoms, double unit_tol) {
  const Index n = atoms.cols();
  if (n < 1) throw std::invalid_argument("EmpiricalMeasure: empty support");
  RVector w = RVector::Constant(n, 1.0 / static_cast<double>(n));
  return EmpiricalMeasure(std::move(atoms), std::move(w), unit_tol);
}

EmpiricalMeasure EmpiricalMeasure::dirac(const UnitVector& z) {
  CMatrix a(z.dim(), 1);
  a.col(0) = z.vec();
  return EmpiricalMeasure(std::move(a), RVector::Ones(1));
}

EmpiricalMeasure EmpiricalMeasure::with_frequencies(std::vector<SkewHermitian> frequencies) const {
  if (static_cast<Index>(frequencies.size()) != size()) {
    throw std::invalid_argument("EmpiricalMeasure: one frequency per atom required");
  }
  for (const auto& f : frequencies) {
    if (f.dim() != dim()) throw std::invalid_argument("EmpiricalMeasure: frequency dimension mismatch");
  }
  EmpiricalMeasure out = *this;
  out.frequencies_ = std::make_shared<const std::vector<SkewHermitian>>(std::move(frequencies));
  return out;
}

bool EmpiricalMeasure::is_uniform() const {
  const double w0 = weights_[0];
  for (Index j = 1; j < weights_.size(); ++j) {
    if (std::abs(weights_[j] - w0) > 1e-15 * w0) return false;
  }
  return true;
}

const std::vector<SkewHermitian>& EmpiricalMeasure::frequencies() const {
  if (!frequencies_) throw std::logic_error("EmpiricalMeasure: no frequencies attached");
  return *frequencies_;
}

}  // namespace lhs
