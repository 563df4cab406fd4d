#include "lhs/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lhs {

namespace {

void require_same_dim(const CVector& a, const CVector& b, const char* op) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

bool all_finite(const CVector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
  }
  return true;
}

}  // namespace

UnitVector::UnitVector(CVector v, double tol) : v_(std::move(v)) {
  if (v_.size() < 1) throw std::invalid_argument("UnitVector: dimension must be >= 1");
  if (!all_finite(v_)) throw std::invalid_argument("UnitVector: non-finite entry");
  const double drift = std::abs(v_.norm() - 1.0);
  if (drift > tol) {
    throw std::invalid_argument("UnitVector: | |z| - 1 | = " + std::to_string(drift) +
                                " exceeds tolerance");
  }
}

UnitVector UnitVector::normalize(const CVector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("UnitVector::normalize: zero or non-finite vector");
  }
  return UnitVector(v / n);
}

UnitVector UnitVector::basis(Index d, Index k) {
  if (k < 0 || k >= d) throw std::invalid_argument("UnitVector::basis: index out of range");
  CVector e = CVector::Zero(d);
  e[k] = 1.0;
  return UnitVector(std::move(e));
}

SkewHermitian::SkewHermitian(CMatrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols() || a_.rows() < 1) {
    throw std::invalid_argument("SkewHermitian: matrix must be square and nonempty");
  }
  const double defect = (a_ + a_.adjoint()).norm();
  if (!std::isfinite(defect) || defect > 1e-12 * std::max(1.0, a_.norm())) {
    throw std::invalid_argument("SkewHermitian: ||A + A^dagger||_F = " + std::to_string(defect) +
                                " is not skew-Hermitian");
  }
}

SkewHermitian SkewHermitian::zero(Index d) { return SkewHermitian(CMatrix::Zero(d, d)); }

SkewHermitian SkewHermitian::skew_part(const CMatrix& a) {
  CMatrix s = 0.5 * (a - a.adjoint());
  return SkewHermitian(std::move(s));
}

Complex hermitian_inner(const CVector& w, const CVector& z) {
  require_same_dim(w, z, "hermitian_inner");
  // Eigen's dot is conjugate-linear in its first argument.
  return w.dot(z);
}

double real_dot(const CVector& w, const CVector& z) {
  require_same_dim(w, z, "real_dot");
  double s = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    s += w[i].real() * z[i].real() + w[i].imag() * z[i].imag();
  }
  return s;
}

RVector embed(const CVector& z) {
  RVector x(2 * z.size());
  for (Index i = 0; i < z.size(); ++i) {
    x[2 * i] = z[i].real();
    x[2 * i + 1] = z[i].imag();
  }
  return x;
}

CVector unembed(const RVector& x) {
  if (x.size() % 2 != 0) throw std::invalid_argument("unembed: odd-length real vector");
  CVector z(x.size() / 2);
  for (Index i = 0; i < z.size(); ++i) z[i] = Complex(x[2 * i], x[2 * i + 1]);
  return z;
}

CVector project_radial(const UnitVector& z, const CVector& v) {
  return real_dot(z.vec(), v) * z.vec();
}

CVector project_tangent(const UnitVector& z, const CVector& v) {
  return v - real_dot(z.vec(), v) * z.vec();
}

CVector project_phase(const UnitVector& z, const CVector& v) {
  const CVector iz = kImag * z.vec();
  return real_dot(iz, v) * iz;
}

CVector q_map(const UnitVector& z, const CVector& v, double kappa0, double kappa1) {
  const Complex vz = hermitian_inner(v, z.vec());
  const Complex zv = hermitian_inner(z.vec(), v);
  return kappa0 * (v - vz * z.vec()) + (kappa1 * (zv - vz)) * z.vec();
}

CMatrix matrix_exp(const SkewHermitian& omega, double t) {
  const Index d = omega.dim();
  const CMatrix a = t * omega.mat();
  // 1-norm: maximum absolute column sum.
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();

  int squarings = 0;
  if (norm1 > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.25)));
  const CMatrix b = a / std::ldexp(1.0, squarings);

  // ||b||_1 <= 1/4, so the Taylor tail after k terms is below 4^{-k}/k!.
  CMatrix result = CMatrix::Identity(d, d);
  CMatrix term = CMatrix::Identity(d, d);
  for (int k = 1; k <= 30; ++k) {
    term = (term * b) / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace lhs
