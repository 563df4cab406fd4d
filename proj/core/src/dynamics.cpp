#include "lhs/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lhs {

namespace {

void check_frequencies(std::span<const SkewHermitian> frequencies, Index n, Index d) {
  if (frequencies.size() != 1 && static_cast<Index>(frequencies.size()) != n) {
    throw std::invalid_argument("rhs: expected 1 or N frequency matrices");
  }
  for (const auto& f : frequencies) {
    if (f.dim() != d) throw std::invalid_argument("rhs: frequency dimension mismatch");
  }
}

const SkewHermitian& frequency_of(std::span<const SkewHermitian> frequencies, Index j) {
  return frequencies.size() == 1 ? frequencies[0] : frequencies[static_cast<size_t>(j)];
}

}  // namespace

Ensemble::Ensemble(CMatrix states, std::vector<SkewHermitian> frequencies, CouplingParams params,
                   double unit_tol)
    : states_(std::move(states)), params_(params) {
  const Index n = states_.cols();
  const Index d = states_.rows();
  if (n < 1 || d < 1) throw std::invalid_argument("Ensemble: empty state matrix");
  if (static_cast<Index>(frequencies.size()) != n) {
    throw std::invalid_argument("Ensemble: " + std::to_string(frequencies.size()) +
                                " frequencies for " + std::to_string(n) + " particles");
  }
  if (!std::isfinite(params.kappa0) || !std::isfinite(params.kappa1)) {
    throw std::invalid_argument("Ensemble: non-finite coupling");
  }
  for (const auto& f : frequencies) {
    if (f.dim() != d) throw std::invalid_argument("Ensemble: frequency dimension mismatch");
  }
  for (Index j = 0; j < n; ++j) {
    const double drift = std::abs(states_.col(j).norm() - 1.0);
    if (!(drift <= unit_tol)) {
      throw std::invalid_argument("Ensemble: state " + std::to_string(j) +
                                  " is off the unit sphere (drift " + std::to_string(drift) + ")");
    }
  }
  homogeneous_ = true;
  for (const auto& f : frequencies) {
    if ((f.mat() - frequencies.front().mat()).norm() > 1e-12) {
      homogeneous_ = false;
      break;
    }
  }
  frequencies_ = std::make_shared<const std::vector<SkewHermitian>>(std::move(frequencies));
}

Ensemble Ensemble::homogeneous(CMatrix states, const SkewHermitian& omega, CouplingParams params,
                               double unit_tol) {
  std::vector<SkewHermitian> freqs(static_cast<size_t>(states.cols()), omega);
  return Ensemble(std::move(states), std::move(freqs), params, unit_tol);
}

Ensemble Ensemble::with_states(CMatrix states, double unit_tol) const {
  if (states.rows() != dim() || states.cols() != size()) {
    throw std::invalid_argument("Ensemble::with_states: shape mismatch");
  }
  for (Index j = 0; j < states.cols(); ++j) {
    const double drift = std::abs(states.col(j).norm() - 1.0);
    if (!(drift <= unit_tol)) {
      throw std::invalid_argument("Ensemble::with_states: state " + std::to_string(j) +
                                  " is off the unit sphere");
    }
  }
  Ensemble out;
  out.states_ = std::move(states);
  out.frequencies_ = frequencies_;
  out.params_ = params_;
  out.homogeneous_ = homogeneous_;
  return out;
}

Ensemble Ensemble::with_params(CouplingParams params) const {
  Ensemble out = *this;
  out.params_ = params;
  return out;
}

EmpiricalMeasure Ensemble::empirical_measure() const {
  return EmpiricalMeasure::uniform(states_, 1e-10).with_frequencies(*frequencies_);
}

CVector column_mean(const CMatrix& states) {
  const Index d = states.rows();
  const Index n = states.cols();
  CVector c = CVector::Zero(d);
  for (Index k = 0; k < n; ++k) {
    for (Index a = 0; a < d; ++a) c[a] += states(a, k);
  }
  return c / static_cast<double>(n);
}

void lhs_rhs_into(const CMatrix& states, std::span<const SkewHermitian> frequencies,
                  const CouplingParams& params, CMatrix& out, bool free_flow) {
  const Index d = states.rows();
  const Index n = states.cols();
  if (free_flow) check_frequencies(frequencies, n, d);
  out.resize(d, n);

  const CVector zc = column_mean(states);
  const double k0 = params.kappa0;
  const double k1 = params.kappa1;
  const bool shared = free_flow && frequencies.size() == 1 && !frequencies[0].is_zero();
  const bool per_particle = free_flow && frequencies.size() != 1;

  for (Index j = 0; j < n; ++j) {
    Complex zz{0.0, 0.0};  // <z_j, z_j>
    Complex czj{0.0, 0.0};  // <z_c, z_j>
    for (Index a = 0; a < d; ++a) {
      const Complex zja = states(a, j);
      zz += std::conj(zja) * zja;
      czj += std::conj(zc[a]) * zja;
    }
    const Complex jzc = std::conj(czj);  // <z_j, z_c>
    const Complex own = -k0 * czj + k1 * (jzc - czj);
    const Complex cen = k0 * zz;
    for (Index a = 0; a < d; ++a) out(a, j) = cen * zc[a] + own * states(a, j);
    if (per_particle) {
      const SkewHermitian& omega = frequency_of(frequencies, j);
      if (!omega.is_zero()) out.col(j).noalias() += omega.mat() * states.col(j);
    }
  }
  if (shared) out.noalias() += frequencies[0].mat() * states;
}

CMatrix lhs_rhs(const Ensemble& ens) {
  CMatrix out;
  lhs_rhs_into(ens.states(), ens.frequencies(), ens.params(), out);
  return out;
}

CMatrix lhs_rhs_pairwise(const Ensemble& ens) {
  const CMatrix& z = ens.states();
  const Index d = ens.dim();
  const Index n = ens.size();
  const double k0 = ens.params().kappa0;
  const double k1 = ens.params().kappa1;
  const double inv_n = 1.0 / static_cast<double>(n);

  CMatrix out(d, n);
  for (Index j = 0; j < n; ++j) {
    const CVector zj = z.col(j);
    const Complex zz = zj.dot(zj);
    CVector acc = CVector::Zero(d);
    for (Index k = 0; k < n; ++k) {
      const CVector zk = z.col(k);
      const Complex kj = zk.dot(zj);  // <z_k, z_j>
      const Complex jk = zj.dot(zk);  // <z_j, z_k>
      acc += k0 * (zz * zk - kj * zj) + k1 * (jk - kj) * zj;
    }
    out.col(j) = ens.frequency(j).mat() * zj + inv_n * acc;
  }
  return out;
}

bool is_real_ensemble(const Ensemble& ens, double tol) {
  if (ens.states().imag().cwiseAbs().maxCoeff() > tol) return false;
  for (const auto& f : ens.frequencies()) {
    if (f.mat().imag().cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

void ls_rhs_into(const CMatrix& states, std::span<const SkewHermitian> frequencies,
                 const CouplingParams& params, CMatrix& out, bool free_flow) {
  const Index d = states.rows();
  const Index n = states.cols();
  if (free_flow) check_frequencies(frequencies, n, d);
  out.resize(d, n);

  RVector xc = RVector::Zero(d);
  for (Index k = 0; k < n; ++k) {
    for (Index a = 0; a < d; ++a) xc[a] += states(a, k).real();
  }
  xc /= static_cast<double>(n);

  const double k0 = params.kappa0;
  RVector x(d);
  for (Index j = 0; j < n; ++j) {
    double xx = 0.0;
    double cx = 0.0;
    for (Index a = 0; a < d; ++a) {
      x[a] = states(a, j).real();
      xx += x[a] * x[a];
      cx += xc[a] * x[a];
    }
    RVector v = k0 * (xx * xc - cx * x);
    if (free_flow) {
      const SkewHermitian& omega = frequency_of(frequencies, j);
      if (!omega.is_zero()) v.noalias() += omega.mat().real() * x;
    }
    for (Index a = 0; a < d; ++a) out(a, j) = Complex(v[a], 0.0);
  }
}

CMatrix ls_rhs(const Ensemble& ens) {
  if (!is_real_ensemble(ens)) {
    throw std::invalid_argument("ls_rhs: ensemble has complex states or frequencies");
  }
  CMatrix out;
  ls_rhs_into(ens.states(), ens.frequencies(), ens.params(), out);
  return out;
}

CVector mean_field_velocity(const EmpiricalMeasure& mu, const UnitVector& z,
                            const SkewHermitian& omega, const CouplingParams& params) {
  if (mu.dim() != z.dim() || omega.dim() != z.dim()) {
    throw std::invalid_argument("mean_field_velocity: dimension mismatch");
  }
  CVector moment = CVector::Zero(mu.dim());
  for (Index j = 0; j < mu.size(); ++j) moment += mu.weight(j) * mu.atoms().col(j);
  const CVector& zv = z.vec();
  const Complex jz = moment.dot(zv);  // <J, z>
  const Complex zj = zv.dot(moment);  // <z, J>
  return omega.mat() * zv + params.kappa0 * (moment - jz * zv) + (params.kappa1 * (zj - jz)) * zv;
}

}  // namespace lhs
