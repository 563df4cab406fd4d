#include "lhs/observables.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "lhs/dynamics.hpp"

namespace lhs {

namespace {

double pair_F(const CMatrix& z, Index k, Index l) {
  Complex h{0.0, 0.0};
  for (Index a = 0; a < z.rows(); ++a) h += std::conj(z(a, k)) * z(a, l);
  return std::abs(Complex(1.0, 0.0) - h);
}

double pair_G(const CMatrix& z, Index k, Index l) {
  double s = 0.0;
  for (Index a = 0; a < z.rows(); ++a) s += std::norm(z(a, k) - z(a, l));
  return std::sqrt(s);
}

}  // namespace

double functional_F(const CMatrix& states) {
  double f = 0.0;
  for (Index k = 0; k < states.cols(); ++k) {
    for (Index l = k + 1; l < states.cols(); ++l) f = std::max(f, pair_F(states, k, l));
  }
  // Diagonal terms |1 - |z_k|^2| vanish on the sphere up to rounding.
  for (Index k = 0; k < states.cols(); ++k) f = std::max(f, pair_F(states, k, k));
  return f;
}

double functional_G(const CMatrix& states) {
  double g = 0.0;
  for (Index k = 0; k < states.cols(); ++k) {
    for (Index l = k + 1; l < states.cols(); ++l) g = std::max(g, pair_G(states, k, l));
  }
  return g;
}

PairFunctionals pair_functionals(const CMatrix& states, Index exact_limit,
                                 std::int64_t sample_pairs, std::uint64_t seed) {
  PairFunctionals out;
  const Index n = states.cols();
  if (n <= exact_limit) {
    out.F = functional_F(states);
    out.G = functional_G(states);
    out.exact = true;
    out.pairs_scanned = static_cast<std::int64_t>(n) * (n - 1) / 2;
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  for (std::int64_t s = 0; s < sample_pairs; ++s) {
    const Index k = pick(rng);
    const Index l = pick(rng);
    out.F = std::max(out.F, pair_F(states, k, l));
    out.G = std::max(out.G, pair_G(states, k, l));
  }
  out.exact = false;
  out.pairs_scanned = sample_pairs;
  return out;
}

CVector centroid(const CMatrix& states) {
  if (states.cols() < 1) throw std::invalid_argument("centroid: empty ensemble");
  return column_mean(states);
}

CVector j_vector(const EmpiricalMeasure& mu) {
  CVector moment = CVector::Zero(mu.dim());
  for (Index j = 0; j < mu.size(); ++j) {
    for (Index a = 0; a < mu.dim(); ++a) moment[a] += mu.weight(j) * mu.atoms()(a, j);
  }
  return moment;
}

double order_parameter(const EmpiricalMeasure& mu) { return j_vector(mu).norm(); }

double r_squared_rate(const EmpiricalMeasure& mu, double kappa0, double kappa1) {
  const CVector moment = j_vector(mu);
  const double jj = moment.squaredNorm();
  double radial = 0.0;
  double phase = 0.0;
  for (Index j = 0; j < mu.size(); ++j) {
    const CVector z = mu.atoms().col(j);
    const double zdotj = real_dot(z, moment);
    const double izdotj = real_dot(kImag * z, moment);
    radial += mu.weight(j) * (jj - zdotj * zdotj);
    phase += mu.weight(j) * izdotj * izdotj;
  }
  return 2.0 * kappa0 * radial + 2.0 * (kappa0 + 2.0 * kappa1) * phase;
}

double centroid_rate(const CMatrix& states, double kappa0, double kappa1) {
  const Index n = states.cols();
  const CVector zc = centroid(states);
  const double cc = zc.squaredNorm();
  double radial = 0.0;
  double phase = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Complex h = states.col(i).dot(zc);  // <z_i, z_c>
    radial += cc - h.real() * h.real();
    phase += h.imag() * h.imag();
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  return 2.0 * kappa0 * inv_n * radial + 2.0 * (kappa0 + 2.0 * kappa1) * inv_n * phase;
}

double aggregation_defect(const EmpiricalMeasure& mu) {
  const CVector moment = j_vector(mu);
  double defect = 0.0;
  for (Index j = 0; j < mu.size(); ++j) {
    const CVector z = mu.atoms().col(j);
    defect += mu.weight(j) * (moment - real_dot(z, moment) * z).squaredNorm();
  }
  return defect;
}

DjDtCheck dj_dt_norm_bound_check(const EmpiricalMeasure& mu, double kappa0, double kappa1) {
  const CVector moment = j_vector(mu);
  CVector rate = CVector::Zero(mu.dim());
  for (Index j = 0; j < mu.size(); ++j) {
    const UnitVector z(mu.atoms().col(j), 1e-10);
    rate += mu.weight(j) * q_map(z, moment, kappa0, kappa1);
  }
  return DjDtCheck{rate.norm(), 2.0 * (kappa0 + kappa1)};
}

double lp_distance(const CMatrix& a, const CMatrix& b, double p) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("lp_distance: configuration shapes differ");
  }
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_distance: p must be in [1, inf)");
  double s = 0.0;
  for (Index k = 0; k < a.cols(); ++k) s += std::pow((a.col(k) - b.col(k)).norm(), p);
  return std::pow(s, 1.0 / p);
}

double min_alignment(const EmpiricalMeasure& mu) {
  const CVector moment = j_vector(mu);
  const double r = moment.norm();
  if (r == 0.0) return -1.0;
  const CVector dir = moment / r;
  double worst = 1.0;
  for (Index j = 0; j < mu.size(); ++j) {
    if (mu.weight(j) > 0.0) worst = std::min(worst, real_dot(mu.atoms().col(j), dir));
  }
  return worst;
}

double CorrelationData::functional_F() const {
  double f = 0.0;
  for (Index k = 0; k < h.rows(); ++k) {
    for (Index l = 0; l < h.cols(); ++l) {
      const double i = h(k, l).imag();
      const double j = 1.0 - h(k, l).real();
      f = std::max(f, std::sqrt(i * i + j * j));
    }
  }
  return f;
}

CorrelationData correlations(const CMatrix& states) {
  if (states.cols() < 1) throw std::invalid_argument("correlations: empty ensemble");
  CorrelationData out;
  out.h = states.adjoint() * states;
  return out;
}

}  // namespace lhs
