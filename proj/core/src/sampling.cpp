#include "lhs/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lhs/observables.hpp"

namespace lhs {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

namespace {

CVector gaussian(Index d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(d);
  for (Index a = 0; a < d; ++a) {
    const double re = g(rng);
    const double im = g(rng);
    v[a] = Complex(re, im);
  }
  return v;
}

}  // namespace

CVector random_unit(Index d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("random_unit: dimension must be >= 1");
  while (true) {
    CVector v = gaussian(d, rng);
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

CMatrix random_states(Index n, Index d, Rng& rng) {
  CMatrix z(d, n);
  for (Index j = 0; j < n; ++j) z.col(j) = random_unit(d, rng);
  return z;
}

CVector random_tangent(const CVector& z, Rng& rng) {
  while (true) {
    CVector v = gaussian(z.size(), rng);
    v -= real_dot(z, v) * z;
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

SkewHermitian random_skew(Index d, double spread, Rng& rng) {
  CMatrix a(d, d);
  for (Index c = 0; c < d; ++c) a.col(c) = gaussian(d, rng);
  return SkewHermitian::skew_part(spread * a);
}

CMatrix jitter(const CMatrix& states, double angle, Rng& rng) {
  CMatrix out(states.rows(), states.cols());
  for (Index j = 0; j < states.cols(); ++j) {
    const CVector z = states.col(j);
    CVector w = std::cos(angle) * z + std::sin(angle) * random_tangent(z, rng);
    out.col(j) = w / w.norm();
  }
  return out;
}

CMatrix sample_cap(Index n, const CVector& center, double theta_max, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, theta_max);
  CMatrix z(center.size(), n);
  for (Index j = 0; j < n; ++j) {
    const double t = unif(rng);
    CVector w = std::cos(t) * center + std::sin(t) * random_tangent(center, rng);
    z.col(j) = w / w.norm();
  }
  return z;
}

double AdmissibilityCheck::bound() const {
  return 1.0 - 2.0 * std::abs(kappa1) / kappa0 - delta;
}

AdmissibilityCheck AdmissibilityCheck::evaluate(double kappa0, double kappa1, double delta, double F0) {
  AdmissibilityCheck c{kappa0, kappa1, delta, F0, false};
  c.verdict = admissible_parameters(kappa0, kappa1, delta) && F0 < c.bound();
  return c;
}

bool admissible_parameters(double kappa0, double kappa1, double delta) {
  if (!(kappa0 > 0.0) || !std::isfinite(kappa1) || !(delta > 0.0)) return false;
  return std::abs(kappa1) < 0.5 * kappa0 && delta < 1.0 - 2.0 * std::abs(kappa1) / kappa0;
}

CMatrix sample_admissible_states(Index n, Index d, double kappa0, double kappa1, double delta,
                                 std::uint64_t seed, std::uint64_t stream) {
  if (n < 1 || d < 1) throw std::invalid_argument("sample_admissible: N and d must be >= 1");
  if (!admissible_parameters(kappa0, kappa1, delta)) {
    throw std::invalid_argument("sample_admissible: infeasible parameters (need kappa0 > 0, |kappa1| < kappa0/2, "
                                "0 < delta < 1 - 2|kappa1|/kappa0)");
  }
  const double bound = 1.0 - 2.0 * std::abs(kappa1) / kappa0 - delta;
  Rng rng = make_rng(seed, stream);
  const CVector center = random_unit(d, rng);
  double theta = std::numbers::pi / 4.0;
  for (int attempt = 0; attempt < 200; ++attempt) {
    CMatrix z = sample_cap(n, center, theta, rng);
    if (functional_F(z) < bound) return z;
    theta *= 0.8;
  }
  throw std::runtime_error("sample_admissible: cap shrinking did not reach F < " + std::to_string(bound));
}

Ensemble sample_admissible(Index n, Index d, CouplingParams params, double delta, std::uint64_t seed,
                           const SkewHermitian* omega) {
  CMatrix z = sample_admissible_states(n, d, params.kappa0, params.kappa1, delta, seed);
  return Ensemble::homogeneous(std::move(z), omega ? *omega : SkewHermitian::zero(d), params);
}

}  // namespace lhs
