#pragma once

// Diagnostics of an ensemble or empirical measure: the diameter-type functionals
// F = max |1 - <z_k,z_l>| and G = max |z_k - z_l|, the first moment J and order
// parameter R = |J|, the analytic rate of R^2, the aggregation defect and l^p distances.
//
// Every reduction runs in a fixed sequential order so results are reproducible bit for bit.

#include <cstdint>

#include "lhs/geometry.hpp"
#include "lhs/measure.hpp"

namespace lhs {

double functional_F(const CMatrix& states);
double functional_G(const CMatrix& states);

struct PairFunctionals {
  double F = 0.0;
  double G = 0.0;
  bool exact = true;  // false when pairs were subsampled
  std::int64_t pairs_scanned = 0;
};

// Exact O(N^2) scan up to exact_limit particles; above that, a deterministic random
// subsample of pairs (sample_pairs of them, drawn from `seed`) and exact = false.
PairFunctionals pair_functionals(const CMatrix& states, Index exact_limit = 4096,
                                 std::int64_t sample_pairs = 4'000'000, std::uint64_t seed = 0);

CVector centroid(const CMatrix& states);
// Weighted first moment J = sum_j w_j z_j.
CVector j_vector(const EmpiricalMeasure& mu);
double order_parameter(const EmpiricalMeasure& mu);

// dR^2/dt = 2 k0 sum_j w_j (|J|^2 - (z_j . J)^2) + 2 (k0 + 2 k1) sum_j w_j ((i z_j) . J)^2
// along the flow with a common frequency.
double r_squared_rate(const EmpiricalMeasure& mu, double kappa0, double kappa1);

// d|z_c|^2/dt = (2 k0 / N) sum (|z_c|^2 - Re<z_i,z_c>^2) + (2 (k0 + 2 k1) / N) sum Im<z_i,z_c>^2.
double centroid_rate(const CMatrix& states, double kappa0, double kappa1);

// sum_j w_j (|J|^2 - (z_j . J)^2), evaluated as sum_j w_j |J - (z_j . J) z_j|^2 which
// is the same quantity for unit atoms and is nonnegative by construction.
double aggregation_defect(const EmpiricalMeasure& mu);

struct DjDtCheck {
  double value = 0.0;  // |sum_j w_j Q_{z_j}(J)|
  double bound = 0.0;  // 2 (k0 + k1)
  bool holds(double slack = 1e-10) const { return value <= bound + slack; }
};
DjDtCheck dj_dt_norm_bound_check(const EmpiricalMeasure& mu, double kappa0, double kappa1);

// (sum_k |z_k - w_k|^p)^{1/p}; p in [1, inf).
double lp_distance(const CMatrix& a, const CMatrix& b, double p);

// min_j z_j . (J / |J|) over atoms of positive weight; -1 when J = 0.
double min_alignment(const EmpiricalMeasure& mu);

struct CorrelationData {
  CMatrix h;  // h_ij = <z_i, z_j>

  RMatrix real_part() const { return h.real(); }
  RMatrix imag_part() const { return h.imag(); }
  // J_ij = 1 - Re h_ij.
  RMatrix defect_part() const { return RMatrix::Ones(h.rows(), h.cols()) - h.real(); }
  // max_{k,l} sqrt(I_kl^2 + J_kl^2).
  double functional_F() const;
};
CorrelationData correlations(const CMatrix& states);

}  // namespace lhs
