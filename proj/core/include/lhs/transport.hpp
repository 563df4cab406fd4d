#pragma once

// Exact Wasserstein-p distances between atomic measures on the Hermitian sphere.
//
// The ground distance is the chordal norm |z - w|. When both measures carry
// frequency matrices the phase-space distance xi_distance is used instead
// (Frobenius norm on the frequency component).

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "lhs/geometry.hpp"
#include "lhs/measure.hpp"

namespace lhs {

inline constexpr Index kMaxTransportSupport = 512;
inline constexpr Index kMaxBruteForceSupport = 8;

struct PlanEntry {
  Index row = 0;
  Index col = 0;
  double mass = 0.0;
};

// Sparse coupling between a source support (rows) and a target support (cols).
struct TransportPlan {
  Index rows = 0;
  Index cols = 0;
  std::vector<PlanEntry> entries;

  RMatrix dense() const;
  RVector row_sums() const;
  RVector col_sums() const;
  // {"rows": n, "cols": m, "row": [...], "col": [...], "mass": [...]}
  nlohmann::json to_json() const;
};

struct TransportResult {
  double distance = 0.0;
  double cost = 0.0;  // sum_ij gamma_ij c_ij^p, equal to distance^p
  TransportPlan plan;
  bool phase_space_cost = false;
  std::int64_t pivots = 0;
};

// (|z - w|^2 + |A - B|_F^2)^{1/2}.
double xi_distance(const UnitVector& z, const SkewHermitian& a, const UnitVector& w,
                   const SkewHermitian& b);

// c_ij^p with c the chordal (or phase-space) distance between atom i of mu and atom j of nu.
RMatrix ground_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

// Minimum-cost perfect matching of a square cost matrix (Hungarian method with
// potentials, O(n^3)). Returns, for each row, its assigned column.
std::vector<Index> solve_assignment(const RMatrix& cost);

// W_p between two uniform measures. Equal atom counts are solved as an assignment
// problem; unequal counts are handed to wasserstein_general.
double wasserstein_uniform(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

inline constexpr Index kMaxReplicatedSupport = 1024;

// W_p between arbitrary atomic measures of at most kMaxTransportSupport atoms each,
// by the transportation simplex method on the exact linear program.
//
// Two uniform measures of different sizes n, m with lcm(n, m) <= kMaxReplicatedSupport
// are instead solved as an lcm x lcm assignment problem on replicated atoms (the
// transportation polytope with these marginals has integral vertices after scaling,
// so this is exact). Pass allow_replication = false to force the simplex.
TransportResult wasserstein_general(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p,
                                    bool allow_replication = true);

// Exhaustive minimum over all N! matchings of two uniform measures, N <= 8.
double wasserstein_bruteforce(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

}  // namespace lhs
