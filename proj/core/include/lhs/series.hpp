#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lhs/dynamics.hpp"
#include "lhs/geometry.hpp"

namespace lhs {

// Writes a comma-separated table with a header row; every value is printed with
// 17 significant digits. All columns must have equal length.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

// Time-indexed record of the standard diagnostics.
//
// CSV column order: t, F, G, R2, defect, dR2_dt, then Re/Im of each J component
// (J_re_1, J_im_1, ..., J_re_d, J_im_d).
class ObservableSeries {
 public:
  // Evaluates and appends F, G, R^2, J, the aggregation defect and the analytic
  // dR^2/dt at time t. Pair scans above exact_limit particles are subsampled and
  // flagged in metadata["pair_scan_exact"]. States must be unit to unit_tol.
  void record(double t, const CMatrix& states, const CouplingParams& params,
              Index exact_limit = 4096, double unit_tol = 1e-10);

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }

  std::vector<std::string> csv_header() const;
  void write_csv(std::ostream& os) const;
  // {"times": [...], "series": {"F": [...], ...}, "metadata": {...}}
  nlohmann::json to_json() const;

  std::vector<double> times;
  std::vector<double> F;
  std::vector<double> G;
  std::vector<double> R2;
  std::vector<double> defect;
  std::vector<double> r2_rate;
  std::vector<CVector> J;
  nlohmann::json metadata = nlohmann::json::object();
};

}  // namespace lhs
