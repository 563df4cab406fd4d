#include "lhs/series.hpp"

#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "lhs/observables.hpp"

namespace lhs {

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) {
    throw std::invalid_argument("write_csv: header and column counts differ");
  }
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw std::invalid_argument("write_csv: ragged columns");
  }
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << '\n';
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c][r];
    os << '\n';
  }
  os.precision(old_precision);
}

void ObservableSeries::record(double t, const CMatrix& states, const CouplingParams& params,
                              Index exact_limit, double unit_tol) {
  const auto pairs = pair_functionals(states, exact_limit);
  const auto mu = EmpiricalMeasure::uniform(states, unit_tol);
  const CVector moment = j_vector(mu);
  times.push_back(t);
  F.push_back(pairs.F);
  G.push_back(pairs.G);
  R2.push_back(moment.squaredNorm());
  defect.push_back(aggregation_defect(mu));
  r2_rate.push_back(r_squared_rate(mu, params.kappa0, params.kappa1));
  J.push_back(moment);
  if (!pairs.exact) metadata["pair_scan_exact"] = false;
}

std::vector<std::string> ObservableSeries::csv_header() const {
  std::vector<std::string> header{"t", "F", "G", "R2", "defect", "dR2_dt"};
  const Index d = J.empty() ? 0 : J.front().size();
  for (Index a = 1; a <= d; ++a) {
    header.push_back("J_re_" + std::to_string(a));
    header.push_back("J_im_" + std::to_string(a));
  }
  return header;
}

void ObservableSeries::write_csv(std::ostream& os) const {
  std::vector<std::vector<double>> cols{times, F, G, R2, defect, r2_rate};
  const Index d = J.empty() ? 0 : J.front().size();
  for (Index a = 0; a < d; ++a) {
    std::vector<double> re;
    std::vector<double> im;
    re.reserve(J.size());
    im.reserve(J.size());
    for (const auto& v : J) {
      re.push_back(v[a].real());
      im.push_back(v[a].imag());
    }
    cols.push_back(std::move(re));
    cols.push_back(std::move(im));
  }
  lhs::write_csv(os, csv_header(), cols);
}

nlohmann::json ObservableSeries::to_json() const {
  nlohmann::json j;
  j["times"] = times;
  auto& s = j["series"];
  s["F"] = F;
  s["G"] = G;
  s["R2"] = R2;
  s["defect"] = defect;
  s["dR2_dt"] = r2_rate;
  nlohmann::json jv = nlohmann::json::array();
  for (const auto& v : J) {
    nlohmann::json row = nlohmann::json::array();
    for (Index a = 0; a < v.size(); ++a) row.push_back({v[a].real(), v[a].imag()});
    jv.push_back(std::move(row));
  }
  s["J"] = std::move(jv);
  j["metadata"] = metadata;
  return j;
}

}  // namespace lhs
