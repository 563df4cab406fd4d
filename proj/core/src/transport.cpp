#include "lhs/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lhs/errors.hpp"

namespace lhs {

namespace {

void require_order(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("Wasserstein order p must be in [1, inf)");
}

void require_same_dim(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("transport: measures live in different dimensions");
}

// Sum of cost(i, assignment[i]) over rows in index order.
double assignment_cost(const RMatrix& cost, const std::vector<Index>& assignment) {
  double s = 0.0;
  for (Index i = 0; i < cost.rows(); ++i) s += cost(i, assignment[static_cast<std::size_t>(i)]);
  return s;
}

// Transportation simplex on a spanning-tree basis of n + m - 1 cells.
class TransportationSimplex {
 public:
  TransportationSimplex(const RMatrix& cost, const RVector& supply, const RVector& demand)
      : c_(cost), n_(cost.rows()), m_(cost.cols()), adj_(static_cast<std::size_t>(n_ + m_)) {
    northwest_corner(supply, demand);
  }

  std::int64_t solve() {
    const double scale = std::max(1.0, c_.cwiseAbs().maxCoeff());
    const double eps = 1e-13 * scale;
    const std::int64_t max_pivots = 200 * (n_ + m_) * std::max<Index>(1, std::min(n_, m_));
    std::int64_t pivots = 0;
    RVector u(n_);
    RVector v(m_);
    while (true) {
      potentials(u, v);
      Index ei = -1;
      Index ej = -1;
      double best = -eps;
      for (Index j = 0; j < m_; ++j) {
        for (Index i = 0; i < n_; ++i) {
          const double r = c_(i, j) - u[i] - v[j];
          if (r < best) {
            best = r;
            ei = i;
            ej = j;
          }
        }
      }
      if (ei < 0) return pivots;
      pivot(ei, ej);
      if (++pivots > max_pivots) {
        throw std::runtime_error("transportation simplex: pivot limit exceeded (cycling?)");
      }
    }
  }

  TransportPlan plan() const {
    TransportPlan out;
    out.rows = n_;
    out.cols = m_;
    for (const auto& cell : cells_) {
      if (cell.mass > 0.0) out.entries.push_back({cell.row, cell.col, cell.mass});
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const PlanEntry& a, const PlanEntry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    return out;
  }

 private:
  struct Cell {
    Index row;
    Index col;
    double mass;
  };

  std::size_t col_node(Index j) const { return static_cast<std::size_t>(n_ + j); }

  void add_cell(Index i, Index j, double mass) {
    cells_.push_back({i, j, mass});
    const std::size_t id = cells_.size() - 1;
    adj_[static_cast<std::size_t>(i)].push_back(id);
    adj_[col_node(j)].push_back(id);
  }

  void northwest_corner(const RVector& supply, const RVector& demand) {
    Index i = 0;
    Index j = 0;
    double ra = supply[0];
    double rb = demand[0];
    while (true) {
      if (i == n_ - 1 && j == m_ - 1) {
        add_cell(i, j, std::max(0.0, std::min(ra, rb)));
        break;
      }
      if (i == n_ - 1) {
        add_cell(i, j, rb);
        ra = std::max(0.0, ra - rb);
        rb = demand[++j];
      } else if (j == m_ - 1 || ra <= rb) {
        add_cell(i, j, ra);
        rb = std::max(0.0, rb - ra);
        ra = supply[++i];
      } else {
        add_cell(i, j, rb);
        ra = std::max(0.0, ra - rb);
        rb = demand[++j];
      }
    }
  }

  // u_i + v_j = c_ij on every basic cell, u_0 = 0.
  void potentials(RVector& u, RVector& v) {
    const std::size_t nodes = adj_.size();
    std::vector<char> seen(nodes, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    u[0] = 0.0;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t id : adj_[node]) {
        const Cell& cell = cells_[id];
        const std::size_t r = static_cast<std::size_t>(cell.row);
        const std::size_t c = col_node(cell.col);
        if (!seen[c]) {
          v[cell.col] = c_(cell.row, cell.col) - u[cell.row];
          seen[c] = 1;
          stack.push_back(c);
        }
        if (!seen[r]) {
          u[cell.row] = c_(cell.row, cell.col) - v[cell.col];
          seen[r] = 1;
          stack.push_back(r);
        }
      }
    }
  }

  void pivot(Index ei, Index ej) {
    // Tree path from column node ej to row node ei.
    const std::size_t nodes = adj_.size();
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> via(nodes, none);  // cell used to reach node
    std::vector<char> seen(nodes, 0);
    std::vector<std::size_t> queue{col_node(ej)};
    seen[col_node(ej)] = 1;
    const std::size_t target = static_cast<std::size_t>(ei);
    for (std::size_t head = 0; head < queue.size() && !seen[target]; ++head) {
      const std::size_t node = queue[head];
      for (std::size_t id : adj_[node]) {
        const Cell& cell = cells_[id];
        const std::size_t other =
            node == static_cast<std::size_t>(cell.row) ? col_node(cell.col) : static_cast<std::size_t>(cell.row);
        if (!seen[other]) {
          seen[other] = 1;
          via[other] = id;
          queue.push_back(other);
        }
      }
    }
    // Walk back from the row node; path cells alternate -, +, -, ... starting at ei.
    std::vector<std::size_t> path;
    for (std::size_t node = target; node != col_node(ej);) {
      const std::size_t id = via[node];
      path.push_back(id);
      const Cell& cell = cells_[id];
      node = node == static_cast<std::size_t>(cell.row) ? col_node(cell.col) : static_cast<std::size_t>(cell.row);
    }
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = none;
    for (std::size_t k = 0; k < path.size(); k += 2) {
      if (cells_[path[k]].mass < theta) {
        theta = cells_[path[k]].mass;
        leaving = path[k];
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      Cell& cell = cells_[path[k]];
      cell.mass = (k % 2 == 0) ? std::max(0.0, cell.mass - theta) : cell.mass + theta;
    }
    // Replace the leaving cell by the entering one in place.
    Cell& out = cells_[leaving];
    auto detach = [&](std::size_t node) {
      auto& list = adj_[node];
      list.erase(std::find(list.begin(), list.end(), leaving));
    };
    detach(static_cast<std::size_t>(out.row));
    detach(col_node(out.col));
    out = Cell{ei, ej, theta};
    adj_[static_cast<std::size_t>(ei)].push_back(leaving);
    adj_[col_node(ej)].push_back(leaving);
  }

  const RMatrix& c_;
  Index n_;
  Index m_;
  std::vector<Cell> cells_;
  std::vector<std::vector<std::size_t>> adj_;
};

TransportResult replicated_assignment(const RMatrix& cost, double p, bool phase_space);

}  // namespace

RMatrix TransportPlan::dense() const {
  RMatrix g = RMatrix::Zero(rows, cols);
  for (const auto& e : entries) g(e.row, e.col) += e.mass;
  return g;
}

RVector TransportPlan::row_sums() const { return dense().rowwise().sum(); }

RVector TransportPlan::col_sums() const { return dense().colwise().sum().transpose(); }

nlohmann::json TransportPlan::to_json() const {
  nlohmann::json j;
  j["rows"] = rows;
  j["cols"] = cols;
  std::vector<Index> r;
  std::vector<Index> c;
  std::vector<double> w;
  for (const auto& e : entries) {
    r.push_back(e.row);
    c.push_back(e.col);
    w.push_back(e.mass);
  }
  j["row"] = r;
  j["col"] = c;
  j["mass"] = w;
  return j;
}

double xi_distance(const UnitVector& z, const SkewHermitian& a, const UnitVector& w,
                   const SkewHermitian& b) {
  if (z.dim() != w.dim() || a.dim() != b.dim() || a.dim() != z.dim()) {
    throw std::invalid_argument("xi_distance: dimension mismatch");
  }
  return std::sqrt((z.vec() - w.vec()).squaredNorm() + (a.mat() - b.mat()).squaredNorm());
}

RMatrix ground_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
  require_order(p);
  require_same_dim(mu, nu);
  const bool phase_space = mu.has_frequencies() && nu.has_frequencies();
  RMatrix c(mu.size(), nu.size());
  for (Index i = 0; i < mu.size(); ++i) {
    for (Index j = 0; j < nu.size(); ++j) {
      double sq = (mu.atoms().col(i) - nu.atoms().col(j)).squaredNorm();
      if (phase_space) {
        sq += (mu.frequencies()[static_cast<std::size_t>(i)].mat() -
               nu.frequencies()[static_cast<std::size_t>(j)].mat())
                  .squaredNorm();
      }
      const double dist = std::sqrt(sq);
      c(i, j) = p == 1.0 ? dist : (p == 2.0 ? sq : std::pow(dist, p));
    }
  }
  return c;
}

std::vector<Index> solve_assignment(const RMatrix& cost) {
  if (cost.rows() != cost.cols()) throw std::invalid_argument("solve_assignment: cost matrix must be square");
  const Index n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a sentinel.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Index> match(static_cast<std::size_t>(n + 1), 0);  // match[col] = row
  std::vector<Index> way(static_cast<std::size_t>(n + 1), 0);
  std::vector<double> minv(static_cast<std::size_t>(n + 1));
  std::vector<char> used(static_cast<std::size_t>(n + 1));

  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[sj];
        if (cur < minv[sj]) {
          minv[sj] = cur;
          way[sj] = j0;
        }
        if (minv[sj] < delta) {
          delta = minv[sj];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) {
          u[static_cast<std::size_t>(match[sj])] += delta;
          v[sj] -= delta;
        } else {
          minv[sj] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> assignment(static_cast<std::size_t>(n));
  for (Index j = 1; j <= n; ++j) assignment[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return assignment;
}

double wasserstein_uniform(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
  require_order(p);
  require_same_dim(mu, nu);
  if (!mu.is_uniform() || !nu.is_uniform()) {
    throw std::invalid_argument("wasserstein_uniform: both measures must be uniform");
  }
  if (mu.size() != nu.size()) return wasserstein_general(mu, nu, p).distance;
  const RMatrix cost = ground_cost(mu, nu, p);
  const auto assignment = solve_assignment(cost);
  const double total = assignment_cost(cost, assignment) / static_cast<double>(mu.size());
  return std::pow(std::max(0.0, total), 1.0 / p);
}

TransportResult wasserstein_general(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p,
                                    bool allow_replication) {
  require_order(p);
  require_same_dim(mu, nu);
  if (mu.size() > kMaxTransportSupport || nu.size() > kMaxTransportSupport) {
    throw CapabilityError("wasserstein_general: supports of " + std::to_string(mu.size()) + " and " +
                          std::to_string(nu.size()) + " atoms exceed the limit of " +
                          std::to_string(kMaxTransportSupport));
  }
  const RMatrix cost = ground_cost(mu, nu, p);
  const Index n = mu.size();
  const Index m = nu.size();
  if (allow_replication && n != m && mu.is_uniform() && nu.is_uniform() &&
      std::lcm(n, m) <= kMaxReplicatedSupport) {
    return replicated_assignment(cost, p, mu.has_frequencies() && nu.has_frequencies());
  }
  TransportationSimplex simplex(cost, mu.weights(), nu.weights());
  TransportResult result;
  result.pivots = simplex.solve();
  result.plan = simplex.plan();
  double total = 0.0;
  for (const auto& e : result.plan.entries) total += e.mass * cost(e.row, e.col);
  result.cost = total;
  result.distance = std::pow(std::max(0.0, total), 1.0 / p);
  result.phase_space_cost = mu.has_frequencies() && nu.has_frequencies();
  return result;
}

namespace {

TransportResult replicated_assignment(const RMatrix& cost, double p, bool phase_space) {
  const Index n = cost.rows();
  const Index m = cost.cols();
  const Index l = std::lcm(n, m);
  const Index rn = l / n;
  const Index rm = l / m;
  RMatrix big(l, l);
  for (Index i = 0; i < l; ++i) {
    for (Index j = 0; j < l; ++j) big(i, j) = cost(i / rn, j / rm);
  }
  const auto assignment = solve_assignment(big);
  RMatrix gamma = RMatrix::Zero(n, m);
  for (Index i = 0; i < l; ++i) gamma(i / rn, assignment[static_cast<std::size_t>(i)] / rm) += 1.0;
  TransportResult result;
  result.plan.rows = n;
  result.plan.cols = m;
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      if (gamma(i, j) == 0.0) continue;
      const double mass = gamma(i, j) / static_cast<double>(l);
      result.plan.entries.push_back({i, j, mass});
      total += mass * cost(i, j);
    }
  }
  result.cost = total;
  result.distance = std::pow(std::max(0.0, total), 1.0 / p);
  result.phase_space_cost = phase_space;
  return result;
}

}  // namespace

double wasserstein_bruteforce(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
  require_order(p);
  require_same_dim(mu, nu);
  if (mu.size() != nu.size() || !mu.is_uniform() || !nu.is_uniform()) {
    throw std::invalid_argument("wasserstein_bruteforce: needs two uniform measures of equal size");
  }
  if (mu.size() > kMaxBruteForceSupport) {
    throw CapabilityError("wasserstein_bruteforce: at most " + std::to_string(kMaxBruteForceSupport) +
                          " atoms");
  }
  const RMatrix cost = ground_cost(mu, nu, p);
  std::vector<Index> perm(static_cast<std::size_t>(mu.size()));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    best = std::min(best, assignment_cost(cost, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::pow(std::max(0.0, best / static_cast<double>(mu.size())), 1.0 / p);
}

}  // namespace lhs
