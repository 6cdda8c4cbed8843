#include "uavmc/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavmc::lp {

namespace {

struct Tableau {
  std::size_t m = 0;       // rows
  std::size_t width = 0;   // columns excluding rhs
  std::vector<double> a;   // m x (width + 1), rhs last
  std::vector<std::size_t> basis;

  double& at(std::size_t i, std::size_t j) { return a[i * (width + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * (width + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, width); }

  void pivot(std::size_t r, std::size_t c, std::vector<double>& cost, double& cost_rhs) {
    const double inv = 1.0 / at(r, c);
    for (std::size_t j = 0; j <= width; ++j) at(r, j) *= inv;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= width; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    const double f = cost[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j < width; ++j) cost[j] -= f * at(r, j);
      cost_rhs -= f * at(r, width);
      cost[c] = 0.0;
    }
    basis[r] = c;
  }
};

// Maximizes with reduced costs `cost` (cost[j] > 0 means entering improves).
// Columns with allowed[j] == false never enter.
Status run_simplex(Tableau& t, std::vector<double>& cost, double& cost_rhs,
                   const std::vector<bool>& allowed, double tol, std::size_t& pivots) {
  const std::size_t max_pivots = 50 * (t.m + t.width) + 1000;
  std::size_t degenerate_run = 0;
  while (pivots < max_pivots) {
    const bool bland = degenerate_run > t.m + 10;
    std::size_t enter = t.width;
    double best = tol;
    for (std::size_t j = 0; j < t.width; ++j) {
      if (!allowed[j] || cost[j] <= tol) continue;
      if (bland) {
        enter = j;
        break;
      }
      if (cost[j] > best) {
        best = cost[j];
        enter = j;
      }
    }
    if (enter == t.width) return Status::Optimal;

    std::size_t leave = t.m;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.m; ++i) {
      const double coef = t.at(i, enter);
      if (coef <= tol) continue;
      const double r = std::max(0.0, t.rhs(i)) / coef;
      if (r < ratio - 1e-14 ||
          (std::abs(r - ratio) <= 1e-14 && leave < t.m && t.basis[i] < t.basis[leave])) {
        ratio = r;
        leave = i;
      }
    }
    if (leave == t.m) return Status::Unbounded;
    degenerate_run = ratio <= tol ? degenerate_run + 1 : 0;
    t.pivot(leave, enter, cost, cost_rhs);
    ++pivots;
  }
  return Status::IterationLimit;
}

} // namespace

Solution solve(const Problem& problem, double tol) {
  const std::size_t n = problem.objective.size();
  const std::size_t m = problem.rows.size();
  for (const auto& row : problem.rows) {
    if (row.coeffs.size() != n) throw std::invalid_argument("lp row width mismatch");
  }

  // Normalize to rhs >= 0.
  std::vector<Row> rows = problem.rows;
  std::vector<double> row_sign(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].rhs < 0.0) {
      row_sign[i] = -1.0;
      for (auto& c : rows[i].coeffs) c = -c;
      rows[i].rhs = -rows[i].rhs;
      if (rows[i].sense == Sense::LessEqual) {
        rows[i].sense = Sense::GreaterEqual;
      } else if (rows[i].sense == Sense::GreaterEqual) {
        rows[i].sense = Sense::LessEqual;
      }
    }
  }

  // Column layout: [structural | slack/surplus | artificial].
  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (const auto& row : rows) {
    if (row.sense != Sense::Equal) ++n_slack;
    if (row.sense != Sense::LessEqual) ++n_art;
  }
  Tableau t;
  t.m = m;
  t.width = n + n_slack + n_art;
  t.a.assign(m * (t.width + 1), 0.0);
  t.basis.assign(m, 0);
  std::size_t slack_col = n;
  std::size_t art_col = n + n_slack;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = rows[i].coeffs[j];
    t.rhs(i) = rows[i].rhs;
    switch (rows[i].sense) {
      case Sense::LessEqual:
        t.at(i, slack_col) = 1.0;
        t.basis[i] = slack_col;
        ++slack_col;
        break;
      case Sense::GreaterEqual:
        t.at(i, slack_col++) = -1.0;
        t.at(i, art_col) = 1.0;
        t.basis[i] = art_col;
        ++art_col;
        break;
      case Sense::Equal:
        t.at(i, art_col) = 1.0;
        t.basis[i] = art_col;
        ++art_col;
        break;
    }
  }

  Solution sol;
  std::vector<bool> allowed(t.width, true);

  // Phase 1: maximize -(sum of artificials).
  if (n_art > 0) {
    std::vector<double> cost(t.width, 0.0);
    double cost_rhs = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis[i] < n + n_slack) continue;
      for (std::size_t j = 0; j < t.width; ++j) cost[j] += t.at(i, j);
      cost_rhs += t.rhs(i);
    }
    for (std::size_t j = n + n_slack; j < t.width; ++j) cost[j] = 0.0;
    const auto status = run_simplex(t, cost, cost_rhs, allowed, tol, sol.pivots);
    if (status == Status::IterationLimit) {
      sol.status = status;
      return sol;
    }
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis[i] >= n + n_slack) infeasibility += std::max(0.0, t.rhs(i));
    }
    double scale = 1.0;
    for (const auto& row : rows) scale = std::max(scale, std::abs(row.rhs));
    if (infeasibility > 1e-9 * scale) {
      sol.status = Status::Infeasible;
      return sol;
    }
    // Drive remaining (zero-level) artificials out of the basis.
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis[i] < n + n_slack) continue;
      std::size_t enter = t.width;
      double best = tol;
      for (std::size_t j = 0; j < n + n_slack; ++j) {
        if (std::abs(t.at(i, j)) > best) {
          best = std::abs(t.at(i, j));
          enter = j;
        }
      }
      if (enter < t.width) t.pivot(i, enter, cost, cost_rhs);
    }
    for (std::size_t j = n + n_slack; j < t.width; ++j) allowed[j] = false;
  }

  // Phase 2.
  std::vector<double> cost(t.width, 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = problem.objective[j];
  double cost_rhs = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double cb = cost[t.basis[i]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < t.width; ++j) cost[j] -= cb * t.at(i, j);
    cost_rhs -= cb * t.rhs(i);
    cost[t.basis[i]] = 0.0;
  }
  const auto status = run_simplex(t, cost, cost_rhs, allowed, tol, sol.pivots);
  if (status != Status::Optimal) {
    sol.status = status;
    return sol;
  }

  // Re-solve the final basis for accurate primal values and duals.
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                               static_cast<Eigen::Index>(t.width));
  {
    std::size_t sc = n;
    std::size_t ac = n + n_slack;
    for (std::size_t i = 0; i < m; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      for (std::size_t j = 0; j < n; ++j) full(ii, static_cast<Eigen::Index>(j)) = rows[i].coeffs[j];
      switch (rows[i].sense) {
        case Sense::LessEqual: full(ii, static_cast<Eigen::Index>(sc++)) = 1.0; break;
        case Sense::GreaterEqual:
          full(ii, static_cast<Eigen::Index>(sc++)) = -1.0;
          full(ii, static_cast<Eigen::Index>(ac++)) = 1.0;
          break;
        case Sense::Equal: full(ii, static_cast<Eigen::Index>(ac++)) = 1.0; break;
      }
    }
  }
  Eigen::MatrixXd basis_matrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::VectorXd b(static_cast<Eigen::Index>(m));
  Eigen::VectorXd cb(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    basis_matrix.col(static_cast<Eigen::Index>(i)) = full.col(static_cast<Eigen::Index>(t.basis[i]));
    b(static_cast<Eigen::Index>(i)) = rows[i].rhs;
    cb(static_cast<Eigen::Index>(i)) = t.basis[i] < n ? problem.objective[t.basis[i]] : 0.0;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_matrix);
  Eigen::VectorXd xb = lu.solve(b);
  Eigen::VectorXd y = lu.transpose().solve(cb);
  if (!xb.allFinite() || !y.allFinite()) {
    // Singular basis after numerical trouble: fall back to the tableau values.
    xb.resize(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) xb(static_cast<Eigen::Index>(i)) = t.rhs(i);
    y.setZero();
  }

  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis[i] < n) sol.x[t.basis[i]] = std::max(0.0, xb(static_cast<Eigen::Index>(i)));
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += problem.objective[j] * sol.x[j];

  sol.duals.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) sol.duals[i] = row_sign[i] * y(static_cast<Eigen::Index>(i));

  // Residuals against the caller's original rows.
  double primal = 0.0;
  for (std::size_t j = 0; j < n; ++j) primal = std::max(primal, -sol.x[j]);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = problem.rows[i];
    double lhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) lhs += row.coeffs[j] * sol.x[j];
    const double diff = lhs - row.rhs;
    switch (row.sense) {
      case Sense::LessEqual: primal = std::max(primal, diff); break;
      case Sense::GreaterEqual: primal = std::max(primal, -diff); break;
      case Sense::Equal: primal = std::max(primal, std::abs(diff)); break;
    }
  }
  double dual = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double reduced = problem.objective[j];
    for (std::size_t i = 0; i < m; ++i) reduced -= sol.duals[i] * problem.rows[i].coeffs[j];
    dual = std::max(dual, reduced);
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto sense = problem.rows[i].sense;
    if (sense == Sense::LessEqual) dual = std::max(dual, -sol.duals[i]);
    if (sense == Sense::GreaterEqual) dual = std::max(dual, sol.duals[i]);
  }
  sol.primal_residual = primal;
  sol.dual_residual = dual;
  sol.status = Status::Optimal;
  return sol;
}

} // namespace uavmc::lp
