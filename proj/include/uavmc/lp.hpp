#pragma once

#include <cstddef>
#include <vector>

namespace uavmc::lp {

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Row {
  std::vector<double> coeffs; // one per variable
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

/// maximize objective . x  subject to rows, x >= 0.
struct Problem {
  std::vector<double> objective;
  std::vector<Row> rows;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> x;
  std::vector<double> duals; // one per row, sign convention of a maximization
  double objective = 0.0;
  double primal_residual = 0.0; // worst row violation
  double dual_residual = 0.0;   // worst positive reduced cost / wrong-sign dual
  std::size_t pivots = 0;
};

/// Dense two-phase primal simplex. Pivoting is deterministic (largest reduced
/// cost, lowest index on ties, Bland's rule after a run of degenerate pivots),
/// and the final basis is re-solved directly to tighten the residuals.
Solution solve(const Problem& problem, double tolerance = 1e-11);

} // namespace uavmc::lp
