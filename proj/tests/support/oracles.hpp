#pragma once

// Reference implementations used only by the tests. None of them calls into
// the solver code they are compared against; they rely on the channel model
// (one line of arithmetic) and nothing else from the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "uavmc/perspective_program.hpp"
#include "uavmc/scenario.hpp"

namespace oracle {

inline double link_rate(double x, double y, double power, const uavmc::GroundUser& u,
                        const uavmc::Scenario& s) {
  const double d2 = (x - u.x) * (x - u.x) + (y - u.y) * (y - u.y) + s.altitude * s.altitude;
  return std::log2(1.0 + s.gamma0() * power / d2);
}

/// maximize c.x subject to A x <= b, x >= 0, with b >= 0 so the slack basis
/// is feasible. Plain dense tableau, Bland's rule throughout.
struct SimplexResult {
  bool optimal = false;
  double objective = 0.0;
  std::vector<double> x;
};

inline SimplexResult simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                                 const std::vector<double>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = 1.0;
    t[i][width - 1] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  const double eps = 1e-12;
  SimplexResult out;
  for (std::size_t iter = 0; iter < 100000; ++iter) {
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (t[m][j] < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == width) {
      out.optimal = true;
      break;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > eps) best = std::min(best, t[i][width - 1] / t[i][enter]);
    }
    // Ties go to the smallest basic index.
    std::size_t leave = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > eps && t[i][width - 1] / t[i][enter] <= best + 1e-15 &&
          (leave == m || basis[i] < basis[leave])) {
        leave = i;
      }
    }
    if (leave == m) return out; // unbounded
    const double piv = t[leave][enter];
    for (auto& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      const double f = t[i][enter];
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  out.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) out.x[basis[i]] = t[i][width - 1];
  }
  out.objective = t[m][width - 1];
  return out;
}

/// Best time-sharing over a fixed (position, power) lattice:
///   max eta  s.t.  sum_j t_j R_kj >= eta,  sum_j t_j <= 1,  sum_j t_j p_j <= P_ave.
/// The lattice always contains zero power, so the relaxed time row is tight
/// at an optimum and the value equals the equality-constrained one.
inline double lattice_capacity(const uavmc::Scenario& s, double x0, double x1, double y0, double y1,
                               std::size_t nodes, const std::vector<double>& powers) {
  const std::size_t K = s.users.size();
  std::vector<double> px, py, pp;
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = 0; j < nodes; ++j) {
      for (double p : powers) {
        px.push_back(x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(nodes - 1));
        py.push_back(y0 + (y1 - y0) * static_cast<double>(j) / static_cast<double>(nodes - 1));
        pp.push_back(p);
      }
    }
  }
  const std::size_t cols = px.size();
  // Variables: t_0 .. t_{cols-1}, eta.
  std::vector<std::vector<double>> A(K + 2, std::vector<double>(cols + 1, 0.0));
  std::vector<double> b(K + 2, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < cols; ++j) A[k][j] = -link_rate(px[j], py[j], pp[j], s.users[k], s);
    A[k][cols] = 1.0;
  }
  for (std::size_t j = 0; j < cols; ++j) {
    A[K][j] = 1.0;
    A[K + 1][j] = pp[j];
  }
  b[K] = 1.0;
  b[K + 1] = s.power_ave;
  std::vector<double> c(cols + 1, 0.0);
  c[cols] = 1.0;
  return simplex_max(A, b, c).objective;
}

/// Shortest open path by trying every permutation. Returns the length and the
/// lexicographically first order among those within a 1e-12 relative band.
struct PathResult {
  std::vector<std::size_t> order;
  double length = 0.0;
};

template <class Point>
double path_length(const std::vector<Point>& pts, const std::vector<std::size_t>& order) {
  double d = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    d += std::hypot(pts[order[i]].x - pts[order[i - 1]].x, pts[order[i]].y - pts[order[i - 1]].y);
  }
  return d;
}

template <class Point>
PathResult exhaustive_open_path(const std::vector<Point>& pts) {
  std::vector<std::size_t> perm(pts.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> all;
  std::vector<double> lengths;
  double best = std::numeric_limits<double>::infinity();
  do {
    const double d = path_length(pts, perm);
    all.push_back(perm);
    lengths.push_back(d);
    best = std::min(best, d);
  } while (std::next_permutation(perm.begin(), perm.end()));
  // next_permutation visits orders lexicographically, so the first hit wins.
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (lengths[i] <= best * (1.0 + 1e-12)) return {all[i], lengths[i]};
  }
  return {};
}

/// Perspective term tau log2(1 + alpha E / tau), closed at tau = 0.
inline double perspective(double tau, double energy, double alpha) {
  return tau > 0.0 ? tau * std::log2(1.0 + alpha * energy / tau) : 0.0;
}

/// KKT residual of a claimed solution of the normalized joint program,
/// rebuilt from the problem data and the reported multipliers:
///   primal feasibility, dual feasibility (sign of every Lagrangian partial),
///   complementary slackness as products, and sum(weights) = 1.
/// A hover with u = 0 is checked through the supremum over the ratio
/// r = v / u of  sum_k w_k log2(1 + a_k r) - mu r - nu,  which must be <= 0.
inline double joint_kkt_residual(const uavmc::PerspectiveProblem& pb, const std::vector<double>& u,
                                 const std::vector<double>& v, const std::vector<double>& q, double eta,
                                 const std::vector<double>& w, double mu, double nu) {
  const double ln2 = std::log(2.0);
  const std::size_t K = pb.users;
  const std::size_t H = pb.hovers();
  const std::size_t J = pb.slots();
  double res = 0.0;
  auto bump = [&](double x) { res = std::max(res, x); };

  std::vector<double> rate(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t h = 0; h < H; ++h) rate[k] += perspective(u[h], v[h], pb.hover_snr[k][h]);
    for (std::size_t j = 0; j < J; ++j) rate[k] += pb.slot_fraction * std::log2(1.0 + pb.slot_snr[k][j] * q[j]);
  }
  double energy = 0.0;
  double time = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    bump(std::max({-u[h], -v[h], 0.0}));
    energy += v[h];
    time += u[h];
  }
  for (std::size_t j = 0; j < J; ++j) {
    bump(std::max(-q[j], 0.0));
    energy += pb.slot_fraction * q[j];
  }
  bump(std::max(energy - 1.0, 0.0));
  bump(std::abs(time - pb.hover_fraction));
  double wsum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    bump(std::max(eta - rate[k], 0.0));
    bump(std::max(-w[k], 0.0));
    bump(std::abs(w[k] * (rate[k] - eta)));
    wsum += w[k];
  }
  bump(std::abs(1.0 - wsum));
  bump(std::max(-mu, 0.0));
  bump(std::abs(mu * (1.0 - energy)));

  for (std::size_t h = 0; h < H; ++h) {
    if (u[h] > 0.0) {
      const double r = v[h] / u[h];
      double gu = -nu;
      double gv = -mu;
      for (std::size_t k = 0; k < K; ++k) {
        const double a = pb.hover_snr[k][h];
        gu += w[k] * (std::log2(1.0 + a * r) - a * r / ((1.0 + a * r) * ln2));
        gv += w[k] * a / ((1.0 + a * r) * ln2);
      }
      bump(std::max(gu, 0.0));
      bump(std::max(gv, 0.0));
      bump(std::abs(u[h] * gu));
      bump(std::abs(v[h] * gv));
    } else {
      auto f = [&](double r) {
        double acc = -mu * r - nu;
        for (std::size_t k = 0; k < K; ++k) acc += w[k] * std::log2(1.0 + pb.hover_snr[k][h] * r);
        return acc;
      };
      if (!(mu > 0.0)) {
        bump(std::numeric_limits<double>::infinity());
        continue;
      }
      // Concave in r; the slope is negative past wsum / (mu ln 2).
      double lo = 0.0;
      double hi = std::max(wsum, 0.0) / (mu * ln2) + 1.0;
      for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (f(m1) < f(m2)) {
          lo = m1;
        } else {
          hi = m2;
        }
      }
      bump(std::max({f(0.0), f(0.5 * (lo + hi)), 0.0}));
    }
  }
  for (std::size_t j = 0; j < J; ++j) {
    double g = -mu;
    for (std::size_t k = 0; k < K; ++k) g += w[k] * pb.slot_snr[k][j] / ((1.0 + pb.slot_snr[k][j] * q[j]) * ln2);
    g *= pb.slot_fraction;
    bump(std::max(g, 0.0));
    bump(std::abs(q[j] * g));
  }
  return res;
}

} // namespace oracle
