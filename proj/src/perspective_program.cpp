#include "uavmc/perspective_program.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uavmc/channel.hpp"

namespace uavmc {

namespace {

double lg(double z) { return std::log1p(z) / kLn2; }
double dlg(double z) { return 1.0 / ((1.0 + z) * kLn2); }
double d2lg(double z) { return -1.0 / ((1.0 + z) * (1.0 + z) * kLn2); }

// Primal point y = [u | v | q] plus eta and the rate slacks s, which enter
// through rate_k - eta - s_k = 0 so that a step may cut into the concave rate
// rows. Multipliers: lam for the rate rows, mu for the energy row, z for
// y >= 0 and nu for the hover-duration equality.
struct Iterate {
  std::vector<double> u, v, q;
  double eta = 0.0;
  std::vector<double> s;
  std::vector<double> lam;
  double mu = 0.0;
  std::vector<double> z;
  double nu = 0.0;
};

// Residuals of the KKT system at one iterate.
struct Residual {
  std::vector<double> rate;
  std::vector<double> gap;         // rate - eta - s, per user
  double se = 0.0;                 // energy slack
  Eigen::MatrixXd G;               // rate gradients, ny x K
  Eigen::VectorXd fy;              // stationarity in y
  double feta = 0.0;               // stationarity in eta
  double mean_comp = 0.0;
  double max_comp = 0.0;
  double min_comp = 0.0;
  double stationarity = 0.0;
  double infeasibility = 0.0;
  double kkt() const { return std::max({stationarity, max_comp, infeasibility}); }
};

class InteriorPointSolver {
 public:
  InteriorPointSolver(const PerspectiveProblem& pb, const InteriorPointConfig& cfg)
      : pb_(pb), cfg_(cfg), K_(pb.users), H_(pb.hover_fraction > 0.0 ? pb.hovers() : 0),
        N_(pb.slots()), delta_(pb.slot_fraction), h_(pb.hover_fraction) {}

  PerspectiveSolution run() {
    Iterate x = initial_point();
    Residual res = residual(x);
    PerspectiveSolution out;
    while (out.iterations < cfg_.max_iterations && res.kkt() > cfg_.tolerance) {
      ++out.iterations;
      if (!step(x, res)) break;
    }
    finish(x, res, out);
    return out;
  }

 private:
  const PerspectiveProblem& pb_;
  const InteriorPointConfig& cfg_;
  std::size_t K_, H_, N_;
  double delta_, h_;

  std::size_t ny() const { return 2 * H_ + N_; }
  static Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

  double y_at(const Iterate& x, std::size_t i) const {
    if (i < H_) return x.u[i];
    if (i < 2 * H_) return x.v[i - H_];
    return x.q[i - 2 * H_];
  }

  // d(energy slack)/dy
  double e_at(std::size_t i) const {
    if (i < H_) return 0.0;
    return i < 2 * H_ ? -1.0 : -delta_;
  }

  std::vector<double> rates(const Iterate& x) const {
    std::vector<double> r(K_, 0.0);
    for (std::size_t k = 0; k < K_; ++k) {
      double acc = 0.0;
      for (std::size_t h = 0; h < H_; ++h) {
        if (x.u[h] > 0.0) acc += x.u[h] * lg(pb_.hover_snr[k][h] * x.v[h] / x.u[h]);
      }
      double fly = 0.0;
      for (std::size_t j = 0; j < N_; ++j) fly += lg(pb_.slot_snr[k][j] * x.q[j]);
      r[k] = acc + delta_ * fly;
    }
    return r;
  }

  double energy_slack(const Iterate& x) const {
    double e = 1.0;
    for (double v : x.v) e -= v;
    double fly = 0.0;
    for (double q : x.q) fly += q;
    return e - delta_ * fly;
  }

  void rate_gradients(const Iterate& x, Eigen::MatrixXd& G) const {
    G.setZero(ix(ny()), ix(K_));
    for (std::size_t k = 0; k < K_; ++k) {
      for (std::size_t h = 0; h < H_; ++h) {
        const double a = pb_.hover_snr[k][h];
        const double zz = a * x.v[h] / x.u[h];
        G(ix(h), ix(k)) = lg(zz) - zz * dlg(zz);
        G(ix(H_ + h), ix(k)) = a * dlg(zz);
      }
      for (std::size_t j = 0; j < N_; ++j) {
        const double b = pb_.slot_snr[k][j];
        G(ix(2 * H_ + j), ix(k)) = delta_ * b * dlg(b * x.q[j]);
      }
    }
  }

  // Strictly feasible start, with multipliers on the central path of the
  // slacks so that every complementarity product is equal.
  Iterate initial_point() const {
    Iterate x;
    x.u.assign(H_, H_ > 0 ? h_ / static_cast<double>(H_) : 0.0);
    x.v.resize(H_);
    for (std::size_t h = 0; h < H_; ++h) x.v[h] = 0.5 * x.u[h];
    x.q.assign(N_, 0.5);
    const auto r = rates(x);
    x.eta = *std::min_element(r.begin(), r.end()) - 1.0;
    double inv = 0.0;
    for (double rk : r) inv += 1.0 / (rk - x.eta);
    const double m0 = 1.0 / inv;
    x.s.resize(K_);
    x.lam.resize(K_);
    for (std::size_t k = 0; k < K_; ++k) {
      x.s[k] = r[k] - x.eta;
      x.lam[k] = m0 / x.s[k];
    }
    x.mu = m0 / energy_slack(x);
    x.z.resize(ny());
    for (std::size_t i = 0; i < ny(); ++i) x.z[i] = m0 / y_at(x, i);
    // Least-squares duration price for the u rows.
    if (H_ > 0) {
      Eigen::MatrixXd G;
      rate_gradients(x, G);
      double acc = 0.0;
      for (std::size_t h = 0; h < H_; ++h) {
        for (std::size_t k = 0; k < K_; ++k) acc += x.lam[k] * G(ix(h), ix(k));
        acc += x.z[h];
      }
      x.nu = acc / static_cast<double>(H_);
    }
    return x;
  }

  Residual residual(const Iterate& x) const {
    Residual res;
    res.rate = rates(x);
    res.gap.resize(K_);
    for (std::size_t k = 0; k < K_; ++k) res.gap[k] = res.rate[k] - x.eta - x.s[k];
    res.se = energy_slack(x);
    rate_gradients(x, res.G);

    const std::size_t n = ny();
    res.fy = Eigen::VectorXd::Zero(ix(n));
    for (std::size_t i = 0; i < n; ++i) {
      double f = -e_at(i) * x.mu - x.z[i];
      if (i < H_) f += x.nu;
      for (std::size_t k = 0; k < K_; ++k) f -= x.lam[k] * res.G(ix(i), ix(k));
      res.fy(ix(i)) = f;
    }
    double lsum = 0.0;
    for (double l : x.lam) lsum += l;
    res.feta = lsum - 1.0;
    res.stationarity = std::max(std::abs(res.feta), n > 0 ? res.fy.lpNorm<Eigen::Infinity>() : 0.0);

    double total = x.mu * res.se;
    res.max_comp = total;
    res.min_comp = total;
    auto note = [&](double c) {
      total += c;
      res.max_comp = std::max(res.max_comp, c);
      res.min_comp = std::min(res.min_comp, c);
    };
    for (std::size_t k = 0; k < K_; ++k) note(x.lam[k] * x.s[k]);
    for (std::size_t i = 0; i < n; ++i) note(x.z[i] * y_at(x, i));
    res.mean_comp = total / static_cast<double>(K_ + 1 + n);

    double infeas = std::max(0.0, -res.se);
    if (H_ > 0) {
      double usum = 0.0;
      for (double u : x.u) usum += u;
      infeas = std::max(infeas, std::abs(usum - h_));
    }
    for (double g : res.gap) infeas = std::max(infeas, std::abs(g));
    res.infeasibility = infeas;
    return res;
  }

  // One damped Newton step on the perturbed KKT system. Returns false when
  // no step makes progress.
  bool step(Iterate& x, Residual& res) {
    const std::size_t n = ny();
    const auto nn = ix(n);
    const auto kc = ix(K_ + 1);
    const double target = cfg_.centering * res.mean_comp;
    const auto& G = res.G;
    const auto& s = x.s;

    // Block-diagonal part: Hessian of -sum lam_k rate_k plus z / y.
    // Each hover block is c [r^2, -r; -r, 1] + diag(zu/u, zv/v); its
    // determinant is written out so that the c^2 terms never cancel.
    std::vector<double> d11(H_), d12(H_), d22(H_), det(H_), dq(N_);
    for (std::size_t h = 0; h < H_; ++h) {
      const double r = x.v[h] / x.u[h];
      double c = 0.0;
      for (std::size_t k = 0; k < K_; ++k) {
        const double a = pb_.hover_snr[k][h];
        c += -d2lg(a * r) * a * a * x.lam[k] / x.u[h];
      }
      const double du = x.z[h] / x.u[h];
      const double dv = x.z[H_ + h] / x.v[h];
      d11[h] = c * r * r + du;
      d12[h] = -c * r;
      d22[h] = c + dv;
      det[h] = c * r * r * dv + c * du + du * dv;
    }
    for (std::size_t j = 0; j < N_; ++j) {
      double c = 0.0;
      for (std::size_t k = 0; k < K_; ++k) {
        const double b = pb_.slot_snr[k][j];
        c += -d2lg(b * x.q[j]) * delta_ * b * b * x.lam[k];
      }
      dq[j] = c + x.z[2 * H_ + j] / x.q[j];
    }
    auto apply_dinv = [&](const Eigen::VectorXd& in) {
      Eigen::VectorXd out(nn);
      for (std::size_t h = 0; h < H_; ++h) {
        const auto i1 = ix(h);
        const auto i2 = ix(H_ + h);
        out(i1) = (d22[h] * in(i1) - d12[h] * in(i2)) / det[h];
        out(i2) = (-d12[h] * in(i1) + d11[h] * in(i2)) / det[h];
      }
      for (std::size_t j = 0; j < N_; ++j) out(ix(2 * H_ + j)) = in(ix(2 * H_ + j)) / dq[j];
      return out;
    };

    // Eliminating dz, ds, dlam and dmu leaves
    //   D dy + U w + a dnu = b,   U^T dy - 1_r deta - Omega^-1 w = -gap,
    //   1_r^T w = sum target / s_k - 1,   a^T dy = h - sum u,
    // with U = [G | e], Omega = diag(lam / s, mu / se), gap zero on the energy
    // row and w = Omega (U^T dy - 1_r deta + gap).
    // dy is then eliminated through D^-1, leaving a dense (K + 3) system.
    Eigen::MatrixXd U(nn, kc);
    U.leftCols(ix(K_)) = G;
    Eigen::VectorXd b(nn);
    for (std::size_t i = 0; i < n; ++i) {
      U(ix(i), kc - 1) = e_at(i);
      double bi = target * e_at(i) / res.se + target / y_at(x, i);
      for (std::size_t k = 0; k < K_; ++k) bi += G(ix(i), ix(k)) * target / s[k];
      if (i < H_) bi -= x.nu;
      b(ix(i)) = bi;
    }
    Eigen::MatrixXd W(nn, kc);
    for (Eigen::Index c = 0; c < kc; ++c) W.col(c) = apply_dinv(U.col(c));
    auto apply_d = [&](const Eigen::VectorXd& in) {
      Eigen::VectorXd out(nn);
      for (std::size_t h = 0; h < H_; ++h) {
        const auto i1 = ix(h);
        const auto i2 = ix(H_ + h);
        out(i1) = d11[h] * in(i1) + d12[h] * in(i2);
        out(i2) = d12[h] * in(i1) + d22[h] * in(i2);
      }
      for (std::size_t j = 0; j < N_; ++j) out(ix(2 * H_ + j)) = dq[j] * in(ix(2 * H_ + j));
      return out;
    };

    const bool with_nu = H_ > 0;
    const Eigen::Index m = kc + 1 + (with_nu ? 1 : 0);
    Eigen::VectorXd omega_inv(kc);
    for (std::size_t k = 0; k < K_; ++k) omega_inv(ix(k)) = s[k] / x.lam[k];
    omega_inv(kc - 1) = res.se / x.mu;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    M.topLeftCorner(kc, kc) = U.transpose() * W;
    M.topLeftCorner(kc, kc).diagonal() += omega_inv;
    for (Eigen::Index k = 0; k < kc - 1; ++k) {
      M(k, kc) = 1.0;
      M(kc, k) = 1.0;
    }
    Eigen::VectorXd arow = Eigen::VectorXd::Zero(nn);
    Eigen::VectorXd da;
    if (with_nu) {
      for (std::size_t h = 0; h < H_; ++h) arow(ix(h)) = 1.0;
      da = apply_dinv(arow);
      const Eigen::VectorXd ua = U.transpose() * da;
      M.block(0, kc + 1, kc, 1) = ua;
      M.block(kc + 1, 0, 1, kc) = ua.transpose();
      M(kc + 1, kc + 1) = arow.dot(da);
    }
    // Inactive users carry lam near zero, so their Omega^-1 entries dwarf the
    // rest of M by many orders of magnitude. Symmetric equilibration keeps the
    // factorization accurate enough for the step to stay a descent direction.
    Eigen::VectorXd scale(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double big = M.row(i).cwiseAbs().maxCoeff();
      scale(i) = big > 0.0 ? 1.0 / std::sqrt(big) : 1.0;
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(scale.asDiagonal() * M * scale.asDiagonal());

    // Solves D dy + U w + a dnu = rb, U^T dy - 1_r deta - Omega^-1 w = rc,
    // 1_r^T w = rbeta, a^T dy = rrho.
    struct Direction {
      Eigen::VectorXd dy, w;
      double deta = 0.0, dnu = 0.0;
    };
    auto solve = [&](const Eigen::VectorXd& rb, const Eigen::VectorXd& rc, double rbeta, double rrho) {
      const Eigen::VectorXd db = apply_dinv(rb);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
      rhs.head(kc) = U.transpose() * db - rc;
      rhs(kc) = rbeta;
      if (with_nu) rhs(kc + 1) = arow.dot(db) - rrho;
      const Eigen::VectorXd sol = scale.cwiseProduct(lu.solve(scale.cwiseProduct(rhs)));
      Direction d;
      d.w = sol.head(kc);
      d.deta = sol(kc);
      d.dnu = with_nu ? sol(kc + 1) : 0.0;
      d.dy = db - W * d.w;
      if (with_nu) d.dy -= da * d.dnu;
      return d;
    };

    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(kc);
    double beta = -1.0;
    for (std::size_t k = 0; k < K_; ++k) {
      c0(ix(k)) = -res.gap[k];
      beta += target / s[k];
    }
    double usum = 0.0;
    for (double u : x.u) usum += u;
    const double rho = with_nu ? h_ - usum : 0.0;
    Direction d = solve(b, c0, beta, rho);
    // Iterative refinement against the unreduced system. The unknowns are
    // the new multipliers rather than their changes, so the first solve is
    // only accurate relative to |b| and the residual may be far smaller.
    double last = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 5; ++round) {
      Eigen::VectorXd e1 = b - apply_d(d.dy) - U * d.w;
      if (with_nu) e1 -= arow * d.dnu;
      Eigen::VectorXd e2 = c0 - U.transpose() * d.dy + omega_inv.cwiseProduct(d.w);
      e2.head(ix(K_)).array() += d.deta;
      const double e3 = beta - d.w.head(ix(K_)).sum();
      const double e4 = with_nu ? rho - arow.dot(d.dy) : 0.0;
      const double err = std::max({e1.lpNorm<Eigen::Infinity>(), e2.lpNorm<Eigen::Infinity>(), std::abs(e3),
                                   std::abs(e4)});
      if (!(err < 0.5 * last)) break;
      last = err;
      const Direction fix = solve(e1, e2, e3, e4);
      d.dy += fix.dy;
      d.w += fix.w;
      d.deta += fix.deta;
      d.dnu += fix.dnu;
    }
    if (!d.dy.allFinite() || !d.w.allFinite()) return false;
    const Eigen::VectorXd& dy = d.dy;
    const Eigen::VectorXd& wv = d.w;
    const double deta = d.deta;
    const double dnu = d.dnu;

    std::vector<double> dlam(K_), ds(K_), dz(n);
    for (std::size_t k = 0; k < K_; ++k) {
      dlam[k] = target / s[k] - x.lam[k] - wv(ix(k));
      ds[k] = wv(ix(k)) * s[k] / x.lam[k];
    }
    const double dmu = target / res.se - x.mu - wv(kc - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = y_at(x, i);
      dz[i] = target / yi - x.z[i] - x.z[i] / yi * dy(ix(i));
    }

    // Hover rates depend on v only through the ratio v / u. Stepping u and
    // that ratio linearly, and rebuilding v from them, follows the same
    // tangent as the Newton step but stays accurate while a hover vanishes
    // and u, v shrink together.
    std::vector<double> ratio(H_), dratio(H_);
    for (std::size_t h = 0; h < H_; ++h) {
      ratio[h] = x.v[h] / x.u[h];
      dratio[h] = (dy(ix(H_ + h)) - ratio[h] * dy(ix(h))) / x.u[h];
    }

    // Largest step keeping every bounded quantity positive, pulled back a little.
    double amax = 1.0;
    auto limit = [&](double val, double d) {
      if (d < 0.0) amax = std::min(amax, -0.995 * val / d);
    };
    for (std::size_t h = 0; h < H_; ++h) {
      limit(x.u[h], dy(ix(h)));
      limit(ratio[h], dratio[h]);
    }
    for (std::size_t j = 0; j < N_; ++j) limit(x.q[j], dy(ix(2 * H_ + j)));
    for (std::size_t i = 0; i < n; ++i) limit(x.z[i], dz[i]);
    for (std::size_t k = 0; k < K_; ++k) {
      limit(x.lam[k], dlam[k]);
      limit(s[k], ds[k]);
    }
    limit(x.mu, dmu);

    // Squared norm of the KKT residual with every product aimed at `target`;
    // the Newton direction is a descent direction for it.
    auto merit = [&](const Iterate& it, const Residual& r) {
      double acc = r.feta * r.feta + r.fy.squaredNorm();
      for (double g : r.gap) acc += g * g;
      if (H_ > 0) {
        double usum = -h_;
        for (double u : it.u) usum += u;
        acc += usum * usum;
      }
      const double ce = it.mu * r.se - target;
      acc += ce * ce;
      for (std::size_t k = 0; k < K_; ++k) {
        const double c = it.lam[k] * it.s[k] - target;
        acc += c * c;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double c = it.z[i] * y_at(it, i) - target;
        acc += c * c;
      }
      return acc;
    };
    const double merit0 = merit(x, res);
    for (double alpha = amax; alpha > 1e-12; alpha *= 0.5) {
      Iterate t = x;
      for (std::size_t h = 0; h < H_; ++h) {
        t.u[h] += alpha * dy(ix(h));
        t.v[h] = t.u[h] * (ratio[h] + alpha * dratio[h]);
      }
      for (std::size_t j = 0; j < N_; ++j) t.q[j] += alpha * dy(ix(2 * H_ + j));
      t.eta += alpha * deta;
      for (std::size_t k = 0; k < K_; ++k) {
        t.lam[k] += alpha * dlam[k];
        t.s[k] += alpha * ds[k];
      }
      t.mu += alpha * dmu;
      for (std::size_t i = 0; i < n; ++i) t.z[i] += alpha * dz[i];
      t.nu += alpha * dnu;

      if (!(energy_slack(t) > 0.0)) continue;
      Residual next = residual(t);
      // Keep the products from collapsing unevenly and ask for a decrease.
      if (next.min_comp < 1e-4 * next.mean_comp) continue;
      if (merit(t, next) > (1.0 - 1e-4 * alpha) * merit0) continue;
      x = std::move(t);
      res = std::move(next);
      return true;
    }
    return false;
  }

  void finish(const Iterate& x, const Residual& res, PerspectiveSolution& out) const {
    out.u = x.u;
    out.v = x.v;
    out.q = x.q;
    if (H_ == 0) {
      out.u.assign(pb_.hovers(), 0.0);
      out.v.assign(pb_.hovers(), 0.0);
    }
    out.rate = res.rate;
    out.eta = *std::min_element(out.rate.begin(), out.rate.end());
    out.weights = x.lam;
    out.energy_price = x.mu;
    out.duration_price = x.nu;
    out.stationarity = res.stationarity;
    out.complementarity = res.max_comp;
    out.infeasibility = res.infeasibility;
    out.kkt_residual = res.kkt();
    out.converged = out.kkt_residual <= cfg_.tolerance;
  }
};

} // namespace

std::vector<double> perspective_rates(const PerspectiveProblem& pb, const std::vector<double>& u,
                                      const std::vector<double>& v, const std::vector<double>& q) {
  std::vector<double> r(pb.users, 0.0);
  for (std::size_t k = 0; k < pb.users; ++k) {
    double acc = 0.0;
    for (std::size_t h = 0; h < pb.hovers(); ++h) {
      if (u[h] > 0.0) acc += u[h] * lg(pb.hover_snr[k][h] * v[h] / u[h]);
    }
    double fly = 0.0;
    for (std::size_t j = 0; j < pb.slots(); ++j) fly += lg(pb.slot_snr[k][j] * q[j]);
    r[k] = acc + pb.slot_fraction * fly;
  }
  return r;
}

namespace {

// The program restricted to the listed hovers.
PerspectiveProblem restrict_hovers(const PerspectiveProblem& pb, const std::vector<std::size_t>& keep) {
  PerspectiveProblem sub = pb;
  for (std::size_t k = 0; k < pb.users; ++k) {
    sub.hover_snr[k].clear();
    for (std::size_t h : keep) sub.hover_snr[k].push_back(pb.hover_snr[k][h]);
  }
  return sub;
}

// How far an unused hover is from paying for itself: the best value of
// sum_k w_k log2(1 + a_k r) - price r over power levels r >= 0, less the
// duration price. The maximand is concave in r, so bisect on its slope.
double unused_hover_violation(const std::vector<double>& snr, const std::vector<double>& w,
                              double energy_price, double duration_price) {
  auto slope = [&](double r) {
    double d = -energy_price;
    for (std::size_t k = 0; k < snr.size(); ++k) d += w[k] * snr[k] * dlg(snr[k] * r);
    return d;
  };
  auto value = [&](double r) {
    double f = -energy_price * r;
    for (std::size_t k = 0; k < snr.size(); ++k) f += w[k] * lg(snr[k] * r);
    return f;
  };
  double best = 0.0;
  if (slope(0.0) > 0.0) {
    double lo = 0.0;
    double hi = 1.0;
    while (slope(hi) > 0.0 && hi < 1e12) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    best = value(0.5 * (lo + hi));
  }
  return std::max(0.0, best - duration_price);
}


PerspectiveSolution solve_distinct(const PerspectiveProblem& problem, const InteriorPointConfig& config) {
  const bool has_hover = problem.hovers() > 0 && problem.hover_fraction > 0.0;
  if (!has_hover && problem.slots() == 0) {
    throw std::invalid_argument("program needs hover time or flight slots");
  }
  if (problem.hover_fraction > 0.0 && problem.hovers() == 0) {
    throw std::invalid_argument("hover time without hover locations");
  }
  if (!has_hover) {
    PerspectiveSolution sol = InteriorPointSolver(problem, config).run();
    // With no hover time, sum(u) = 0 pins every hover at zero and its price is
    // free. Report the smallest price under which no hover would pay off.
    double price = 0.0;
    for (std::size_t h = 0; h < problem.hovers(); ++h) {
      std::vector<double> snr(problem.users);
      for (std::size_t k = 0; k < problem.users; ++k) snr[k] = problem.hover_snr[k][h];
      price = std::max(price, unused_hover_violation(snr, sol.weights, sol.energy_price, 0.0));
    }
    sol.duration_price = price;
    sol.u.assign(problem.hovers(), 0.0);
    sol.v.assign(problem.hovers(), 0.0);
    return sol;
  }

  // A hover the optimum does not use drives both of its variables to zero,
  // where the perspective loses its curvature along the ray and the Newton
  // systems degrade. When the solve stalls with such hovers present, they are
  // removed and the rest is solved again.
  std::vector<std::size_t> keep(problem.hovers());
  for (std::size_t h = 0; h < keep.size(); ++h) keep[h] = h;
  PerspectiveProblem sub = problem;
  PerspectiveSolution sol = InteriorPointSolver(sub, config).run();
  while (!sol.converged && keep.size() > 1) {
    const double cut = 1e-6 * problem.hover_fraction;
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (sol.u[i] >= cut) next.push_back(keep[i]);
    }
    if (next.size() == keep.size() || next.empty()) break;
    keep = std::move(next);
    sub = restrict_hovers(problem, keep);
    sol = InteriorPointSolver(sub, config).run();
  }
  if (keep.size() == problem.hovers()) return sol;

  PerspectiveSolution full = sol;
  full.u.assign(problem.hovers(), 0.0);
  full.v.assign(problem.hovers(), 0.0);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    full.u[keep[i]] = sol.u[i];
    full.v[keep[i]] = sol.v[i];
  }
  // Dropped hovers join the stationarity check through their exact optimality
  // condition at u = v = 0.
  std::vector<bool> kept(problem.hovers(), false);
  for (std::size_t h : keep) kept[h] = true;
  for (std::size_t h = 0; h < problem.hovers(); ++h) {
    if (kept[h]) continue;
    std::vector<double> snr(problem.users);
    for (std::size_t k = 0; k < problem.users; ++k) snr[k] = problem.hover_snr[k][h];
    full.stationarity = std::max(
        full.stationarity, unused_hover_violation(snr, sol.weights, sol.energy_price, sol.duration_price));
  }
  full.kkt_residual = std::max({full.stationarity, full.complementarity, full.infeasibility});
  full.converged = full.kkt_residual <= config.tolerance;
  return full;
}

} // namespace

PerspectiveSolution solve_perspective_program(const PerspectiveProblem& problem,
                                              const InteriorPointConfig& config) {
  if (problem.users == 0) throw std::invalid_argument("program needs at least one user");
  // Users with the same gains everywhere impose the same constraint. Their
  // multipliers are not unique and the Newton systems turn singular, so each
  // group is solved as one user and its weight shared evenly afterwards.
  auto same = [&](std::size_t a, std::size_t b) {
    auto close = [](const std::vector<double>& x, const std::vector<double>& y) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - y[i]) > 1e-12 * std::max(std::abs(x[i]), std::abs(y[i]))) return false;
      }
      return true;
    };
    const bool slots_match = problem.slot_snr.empty() || close(problem.slot_snr[a], problem.slot_snr[b]);
    const bool hovers_match = problem.hover_snr.empty() || close(problem.hover_snr[a], problem.hover_snr[b]);
    return slots_match && hovers_match;
  };
  std::vector<std::size_t> group(problem.users);
  std::vector<std::size_t> leaders;
  for (std::size_t k = 0; k < problem.users; ++k) {
    group[k] = leaders.size();
    for (std::size_t g = 0; g < leaders.size(); ++g) {
      if (same(leaders[g], k)) {
        group[k] = g;
        break;
      }
    }
    if (group[k] == leaders.size()) leaders.push_back(k);
  }
  if (leaders.size() == problem.users) return solve_distinct(problem, config);

  PerspectiveProblem reduced = problem;
  reduced.users = leaders.size();
  reduced.hover_snr.clear();
  reduced.slot_snr.clear();
  for (std::size_t k : leaders) {
    if (!problem.hover_snr.empty()) reduced.hover_snr.push_back(problem.hover_snr[k]);
    if (!problem.slot_snr.empty()) reduced.slot_snr.push_back(problem.slot_snr[k]);
  }
  PerspectiveSolution sol = solve_distinct(reduced, config);
  std::vector<double> members(leaders.size(), 0.0);
  for (std::size_t g : group) members[g] += 1.0;
  const auto weights = sol.weights;
  sol.weights.assign(problem.users, 0.0);
  sol.rate = perspective_rates(problem, sol.u, sol.v, sol.q);
  for (std::size_t k = 0; k < problem.users; ++k) sol.weights[k] = weights[group[k]] / members[group[k]];
  return sol;
}

} // namespace uavmc
