// Goldfarb & Idnani (1983) dual active-set method, specialised to one
// equality (sum x = 1) and the bounds x_i >= 0.
//
// Invariant: J' N = [R; 0] where N holds the normals of the active
// constraints, R is upper triangular and J starts as L^{-T} (G = L L').
// The first q columns of J span the active normals, the rest their
// G-orthogonal complement.

#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "solvers.hpp"

namespace qpfs::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kEquality = -1;

struct State {
  Eigen::MatrixXd J;
  Eigen::MatrixXd R;
  Eigen::VectorXd u;    // multipliers; u[q] belongs to the constraint being added
  std::vector<int> A;   // active constraints: kEquality or a bound index
  Eigen::Index q = 0;   // number of active constraints
  double r_norm = 1.0;

  // Rotate d = J'n so that only its first q+1 entries are nonzero, then
  // append it as the next column of R.
  bool add(Eigen::VectorXd& d) {
    const auto n = J.rows();
    for (Eigen::Index j = n - 1; j > q; --j) {
      const double a = d(j - 1), b = d(j);
      const double h = std::hypot(a, b);
      if (h == 0.0) continue;
      const double c = a / h, s = b / h;
      d(j - 1) = h;
      d(j) = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double t1 = J(k, j - 1), t2 = J(k, j);
        J(k, j - 1) = c * t1 + s * t2;
        J(k, j) = s * t1 - c * t2;
      }
    }
    R.col(q).head(q + 1) = d.head(q + 1);
    ++q;
    if (std::abs(d(q - 1)) <= kEps * r_norm) return false;
    r_norm = std::max(r_norm, std::abs(d(q - 1)));
    return true;
  }

  // Remove the active constraint at position pos and retriangularise R.
  void drop(Eigen::Index pos) {
    const auto n = J.rows();
    for (Eigen::Index i = pos; i + 1 < q; ++i) {
      A[static_cast<std::size_t>(i)] = A[static_cast<std::size_t>(i + 1)];
      u(i) = u(i + 1);
      R.col(i) = R.col(i + 1);
    }
    // The pending constraint's multiplier moves down with the rest.
    u(q - 1) = u(q);
    u(q) = 0.0;
    A[static_cast<std::size_t>(q - 1)] = A[static_cast<std::size_t>(q)];
    R.col(q - 1).setZero();
    --q;
    for (Eigen::Index j = pos; j < q; ++j) {
      const double a = R(j, j), b = R(j + 1, j);
      const double h = std::hypot(a, b);
      if (h == 0.0) continue;
      const double c = a / h, s = b / h;
      R(j, j) = h;
      R(j + 1, j) = 0.0;
      for (Eigen::Index k = j + 1; k < q; ++k) {
        const double t1 = R(j, k), t2 = R(j + 1, k);
        R(j, k) = c * t1 + s * t2;
        R(j + 1, k) = s * t1 - c * t2;
      }
      for (Eigen::Index k = 0; k < n; ++k) {
        const double t1 = J(k, j), t2 = J(k, j + 1);
        J(k, j) = c * t1 + s * t2;
        J(k, j + 1) = s * t1 - c * t2;
      }
    }
  }

  // Primal direction z (in the null space of the active normals) and dual
  // direction r = R^{-1} d[:q].
  void directions(const Eigen::VectorXd& d, Eigen::VectorXd& z, Eigen::VectorXd& r) const {
    const auto n = J.rows();
    z = J.rightCols(n - q) * d.tail(n - q);
    r = R.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(d.head(q));
  }
};

}  // namespace

Eigen::VectorXd dual_active_set(const Eigen::MatrixXd& g, const Eigen::VectorXd& f,
                                std::size_t budget, std::size_t& iterations) {
  const auto n = g.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw Degenerate("Hessian is not positive definite");

  State st;
  st.J = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n)).transpose();
  if (!st.J.allFinite()) throw Degenerate("Cholesky factor is singular");
  st.R = Eigen::MatrixXd::Zero(n, n);
  st.u = Eigen::VectorXd::Zero(n + 1);
  st.A.assign(static_cast<std::size_t>(n + 1), 0);

  // Unconstrained minimum.
  Eigen::VectorXd x = llt.solve(f);

  // Equality first; it is never dropped.
  Eigen::VectorXd z, r;
  {
    const Eigen::VectorXd np = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd d = st.J.transpose() * np;
    st.directions(d, z, r);
    const double zn = z.dot(np);
    if (!(zn > 0.0)) throw Degenerate("sum constraint has no component in the G-metric");
    const double t = (1.0 - x.sum()) / zn;
    x += t * z;
    st.u(0) = t;
    st.A[0] = kEquality;
    if (!st.add(d)) throw Degenerate("sum constraint is degenerate");
  }

  std::vector<char> active(static_cast<std::size_t>(n), 0);
  iterations = 0;
  while (true) {
    // Step 1: most violated bound.
    Eigen::Index p = -1;
    double worst = -1e-13;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[static_cast<std::size_t>(i)] && x(i) < worst) {
        worst = x(i);
        p = i;
      }
    }
    if (p < 0) break;
    st.u(st.q) = 0.0;
    st.A[static_cast<std::size_t>(st.q)] = static_cast<int>(p);

    // Step 2: move until p is satisfied or a multiplier would go negative.
    while (true) {
      if (++iterations > budget) {
        throw Degenerate(fmt::format("active-set budget of {} steps exhausted", budget));
      }
      Eigen::VectorXd d = st.J.row(p).transpose();
      st.directions(d, z, r);

      double t1 = kInf;
      Eigen::Index l = -1;
      for (Eigen::Index k = 1; k < st.q; ++k) {
        if (r(k) > 0.0 && st.u(k) / r(k) < t1) {
          t1 = st.u(k) / r(k);
          l = k;
        }
      }
      const double zz = z(p);
      const double t2 = std::abs(zz) > kEps ? -x(p) / zz : kInf;
      const double t = std::min(t1, t2);
      if (t == kInf) throw Degenerate("infeasible step (no blocking constraint)");

      st.u.head(st.q) -= t * r;
      st.u(st.q) += t;
      if (t2 != kInf) x += t * z;
      if (t2 <= t1) {
        if (!st.add(d)) throw Degenerate("linearly dependent active constraints");
        active[static_cast<std::size_t>(p)] = 1;
        x(p) = 0.0;
        break;
      }
      // Blocked by a multiplier (or a dual-only step when z = 0).
      active[static_cast<std::size_t>(st.A[static_cast<std::size_t>(l)])] = 0;
      st.drop(l);
    }
  }
  if (!x.allFinite()) throw Degenerate("non-finite iterate");
  return x;
}

}  // namespace qpfs::detail
