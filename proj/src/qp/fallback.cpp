#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/LU>

#include "qpfs/qp.hpp"
#include "solvers.hpp"

namespace qpfs::detail {

Eigen::VectorXd projected_gradient(const Eigen::MatrixXd& g, const Eigen::VectorXd& f,
                                   double lambda_max, const Eigen::VectorXd& start,
                                   bool accelerated, std::size_t budget, std::size_t& iterations) {
  const double step = 1.0 / lambda_max;
  Eigen::VectorXd x = project_to_simplex(start);
  Eigen::VectorXd y = x;
  double fx = objective(g, f, x);
  double t = 1.0;
  iterations = 0;
  while (iterations < budget) {
    ++iterations;
    Eigen::VectorXd xn = project_to_simplex(y - step * (g * y - f));
    const double fn = objective(g, f, xn);
    if (accelerated && fn > fx && t > 1.0) {
      // Momentum overshot: restart from x with a plain step.
      y = x;
      t = 1.0;
      continue;
    }
    const double decrease = fx - fn;
    if (accelerated) {
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = xn + ((t - 1.0) / tn) * (xn - x);
      t = tn;
    } else {
      y = xn;
    }
    x = std::move(xn);
    fx = fn;
    if (decrease >= 0.0 && decrease <= 1e-12 * std::max(1.0, std::abs(fn))) break;
  }
  return x;
}

Eigen::VectorXd polish_support(const Eigen::MatrixXd& g, const Eigen::VectorXd& f,
                               const Eigen::VectorXd& x0, std::size_t& iterations) {
  const auto n = g.rows();
  Eigen::VectorXd x = x0.cwiseMax(0.0);
  if (!(x.sum() > 0.0)) return x0;
  x /= x.sum();

  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = x(i) > 0.0;

  const std::size_t budget = 20 * static_cast<std::size_t>(n) + 20;
  iterations = 0;
  while (iterations++ < budget) {
    std::vector<Eigen::Index> s;
    for (Eigen::Index i = 0; i < n; ++i)
      if (in[static_cast<std::size_t>(i)]) s.push_back(i);
    const auto k = static_cast<Eigen::Index>(s.size());

    // [G_SS -1; 1' 0] [x_S; nu] = [f_S; 1]
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd rhs(k + 1);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) kkt(a, b) = g(s[a], s[b]);
      kkt(a, k) = -1.0;
      kkt(k, a) = 1.0;
      rhs(a) = f(s[a]);
    }
    rhs(k) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) return x;
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) return x;

    Eigen::VectorXd target = Eigen::VectorXd::Zero(n);
    for (Eigen::Index a = 0; a < k; ++a) target(s[a]) = sol(a);

    double ratio = 1.0;
    Eigen::Index blocking = -1;
    for (auto i : s) {
      if (target(i) < 0.0) {
        const double r = x(i) / (x(i) - target(i));
        if (r < ratio) {
          ratio = r;
          blocking = i;
        }
      }
    }
    if (blocking >= 0) {
      x += ratio * (target - x);
      x(blocking) = 0.0;
      in[static_cast<std::size_t>(blocking)] = 0;
      for (auto i : s)
        if (x(i) <= 0.0) {
          x(i) = 0.0;
          in[static_cast<std::size_t>(i)] = 0;
        }
      continue;
    }

    x = target;
    const double nu = sol(k);
    const Eigen::VectorXd grad = g * x - f;
    Eigen::Index enter = -1;
    double most = -1e-13;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (in[static_cast<std::size_t>(i)]) continue;
      const double mu = grad(i) - nu;
      if (mu < most) {
        most = mu;
        enter = i;
      }
    }
    if (enter < 0) break;
    in[static_cast<std::size_t>(enter)] = 1;
  }
  return x;
}

}  // namespace qpfs::detail
