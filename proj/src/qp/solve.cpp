#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "qpfs/qp.hpp"
#include "solvers.hpp"

namespace qpfs {

namespace {

// Zero out negatives and round-off dust, then restore sum(x) = 1.
Eigen::VectorXd clean(Eigen::VectorXd x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x(i) > 1e-12)) x(i) = 0.0;
  const double s = x.sum();
  if (s > 0.0) x /= s;
  return x;
}

FeatureWeights finish(const QpProblem& p, const Eigen::MatrixXd& g, Eigen::VectorXd x,
                      SolverPath path, std::size_t iterations) {
  FeatureWeights w;
  w.x = clean(std::move(x));
  w.ranking = rank_indices(w.x);
  w.objective = objective(g, p.f_eff, w.x);
  w.kkt_residual = kkt_residual(g, p.f_eff, w.x);
  w.path = path;
  w.iterations = iterations;
  w.feature_names = p.feature_names;
  return w;
}

}  // namespace

FeatureWeights solve(const QpProblem& p, const SolveOptions& opt) {
  const auto m = p.f_eff.size();
  if (m == 0 || p.q_eff.rows() != m || p.q_eff.cols() != m) {
    throw DataError("solve: problem dimensions do not match");
  }
  const Eigen::MatrixXd g = p.hessian();
  const Eigen::VectorXd& f = p.f_eff;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(m - 1);
  if (lmin < -1e-9) {
    throw NumericalError(fmt::format("solve: Hessian is indefinite (lambda_min = {})", lmin));
  }

  if (m == 1) return finish(p, g, Eigen::VectorXd::Ones(1), SolverPath::dual_active_set, 0);

  // No curvature: a linear program over the simplex, solved at the best vertex
  // (shared uniformly among tied maxima).
  if (lmax <= 1e-14 * std::max(1.0, f.cwiseAbs().maxCoeff())) {
    const double best = f.maxCoeff();
    Eigen::VectorXd x = (f.array() == best).cast<double>().matrix();
    return finish(p, g, x / x.sum(), SolverPath::linear_vertex, 0);
  }

  std::string reason = "forced";
  Eigen::VectorXd best_x;
  double best_r = INFINITY;
  auto consider = [&](const FeatureWeights& w) {
    if (w.kkt_residual < best_r) {
      best_r = w.kkt_residual;
      best_x = w.x;
    }
  };

  if (!opt.force_fallback) {
    try {
      std::size_t its = 0, polish_its = 0;
      Eigen::VectorXd x = detail::dual_active_set(g, f, 100 * static_cast<std::size_t>(m), its);
      x = detail::polish_support(g, f, x, polish_its);
      auto w = finish(p, g, x, SolverPath::dual_active_set, its + polish_its);
      if (w.kkt_residual <= opt.kkt_tolerance) return w;
      consider(w);
      reason = fmt::format("active-set KKT residual {:.3g}", w.kkt_residual);
    } catch (const detail::Degenerate& e) {
      reason = e.what();
    }
  }

  Eigen::VectorXd start = opt.start.value_or(Eigen::VectorXd::Constant(m, 1.0 / m));
  if (start.size() != m) throw ConfigError("solve: start point has the wrong dimension");
  std::size_t its = 0, polish_its = 0;
  Eigen::VectorXd x =
      detail::projected_gradient(g, f, lmax, start, opt.accelerated, 100000, its);
  x = detail::polish_support(g, f, x, polish_its);
  auto w = finish(p, g, x, SolverPath::projected_gradient, its + polish_its);
  w.fallback_reason = reason;
  if (w.kkt_residual <= opt.kkt_tolerance) return w;
  consider(w);
  throw SolveError(fmt::format("solve did not converge: best KKT residual {:.3g} ({})", best_r,
                               reason),
                   best_x, best_r);
}

}  // namespace qpfs
