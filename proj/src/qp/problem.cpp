#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "qpfs/qp.hpp"
#include "text_util.hpp"

namespace qpfs {

Eigen::MatrixXd QpProblem::hessian() const {
  Eigen::MatrixXd g = q_eff;
  g.diagonal().array() += psd_shift;
  return g;
}

double estimate_alpha(const Eigen::MatrixXd& q, const Eigen::VectorXd& f) {
  if (q.rows() == 0 || q.rows() != q.cols() || q.rows() != f.size()) {
    throw DataError(fmt::format("estimate_alpha: Q is {}x{} but F has {} entries", q.rows(),
                                q.cols(), f.size()));
  }
  const double qbar = q.mean();
  const double fbar = f.mean();
  if (!(qbar + fbar > 0.0)) {
    throw DataError(fmt::format(
        "cannot estimate alpha: mean redundancy {} plus mean relevance {} is not positive "
        "(no information in the data)",
        qbar, fbar));
  }
  return std::clamp(qbar / (qbar + fbar), 0.0, 1.0);
}

double estimate_alpha(const RedundancyMatrix& q, const RelevanceVector& f) {
  return estimate_alpha(q.values, f.values);
}

QpProblem assemble(const Eigen::MatrixXd& q, const Eigen::VectorXd& f, double alpha,
                   std::vector<std::string> feature_names) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError(fmt::format("alpha must lie in [0, 1], got {}", alpha));
  }
  const auto m = q.rows();
  if (m == 0 || q.cols() != m || f.size() != m) {
    throw DataError(fmt::format("assemble: Q is {}x{} but F has {} entries", q.rows(), q.cols(),
                                f.size()));
  }
  if (!q.allFinite() || !f.allFinite()) throw DataError("assemble: non-finite Q or F");
  const double asym = (q - q.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff())) {
    throw DataError(fmt::format("assemble: Q is not symmetric (max asymmetry {})", asym));
  }
  if (!feature_names.empty() && feature_names.size() != static_cast<std::size_t>(m)) {
    throw DataError("assemble: feature name count does not match Q");
  }

  QpProblem p;
  p.alpha = alpha;
  p.q_eff = (1.0 - alpha) * q;
  p.f_eff = alpha * f;
  p.feature_names = std::move(feature_names);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.q_eff, Eigen::EigenvaluesOnly);
  p.lambda_min = eig.eigenvalues()(0);
  if (p.lambda_min < -1e-9) p.psd_shift = -p.lambda_min + 1e-9;
  return p;
}

QpProblem assemble(const RedundancyMatrix& q, const RelevanceVector& f, double alpha) {
  return assemble(q.values, f.values, alpha, q.feature_names);
}

std::string_view to_string(SolverPath p) {
  switch (p) {
    case SolverPath::dual_active_set: return "dual-active-set";
    case SolverPath::projected_gradient: return "projected-gradient";
    case SolverPath::linear_vertex: return "linear-vertex";
  }
  return "?";
}

double objective(const Eigen::MatrixXd& g, const Eigen::VectorXd& f, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(g * x) - f.dot(x);
}

double kkt_residual(const Eigen::MatrixXd& g, const Eigen::VectorXd& f, const Eigen::VectorXd& x) {
  const Eigen::VectorXd grad = g * x - f;
  // Multiplier of the sum constraint; exact at an optimum since grad_i = nu on the support.
  const double nu = x.dot(grad);
  double r = std::abs(x.sum() - 1.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double mu = grad(i) - nu;
    r = std::max({r, -mu, -x(i), std::abs(x(i) * mu)});
  }
  return r;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const auto n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumsum += u[static_cast<std::size_t>(j)];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

std::vector<std::size_t> rank_indices(const Eigen::VectorXd& x) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x(static_cast<Eigen::Index>(a)) > x(static_cast<Eigen::Index>(b));
  });
  return idx;
}

std::vector<std::size_t> rank(const FeatureWeights& w, std::size_t k) {
  if (k == 0 || k > w.ranking.size()) {
    throw ConfigError(fmt::format("k must be in [1, {}], got {}", w.ranking.size(), k));
  }
  return {w.ranking.begin(), w.ranking.begin() + static_cast<std::ptrdiff_t>(k)};
}

std::string format_weights(const FeatureWeights& w) {
  std::vector<std::size_t> position(w.ranking.size());
  for (std::size_t r = 0; r < w.ranking.size(); ++r) position[w.ranking[r]] = r + 1;
  std::string out = fmt::format("# solver={} iterations={} objective={} kkt_residual={}\n",
                                to_string(w.path), w.iterations,
                                detail::format_double(w.objective),
                                detail::format_double(w.kkt_residual));
  out += "feature\tweight\trank\n";
  for (std::size_t i = 0; i < w.ranking.size(); ++i) {
    const std::string name =
        i < w.feature_names.size() ? w.feature_names[i] : fmt::format("x{}", i);
    out += fmt::format("{}\t{}\t{}\n", name,
                       detail::format_double(w.x(static_cast<Eigen::Index>(i))), position[i]);
  }
  return out;
}

}  // namespace qpfs
