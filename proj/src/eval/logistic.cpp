#include <cmath>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "qpfs/error.hpp"
#include "qpfs/eval.hpp"

namespace qpfs {

namespace {

void check_shapes(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  if (x.rows() != y.size() || beta.size() != x.cols() + 1) {
    throw DataError(fmt::format("logistic: X is {}x{}, y has {}, beta has {}", x.rows(), x.cols(),
                                y.size(), beta.size()));
  }
}

Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta) {
  return (x * beta.tail(x.cols())).array() + beta(0);
}

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

}  // namespace

double penalized_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& beta, double ridge) {
  check_shapes(x, y, beta);
  const Eigen::VectorXd eta = linear_predictor(x, beta);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // y eta - log(1 + e^eta), without overflow
    ll += y(i) * eta(i) - (std::max(eta(i), 0.0) + std::log1p(std::exp(-std::abs(eta(i)))));
  }
  return ll - 0.5 * ridge * beta.tail(x.cols()).squaredNorm();
}

Eigen::VectorXd penalized_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& beta, double ridge) {
  check_shapes(x, y, beta);
  const Eigen::VectorXd resid = y - predict_proba(x, beta);
  Eigen::VectorXd g(beta.size());
  g(0) = resid.sum();
  g.tail(x.cols()) = x.transpose() * resid - ridge * beta.tail(x.cols());
  return g;
}

Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta) {
  return linear_predictor(x, beta).unaryExpr([](double e) { return sigmoid(e); });
}

LogisticFit train_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const LogisticOptions& opt) {
  const auto n = x.rows();
  const auto d = x.cols();
  if (n == 0) throw DataError("logistic: no training rows");
  if (!(opt.ridge >= 0.0)) throw ConfigError("logistic: ridge must be non-negative");
  const double ones = y.sum();
  if (ones <= 0.0 || ones >= static_cast<double>(n)) {
    throw DataError("logistic: training labels need both classes");
  }

  // Augmented design with the intercept column first.
  Eigen::MatrixXd z(n, d + 1);
  z.col(0).setOnes();
  z.rightCols(d) = x;
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, opt.ridge);
  penalty(0) = 0.0;

  LogisticFit fit;
  fit.beta = Eigen::VectorXd::Zero(d + 1);
  fit.log_likelihood = penalized_log_likelihood(x, y, fit.beta, opt.ridge);
  for (fit.iterations = 0;; ++fit.iterations) {
    const Eigen::VectorXd grad = penalized_gradient(x, y, fit.beta, opt.ridge);
    fit.gradient_norm = grad.norm();
    if (fit.gradient_norm <= opt.gradient_tolerance) return fit;
    if (fit.iterations == opt.max_iterations) break;

    const Eigen::VectorXd p = predict_proba(x, fit.beta);
    const Eigen::VectorXd w = (p.array() * (1.0 - p.array())).matrix();
    Eigen::MatrixXd h = z.transpose() * w.asDiagonal() * z;
    h.diagonal() += penalty;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    Eigen::VectorXd step = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) step = grad;  // steepest ascent

    // Halve until the penalised likelihood does not drop (round-off aside).
    double s = 1.0;
    Eigen::VectorXd next;
    double ll = 0.0;
    for (int halving = 0; halving < 60; ++halving, s *= 0.5) {
      next = fit.beta + s * step;
      ll = penalized_log_likelihood(x, y, next, opt.ridge);
      if (ll >= fit.log_likelihood - 1e-13 * std::abs(fit.log_likelihood)) break;
    }
    fit.beta = std::move(next);
    fit.log_likelihood = ll;
  }
  throw NumericalError(fmt::format(
      "logistic regression did not converge in {} iterations (gradient norm {:.3g}, {} rows, {} "
      "columns, ridge {})",
      opt.max_iterations, fit.gradient_norm, n, d, opt.ridge));
}

}  // namespace qpfs
