#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qpfs/error.hpp"
#include "qpfs/infotheory.hpp"

namespace qpfs {

// min 1/2 x'(Q_eff + psd_shift I)x - f_eff'x  over  x >= 0, sum(x) = 1.
struct QpProblem {
  Eigen::MatrixXd q_eff;  // (1 - alpha) Q, unshifted
  Eigen::VectorXd f_eff;  // alpha F
  double alpha = 0.5;
  double lambda_min = 0.0;  // smallest eigenvalue of q_eff
  double psd_shift = 0.0;
  std::vector<std::string> feature_names;

  std::size_t size() const { return static_cast<std::size_t>(f_eff.size()); }
  // The matrix actually minimized.
  Eigen::MatrixXd hessian() const;
};

// Q-bar / (Q-bar + F-bar) over all m^2 entries of Q and the m entries of F.
double estimate_alpha(const RedundancyMatrix& q, const RelevanceVector& f);
double estimate_alpha(const Eigen::MatrixXd& q, const Eigen::VectorXd& f);

QpProblem assemble(const RedundancyMatrix& q, const RelevanceVector& f, double alpha);
QpProblem assemble(const Eigen::MatrixXd& q, const Eigen::VectorXd& f, double alpha,
                   std::vector<std::string> feature_names = {});

enum class SolverPath {
  dual_active_set,     // Goldfarb-Idnani, then support polish
  projected_gradient,  // fallback, then support polish
  linear_vertex,       // zero Hessian: uniform over argmax f_eff
};
std::string_view to_string(SolverPath p);

struct FeatureWeights {
  Eigen::VectorXd x;
  std::vector<std::size_t> ranking;  // all m indices, descending weight
  double objective = 0.0;            // at x, on the shifted Hessian
  double kkt_residual = 0.0;
  SolverPath path = SolverPath::dual_active_set;
  std::string fallback_reason;  // empty unless the fallback ran
  std::size_t iterations = 0;
  std::vector<std::string> feature_names;
};

struct SolveOptions {
  bool force_fallback = false;
  bool accelerated = true;  // FISTA momentum in the fallback
  // Feasible start for the fallback; ignored by the active-set path.
  std::optional<Eigen::VectorXd> start;
  double kkt_tolerance = 1e-6;
};

// Carries the best iterate found before giving up.
class SolveError : public NumericalError {
 public:
  SolveError(const std::string& what, Eigen::VectorXd best, double residual)
      : NumericalError(what), best_(std::move(best)), residual_(residual) {}
  const Eigen::VectorXd& best() const { return best_; }
  double residual() const { return residual_; }

 private:
  Eigen::VectorXd best_;
  double residual_;
};

FeatureWeights solve(const QpProblem& problem, const SolveOptions& options = {});

double objective(const Eigen::MatrixXd& g, const Eigen::VectorXd& f, const Eigen::VectorXd& x);
// max of stationarity, feasibility and complementarity violations.
double kkt_residual(const Eigen::MatrixXd& g, const Eigen::VectorXd& f, const Eigen::VectorXd& x);
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

// Indices by descending weight, ascending index on ties.
std::vector<std::size_t> rank_indices(const Eigen::VectorXd& x);
std::vector<std::size_t> rank(const FeatureWeights& w, std::size_t k);

// `feature<TAB>weight<TAB>rank` in index order, with a header row.
std::string format_weights(const FeatureWeights& w);

}  // namespace qpfs
