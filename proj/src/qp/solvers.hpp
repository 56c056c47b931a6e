#pragma once

#include <cstddef>
#include <stdexcept>

#include <Eigen/Dense>

// Building blocks behind qpfs::solve. All work on
//   min 1/2 x'Gx - f'x  s.t.  x >= 0, sum(x) = 1.
namespace qpfs::detail {

// The active-set method could not continue (indefinite G, dependent
// constraints, hit budget). solve() reacts by switching to the fallback.
struct Degenerate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Goldfarb-Idnani dual method; G must be positive definite.
Eigen::VectorXd dual_active_set(const Eigen::MatrixXd& g, const Eigen::VectorXd& f,
                                std::size_t budget, std::size_t& iterations);

// Projected gradient with an optional FISTA momentum, step 1/lambda_max.
Eigen::VectorXd projected_gradient(const Eigen::MatrixXd& g, const Eigen::VectorXd& f,
                                   double lambda_max, const Eigen::VectorXd& start,
                                   bool accelerated, std::size_t budget, std::size_t& iterations);

// Primal active-set refinement starting from the feasible point x: solves the
// equality-constrained problem on the current support, moving indices in and
// out until the KKT conditions hold. Returns x unchanged if a support system
// is singular.
Eigen::VectorXd polish_support(const Eigen::MatrixXd& g, const Eigen::VectorXd& f,
                               const Eigen::VectorXd& x, std::size_t& iterations);

}  // namespace qpfs::detail
