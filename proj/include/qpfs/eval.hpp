#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qpfs/ingest.hpp"

namespace qpfs {

// ---- logistic regression -------------------------------------------------

// beta[0] is the intercept (never penalised); beta[1..d] pair with X's columns.
double penalized_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& beta, double ridge);
Eigen::VectorXd penalized_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& beta, double ridge);
Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta);

struct LogisticOptions {
  double ridge = 1e-6;
  double gradient_tolerance = 1e-8;
  std::size_t max_iterations = 200;
};

struct LogisticFit {
  Eigen::VectorXd beta;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  double log_likelihood = 0.0;
};

// Newton / IRLS with step halving. Throws NumericalError when the gradient
// norm is still above tolerance after max_iterations.
LogisticFit train_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const LogisticOptions& opt = {});

// ---- encoding ------------------------------------------------------------

enum class CategoricalEncoding { one_hot, ordinal };
std::string_view to_string(CategoricalEncoding e);
CategoricalEncoding parse_encoding(std::string_view s);

// Numeric design for a set of dataset features, fitted on training rows only.
// Continuous: median fill, standardise. Categorical and binary: training mode
// fill, then one indicator per non-reference level (reference = the smallest
// level) or the level rank standardised when ordinal. Unseen levels encode as
// the reference.
class DesignEncoder {
 public:
  DesignEncoder(const Dataset& data, std::span<const std::size_t> train_rows,
                std::span<const std::size_t> features, CategoricalEncoding encoding);

  Eigen::MatrixXd transform(const Dataset& data, std::span<const std::size_t> rows) const;
  const std::vector<std::string>& column_names() const { return names_; }
  std::size_t n_columns() const { return names_.size(); }

 private:
  struct Feature {
    std::size_t index = 0;  // dataset feature
    ColumnKind kind = ColumnKind::categorical;
    double fill = 0.0;  // continuous
    double mean = 0.0;
    double scale = 1.0;
    std::string fill_level;           // categorical / binary
    std::vector<std::string> levels;  // sorted; levels[0] is the reference
    std::size_t first_column = 0;
    std::size_t width = 0;
  };
  CategoricalEncoding encoding_;
  std::vector<Feature> features_;
  std::vector<std::string> names_;
};

// ---- cross-validation ----------------------------------------------------

// `standard`: label 1 is the bad (non-creditworthy) class, Type I = good
// predicted bad, Type II = bad predicted good. `swapped` exchanges the two.
enum class ErrorConvention { standard, swapped };
std::string_view to_string(ErrorConvention c);
ErrorConvention parse_error_convention(std::string_view s);

struct CvProtocol {
  std::size_t n_folds = 10;
  bool stratified = true;
  std::uint64_t seed = 20130101;
  CategoricalEncoding encoding = CategoricalEncoding::one_hot;
  double ridge = 1e-6;
  double threshold = 0.5;
  ErrorConvention convention = ErrorConvention::standard;
};

// Fold of each row. Within each class (or over all rows when not stratified)
// rows are ordered by a seeded hash of their stable key and dealt round-robin
// starting at fold 0.
std::vector<std::size_t> assign_folds(std::span<const int> labels,
                                      std::span<const std::size_t> keys, std::size_t n_folds,
                                      std::uint64_t seed, bool stratified);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t n_test = 0;
  std::size_t n_class0 = 0;
  std::size_t n_class1 = 0;
  double test_error = 0.0;
  double type1_error = 0.0;
  double type2_error = 0.0;
};

struct EvaluationReport {
  std::string method;
  std::string dataset;
  std::size_t k = 0;
  double test_error = 0.0;  // fold means
  double type1_error = 0.0;
  double type2_error = 0.0;
  std::vector<FoldResult> per_fold;
  std::vector<std::string> notes;
};

// Selection done once, outside the folds.
EvaluationReport evaluate(const Dataset& data, const std::vector<std::size_t>& selected,
                          const CvProtocol& protocol);
// Intercept-only model in every fold (majority-class predictor).
EvaluationReport evaluate_intercept_only(const Dataset& data, const CvProtocol& protocol);

// Strict mode: the selector runs on each training split.
using FoldSelector = std::function<std::vector<std::size_t>(const Dataset& train)>;
EvaluationReport evaluate_strict(const Dataset& data, const FoldSelector& selector,
                                 const CvProtocol& protocol);

// `dataset method k fold n_test test_error type1_error type2_error`, then a mean row.
std::string format_report(const EvaluationReport& r);

}  // namespace qpfs
