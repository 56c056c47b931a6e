#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qpfs/baselines.hpp"
#include "qpfs/eval.hpp"
#include "qpfs/infotheory.hpp"
#include "qpfs/ingest.hpp"
#include "qpfs/qp.hpp"

namespace qpfs {

enum class Method { quadratic, relieff, infogain, cfs, mrmr, maxrel };
std::string_view to_string(Method m);
Method parse_method(std::string_view s);
// Row order of the published tables.
const std::vector<Method>& all_methods();
// Display name used in the formatted tables.
std::string_view display_name(Method m);

struct SelectionConfig {
  Method method = Method::quadratic;
  std::size_t k = 7;
  std::optional<double> alpha;  // estimated when unset
  DiscretizationPolicy discretization;
  QDiagonal q_diagonal = QDiagonal::zero;
  ReliefOptions relief;
  CfsOptions cfs;
  SolveOptions solve;
};

struct SelectionOutcome {
  SelectionResult selection;  // exactly k features unless CFS found fewer
  // Quadratic only.
  std::optional<QpProblem> problem;
  std::optional<FeatureWeights> weights;
  double alpha = 0.0;  // the alpha used (quadratic) or estimated (others)
  std::vector<std::string> notes;
};

SelectionOutcome select_features(const Dataset& data, const SelectionConfig& config);

// Everything `inspect` reports.
struct Inspection {
  RedundancyMatrix q;
  RelevanceVector f;
  double alpha_hat = 0.0;
  QpProblem problem;
  std::vector<std::string> warnings;
};
Inspection inspect(const Dataset& data, const DiscretizationPolicy& policy, QDiagonal diagonal,
                   std::optional<double> alpha = std::nullopt);

// ---- table reproduction ------------------------------------------------------

struct DatasetSpec {
  std::string name;
  std::filesystem::path data;
  std::filesystem::path schema;
  std::size_t k = 7;
};

struct ReproduceConfig {
  std::vector<DatasetSpec> datasets;
  CvProtocol protocol;
  SelectionConfig selection;  // method and k are overridden per row / dataset
};

struct DatasetTables {
  std::string dataset;
  std::size_t k = 0;
  std::size_t n_samples = 0;
  double alpha = 0.0;
  std::vector<EvaluationReport> reports;  // all_methods() order
  std::vector<std::vector<std::string>> selected_names;
  std::vector<std::string> notes;
};

std::vector<DatasetTables> reproduce_tables(const ReproduceConfig& config);

struct PublishedValue {
  std::string dataset;
  std::string method;  // "-" for dataset-level values
  std::string metric;
  double value = 0.0;
  std::string citation;
};
std::vector<PublishedValue> load_published(const std::filesystem::path& path);

std::string format_table(const DatasetTables& t);
// `dataset method metric value` rows, stable order.
std::string format_results_tsv(const std::vector<DatasetTables>& tables);
// Our value, the published value and their difference for every published entry we computed.
std::string format_deltas(const std::vector<DatasetTables>& tables,
                          const std::vector<PublishedValue>& published);

// Parse options guessed from the first data line: commas if present, blanks otherwise.
ParseOptions sniff_parse_options(const std::filesystem::path& path);

}  // namespace qpfs
