#include "qpfs/cli.hpp"

#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qpfs/pipeline.hpp"
#include "text_util.hpp"

#ifndef QPFS_DEFAULT_DATA_DIR
#define QPFS_DEFAULT_DATA_DIR "data"
#endif

namespace qpfs::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  // data
  std::string data;
  std::string schema;
  std::string name;
  std::string delimiter = "auto";
  bool header = false;
  // selection
  std::string method = "quadratic";
  std::size_t k = 7;
  std::optional<double> alpha;
  std::string discretization = "equal-frequency";
  int bins = 10;
  std::string missing = "impute-median";
  std::string q_diagonal = "zero";
  std::size_t relief_neighbors = 10;
  std::size_t relief_iterations = 0;
  bool force_fallback = false;
  // protocol
  std::uint64_t seed = 20130101;
  std::size_t folds = 10;
  bool no_stratify = false;
  std::string encoding = "one-hot";
  double ridge = 1e-6;
  std::string error_convention = "standard";
  bool strict = false;
  // reproduce / fetch
  std::string data_dir;
  std::string only;
  std::string published;
  std::string checksums;
  std::vector<std::string> urls;
  // output
  std::string out_dir = "qpfs-out";
};

std::string default_data_dir() {
  return fs::is_directory("data") ? std::string("data") : std::string(QPFS_DEFAULT_DATA_DIR);
}

// `--config FILE` holds flat `key = value` lines whose keys are long flag
// names. Keys become flags unless already given on the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (file.empty()) return args;
  auto given = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  const auto text = detail::read_file(file, ErrorKind::config);
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("{}:{}: expected `key = value`", file, line_no));
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    const std::string flag = "--" + key;
    if (key.empty() || key == "config") {
      throw ConfigError(fmt::format("{}:{}: bad key '{}'", file, line_no, key));
    }
    if (given(flag)) continue;
    if (value == "true" || value == "yes" || value == "on") {
      args.push_back(flag);
    } else if (value == "false" || value == "no" || value == "off") {
      continue;
    } else {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

void add_data_options(CLI::App* sub, Options& o) {
  sub->add_option("--data", o.data, "Dataset file (UCI layout or CSV)")->required();
  sub->add_option("--schema", o.schema, "Schema file")->required();
  sub->add_option("--name", o.name, "Dataset label for reports (default: data file stem)");
  sub->add_option("--delimiter", o.delimiter, "auto | comma | blank | <char>");
  sub->add_flag("--header", o.header, "First line is a header");
}

void add_selection_options(CLI::App* sub, Options& o, bool with_method) {
  if (with_method) {
    sub->add_option("--method", o.method, "quadratic | mrmr | maxrel | infogain | relieff | cfs");
    sub->add_option("--k", o.k, "Number of features to select");
  }
  sub->add_option("--alpha", o.alpha, "Override the estimated alpha (quadratic)")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--discretization", o.discretization, "equal-frequency | equal-width");
  sub->add_option("--bins", o.bins, "Bins per continuous column");
  sub->add_option("--missing", o.missing, "impute-median | impute-mode | drop-row");
  sub->add_option("--q-diagonal", o.q_diagonal, "Diagonal of Q: zero | entropy");
  sub->add_option("--relief-neighbors", o.relief_neighbors, "ReliefF neighbours per class");
  sub->add_option("--relief-iterations", o.relief_iterations, "ReliefF iterations (0 = all rows)");
  sub->add_flag("--force-fallback", o.force_fallback, "Solve the QP with the projected-gradient path");
}

void add_protocol_options(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Fold-assignment and ReliefF seed");
  sub->add_option("--folds", o.folds, "Cross-validation folds");
  sub->add_flag("--no-stratify", o.no_stratify, "Plain (unstratified) folds");
  sub->add_option("--encoding", o.encoding, "Categorical encoding: one-hot | ordinal");
  sub->add_option("--ridge", o.ridge, "Ridge penalty of the logistic regression");
  sub->add_option("--error-convention", o.error_convention,
                  "standard (Type I = good predicted bad) | swapped");
}

void add_output(CLI::App* sub, Options& o) {
  sub->add_option("--out-dir", o.out_dir, "Directory for output artifacts");
}

SelectionConfig selection_config(const Options& o) {
  SelectionConfig c;
  c.method = parse_method(o.method);
  c.k = o.k;
  c.alpha = o.alpha;
  c.discretization.method = parse_binning_method(o.discretization);
  c.discretization.n_bins = o.bins;
  c.discretization.missing_policy = parse_missing_policy(o.missing);
  c.q_diagonal = parse_q_diagonal(o.q_diagonal);
  c.relief.n_neighbors = o.relief_neighbors;
  c.relief.n_iterations = o.relief_iterations;
  c.relief.seed = o.seed;
  c.solve.force_fallback = o.force_fallback;
  return c;
}

CvProtocol protocol(const Options& o) {
  CvProtocol p;
  p.n_folds = o.folds;
  p.stratified = !o.no_stratify;
  p.seed = o.seed;
  p.encoding = parse_encoding(o.encoding);
  p.ridge = o.ridge;
  p.convention = parse_error_convention(o.error_convention);
  return p;
}

Dataset load(const Options& o) {
  const auto schema = load_schema(o.schema);
  ParseOptions po;
  if (o.delimiter == "auto") po = sniff_parse_options(o.data);
  else if (o.delimiter == "comma") po.delimiter = ',';
  else if (o.delimiter == "blank") po.delimiter = ' ';
  else if (o.delimiter.size() == 1) po.delimiter = o.delimiter[0];
  else throw ConfigError(fmt::format("bad delimiter '{}'", o.delimiter));
  po.has_header = o.header;
  return load_csv(o.data, schema, po);
}

std::string dataset_name(const Options& o) {
  return o.name.empty() ? fs::path(o.data).stem().string() : o.name;
}

void write(const Options& o, const std::string& file, const std::string& contents,
           std::ostream& out) {
  const auto path = fs::path(o.out_dir) / file;
  detail::write_file(path, contents);
  out << "wrote " << path.string() << "\n";
}

int cmd_select(const Options& o, std::ostream& out) {
  const auto data = load(o);
  const auto cfg = selection_config(o);
  const auto r = select_features(data, cfg);
  const auto names = data.feature_names();
  out << fmt::format("method {} k {} alpha {}\n", to_string(cfg.method), r.selection.k,
                     detail::format_double(r.alpha));
  const auto table = format_selection(r.selection, names);
  out << table;
  for (const auto& n : r.notes) out << "# " << n << "\n";
  write(o, "selection.tsv", table, out);
  if (r.weights) {
    std::string w = fmt::format("# alpha={} lambda_min={} psd_shift={}\n",
                                detail::format_double(r.problem->alpha),
                                detail::format_double(r.problem->lambda_min),
                                detail::format_double(r.problem->psd_shift));
    write(o, "weights.tsv", w + format_weights(*r.weights), out);
  }
  return kOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const auto data = load(o);
  const auto cfg = selection_config(o);
  const auto proto = protocol(o);
  EvaluationReport rep;
  if (o.strict) {
    rep = evaluate_strict(
        data, [&](const Dataset& train) { return select_features(train, cfg).selection.selected; },
        proto);
  } else {
    const auto sel = select_features(data, cfg);
    rep = evaluate(data, sel.selection.selected, proto);
    rep.k = sel.selection.selected.size();
    rep.notes = sel.notes;
  }
  rep.method = std::string(to_string(cfg.method));
  rep.dataset = dataset_name(o);
  out << fmt::format("{} {} k={}: test_error {:.4f} type1_error {:.4f} type2_error {:.4f}\n",
                     rep.dataset, rep.method, rep.k, rep.test_error, rep.type1_error,
                     rep.type2_error);
  write(o, "evaluation.tsv", format_report(rep), out);
  return kOk;
}

int cmd_inspect(const Options& o, std::ostream& out) {
  const auto data = load(o);
  const auto cfg = selection_config(o);
  const auto ins = inspect(data, cfg.discretization, cfg.q_diagonal, o.alpha);
  std::string summary = fmt::format(
      "samples\t{}\nfeatures\t{}\nq_diagonal\t{}\nalpha_hat\t{}\nalpha\t{}\nlambda_min\t{}\n"
      "psd_shift\t{}\n",
      data.n_samples(), data.n_features(), to_string(ins.q.diagonal),
      detail::format_double(ins.alpha_hat), detail::format_double(ins.problem.alpha),
      detail::format_double(ins.problem.lambda_min), detail::format_double(ins.problem.psd_shift));
  for (const auto& w : ins.warnings) summary += "# " + w + "\n";
  out << summary;
  write(o, "redundancy.tsv", format_redundancy(ins.q), out);
  write(o, "relevance.tsv", format_relevance(ins.f), out);
  write(o, "summary.tsv", summary, out);
  return kOk;
}

int cmd_reproduce(const Options& o, std::ostream& out) {
  const fs::path dir = o.data_dir.empty() ? default_data_dir() : o.data_dir;
  if (!o.only.empty() && o.only != "german" && o.only != "australian") {
    throw ConfigError(fmt::format("--only expects german or australian, got '{}'", o.only));
  }
  ReproduceConfig cfg;
  cfg.protocol = protocol(o);
  cfg.selection = selection_config(o);
  if (o.only.empty() || o.only == "german") {
    cfg.datasets.push_back({"german", dir / "german.data", dir / "german.schema", 7});
  }
  if (o.only.empty() || o.only == "australian") {
    // A genuine UCI copy wins over the bundled KEEL-derived one.
    fs::path a = dir / "australian.dat";
    if (!fs::exists(a)) a = dir / "australian_keel.dat";
    cfg.datasets.push_back({"australian", a, dir / "australian.schema", 6});
  }
  for (const auto& ds : cfg.datasets) {
    out << fmt::format("{}: {}\n", ds.name, ds.data.filename().string());
  }
  const auto tables = reproduce_tables(cfg);
  std::string text;
  for (const auto& t : tables) text += format_table(t) + "\n";
  out << text;
  write(o, "tables.txt", text, out);
  write(o, "results.tsv", format_results_tsv(tables), out);
  const fs::path pub = o.published.empty() ? dir / "published_results.tsv" : fs::path(o.published);
  const auto deltas = format_deltas(tables, load_published(pub));
  out << deltas;
  write(o, "deltas.tsv", deltas, out);
  return kOk;
}

int cmd_fetch(const Options& o, std::ostream& out) {
  const fs::path dir = o.data_dir.empty() ? default_data_dir() : o.data_dir;
  const fs::path sums = o.checksums.empty() ? dir / "checksums.txt" : fs::path(o.checksums);
  std::map<std::string, std::string> overrides;
  for (const auto& u : o.urls) {
    const auto eq = u.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("--url expects NAME=URL, got '{}'", u));
    overrides[u.substr(0, eq)] = u.substr(eq + 1);
  }
  const auto text = detail::read_file(sums, ErrorKind::config);
  std::size_t fetched = 0;
  for (auto line : detail::split_lines(text)) {
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const auto cells = detail::split_blanks(line);
    if (cells.size() != 3) {
      throw ConfigError(fmt::format("{}: expected `name sha256 url`, got '{}'", sums.string(), line));
    }
    const std::string name(cells[0]), digest(cells[1]);
    if (!o.only.empty() && name.rfind(o.only, 0) != 0) continue;
    const std::string url = overrides.count(name) ? overrides[name] : std::string(cells[2]);
    const auto bytes = download(url);
    const auto got = sha256_hex(bytes);
    if (digest != "-" && digest != got) {
      throw DataError(fmt::format("{}: checksum mismatch (expected {}, got {})", name, digest, got));
    }
    detail::write_file(dir / name, bytes);
    out << fmt::format("{}\t{}\t{}\n", name, got, digest == "-" ? "unpinned" : "verified");
    ++fetched;
  }
  if (fetched == 0) throw ConfigError("fetch: nothing matched");
  return kOk;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return kConfigError;
    case ErrorKind::data: return kDataError;
    case ErrorKind::numerical: return kNumericalError;
  }
  return kOther;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Feature selection by simplex-constrained quadratic programming over mutual "
               "information, with baselines and credit-scoring evaluation"};
  app.name("qpfs");
  app.require_subcommand(1);

  auto* fetch = app.add_subcommand("fetch", "Download the UCI datasets and verify checksums");
  fetch->add_option("--data-dir", o.data_dir, "Where to store the files");
  fetch->add_option("--checksums", o.checksums, "Checksum list (default: <data-dir>/checksums.txt)");
  fetch->add_option("--only", o.only, "Fetch only names starting with this prefix");
  fetch->add_option("--url", o.urls, "Override a source: NAME=URL (file:// works)");

  auto* select = app.add_subcommand("select", "Rank and select features");
  add_data_options(select, o);
  add_selection_options(select, o, true);
  add_output(select, o);

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated logistic regression on a selection");
  add_data_options(evaluate, o);
  add_selection_options(evaluate, o, true);
  add_protocol_options(evaluate, o);
  evaluate->add_flag("--strict", o.strict, "Reselect features inside every training fold");
  add_output(evaluate, o);

  auto* reproduce = app.add_subcommand("reproduce", "Regenerate both result tables and deltas");
  reproduce->add_option("--data-dir", o.data_dir, "Directory holding datasets and schemas");
  reproduce->add_option("--only", o.only, "german | australian");
  reproduce->add_option("--published", o.published, "Published reference values (TSV)");
  add_selection_options(reproduce, o, false);
  add_protocol_options(reproduce, o);
  add_output(reproduce, o);

  auto* insp = app.add_subcommand("inspect", "Dump Q, F, alpha and the PSD repair");
  add_data_options(insp, o);
  add_selection_options(insp, o, false);
  add_output(insp, o);

  for (auto* sub : {select, evaluate, reproduce, insp}) {
    sub->add_option("--config", "Flat `key = value` run configuration; flags win");
  }

  try {
    std::vector<std::string> expanded;
    try {
      expanded = expand_config(args);
    } catch (const Error& e) {
      err << "qpfs: error: " << e.what() << "\n";
      return kConfigError;
    }
    std::vector<std::string> rev(expanded.rbegin(), expanded.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*fetch) return cmd_fetch(o, out);
    if (*select) return cmd_select(o, out);
    if (*evaluate) return cmd_evaluate(o, out);
    if (*reproduce) return cmd_reproduce(o, out);
    if (*insp) return cmd_inspect(o, out);
  } catch (const Error& e) {
    err << "qpfs: error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "qpfs: error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace qpfs::cli
