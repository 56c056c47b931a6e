#include "qpfs/pipeline.hpp"

#include <fmt/format.h>

#include "qpfs/error.hpp"
#include "text_util.hpp"

namespace qpfs {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::quadratic: return "quadratic";
    case Method::relieff: return "relieff";
    case Method::infogain: return "infogain";
    case Method::cfs: return "cfs";
    case Method::mrmr: return "mrmr";
    case Method::maxrel: return "maxrel";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  for (auto m : all_methods())
    if (to_string(m) == s) return m;
  throw ConfigError(fmt::format(
      "unknown method '{}' (expected quadratic|mrmr|maxrel|infogain|relieff|cfs)", s));
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::quadratic, Method::relieff, Method::infogain,
                                           Method::cfs,       Method::mrmr,    Method::maxrel};
  return methods;
}

std::string_view display_name(Method m) {
  switch (m) {
    case Method::quadratic: return "Quadratic";
    case Method::relieff: return "ReliefF";
    case Method::infogain: return "Information Gain";
    case Method::cfs: return "CFS";
    case Method::mrmr: return "mRMR";
    case Method::maxrel: return "MaxRel";
  }
  return "?";
}

SelectionOutcome select_features(const Dataset& data, const SelectionConfig& cfg) {
  const auto m = data.n_features();
  if (cfg.k == 0 || cfg.k > m) {
    throw ConfigError(fmt::format("k must be in [1, {}], got {}", m, cfg.k));
  }
  const auto disc = discretize(data, cfg.discretization);
  SelectionOutcome out;
  out.notes = disc.warnings;
  const auto f = build_relevance_vector(disc);

  switch (cfg.method) {
    case Method::quadratic:
    case Method::mrmr: {
      const auto q = build_redundancy_matrix(disc, cfg.q_diagonal);
      out.alpha = estimate_alpha(q, f);
      if (cfg.method == Method::mrmr) {
        out.selection = mrmr_greedy(q, f, cfg.k);
        break;
      }
      if (cfg.alpha) out.alpha = *cfg.alpha;
      out.problem = assemble(q, f, out.alpha);
      out.weights = solve(*out.problem, cfg.solve);
      out.selection.method = "quadratic";
      out.selection.selected = rank(*out.weights, cfg.k);
      out.selection.scores.assign(out.weights->x.data(),
                                  out.weights->x.data() + out.weights->x.size());
      out.selection.k = cfg.k;
      if (out.weights->path == SolverPath::projected_gradient) {
        out.notes.push_back("qp fallback used: " + out.weights->fallback_reason);
      }
      break;
    }
    case Method::maxrel: out.selection = max_rel(f, cfg.k); break;
    case Method::infogain: out.selection = information_gain(disc, cfg.k); break;
    case Method::relieff: out.selection = relieff(disc, cfg.k, cfg.relief); break;
    case Method::cfs: {
      auto full = cfs(disc, cfg.cfs);
      const auto found = full.selected.size();
      out.selection = truncate_selection(std::move(full), cfg.k);
      if (out.selection.truncated) {
        out.notes.push_back(
            fmt::format("cfs found {} features; kept the first {} to enter", found, cfg.k));
      } else if (found < cfg.k) {
        out.notes.push_back(fmt::format("cfs found only {} feature{} (k = {})", found, found == 1 ? "" : "s", cfg.k));
      }
      break;
    }
  }
  return out;
}

Inspection inspect(const Dataset& data, const DiscretizationPolicy& policy, QDiagonal diagonal,
                   std::optional<double> alpha) {
  const auto disc = discretize(data, policy);
  Inspection r;
  r.warnings = disc.warnings;
  r.q = build_redundancy_matrix(disc, diagonal);
  r.f = build_relevance_vector(disc);
  r.alpha_hat = estimate_alpha(r.q, r.f);
  r.problem = assemble(r.q, r.f, alpha.value_or(r.alpha_hat));
  return r;
}

ParseOptions sniff_parse_options(const std::filesystem::path& path) {
  ParseOptions opt;
  opt.delimiter = ' ';
  const auto text = detail::read_file(path, ErrorKind::data);
  for (auto line : detail::split_lines(text)) {
    if (detail::trim(line).empty()) continue;
    if (line.find(',') != std::string_view::npos) opt.delimiter = ',';
    break;
  }
  return opt;
}

std::vector<DatasetTables> reproduce_tables(const ReproduceConfig& config) {
  std::vector<DatasetTables> out;
  for (const auto& ds : config.datasets) {
    const auto schema = load_schema(ds.schema);
    const auto data = load_csv(ds.data, schema, sniff_parse_options(ds.data));
    DatasetTables t;
    t.dataset = ds.name;
    t.k = ds.k;
    t.n_samples = data.n_samples();
    const auto names = data.feature_names();
    for (auto method : all_methods()) {
      auto cfg = config.selection;
      cfg.method = method;
      cfg.k = ds.k;
      const auto sel = select_features(data, cfg);
      if (method == Method::quadratic) t.alpha = sel.alpha;
      auto report = evaluate(data, sel.selection.selected, config.protocol);
      report.method = std::string(to_string(method));
      report.dataset = ds.name;
      report.k = sel.selection.selected.size();
      report.notes = sel.notes;
      for (const auto& n : sel.notes) t.notes.push_back(fmt::format("{}: {}", to_string(method), n));
      std::vector<std::string> chosen;
      for (auto j : sel.selection.selected) chosen.push_back(names[j]);
      t.selected_names.push_back(std::move(chosen));
      t.reports.push_back(std::move(report));
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<PublishedValue> load_published(const std::filesystem::path& path) {
  std::vector<PublishedValue> out;
  const auto text = detail::read_file(path, ErrorKind::data);
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim(line).empty() || line.front() == '#') continue;
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
      auto next = line.find('\t', pos);
      cells.push_back(line.substr(pos, next == std::string_view::npos ? next : next - pos));
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    auto value = cells.size() == 5 ? detail::parse_double(cells[3]) : std::nullopt;
    if (!value) {
      throw DataError(fmt::format("{}:{}: expected dataset, method, metric, value, citation",
                                  path.string(), line_no));
    }
    out.push_back({std::string(cells[0]), std::string(cells[1]), std::string(cells[2]), *value,
                   std::string(cells[4])});
  }
  return out;
}

std::string format_table(const DatasetTables& t) {
  std::string out = fmt::format("{} ({} samples), {} selected features, alpha = {:.3f}\n",
                                t.dataset, t.n_samples, t.k, t.alpha);
  out += fmt::format("{:<18}{:>12}{:>14}{:>15}\n", "Method", "Test error", "Type I error",
                     "Type II error");
  for (std::size_t r = 0; r < t.reports.size(); ++r) {
    const auto& rep = t.reports[r];
    out += fmt::format("{:<18}{:>12.3f}{:>14.3f}{:>15.3f}\n", display_name(parse_method(rep.method)),
                       rep.test_error, rep.type1_error, rep.type2_error);
  }
  for (const auto& n : t.notes) out += "  note: " + n + "\n";
  return out;
}

std::string format_results_tsv(const std::vector<DatasetTables>& tables) {
  std::string out = "dataset\tmethod\tmetric\tvalue\n";
  for (const auto& t : tables) {
    out += fmt::format("{}\t-\talpha\t{}\n", t.dataset, detail::format_double(t.alpha));
    for (std::size_t r = 0; r < t.reports.size(); ++r) {
      const auto& rep = t.reports[r];
      out += fmt::format("{}\t{}\tk\t{}\n", t.dataset, rep.method, rep.k);
      out += fmt::format("{}\t{}\ttest_error\t{}\n", t.dataset, rep.method,
                         detail::format_double(rep.test_error));
      out += fmt::format("{}\t{}\ttype1_error\t{}\n", t.dataset, rep.method,
                         detail::format_double(rep.type1_error));
      out += fmt::format("{}\t{}\ttype2_error\t{}\n", t.dataset, rep.method,
                         detail::format_double(rep.type2_error));
      std::string names;
      for (const auto& n : t.selected_names[r]) names += (names.empty() ? "" : ",") + n;
      out += fmt::format("{}\t{}\tselected\t{}\n", t.dataset, rep.method, names);
    }
  }
  return out;
}

std::string format_deltas(const std::vector<DatasetTables>& tables,
                          const std::vector<PublishedValue>& published) {
  std::string out = "dataset\tmethod\tmetric\tours\tpublished\tdelta\tcitation\n";
  for (const auto& pv : published) {
    for (const auto& t : tables) {
      if (t.dataset != pv.dataset) continue;
      std::optional<double> ours;
      if (pv.method == "-" && pv.metric == "alpha") ours = t.alpha;
      for (const auto& rep : t.reports) {
        if (rep.method != pv.method) continue;
        if (pv.metric == "test_error") ours = rep.test_error;
        else if (pv.metric == "type1_error") ours = rep.type1_error;
        else if (pv.metric == "type2_error") ours = rep.type2_error;
      }
      if (!ours) continue;
      out += fmt::format("{}\t{}\t{}\t{:.4f}\t{}\t{:+.4f}\t{}\n", pv.dataset, pv.method, pv.metric,
                         *ours, detail::format_double(pv.value), *ours - pv.value, pv.citation);
    }
  }
  return out;
}

}  // namespace qpfs
