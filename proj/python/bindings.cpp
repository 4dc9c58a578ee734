#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "covaudit/citation.hpp"
#include "covaudit/error.hpp"
#include "covaudit/metrics.hpp"
#include "covaudit/pipeline.hpp"
#include "covaudit/query.hpp"

namespace py = pybind11;
using namespace covaudit;

namespace {

StopwordList stoplist(const std::vector<std::string>& words) {
  StopwordList sw;
  for (const auto& w : words) sw.add(w);
  return sw;
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::optional<std::filesystem::path>& output,
                      const std::optional<std::vector<std::string>>& modes) {
  RunConfig cfg = validate_config(path);
  if (output) cfg.output_dir = *output;
  if (modes) {
    cfg.modes.clear();
    for (const auto& m : *modes) {
      auto mode = parse_query_mode(m);
      if (!mode) throw ConfigError({"modes: unknown mode '" + m + "'"});
      cfg.modes.push_back(*mode);
    }
  }
  return cfg;
}

py::dict result_dict(const PipelineResult& r) {
  py::dict d;
  d["exit_code"] = r.exit_code;
  d["message"] = r.message;
  d["processed"] = r.batch.processed;
  d["skipped_done"] = r.batch.skipped_done;
  py::list problems;
  for (const auto& p : r.batch.problems)
    problems.append(py::make_tuple(p.record_id, std::string(to_string(p.mode)),
                                   std::string(to_string(p.status)), p.message));
  d["problems"] = problems;
  if (r.bundle) {
    py::list scores;
    for (const auto& s : r.bundle->scores) {
      py::dict row;
      row["label"] = s.label;
      row["matched"] = s.matched;
      row["corrected_matched"] = s.corrected_matched;
      row["returned"] = s.returned;
      row["recall"] = s.recall;
      row["precision"] = s.precision;
      row["precision_corrected"] = s.precision_corrected;
      row["f1_corrected"] = s.f1_corrected;
      scores.append(row);
    }
    d["scores"] = scores;
    d["corpus_size"] = r.bundle->corpus_size;
    d["subset_size"] = r.bundle->subset.retained;
  }
  return d;
}

py::dict histogram_dict(const QualityHistogram& h) {
  py::dict d;
  d["exact"] = h.exact;
  d["plus_one"] = h.plus_one;
  d["minus_one"] = h.minus_one;
  d["greater_plus_one"] = h.greater_plus_one;
  d["less_minus_one"] = h.less_minus_one;
  return d;
}

}  // namespace

PYBIND11_MODULE(_covaudit, m) {
  m.doc() = "Coverage audit core";

  auto base = py::register_exception<Error>(m, "CovauditError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def("normalize_exact_title", &normalize_exact_title, py::arg("title"));
  m.def(
      "tokenize_for_words",
      [](const std::string& title, const std::vector<std::string>& stopwords) {
        return tokenize_for_words(title, stoplist(stopwords));
      },
      py::arg("title"), py::arg("stopwords") = std::vector<std::string>{});
  m.def(
      "exact_query", [](const std::string& title) { return build_exact_query(title).text; },
      py::arg("title"));
  m.def(
      "words_query",
      [](const std::string& title, const std::vector<std::string>& stopwords) {
        return build_words_query(tokenize_for_words(title, stoplist(stopwords))).text;
      },
      py::arg("title"), py::arg("stopwords") = std::vector<std::string>{});
  m.def(
      "load_stopwords",
      [](const std::filesystem::path& p) {
        const auto sw = StopwordList::load(p);
        return std::vector<std::string>(sw.words().begin(), sw.words().end());
      },
      py::arg("path"));

  m.def("recall", &recall, py::arg("matched"), py::arg("corpus_size"));
  m.def("precision", &precision, py::arg("matched"), py::arg("returned"));
  m.def("f1", &f1, py::arg("precision"), py::arg("recall"));
  m.def("format_percent", &format_percent, py::arg("num"), py::arg("den"));
  m.def(
      "unique_coverage",
      [](const std::vector<std::string>& databases,
         const std::vector<std::vector<bool>>& covered) {
        return unique_coverage(CoverageMatrix{databases, covered});
      },
      py::arg("databases"), py::arg("covered"));
  m.def(
      "delta_histogram",
      [](const std::vector<long long>& deltas) {
        QualityHistogram h;
        for (auto d : deltas) h.add(d);
        return histogram_dict(h);
      },
      py::arg("deltas"));

  m.def(
      "pearson",
      [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); },
      py::arg("x"), py::arg("y"));
  m.def(
      "spearman",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return spearman_mean_rank(x, y);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "kendall_tau_b",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return kendall_tau_b(x, y);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "mean_ranks", [](const std::vector<double>& v) { return mean_ranks(v); },
      py::arg("values"));

  m.def(
      "validate",
      [](const std::filesystem::path& config) {
        auto cfg = validate_config(config);
        py::dict d;
        d["corpus"] = cfg.corpus;
        d["output_dir"] = cfg.output_dir;
        py::list modes;
        for (auto md : cfg.modes) modes.append(std::string(to_string(md)));
        d["modes"] = modes;
        d["parallelism"] = cfg.parallelism;
        return d;
      },
      py::arg("config"));
  m.def(
      "run",
      [](const std::filesystem::path& config, std::optional<std::filesystem::path> output,
         std::optional<std::vector<std::string>> modes,
         std::optional<std::set<std::string>> ids, bool resume) {
        auto cfg = load_config(config, output, modes);
        PipelineOptions opts;
        opts.id_filter = std::move(ids);
        opts.resume = resume;
        PipelineResult r;
        {
          py::gil_scoped_release release;
          r = run_pipeline(cfg, opts);
        }
        return result_dict(r);
      },
      py::arg("config"), py::arg("output") = py::none(), py::arg("modes") = py::none(),
      py::arg("ids") = py::none(), py::arg("resume") = false);
  m.def(
      "report",
      [](const std::filesystem::path& config, std::optional<std::filesystem::path> output,
         std::optional<std::set<std::string>> ids) {
        auto cfg = load_config(config, output, std::nullopt);
        PipelineResult r;
        {
          py::gil_scoped_release release;
          r = report_from_archive(cfg, ids);
        }
        return result_dict(r);
      },
      py::arg("config"), py::arg("output") = py::none(), py::arg("ids") = py::none());
}
