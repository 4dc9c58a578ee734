#include "covaudit/pipeline.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "covaudit/error.hpp"
#include "strutil.hpp"

namespace covaudit {

namespace {

std::string raw(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TsvWriter {
 public:
  explicit TsvWriter(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
    if (!out_) throw Error("cannot write " + path.string());
  }
  void comment(const std::string& text) { out_ << "# " << text << '\n'; }
  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : "\t") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "\t" : "") << strutil::tsv_escape(cells[i]);
    out_ << '\n';
  }

 private:
  static std::string cell(const std::string& s) { return strutil::tsv_escape(s); }
  static std::string cell(std::string_view s) { return strutil::tsv_escape(s); }
  static std::string cell(const char* s) { return strutil::tsv_escape(s); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(double v) { return raw(v); }
  std::ofstream out_;
};

struct ModeResults {
  std::vector<std::optional<MatchResult>> per_record;  // corpus order
  std::size_t returned = 0;
  std::size_t matched = 0;
};

std::vector<std::string> bucket_names() {
  return {"exact", "plus_one", "minus_one", "greater_plus_one", "less_minus_one"};
}

std::vector<std::size_t> bucket_counts(const QualityHistogram& h) {
  return {h.exact, h.plus_one, h.minus_one, h.greater_plus_one, h.less_minus_one};
}

}  // namespace

std::set<std::string> load_id_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read id list " + path.string());
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    auto t = strutil::trim(line);
    if (t.empty() || t.front() == '#') continue;
    ids.emplace(t);
  }
  return ids;
}

PipelineInputs load_inputs(const RunConfig& config,
                           const std::optional<std::set<std::string>>& id_filter) {
  PipelineInputs in;
  Corpus full = load_corpus(config.corpus, config.corpus_format);
  if (id_filter) {
    std::vector<PublicationRecord> kept;
    for (const auto& r : full)
      if (id_filter->count(r.record_id)) kept.push_back(r);
    in.corpus = Corpus(std::move(kept), full.warnings());
  } else {
    in.corpus = std::move(full);
  }
  in.mapping = load_field_mapping(config.field_mapping);
  in.stopwords = StopwordList::load(config.stopwords);
  return in;
}

ReportBundle build_reports(const RunConfig& config, const PipelineInputs& inputs,
                           const std::filesystem::path& archive_dir) {
  const Corpus& corpus = inputs.corpus;
  ReportBundle b;
  b.modes = config.modes;
  b.corpus_size = corpus.size();

  EvaluateRequest request = config.request;
  std::map<QueryMode, ModeResults> by_mode;
  for (auto mode : config.modes) {
    auto& mr = by_mode[mode];
    mr.per_record.resize(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& rec = corpus[i];
      RecordOutcome out;
      out.record_id = rec.record_id;
      out.mode = mode;
      try {
        request.expr = build_query(mode, rec.title, inputs.stopwords).text;
      } catch (const EmptyTitleError& e) {
        out.status = "no_query";
        out.warnings.emplace_back(e.what());
      } catch (const EmptyTokenListError& e) {
        out.status = "no_query";
        out.warnings.emplace_back(e.what());
      }
      if (out.status.empty()) {
        auto body = read_file(response_path(archive_dir, rec.record_id, mode));
        if (!body) {
          out.status = "missing";
        } else {
          try {
            auto rs = parse_evaluate_response(*body, request);
            out.status = "ok";
            out.returned = rs.entities.size();
            out.warnings = rs.warnings;
            out.match = select_best(rec, rs, mode);
          } catch (const MalformedPayloadError& e) {
            out.status = "malformed_payload";
            out.warnings.emplace_back(e.what());
          }
        }
      }
      mr.returned += out.returned;
      if (out.match) {
        ++mr.matched;
        mr.per_record[i] = out.match;
        ++b.match_types[mode][out.match->match_type];
        ++b.ranks[mode][out.match->rank];
      }
      b.outcomes.push_back(std::move(out));
    }
  }
  std::sort(b.outcomes.begin(), b.outcomes.end(),
            [](const RecordOutcome& x, const RecordOutcome& y) {
              return std::tie(x.record_id, x.mode) < std::tie(y.record_id, y.mode);
            });

  // Merge and reconcile modes.
  auto mode_result = [&](QueryMode m, std::size_t i) -> std::optional<MatchResult> {
    auto it = by_mode.find(m);
    return it == by_mode.end() ? std::nullopt : it->second.per_record[i];
  };
  std::vector<MergedMatch> merged;
  std::vector<CrossModeVerdict> verdicts;
  merged.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto ex = mode_result(QueryMode::title_exact, i);
    auto wo = mode_result(QueryMode::title_words, i);
    verdicts.push_back(reconcile_modes(corpus[i].record_id, ex, wo));
    merged.push_back(merge_mode_results(corpus[i].record_id, ex, wo));
    if (const auto* p = merged.back().preferred()) ++b.merged_match_types[p->match_type];
  }

  const bool both = by_mode.count(QueryMode::title_exact) &&
                    by_mode.count(QueryMode::title_words);
  std::size_t different = 0;
  if (both) {
    b.reconciliation = tabulate(verdicts);
    different = b.reconciliation->different_id();
  }
  if (!corpus.empty()) {
    for (auto mode : config.modes) {
      const auto& mr = by_mode[mode];
      b.scores.push_back(retrieval_score(std::string(to_string(mode)), mr.matched,
                                         mr.matched - different,
                                         static_cast<double>(mr.returned),
                                         corpus.size()));
    }
    if (both) {
      std::size_t union_matched = 0;
      for (const auto& m : merged) union_matched += m.matched() ? 1 : 0;
      double avg_returned =
          (static_cast<double>(by_mode[QueryMode::title_exact].returned) +
           static_cast<double>(by_mode[QueryMode::title_words].returned)) /
          2.0;
      b.scores.push_back(retrieval_score("combined", union_matched,
                                         union_matched - different, avg_returned,
                                         corpus.size()));
    }
  }

  b.year_delta = year_delta_histogram(corpus, merged);
  b.author_delta = author_delta_histogram(corpus, merged);
  auto full_fields = assign_fields(corpus, inputs.mapping);
  b.doi = doi_availability(corpus, merged, full_fields);

  // Benchmark comparison over the configured subset.
  auto subset = derive_subset(corpus, config.subset);
  b.subset = subset.report;
  const Corpus& sub = subset.corpus;
  auto sub_fields = assign_fields(sub, inputs.mapping);
  b.mean_fields_per_publication = sub_fields.mean_fields_per_publication();
  b.unmapped_institutes = sub_fields.unmapped_institutes;

  std::vector<std::string> benchmarks =
      config.benchmarks.empty() ? corpus.benchmark_names() : config.benchmarks;
  benchmarks.erase(std::remove(benchmarks.begin(), benchmarks.end(),
                               config.database_name),
                   benchmarks.end());
  b.databases = {config.database_name};
  b.databases.insert(b.databases.end(), benchmarks.begin(), benchmarks.end());

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) index[corpus[i].record_id] = i;

  CoverageMatrix cov{b.databases, {}};
  CitationMatrix cit{b.databases, {}, {}};
  for (const auto& rec : sub) {
    const auto* pref = merged[index.at(rec.record_id)].preferred();
    std::vector<bool> flags{pref != nullptr};
    std::vector<std::optional<long long>> counts{
        pref ? pref->matched_citation_count : std::nullopt};
    for (const auto& db : benchmarks) {
      auto it = rec.benchmark.find(db);
      bool covered = it != rec.benchmark.end() && it->second.covered;
      flags.push_back(covered);
      counts.push_back(covered ? it->second.citation_count : std::nullopt);
    }
    cov.covered.push_back(flags);
    cit.covered.push_back(std::move(flags));
    cit.counts.push_back(std::move(counts));
  }

  LanguageClassifier languages(config.english_tags);
  for (auto dim : {Dimension::overall, Dimension::document_type,
                   Dimension::language_class, Dimension::access_status,
                   Dimension::year, Dimension::fos_major, Dimension::fos_sub})
    b.coverage.push_back(coverage_breakdown(sub, cov, dim, &sub_fields, languages));
  if (b.databases.size() >= 2) b.unique = unique_coverage(cov);
  b.citations = citation_summary(cit, sub_fields);
  b.correlations = correlation_report(cit, sub_fields);

  for (std::size_t a = 0; a < b.databases.size(); ++a) {
    for (std::size_t c = a + 1; c < b.databases.size(); ++c) {
      auto& pts = b.scatter[{b.databases[a], b.databases[c]}];
      for (std::size_t i = 0; i < sub.size(); ++i) {
        if (!cit.covered[i][a] || !cit.covered[i][c]) continue;
        if (!cit.counts[i][a] || !cit.counts[i][c]) continue;
        pts.emplace_back(sub[i].record_id, *cit.counts[i][a], *cit.counts[i][c]);
      }
    }
  }
  return b;
}

void write_reports(const ReportBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    TsvWriter w(dir / "match_log.tsv");
    w.row("record_id", "mode", "status", "returned", "entity_id", "match_type",
          "rank", "warnings");
    for (const auto& o : b.outcomes) {
      std::string warn;
      for (const auto& x : o.warnings) warn += (warn.empty() ? "" : "; ") + x;
      w.row(o.record_id, to_string(o.mode), o.status, o.returned,
            o.match ? o.match->entity_id : std::string(),
            o.match ? std::string(to_string(o.match->match_type)) : std::string(),
            o.match ? std::to_string(o.match->rank) : std::string(), warn);
    }
  }
  {
    TsvWriter w(dir / "retrieval_scores.tsv");
    w.comment("precision values are upper estimates: at most `count` items are returned per query");
    w.comment("combined returned = mean of the per-mode returned counts");
    w.row("mode", "matched", "corrected_matched", "returned", "recall",
          "precision", "precision_corrected", "f1_corrected");
    for (const auto& s : b.scores)
      w.row(s.label, s.matched, s.corrected_matched, s.returned, s.recall,
            s.precision, s.precision_corrected, s.f1_corrected);
  }
  if (b.reconciliation) {
    const auto& r = *b.reconciliation;
    TsvWriter w(dir / "mode_reconciliation.tsv");
    w.comment("records matched in both modes; percent of that count");
    w.row("match_type", "same_id_n", "same_id_pct", "different_id_n",
          "different_id_pct");
    const auto n = r.both();
    auto pct = [&](std::size_t k) { return n ? format_percent(k, n) : std::string(); };
    w.row("same", r.same_id_same_type, pct(r.same_id_same_type),
          r.diff_id_same_type, pct(r.diff_id_same_type));
    w.row("different", r.same_id_diff_type, pct(r.same_id_diff_type),
          r.diff_id_diff_type, pct(r.diff_id_diff_type));
    w.row("total", r.same_id(), pct(r.same_id()), r.different_id(),
          pct(r.different_id()));
    TsvWriter t(dir / "mode_overlap.tsv");
    t.row("status", "n");
    t.row("both", n);
    t.row("only_title_exact", r.only_exact);
    t.row("only_title_words", r.only_words);
    t.row("neither", r.neither);
    t.row("false_positive_candidates", r.different_id());
    t.row("duplicate_doi_candidates", r.duplicate_doi);
    for (auto mt : kMatchTypesByPriority)
      t.row("different_id_same_type_" + std::string(to_string(mt)),
            r.diff_id_same_type_by[static_cast<int>(mt)]);
  }
  {
    TsvWriter w(dir / "match_types.tsv");
    w.row("mode", "match_type", "n");
    for (const auto& [mode, types] : b.match_types)
      for (const auto& [t, n] : types) w.row(to_string(mode), to_string(t), n);
    for (const auto& [t, n] : b.merged_match_types) w.row("combined", to_string(t), n);
    TsvWriter r(dir / "match_ranks.tsv");
    r.row("mode", "rank", "n");
    for (const auto& [mode, ranks] : b.ranks)
      for (const auto& [rank, n] : ranks) r.row(to_string(mode), rank, n);
  }
  auto write_hist = [&](const std::string& name, const QualityHistogram& h) {
    TsvWriter w(dir / name);
    w.row("bucket", "n", "percent");
    auto names = bucket_names();
    auto counts = bucket_counts(h);
    for (std::size_t i = 0; i < names.size(); ++i)
      w.row(names[i], counts[i], format_percent(counts[i], h.total()));
    w.row("total", h.total(), h.total() ? std::string("100.0") : std::string());
  };
  write_hist("year_delta.tsv", b.year_delta);
  write_hist("author_delta.tsv", b.author_delta);
  {
    TsvWriter w(dir / "doi_availability.tsv");
    w.row("field", "n", "local_doi", "local_doi_pct", "matched",
          "matched_entity_doi", "matched_entity_doi_pct",
          "matched_local_doi", "local_doi_missing_in_entity",
          "local_doi_missing_in_entity_pct", "entity_doi_valid");
    for (const auto& r : b.doi)
      w.row(r.category, r.n, r.local_doi, format_percent(r.local_doi, r.n),
            r.matched, r.matched_entity_doi,
            format_percent(r.matched_entity_doi, r.matched), r.matched_local_doi,
            r.matched_local_doi_entity_missing,
            format_percent(r.matched_local_doi_entity_missing, r.matched_local_doi),
            r.matched_entity_doi_valid);
  }
  for (const auto& t : b.coverage) {
    TsvWriter w(dir / ("coverage_" + std::string(to_string(t.dimension)) + ".tsv"));
    std::vector<std::string> header{"category", "n"};
    for (const auto& db : t.databases) {
      header.push_back(db + "_covered");
      header.push_back(db + "_pct");
      header.push_back(db + "_fraction");
    }
    w.row(header);
    for (const auto& row : t.rows) {
      std::vector<std::string> cells{row.category, std::to_string(row.n)};
      for (std::size_t d = 0; d < t.databases.size(); ++d) {
        cells.push_back(std::to_string(row.covered[d]));
        cells.push_back(format_percent(row.covered[d], row.n));
        cells.push_back(raw(static_cast<double>(row.covered[d]) /
                            static_cast<double>(row.n)));
      }
      w.row(cells);
    }
  }
  {
    TsvWriter w(dir / "unique_coverage.tsv");
    w.row("database", "overall_n", "overall_pct", "unique_n", "unique_pct");
    std::size_t n = b.subset.retained;
    const CoverageTable* overall = nullptr;
    for (const auto& t : b.coverage)
      if (t.dimension == Dimension::overall) overall = &t;
    for (std::size_t d = 0; d < b.databases.size(); ++d) {
      std::size_t cov = overall && !overall->rows.empty() ? overall->rows[0].covered[d] : 0;
      std::size_t uniq = d < b.unique.size() ? b.unique[d] : 0;
      w.row(b.databases[d], cov, format_percent(cov, n), uniq,
            format_percent(uniq, n));
    }
  }
  {
    TsvWriter w(dir / "citations.tsv");
    w.comment("covered items without a citation count are excluded and counted");
    w.row("field", "database", "n", "excluded", "citations", "cpp", "uncited",
          "uncited_share");
    for (const auto& r : b.citations)
      w.row(r.field, r.database, r.covered, r.excluded, r.citations, r.cpp,
            r.uncited, r.uncited_share);
  }
  {
    TsvWriter w(dir / "correlations.tsv");
    w.comment("pearson on raw counts; spearman uses mean ranks for ties; kendall is tau-b");
    w.row("field", "a", "b", "n", "excluded", "pearson", "spearman", "kendall_tau_b",
          "note");
    auto opt = [](const std::optional<double>& v) { return v ? raw(*v) : std::string(); };
    for (const auto& c : b.correlations)
      w.row(c.field, c.a, c.b, c.n, c.excluded, opt(c.pearson), opt(c.spearman),
            opt(c.kendall), c.note);
  }
  for (const auto& [pair, pts] : b.scatter) {
    TsvWriter w(dir / ("scatter_" + pair.first + "_" + pair.second + ".tsv"));
    w.comment("plotting hint: points above 1050 citations may be clipped for display");
    w.row("record_id", pair.first, pair.second);
    for (const auto& [id, x, y] : pts) w.row(id, x, y);
  }
  {
    TsvWriter w(dir / "subset.tsv");
    w.row("quantity", "value");
    w.row("input", b.subset.input);
    w.row("retained", b.subset.retained);
    w.row("missing_year", b.subset.missing_year);
    w.row("outside_years", b.subset.outside_years);
    w.row("no_institute", b.subset.no_institute);
    w.row("excluded_type", b.subset.excluded_type);
    w.row("mean_fields_per_publication", b.mean_fields_per_publication);
    for (const auto& u : b.unmapped_institutes) w.row("unmapped_institute", u);
  }

  // Structured summary with raw fractions.
  nlohmann::ordered_json js;
  js["corpus_size"] = b.corpus_size;
  js["subset_size"] = b.subset.retained;
  for (const auto& s : b.scores)
    js["retrieval"][s.label] = {{"matched", s.matched},
                                {"corrected_matched", s.corrected_matched},
                                {"returned", s.returned},
                                {"recall", s.recall},
                                {"precision", s.precision},
                                {"precision_corrected", s.precision_corrected},
                                {"f1_corrected", s.f1_corrected}};
  if (b.reconciliation) {
    const auto& r = *b.reconciliation;
    js["reconciliation"] = {{"same_id_same_type", r.same_id_same_type},
                            {"different_id_same_type", r.diff_id_same_type},
                            {"same_id_different_type", r.same_id_diff_type},
                            {"different_id_different_type", r.diff_id_diff_type},
                            {"only_title_exact", r.only_exact},
                            {"only_title_words", r.only_words},
                            {"neither", r.neither},
                            {"duplicate_doi", r.duplicate_doi}};
  }
  auto hist_json = [](const QualityHistogram& h) {
    nlohmann::ordered_json j;
    auto names = bucket_names();
    auto counts = bucket_counts(h);
    for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = counts[i];
    return j;
  };
  js["year_delta"] = hist_json(b.year_delta);
  js["author_delta"] = hist_json(b.author_delta);
  for (std::size_t d = 0; d < b.databases.size(); ++d) {
    const auto& overall = b.coverage.front();
    std::size_t cov = overall.rows.empty() ? 0 : overall.rows[0].covered[d];
    js["coverage"][b.databases[d]] = {
        {"covered", cov},
        {"unique", d < b.unique.size() ? b.unique[d] : 0}};
  }
  std::ofstream(dir / "summary.json", std::ios::trunc) << js.dump(2) << '\n';

  // Human-readable summary with one-decimal percents.
  std::ofstream s(dir / "summary.txt", std::ios::trunc);
  s << "Retrieval (n = " << b.corpus_size << ")\n";
  s << "mode\tmatched\tcorrected\treturned\tR\tP\tP corrected\tF1 corrected\n";
  for (const auto& r : b.scores)
    s << r.label << '\t' << r.matched << '\t' << r.corrected_matched << '\t'
      << format_fixed(r.returned, r.returned == std::floor(r.returned) ? 0 : 1)
      << '\t' << format_fixed(r.recall, 3) << '\t' << format_fixed(r.precision, 3)
      << '\t' << format_fixed(r.precision_corrected, 3) << '\t'
      << format_fixed(r.f1_corrected, 3) << '\n';
  if (b.reconciliation) {
    const auto& r = *b.reconciliation;
    const auto n = r.both();
    auto pct = [&](std::size_t k) { return n ? format_percent(k, n) : std::string("-"); };
    s << "\nMode reconciliation (matched in both modes: " << n << ")\n";
    s << "match type\tsame id\t%\tdifferent id\t%\n";
    s << "same\t" << r.same_id_same_type << '\t' << pct(r.same_id_same_type) << '\t'
      << r.diff_id_same_type << '\t' << pct(r.diff_id_same_type) << '\n';
    s << "different\t" << r.same_id_diff_type << '\t' << pct(r.same_id_diff_type)
      << '\t' << r.diff_id_diff_type << '\t' << pct(r.diff_id_diff_type) << '\n';
    s << "total\t" << r.same_id() << '\t' << pct(r.same_id()) << '\t'
      << r.different_id() << '\t' << pct(r.different_id()) << '\n';
  }
  auto hist_line = [&](const char* title, const QualityHistogram& h) {
    s << '\n' << title << " (n = " << h.total() << ")\n";
    auto names = bucket_names();
    auto counts = bucket_counts(h);
    for (std::size_t i = 0; i < names.size(); ++i)
      s << names[i] << '\t' << counts[i] << '\t'
        << (h.total() ? format_percent(counts[i], h.total()) : "-") << '\n';
  };
  hist_line("Publication year delta", b.year_delta);
  hist_line("Author count delta (journal articles)", b.author_delta);
  s << "\nDOI availability\nfield\tn\t% DOI\tmatched\t% DOI\n";
  for (const auto& r : b.doi)
    s << r.category << '\t' << r.n << '\t' << format_percent(r.local_doi, r.n)
      << '\t' << r.matched << '\t'
      << (r.matched ? format_percent(r.matched_entity_doi, r.matched) : "-") << '\n';
  s << "\nCoverage of subset (n = " << b.subset.retained << ")\n";
  for (std::size_t d = 0; d < b.databases.size(); ++d) {
    const auto& overall = b.coverage.front();
    std::size_t cov = overall.rows.empty() ? 0 : overall.rows[0].covered[d];
    s << b.databases[d] << "\toverall\t" << cov << '\t'
      << (b.subset.retained ? format_percent(cov, b.subset.retained) : "-");
    if (d < b.unique.size())
      s << "\tunique\t" << b.unique[d] << '\t'
        << (b.subset.retained ? format_percent(b.unique[d], b.subset.retained) : "-");
    s << '\n';
  }
  s << "\nRank correlations\nfield\tpair\tn\trho\ttau\n";
  for (const auto& c : b.correlations) {
    s << c.field << '\t' << c.a << '/' << c.b << '\t' << c.n << '\t'
      << (c.spearman ? format_fixed(*c.spearman, 2) : "-") << '\t'
      << (c.kendall ? format_fixed(*c.kendall, 2) : "-") << '\n';
  }
}

namespace {

std::unique_ptr<Transport> make_transport(const RunConfig& config) {
  if (config.transport.kind == TransportConfig::Kind::fixture)
    return std::make_unique<FixtureTransport>(config.transport.fixture_dir);
  const char* key = std::getenv(config.transport.key_env.c_str());
  if (!key || !*key)
    throw ConfigError({"transport.key_env: environment variable " +
                       config.transport.key_env + " is not set"});
  return std::make_unique<HttpTransport>(config.transport.endpoint, key);
}

void write_run_report(const BatchReport& rep, const std::filesystem::path& path) {
  TsvWriter w(path);
  w.row("record_id", "mode", "status", "attempts", "message");
  for (const auto& p : rep.problems)
    w.row(p.record_id, to_string(p.mode), to_string(p.status), p.attempts,
          p.message);
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config,
                            const PipelineOptions& options) {
  PipelineResult res;
  try {
    auto inputs = load_inputs(config, options.id_filter);
    const auto out = config.output_dir;
    const auto archive = out / "archive";
    const auto checkpoint_path = out / "checkpoint.log";
    std::filesystem::create_directories(out);
    if (!options.resume) {
      std::filesystem::remove_all(archive);
      std::filesystem::remove(checkpoint_path);
    }

    std::unique_ptr<Transport> owned;
    Transport* transport = options.transport;
    if (!transport) {
      owned = make_transport(config);
      transport = owned.get();
    }

    Checkpoint checkpoint(checkpoint_path, options.resume);
    BatchOptions bo;
    bo.modes = config.modes;
    bo.request_template = config.request;
    bo.parallelism = config.parallelism;
    bo.retry = config.retry;
    bo.requests_per_second = config.requests_per_second;
    bo.archive_dir = archive;
    res.batch = run_batch(inputs.corpus, inputs.stopwords, *transport, checkpoint, bo);
    write_run_report(res.batch, out / "run_report.tsv");

    if (res.batch.fatal) {
      res.exit_code = kExitTransportFatal;
      res.message = "stopped: " + res.batch.fatal_message +
                    " (rerun with --resume to continue)";
      return res;
    }
    res.bundle = build_reports(config, inputs, archive);
    write_reports(*res.bundle, out / "reports");
    res.message = "processed " + std::to_string(res.batch.processed) +
                  " requests, " + std::to_string(res.batch.problems.size()) +
                  " problems";
  } catch (const ConfigError& e) {
    res.exit_code = kExitConfig;
    res.message = e.what();
  } catch (const std::exception& e) {
    res.exit_code = kExitInternal;
    res.message = e.what();
  }
  return res;
}

PipelineResult report_from_archive(
    const RunConfig& config, const std::optional<std::set<std::string>>& id_filter) {
  PipelineResult res;
  try {
    auto inputs = load_inputs(config, id_filter);
    const auto archive = config.output_dir / "archive";
    if (!std::filesystem::is_directory(archive))
      throw Error("no archive at " + archive.string());
    res.bundle = build_reports(config, inputs, archive);
    write_reports(*res.bundle, config.output_dir / "reports");
    res.message = "reports written to " + (config.output_dir / "reports").string();
  } catch (const std::exception& e) {
    res.exit_code = kExitInternal;
    res.message = e.what();
  }
  return res;
}

}  // namespace covaudit
