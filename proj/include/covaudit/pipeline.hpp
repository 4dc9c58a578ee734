#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "covaudit/batch.hpp"
#include "covaudit/citation.hpp"
#include "covaudit/config.hpp"
#include "covaudit/corpus.hpp"
#include "covaudit/match.hpp"
#include "covaudit/metrics.hpp"

namespace covaudit {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitTransportFatal = 3,
  kExitInternal = 4,
};

/// Outcome of one (record, mode) pair as reconstructed from the archive.
struct RecordOutcome {
  std::string record_id;
  QueryMode mode = QueryMode::title_exact;
  /// ok | no_query | malformed_payload | missing
  std::string status;
  std::size_t returned = 0;
  std::optional<MatchResult> match;
  std::vector<std::string> warnings;
};

/// Everything the report files are written from.
struct ReportBundle {
  std::vector<QueryMode> modes;
  std::size_t corpus_size = 0;
  SubsetReport subset;
  double mean_fields_per_publication = 0;  // over the subset
  std::vector<std::string> unmapped_institutes;

  /// Sorted by (record_id, mode).
  std::vector<RecordOutcome> outcomes;
  std::vector<RetrievalScore> scores;
  std::optional<ReconciliationTable> reconciliation;
  /// matched counts per mode and match type, and per mode and rank
  std::map<QueryMode, std::map<MatchType, std::size_t>> match_types;
  std::map<QueryMode, std::map<int, std::size_t>> ranks;
  std::map<MatchType, std::size_t> merged_match_types;

  QualityHistogram year_delta;
  QualityHistogram author_delta;
  std::vector<DoiAvailabilityRow> doi;

  std::vector<CoverageTable> coverage;  // over the subset
  std::vector<std::string> databases;   // queried database first
  std::vector<std::size_t> unique;
  std::vector<CitationSummaryRow> citations;
  std::vector<CorrelationCell> correlations;
  /// (record_id, a, b) points per database pair, for scatter plots.
  std::map<std::pair<std::string, std::string>,
           std::vector<std::tuple<std::string, long long, long long>>>
      scatter;
};

/// Inputs shared by `run` and `report`.
struct PipelineInputs {
  Corpus corpus;  // after the id filter
  FieldMapping mapping;
  StopwordList stopwords;
};

PipelineInputs load_inputs(const RunConfig& config,
                           const std::optional<std::set<std::string>>& id_filter);

/// Recomputes every report from archived raw responses; no querying.
ReportBundle build_reports(const RunConfig& config, const PipelineInputs& inputs,
                           const std::filesystem::path& archive_dir);

/// Writes the bundle as TSV tables plus summary.txt and summary.json into
/// `dir` (created if needed). Output is a pure function of the bundle.
void write_reports(const ReportBundle& bundle, const std::filesystem::path& dir);

struct PipelineOptions {
  std::optional<std::set<std::string>> id_filter;
  bool resume = false;
  /// Replaces the transport described by the config (tests).
  Transport* transport = nullptr;
};

struct PipelineResult {
  int exit_code = kExitOk;
  std::string message;
  BatchReport batch;
  std::optional<ReportBundle> bundle;
};

/// Output layout under config.output_dir:
///   archive/<mode>/<record>.json  raw responses
///   checkpoint.log                completed (mode, record) pairs
///   run_report.tsv                per-record problems of the last run
///   reports/                      the report bundle
/// Without resume, an existing archive and checkpoint are discarded first.
/// On a fatal transport error no reports are written and the checkpoint is
/// kept for a later resume.
PipelineResult run_pipeline(const RunConfig& config,
                            const PipelineOptions& options = {});

/// `report` subcommand: rebuild reports from output_dir/archive.
PipelineResult report_from_archive(
    const RunConfig& config,
    const std::optional<std::set<std::string>>& id_filter = std::nullopt);

/// Reads one id per line; blank lines and '#' comments skipped.
std::set<std::string> load_id_list(const std::filesystem::path& path);

}  // namespace covaudit
