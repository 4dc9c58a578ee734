#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "covaudit/batch.hpp"
#include "covaudit/corpus.hpp"
#include "covaudit/evaluate.hpp"
#include "covaudit/query.hpp"
#include "covaudit/transport.hpp"

namespace covaudit {

struct TransportConfig {
  enum class Kind { fixture, http };
  Kind kind = Kind::fixture;
  std::filesystem::path fixture_dir;
  HttpEndpoint endpoint;
  /// Environment variable holding the API key. Keys never come from the
  /// command line or the config file itself.
  std::string key_env = "AK_API_KEY";
};

struct RunConfig {
  std::filesystem::path corpus;
  CorpusFormat corpus_format = CorpusFormat::tsv;
  std::filesystem::path field_mapping;
  std::filesystem::path stopwords;
  TransportConfig transport;
  EvaluateRequest request;  // expr unused
  std::vector<QueryMode> modes = {QueryMode::title_exact,
                                  QueryMode::title_words};
  std::size_t parallelism = 1;
  std::filesystem::path output_dir;
  std::set<std::string> english_tags = {"en", "eng", "english"};
  /// Benchmark databases to report; empty means every covered_<db> column.
  std::vector<std::string> benchmarks;
  /// Name of the queried database in coverage and citation tables.
  std::string database_name = "MA";
  CorpusFilter subset;
  RetryPolicy retry;
  double requests_per_second = 0.0;
};

/// Parses a JSON config document. Relative paths resolve against
/// `base_dir`. Every problem is collected, each prefixed with its field
/// path; throws ConfigError listing all of them.
RunConfig parse_config(std::string_view json_text,
                       const std::filesystem::path& base_dir,
                       bool check_paths = true);

/// Reads and parses the config file at `path`.
RunConfig validate_config(const std::filesystem::path& path);

}  // namespace covaudit
