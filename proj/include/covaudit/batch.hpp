#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "covaudit/corpus.hpp"
#include "covaudit/evaluate.hpp"
#include "covaudit/query.hpp"
#include "covaudit/transport.hpp"

namespace covaudit {

/// Append-only progress log of completed (mode, record_id) pairs.
///
/// Each completion is one "<mode>\t<record_id>" line, flushed before
/// mark_done returns. Opening without resume truncates the log.
/// mark_done is safe to call from several threads.
class Checkpoint {
 public:
  /// In-memory checkpoint, nothing persisted.
  Checkpoint() = default;
  Checkpoint(const std::filesystem::path& path, bool resume);

  bool is_done(QueryMode mode, std::string_view record_id) const;
  void mark_done(QueryMode mode, std::string_view record_id);

  std::size_t completed(QueryMode mode) const;
  /// Most recently completed record for `mode`.
  std::optional<std::string> last_completed(QueryMode mode) const;

 private:
  mutable std::mutex mu_;
  std::ofstream log_;
  std::map<QueryMode, std::set<std::string, std::less<>>> done_;
  std::map<QueryMode, std::string> last_;
};

/// Bounded exponential backoff for retryable transport failures.
struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{8000};

  /// Delay before attempt `attempt + 1` (attempt is 1-based).
  std::chrono::milliseconds delay_after(int attempt) const;
};

/// Token bucket. A rate <= 0 disables limiting.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second = 0.0, double burst = 1.0);

  /// Blocks until a token is available.
  void acquire();

 private:
  using Clock = std::chrono::steady_clock;
  std::mutex mu_;
  double rate_;
  double burst_;
  double tokens_;
  Clock::time_point last_;
};

struct BatchOptions {
  std::vector<QueryMode> modes = {QueryMode::title_exact,
                                  QueryMode::title_words};
  /// Request parameters; expr is filled per record.
  EvaluateRequest request_template;
  std::size_t parallelism = 1;
  /// When set, only these record ids are processed.
  std::optional<std::set<std::string>> id_filter;
  RetryPolicy retry;
  double requests_per_second = 0.0;
  /// Raw bodies are written here (layout of response_path) before the
  /// checkpoint records completion. Empty disables archiving.
  std::filesystem::path archive_dir;
  /// Sleep hook used for backoff; tests substitute a recorder.
  std::function<void(std::chrono::milliseconds)> sleep;
};

enum class ItemStatus {
  ok,
  no_query,           // title yields no query (empty title / no words)
  malformed_payload,  // body archived, record skipped
  transport_error,    // retries exhausted or non-retryable; not checkpointed
};

std::string_view to_string(ItemStatus s) noexcept;

struct BatchItem {
  std::string record_id;
  QueryMode mode = QueryMode::title_exact;
  ItemStatus status = ItemStatus::ok;
  std::optional<ResultSet> result;
  std::string message;
  int attempts = 0;
};

struct BatchReport {
  std::size_t selected = 0;       // (record, mode) pairs after id filter
  std::size_t skipped_done = 0;   // already in the checkpoint
  std::size_t processed = 0;
  std::size_t succeeded = 0;
  /// Every non-ok item, sorted by (record_id, mode).
  std::vector<BatchItem> problems;
  bool fatal = false;
  std::string fatal_message;
};

/// Queries every selected (record, mode) pair not yet in the checkpoint.
/// `on_result` receives items in completion order and is never called
/// concurrently. A FatalTransportError stops dispatch; in-flight requests
/// finish and the checkpoint stays resumable.
BatchReport run_batch(const Corpus& corpus, const StopwordList& stopwords,
                      Transport& transport, Checkpoint& checkpoint,
                      const BatchOptions& options,
                      const std::function<void(const BatchItem&)>& on_result = {});

}  // namespace covaudit
