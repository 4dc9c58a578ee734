#include "covaudit/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "covaudit/error.hpp"
#include "strutil.hpp"

namespace covaudit {

namespace {

void write_atomically(const std::filesystem::path& path, std::string_view body) {
  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

Checkpoint::Checkpoint(const std::filesystem::path& path, bool resume) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  if (resume) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      auto tab = line.find('\t');
      if (tab == std::string::npos) continue;  // torn last line
      auto mode = parse_query_mode(line.substr(0, tab));
      if (!mode) continue;
      auto id = strutil::tsv_unescape(std::string_view(line).substr(tab + 1));
      done_[*mode].insert(id);
      last_[*mode] = id;
    }
  }
  log_.open(path, resume ? std::ios::app : std::ios::trunc);
  if (!log_) throw Error("cannot open checkpoint " + path.string());
}

bool Checkpoint::is_done(QueryMode mode, std::string_view record_id) const {
  std::lock_guard lock(mu_);
  auto it = done_.find(mode);
  return it != done_.end() && it->second.count(record_id) > 0;
}

void Checkpoint::mark_done(QueryMode mode, std::string_view record_id) {
  std::lock_guard lock(mu_);
  if (!done_[mode].emplace(record_id).second) return;
  last_[mode] = std::string(record_id);
  if (log_.is_open()) {
    log_ << to_string(mode) << '\t' << strutil::tsv_escape(record_id) << '\n';
    log_.flush();
  }
}

std::size_t Checkpoint::completed(QueryMode mode) const {
  std::lock_guard lock(mu_);
  auto it = done_.find(mode);
  return it == done_.end() ? 0 : it->second.size();
}

std::optional<std::string> Checkpoint::last_completed(QueryMode mode) const {
  std::lock_guard lock(mu_);
  auto it = last_.find(mode);
  if (it == last_.end()) return std::nullopt;
  return it->second;
}

std::chrono::milliseconds RetryPolicy::delay_after(int attempt) const {
  double d = static_cast<double>(initial_delay.count()) *
             std::pow(multiplier, std::max(0, attempt - 1));
  d = std::min(d, static_cast<double>(max_delay.count()));
  return std::chrono::milliseconds(static_cast<long long>(d));
}

RateLimiter::RateLimiter(double requests_per_second, double burst)
    : rate_(requests_per_second),
      burst_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_(Clock::now()) {}

void RateLimiter::acquire() {
  if (rate_ <= 0.0) return;
  std::unique_lock lock(mu_);
  for (;;) {
    auto now = Clock::now();
    std::chrono::duration<double> dt = now - last_;
    last_ = now;
    tokens_ = std::min(burst_, tokens_ + dt.count() * rate_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    // Sleeping under the lock keeps waiters in FIFO-ish order.
    std::this_thread::sleep_for(wait);
  }
}

std::string_view to_string(ItemStatus s) noexcept {
  switch (s) {
    case ItemStatus::ok: return "ok";
    case ItemStatus::no_query: return "no_query";
    case ItemStatus::malformed_payload: return "malformed_payload";
    case ItemStatus::transport_error: return "transport_error";
  }
  return "ok";
}

BatchReport run_batch(const Corpus& corpus, const StopwordList& stopwords,
                      Transport& transport, Checkpoint& checkpoint,
                      const BatchOptions& options,
                      const std::function<void(const BatchItem&)>& on_result) {
  options.request_template.validate();
  BatchReport report;

  struct Work {
    const PublicationRecord* record;
    QueryMode mode;
  };
  std::vector<Work> work;
  for (auto mode : options.modes) {
    for (const auto& r : corpus) {
      if (options.id_filter && !options.id_filter->count(r.record_id)) continue;
      ++report.selected;
      if (checkpoint.is_done(mode, r.record_id)) {
        ++report.skipped_done;
        continue;
      }
      work.push_back({&r, mode});
    }
  }

  RateLimiter limiter(options.requests_per_second);
  auto sleep = options.sleep ? options.sleep : [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex emit_mu;

  auto emit = [&](BatchItem item) {
    std::lock_guard lock(emit_mu);
    ++report.processed;
    if (item.status == ItemStatus::ok) ++report.succeeded;
    if (on_result) on_result(item);
    if (item.status != ItemStatus::ok) {
      item.result.reset();
      report.problems.push_back(std::move(item));
    }
  };

  auto process = [&](const Work& w) {
    BatchItem item;
    item.record_id = w.record->record_id;
    item.mode = w.mode;

    EvaluateRequest request = options.request_template;
    try {
      request.expr = build_query(w.mode, w.record->title, stopwords).text;
    } catch (const EmptyTitleError& e) {
      item.status = ItemStatus::no_query;
      item.message = e.what();
    } catch (const EmptyTokenListError& e) {
      item.status = ItemStatus::no_query;
      item.message = e.what();
    }
    if (item.status == ItemStatus::no_query) {
      checkpoint.mark_done(w.mode, item.record_id);
      emit(std::move(item));
      return;
    }

    std::string body;
    for (int attempt = 1;; ++attempt) {
      item.attempts = attempt;
      try {
        limiter.acquire();
        body = transport.fetch(request, item.record_id, w.mode);
        break;
      } catch (const FatalTransportError& e) {
        std::lock_guard lock(emit_mu);
        if (!report.fatal) {
          report.fatal = true;
          report.fatal_message = e.what();
        }
        stop = true;
        return;
      } catch (const TransportError& e) {
        if (e.retryable() && attempt < options.retry.max_attempts) {
          sleep(options.retry.delay_after(attempt));
          continue;
        }
        item.status = ItemStatus::transport_error;
        item.message = e.what();
        emit(std::move(item));
        return;
      }
    }

    try {
      item.result = parse_evaluate_response(body, request);
      for (const auto& warn : item.result->warnings) {
        if (!item.message.empty()) item.message += "; ";
        item.message += warn;
      }
    } catch (const MalformedPayloadError& e) {
      item.status = ItemStatus::malformed_payload;
      item.message = e.what();
    }
    if (!options.archive_dir.empty())
      write_atomically(response_path(options.archive_dir, item.record_id, w.mode),
                       body);
    checkpoint.mark_done(w.mode, item.record_id);
    emit(std::move(item));
  };

  auto worker = [&] {
    while (!stop) {
      std::size_t i = next++;
      if (i >= work.size()) break;
      try {
        process(work[i]);
      } catch (const std::exception& e) {
        std::lock_guard lock(emit_mu);
        if (!report.fatal) {
          report.fatal = true;
          report.fatal_message = e.what();
        }
        stop = true;
      }
    }
  };

  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min(options.parallelism, work.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  std::sort(report.problems.begin(), report.problems.end(),
            [](const BatchItem& a, const BatchItem& b) {
              return std::tie(a.record_id, a.mode) < std::tie(b.record_id, b.mode);
            });
  return report;
}

}  // namespace covaudit
