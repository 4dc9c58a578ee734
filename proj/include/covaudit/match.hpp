#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covaudit/corpus.hpp"
#include "covaudit/evaluate.hpp"
#include "covaudit/query.hpp"

namespace covaudit {

/// Declared in priority order: doi is the most reliable rule, bib the least.
enum class MatchType { doi, title, bib };

inline constexpr MatchType kMatchTypesByPriority[] = {
    MatchType::doi, MatchType::title, MatchType::bib};

std::string_view to_string(MatchType t) noexcept;

/// True when `a` is a more reliable match type than `b`.
constexpr bool outranks(MatchType a, MatchType b) noexcept {
  return static_cast<int>(a) < static_cast<int>(b);
}

struct MatchSet {
  bool doi = false;
  bool title = false;
  bool bib = false;

  bool empty() const noexcept { return !doi && !title && !bib; }
  bool contains(MatchType t) const noexcept;
  /// Highest-priority member.
  std::optional<MatchType> best() const noexcept;
  bool operator==(const MatchSet&) const = default;
};

/// Trimmed, ASCII-lowercased DOI; DOIs are case-insensitive over ASCII.
std::string normalize_doi(std::string_view doi);

/// Which of the three rules link `record` and `entity`:
///   doi   both DOIs present and equal after normalize_doi;
///   title both titles normalize (normalize_exact_title) to the same string;
///   bib   journal, volume, issue and first page present on both sides and
///         equal after trimming and case folding.
MatchSet match_entity(const PublicationRecord& record,
                      const ReturnedEntity& entity);

struct MatchResult {
  std::string record_id;
  std::string entity_id;
  MatchType match_type = MatchType::doi;
  int rank = 0;
  QueryMode mode = QueryMode::title_exact;
  std::optional<int> matched_year;
  std::size_t matched_author_count = 0;
  std::optional<std::string> matched_doi;
  std::optional<long long> matched_citation_count;
};

/// Picks the entity with the highest-priority match type; among entities
/// achieving it the lowest rank wins.
std::optional<MatchResult> select_best(const PublicationRecord& record,
                                       const ResultSet& results,
                                       QueryMode mode);

enum class CrossModeStatus {
  both_same_id,
  both_different_id,
  only_exact,
  only_words,
  neither,
};

std::string_view to_string(CrossModeStatus s) noexcept;

struct CrossModeVerdict {
  std::string record_id;
  CrossModeStatus status = CrossModeStatus::neither;
  std::optional<MatchType> exact_type;
  std::optional<MatchType> words_type;
  std::optional<std::string> exact_entity;
  std::optional<std::string> words_entity;

  /// Matched in both modes with different entity ids.
  bool false_positive_candidate() const noexcept {
    return status == CrossModeStatus::both_different_id;
  }
  /// Both modes matched by doi yet to different entities: the database
  /// most likely holds duplicate records.
  bool duplicate_candidate() const noexcept;
  /// Both modes matched and by the same match type.
  bool same_match_type() const noexcept;
};

/// Throws std::logic_error when a present result belongs to another record.
CrossModeVerdict reconcile_modes(std::string_view record_id,
                                 const std::optional<MatchResult>& exact,
                                 const std::optional<MatchResult>& words);

/// Two-by-two split of records matched in both modes (entity id same or
/// different x match type same or different), plus single-mode tallies.
struct ReconciliationTable {
  std::size_t same_id_same_type = 0;
  std::size_t diff_id_same_type = 0;
  std::size_t same_id_diff_type = 0;
  std::size_t diff_id_diff_type = 0;
  std::size_t only_exact = 0;
  std::size_t only_words = 0;
  std::size_t neither = 0;
  std::size_t duplicate_doi = 0;
  /// diff_id_same_type split by the shared match type.
  std::size_t diff_id_same_type_by[3] = {0, 0, 0};

  std::size_t both() const noexcept {
    return same_id_same_type + diff_id_same_type + same_id_diff_type +
           diff_id_diff_type;
  }
  std::size_t different_id() const noexcept {
    return diff_id_same_type + diff_id_diff_type;
  }
  std::size_t same_id() const noexcept {
    return same_id_same_type + same_id_diff_type;
  }
};

ReconciliationTable tabulate(const std::vector<CrossModeVerdict>& verdicts);

/// Union of the per-mode results for one record.
struct MergedMatch {
  std::string record_id;
  std::optional<MatchResult> exact;
  std::optional<MatchResult> words;

  bool matched() const noexcept { return exact || words; }
  /// Result used for metadata comparisons: the more reliable match type,
  /// title_exact on a tie. Null when unmatched.
  const MatchResult* preferred() const noexcept;
};

MergedMatch merge_mode_results(std::string_view record_id,
                               std::optional<MatchResult> exact,
                               std::optional<MatchResult> words);

}  // namespace covaudit
