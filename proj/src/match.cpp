#include "covaudit/match.hpp"

#include <unicode/unistr.h>

#include <stdexcept>

#include "covaudit/error.hpp"
#include "strutil.hpp"

namespace covaudit {

namespace {

std::string fold(std::string_view s) {
  auto t = strutil::trim(s);
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(t.data(), static_cast<int32_t>(t.size())));
  std::string out;
  u.foldCase().toUTF8String(out);
  return out;
}

bool same_text(const std::optional<std::string>& a,
               const std::optional<std::string>& b) {
  if (!a || !b) return false;
  auto fa = fold(*a);
  return !fa.empty() && fa == fold(*b);
}

std::optional<std::string> normalized_title(std::string_view t) {
  try {
    return normalize_exact_title(t);
  } catch (const EmptyTitleError&) {
    return std::nullopt;
  }
}

}  // namespace

std::string_view to_string(MatchType t) noexcept {
  switch (t) {
    case MatchType::doi: return "doi";
    case MatchType::title: return "title";
    case MatchType::bib: return "bib";
  }
  return "bib";
}

bool MatchSet::contains(MatchType t) const noexcept {
  switch (t) {
    case MatchType::doi: return doi;
    case MatchType::title: return title;
    case MatchType::bib: return bib;
  }
  return false;
}

std::optional<MatchType> MatchSet::best() const noexcept {
  for (auto t : kMatchTypesByPriority)
    if (contains(t)) return t;
  return std::nullopt;
}

std::string normalize_doi(std::string_view doi) {
  return strutil::ascii_lower(strutil::trim(doi));
}

MatchSet match_entity(const PublicationRecord& record,
                      const ReturnedEntity& entity) {
  MatchSet m;
  if (record.doi && entity.doi) {
    auto a = normalize_doi(*record.doi);
    m.doi = !a.empty() && a == normalize_doi(*entity.doi);
  }
  if (!entity.title.empty()) {
    auto a = normalized_title(record.title);
    m.title = a && a == normalized_title(entity.title);
  }
  m.bib = same_text(record.journal_title, entity.journal_title()) &&
          same_text(record.volume, entity.volume) &&
          same_text(record.issue, entity.issue) &&
          same_text(record.first_page, entity.first_page);
  return m;
}

std::optional<MatchResult> select_best(const PublicationRecord& record,
                                       const ResultSet& results,
                                       QueryMode mode) {
  const ReturnedEntity* chosen = nullptr;
  MatchType chosen_type = MatchType::bib;
  for (const auto& e : results.entities) {
    auto best = match_entity(record, e).best();
    if (!best) continue;
    if (!chosen || outranks(*best, chosen_type) ||
        (*best == chosen_type && e.rank < chosen->rank)) {
      chosen = &e;
      chosen_type = *best;
    }
  }
  if (!chosen) return std::nullopt;
  MatchResult r;
  r.record_id = record.record_id;
  r.entity_id = chosen->entity_id;
  r.match_type = chosen_type;
  r.rank = chosen->rank;
  r.mode = mode;
  r.matched_year = chosen->year;
  r.matched_author_count = chosen->author_count();
  r.matched_doi = chosen->doi;
  r.matched_citation_count = chosen->citation_count;
  return r;
}

std::string_view to_string(CrossModeStatus s) noexcept {
  switch (s) {
    case CrossModeStatus::both_same_id: return "both_same_id";
    case CrossModeStatus::both_different_id: return "both_different_id";
    case CrossModeStatus::only_exact: return "only_exact";
    case CrossModeStatus::only_words: return "only_words";
    case CrossModeStatus::neither: return "neither";
  }
  return "neither";
}

bool CrossModeVerdict::duplicate_candidate() const noexcept {
  return status == CrossModeStatus::both_different_id &&
         exact_type == MatchType::doi && words_type == MatchType::doi;
}

bool CrossModeVerdict::same_match_type() const noexcept {
  return exact_type && words_type && *exact_type == *words_type;
}

CrossModeVerdict reconcile_modes(std::string_view record_id,
                                 const std::optional<MatchResult>& exact,
                                 const std::optional<MatchResult>& words) {
  if ((exact && exact->record_id != record_id) ||
      (words && words->record_id != record_id))
    throw std::logic_error("reconcile_modes: result for another record");
  CrossModeVerdict v;
  v.record_id = std::string(record_id);
  if (exact) {
    v.exact_type = exact->match_type;
    v.exact_entity = exact->entity_id;
  }
  if (words) {
    v.words_type = words->match_type;
    v.words_entity = words->entity_id;
  }
  if (exact && words)
    v.status = exact->entity_id == words->entity_id
                   ? CrossModeStatus::both_same_id
                   : CrossModeStatus::both_different_id;
  else if (exact)
    v.status = CrossModeStatus::only_exact;
  else if (words)
    v.status = CrossModeStatus::only_words;
  else
    v.status = CrossModeStatus::neither;
  return v;
}

ReconciliationTable tabulate(const std::vector<CrossModeVerdict>& verdicts) {
  ReconciliationTable t;
  for (const auto& v : verdicts) {
    switch (v.status) {
      case CrossModeStatus::both_same_id:
        (v.same_match_type() ? t.same_id_same_type : t.same_id_diff_type)++;
        break;
      case CrossModeStatus::both_different_id:
        if (v.same_match_type()) {
          ++t.diff_id_same_type;
          ++t.diff_id_same_type_by[static_cast<int>(*v.exact_type)];
        } else {
          ++t.diff_id_diff_type;
        }
        if (v.duplicate_candidate()) ++t.duplicate_doi;
        break;
      case CrossModeStatus::only_exact: ++t.only_exact; break;
      case CrossModeStatus::only_words: ++t.only_words; break;
      case CrossModeStatus::neither: ++t.neither; break;
    }
  }
  return t;
}

const MatchResult* MergedMatch::preferred() const noexcept {
  if (exact && words)
    return outranks(words->match_type, exact->match_type) ? &*words : &*exact;
  if (exact) return &*exact;
  if (words) return &*words;
  return nullptr;
}

MergedMatch merge_mode_results(std::string_view record_id,
                               std::optional<MatchResult> exact,
                               std::optional<MatchResult> words) {
  return {std::string(record_id), std::move(exact), std::move(words)};
}

}  // namespace covaudit
