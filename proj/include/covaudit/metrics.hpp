#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "covaudit/corpus.hpp"
#include "covaudit/match.hpp"

namespace covaudit {

/// matched / corpus_size. Throws std::domain_error on an empty corpus or
/// matched > corpus_size.
double recall(std::size_t matched, std::size_t corpus_size);

/// matched / returned; an upper estimate when results are capped per query.
/// 0/0 is 0. Throws std::domain_error when matched > returned.
double precision(double matched, double returned);

/// Harmonic mean; 0 when p + r == 0.
double f1(double precision, double recall);

struct RetrievalScore {
  std::string label;
  std::size_t matched = 0;
  std::size_t corrected_matched = 0;
  /// Returned entities. For the combined row this is the mean of the two
  /// modes and may be fractional.
  double returned = 0;
  double recall = 0;
  double precision = 0;
  double precision_corrected = 0;
  double f1_corrected = 0;
};

RetrievalScore retrieval_score(std::string label, std::size_t matched,
                               std::size_t corrected_matched, double returned,
                               std::size_t corpus_size);

/// round_half_up(1000 * num / den) computed in integers; 566 means 56.6%.
long long percent_tenths(std::size_t num, std::size_t den);
/// One-decimal percent, half-up: "56.6". Empty denominator gives "".
std::string format_percent(std::size_t num, std::size_t den);
/// Half-up rounding of a real to `decimals` places, as text.
std::string format_fixed(double value, int decimals);

enum class Dimension {
  overall,
  document_type,
  language_class,
  access_status,
  year,
  fos_major,
  fos_sub,
};

std::string_view to_string(Dimension d) noexcept;
std::optional<Dimension> parse_dimension(std::string_view s) noexcept;

/// English / Non-English / Missing by case-insensitive tag lookup.
class LanguageClassifier {
 public:
  explicit LanguageClassifier(std::set<std::string> english_tags = {
                                  "en", "eng", "english"});
  std::string classify(const std::optional<std::string>& tag) const;

 private:
  std::set<std::string> english_;
};

/// Per-record coverage flags, index-aligned with a corpus.
struct CoverageMatrix {
  std::vector<std::string> databases;
  std::vector<std::vector<bool>> covered;  // [record][database]

  std::size_t index_of(std::string_view db) const;  // throws if absent
};

struct CoverageRow {
  std::string category;
  std::size_t n = 0;
  std::vector<std::size_t> covered;  // per database
};

struct CoverageTable {
  Dimension dimension = Dimension::overall;
  std::vector<std::string> databases;
  std::vector<CoverageRow> rows;
};

/// Group-by over `dimension`. Records in several FOS fields count once in
/// each; records with no field fall in "Other". Empty categories are
/// omitted. `fields` is required for the FOS dimensions.
CoverageTable coverage_breakdown(const Corpus& corpus,
                                 const CoverageMatrix& matrix,
                                 Dimension dimension,
                                 const FieldAssignedCorpus* fields = nullptr,
                                 const LanguageClassifier& languages = LanguageClassifier());

/// Records covered by exactly one database, per database. Needs >= 2.
std::vector<std::size_t> unique_coverage(const CoverageMatrix& matrix);

struct QualityHistogram {
  std::size_t exact = 0;
  std::size_t plus_one = 0;
  std::size_t minus_one = 0;
  std::size_t greater_plus_one = 0;
  std::size_t less_minus_one = 0;

  void add(long long delta);
  std::size_t total() const noexcept {
    return exact + plus_one + minus_one + greater_plus_one + less_minus_one;
  }
};

/// Entity year minus local year over matched records with both years.
/// `merged` is index-aligned with `corpus`.
QualityHistogram year_delta_histogram(const Corpus& corpus,
                                      const std::vector<MergedMatch>& merged);

/// Entity author count minus local author count over matched journal
/// articles that carry an author count on both sides.
QualityHistogram author_delta_histogram(const Corpus& corpus,
                                        const std::vector<MergedMatch>& merged);

struct DoiAvailabilityRow {
  std::string category;
  std::size_t n = 0;
  std::size_t local_doi = 0;
  std::size_t matched = 0;
  std::size_t matched_entity_doi = 0;
  std::size_t matched_local_doi = 0;
  /// Matched with a local DOI but none on the entity.
  std::size_t matched_local_doi_entity_missing = 0;
  /// Entity DOIs beginning with "10".
  std::size_t matched_entity_doi_valid = 0;
};

/// "Total" row followed by one row per major FOS field ("Other" for records
/// without a field).
std::vector<DoiAvailabilityRow> doi_availability(
    const Corpus& corpus, const std::vector<MergedMatch>& merged,
    const FieldAssignedCorpus& fields);

}  // namespace covaudit
