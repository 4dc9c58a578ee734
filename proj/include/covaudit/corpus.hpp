#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace covaudit {

enum class DocumentType {
  journal_article,
  monograph,
  edited_volume,
  book_section,
  conference_item,
  working_paper,
  newspaper_article,
  dissertation,
  habilitation,
  research_report,
  other,
};

inline constexpr DocumentType kAllDocumentTypes[] = {
    DocumentType::journal_article,  DocumentType::monograph,
    DocumentType::edited_volume,    DocumentType::book_section,
    DocumentType::conference_item,  DocumentType::working_paper,
    DocumentType::newspaper_article, DocumentType::dissertation,
    DocumentType::habilitation,     DocumentType::research_report,
    DocumentType::other,
};

/// Journal articles, conference items, monographs, book sections and edited
/// volumes.
bool is_main_type(DocumentType t) noexcept;
std::string_view to_string(DocumentType t) noexcept;
std::optional<DocumentType> parse_document_type(std::string_view s) noexcept;

enum class AccessStatus { public_, not_public, no_text_deposited };

inline constexpr AccessStatus kAllAccessStatuses[] = {
    AccessStatus::public_, AccessStatus::not_public,
    AccessStatus::no_text_deposited};

std::string_view to_string(AccessStatus a) noexcept;
std::optional<AccessStatus> parse_access_status(std::string_view s) noexcept;

struct BenchmarkEntry {
  bool covered = false;
  std::optional<long long> citation_count;  // present => covered
};

struct PublicationRecord {
  std::string record_id;
  std::string title;
  std::optional<std::string> doi;
  std::optional<int> publication_year;
  DocumentType document_type = DocumentType::other;
  std::optional<std::string> language;
  AccessStatus access_status = AccessStatus::no_text_deposited;
  std::vector<std::string> institute_ids;
  std::optional<int> author_count;
  std::optional<std::string> journal_title;
  std::optional<std::string> volume;
  std::optional<std::string> issue;
  std::optional<std::string> first_page;
  std::map<std::string, BenchmarkEntry> benchmark;
};

/// Immutable, validated list of publication records in input order.
class Corpus {
 public:
  Corpus() = default;

  /// Throws DuplicateIdError on repeated ids and Error on a blank title.
  explicit Corpus(std::vector<PublicationRecord> records,
                  std::vector<std::string> warnings = {});

  const std::vector<PublicationRecord>& records() const noexcept {
    return records_;
  }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const PublicationRecord& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const noexcept { return records_.begin(); }
  auto end() const noexcept { return records_.end(); }

  const PublicationRecord* find(std::string_view id) const;

  /// Benchmark database names seen in the input, sorted.
  std::vector<std::string> benchmark_names() const;

  /// Non-fatal problems found while loading (unknown columns etc).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  std::vector<PublicationRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> warnings_;
};

enum class CorpusFormat { tsv, jsonl };

std::optional<CorpusFormat> parse_corpus_format(std::string_view s) noexcept;

/// Reads a corpus file. Required columns: record_id, title, year, doc_type,
/// access. Benchmark data comes from covered_<db> / cites_<db> column pairs.
Corpus load_corpus(const std::filesystem::path& path,
                   CorpusFormat format = CorpusFormat::tsv);

struct CorpusFilter {
  int year_min = 2008;
  int year_max = 2015;
  bool require_institute = true;
  std::set<DocumentType> allowed_document_types = {
      DocumentType::journal_article, DocumentType::conference_item,
      DocumentType::monograph, DocumentType::book_section,
      DocumentType::edited_volume};

  /// Admits every record with a year; used as the identity filter in tests.
  static CorpusFilter permissive();
  bool admits(const PublicationRecord& r) const;
};

/// Per-predicate tallies. A record failing several predicates is counted
/// under each of them.
struct SubsetReport {
  std::size_t input = 0;
  std::size_t retained = 0;
  std::size_t missing_year = 0;
  std::size_t outside_years = 0;
  std::size_t no_institute = 0;
  std::size_t excluded_type = 0;
};

struct Subset {
  Corpus corpus;
  SubsetReport report;
};

Subset derive_subset(const Corpus& corpus, const CorpusFilter& filter);

struct FosField {
  std::string major;
  std::string sub;
  auto operator<=>(const FosField&) const = default;
};

class FieldMapping {
 public:
  /// Throws Error when an institute is mapped twice.
  void add(const std::string& institute_id, FosField field);
  const FosField* lookup(std::string_view institute_id) const;
  std::size_t size() const noexcept { return map_.size(); }

 private:
  std::map<std::string, FosField, std::less<>> map_;
};

/// Delimiter-separated file with header institute_id, major_field, subfield.
/// The delimiter (comma, semicolon or tab) is taken from the header line.
FieldMapping load_field_mapping(const std::filesystem::path& path);

/// De-duplicated FOS fields of each record, index-aligned with the corpus
/// passed to assign_fields.
struct FieldAssignedCorpus {
  std::vector<std::vector<FosField>> fields;
  std::vector<std::string> unmapped_institutes;  // sorted, unique
  std::size_t assignments = 0;

  double mean_fields_per_publication() const;
  /// Distinct major fields of record `i`.
  std::vector<std::string> majors(std::size_t i) const;
};

FieldAssignedCorpus assign_fields(const Corpus& corpus,
                                  const FieldMapping& mapping);

}  // namespace covaudit
