#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covaudit/corpus.hpp"

namespace covaudit {

/// sum(citations) / n. Throws std::domain_error when n == 0.
double citations_per_publication(std::span<const long long> citations,
                                 std::size_t n);

/// Share of zero counts. Throws std::domain_error on an empty list.
double uncited_share(std::span<const long long> citations);

/// Citation counts of the records covered, with a count, in both A and B.
struct CitationVectorPair {
  std::string a;
  std::string b;
  std::vector<double> x;
  std::vector<double> y;
  /// Covered in both but lacking a count on at least one side.
  std::size_t excluded = 0;

  std::size_t n() const noexcept { return x.size(); }
};

/// Product-moment correlation. Throws std::domain_error for n < 2, unequal
/// lengths or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);
double pearson(const CitationVectorPair& p);

/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> mean_ranks(std::span<const double> v);

/// Pearson over mean ranks.
double spearman_mean_rank(std::span<const double> x, std::span<const double> y);
double spearman_mean_rank(const CitationVectorPair& p);

/// Tau-b with the usual tie corrections, O(n log n) via a merge-sort
/// swap count. Throws std::domain_error when one side is entirely tied.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);
double kendall_tau_b(const CitationVectorPair& p);

/// Covered flags and citation counts per record, index-aligned with a corpus.
struct CitationMatrix {
  std::vector<std::string> databases;
  std::vector<std::vector<bool>> covered;                     // [record][db]
  std::vector<std::vector<std::optional<long long>>> counts;  // [record][db]

  std::size_t index_of(std::string_view db) const;
};

/// Builds the pair over the records listed in `rows` (all when empty
/// optional).
CitationVectorPair make_pair(const CitationMatrix& m, std::size_t a,
                             std::size_t b,
                             const std::vector<std::size_t>* rows = nullptr);

struct CitationSummaryRow {
  std::string field;
  std::string database;
  std::size_t covered = 0;   // covered items with a count
  std::size_t excluded = 0;  // covered items without a count
  long long citations = 0;
  std::size_t uncited = 0;
  double cpp = 0;
  double uncited_share = 0;
};

struct CorrelationCell {
  std::string field;
  std::string a;
  std::string b;
  std::size_t n = 0;
  std::size_t excluded = 0;
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> kendall;
  /// Why a coefficient is missing (n < 2, zero variance).
  std::string note;
};

inline const std::string kAllFields = "All fields";

/// CPP and uncitedness per major FOS field and database; "All fields" first.
/// Fields with no covered item are omitted.
std::vector<CitationSummaryRow> citation_summary(
    const CitationMatrix& m, const FieldAssignedCorpus& fields);

/// n, Pearson, Spearman and Kendall per major FOS field and database pair
/// (a before b in database order); "All fields" first. Cells where a
/// coefficient cannot be computed carry a note instead.
std::vector<CorrelationCell> correlation_report(
    const CitationMatrix& m, const FieldAssignedCorpus& fields);

}  // namespace covaudit
