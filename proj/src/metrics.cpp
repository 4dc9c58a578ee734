#include "covaudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "covaudit/error.hpp"
#include "strutil.hpp"

namespace covaudit {

double recall(std::size_t matched, std::size_t corpus_size) {
  if (corpus_size == 0) throw std::domain_error("recall: empty corpus");
  if (matched > corpus_size)
    throw std::domain_error("recall: matched exceeds corpus size");
  return static_cast<double>(matched) / static_cast<double>(corpus_size);
}

double precision(double matched, double returned) {
  if (matched < 0 || returned < 0)
    throw std::domain_error("precision: negative count");
  if (matched > returned)
    throw std::domain_error("precision: matched exceeds returned");
  if (returned == 0) return 0.0;
  return matched / returned;
}

double f1(double p, double r) {
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

RetrievalScore retrieval_score(std::string label, std::size_t matched,
                               std::size_t corrected_matched, double returned,
                               std::size_t corpus_size) {
  if (corrected_matched > matched)
    throw std::domain_error("corrected matched exceeds matched");
  RetrievalScore s;
  s.label = std::move(label);
  s.matched = matched;
  s.corrected_matched = corrected_matched;
  s.returned = returned;
  s.recall = recall(matched, corpus_size);
  s.precision = precision(static_cast<double>(matched), returned);
  s.precision_corrected = precision(static_cast<double>(corrected_matched), returned);
  s.f1_corrected = f1(s.precision_corrected, s.recall);
  return s;
}

long long percent_tenths(std::size_t num, std::size_t den) {
  if (den == 0) throw std::domain_error("percent of an empty set");
  const auto n = static_cast<unsigned long long>(num);
  const auto d = static_cast<unsigned long long>(den);
  return static_cast<long long>((2000ULL * n + d) / (2ULL * d));
}

std::string format_percent(std::size_t num, std::size_t den) {
  if (den == 0) return {};
  auto t = percent_tenths(num, den);
  return std::to_string(t / 10) + "." + std::to_string(t % 10);
}

std::string format_fixed(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  const double scale = std::pow(10.0, decimals);
  const double mag = std::floor(std::fabs(value) * scale + 0.5 + 1e-9);
  const double v = std::copysign(mag / scale, value);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v == 0.0 ? 0.0 : v);
  return buf;
}

std::string_view to_string(Dimension d) noexcept {
  switch (d) {
    case Dimension::overall: return "overall";
    case Dimension::document_type: return "document_type";
    case Dimension::language_class: return "language_class";
    case Dimension::access_status: return "access_status";
    case Dimension::year: return "year";
    case Dimension::fos_major: return "fos_major";
    case Dimension::fos_sub: return "fos_sub";
  }
  return "overall";
}

std::optional<Dimension> parse_dimension(std::string_view s) noexcept {
  for (auto d : {Dimension::overall, Dimension::document_type,
                 Dimension::language_class, Dimension::access_status,
                 Dimension::year, Dimension::fos_major, Dimension::fos_sub})
    if (to_string(d) == s) return d;
  return std::nullopt;
}

LanguageClassifier::LanguageClassifier(std::set<std::string> english_tags) {
  for (const auto& t : english_tags)
    english_.insert(strutil::ascii_lower(strutil::trim(t)));
}

std::string LanguageClassifier::classify(
    const std::optional<std::string>& tag) const {
  if (!tag) return "Missing";
  auto t = strutil::ascii_lower(strutil::trim(*tag));
  if (t.empty()) return "Missing";
  return english_.count(t) ? "English" : "Non-English";
}

std::size_t CoverageMatrix::index_of(std::string_view db) const {
  auto it = std::find(databases.begin(), databases.end(), db);
  if (it == databases.end())
    throw Error("unknown database '" + std::string(db) + "'");
  return static_cast<std::size_t>(it - databases.begin());
}

CoverageTable coverage_breakdown(const Corpus& corpus,
                                 const CoverageMatrix& matrix,
                                 Dimension dimension,
                                 const FieldAssignedCorpus* fields,
                                 const LanguageClassifier& languages) {
  if (matrix.covered.size() != corpus.size())
    throw Error("coverage matrix does not match corpus size");
  if ((dimension == Dimension::fos_major || dimension == Dimension::fos_sub) &&
      (!fields || fields->fields.size() != corpus.size()))
    throw Error("field dimension requires field assignment of this corpus");

  const std::size_t ndb = matrix.databases.size();
  // Ordered category keys: (rank, label) keeps enum/natural order.
  std::map<std::pair<long long, std::string>, CoverageRow> rows;
  auto bump = [&](long long order, const std::string& label, std::size_t i) {
    auto& row = rows[{order, label}];
    if (row.covered.empty()) {
      row.category = label;
      row.covered.assign(ndb, 0);
    }
    ++row.n;
    for (std::size_t d = 0; d < ndb; ++d)
      if (matrix.covered[i][d]) ++row.covered[d];
  };

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& r = corpus[i];
    switch (dimension) {
      case Dimension::overall:
        bump(0, "All", i);
        break;
      case Dimension::document_type:
        bump(static_cast<long long>(r.document_type),
             std::string(to_string(r.document_type)), i);
        break;
      case Dimension::language_class: {
        auto c = languages.classify(r.language);
        bump(c == "English" ? 0 : c == "Non-English" ? 1 : 2, c, i);
        break;
      }
      case Dimension::access_status:
        bump(static_cast<long long>(r.access_status),
             std::string(to_string(r.access_status)), i);
        break;
      case Dimension::year:
        if (r.publication_year)
          bump(*r.publication_year, std::to_string(*r.publication_year), i);
        else
          bump(std::numeric_limits<long long>::max(), "Missing", i);
        break;
      case Dimension::fos_major: {
        auto majors = fields->majors(i);
        if (majors.empty()) bump(1, "Other", i);
        for (const auto& m : majors) bump(0, m, i);
        break;
      }
      case Dimension::fos_sub: {
        const auto& fs = fields->fields[i];
        if (fs.empty()) bump(1, "Other", i);
        for (const auto& f : fs) bump(0, f.major + "/" + f.sub, i);
        break;
      }
    }
  }

  CoverageTable t;
  t.dimension = dimension;
  t.databases = matrix.databases;
  for (auto& [_, row] : rows)
    if (row.n > 0) t.rows.push_back(std::move(row));
  return t;
}

std::vector<std::size_t> unique_coverage(const CoverageMatrix& matrix) {
  const std::size_t ndb = matrix.databases.size();
  if (ndb < 2) throw Error("unique coverage needs at least two databases");
  std::vector<std::size_t> out(ndb, 0);
  for (const auto& flags : matrix.covered) {
    std::size_t count = 0, which = 0;
    for (std::size_t d = 0; d < ndb; ++d)
      if (flags[d]) {
        ++count;
        which = d;
      }
    if (count == 1) ++out[which];
  }
  return out;
}

void QualityHistogram::add(long long delta) {
  if (delta == 0)
    ++exact;
  else if (delta == 1)
    ++plus_one;
  else if (delta == -1)
    ++minus_one;
  else if (delta > 1)
    ++greater_plus_one;
  else
    ++less_minus_one;
}

QualityHistogram year_delta_histogram(const Corpus& corpus,
                                      const std::vector<MergedMatch>& merged) {
  if (merged.size() != corpus.size())
    throw Error("merged matches do not align with corpus");
  QualityHistogram h;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto* m = merged[i].preferred();
    if (!m || !m->matched_year || !corpus[i].publication_year) continue;
    h.add(static_cast<long long>(*m->matched_year) - *corpus[i].publication_year);
  }
  return h;
}

QualityHistogram author_delta_histogram(const Corpus& corpus,
                                        const std::vector<MergedMatch>& merged) {
  if (merged.size() != corpus.size())
    throw Error("merged matches do not align with corpus");
  QualityHistogram h;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& r = corpus[i];
    const auto* m = merged[i].preferred();
    if (!m || r.document_type != DocumentType::journal_article ||
        !r.author_count || m->matched_author_count == 0)
      continue;
    h.add(static_cast<long long>(m->matched_author_count) - *r.author_count);
  }
  return h;
}

std::vector<DoiAvailabilityRow> doi_availability(
    const Corpus& corpus, const std::vector<MergedMatch>& merged,
    const FieldAssignedCorpus& fields) {
  if (merged.size() != corpus.size() || fields.fields.size() != corpus.size())
    throw Error("doi availability inputs do not align with corpus");
  DoiAvailabilityRow total{"Total"};
  std::map<std::pair<int, std::string>, DoiAvailabilityRow> by_field;

  auto tally = [&](DoiAvailabilityRow& row, std::size_t i) {
    const auto& r = corpus[i];
    const bool local = r.doi && !strutil::trim(*r.doi).empty();
    ++row.n;
    if (local) ++row.local_doi;
    const auto* m = merged[i].preferred();
    if (!m) return;
    ++row.matched;
    const bool remote = m->matched_doi && !strutil::trim(*m->matched_doi).empty();
    if (remote) {
      ++row.matched_entity_doi;
      if (strutil::trim(*m->matched_doi).rfind("10", 0) == 0)
        ++row.matched_entity_doi_valid;
    }
    if (local) {
      ++row.matched_local_doi;
      if (!remote) ++row.matched_local_doi_entity_missing;
    }
  };

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    tally(total, i);
    auto majors = fields.majors(i);
    if (majors.empty()) {
      auto& row = by_field[{1, "Other"}];
      row.category = "Other";
      tally(row, i);
    }
    for (const auto& m : majors) {
      auto& row = by_field[{0, m}];
      row.category = m;
      tally(row, i);
    }
  }
  std::vector<DoiAvailabilityRow> out{total};
  for (auto& [_, row] : by_field) out.push_back(std::move(row));
  return out;
}

}  // namespace covaudit
