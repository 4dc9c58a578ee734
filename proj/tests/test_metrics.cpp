#include <doctest.h>

#include <map>
#include <random>

#include "covaudit/error.hpp"
#include "covaudit/metrics.hpp"
#include "support.hpp"

using namespace covaudit;

namespace {

std::vector<PublicationRecord> blank_records(std::size_t n) {
  std::vector<PublicationRecord> rs(n);
  for (std::size_t i = 0; i < n; ++i) {
    rs[i].record_id = "R" + std::to_string(i);
    rs[i].title = "t";
  }
  return rs;
}

MatchResult hit(const std::string& id, std::optional<int> year, std::size_t authors = 0,
                std::optional<std::string> doi = std::nullopt) {
  MatchResult m;
  m.record_id = id;
  m.entity_id = "E" + id;
  m.match_type = MatchType::title;
  m.rank = 1;
  m.matched_year = year;
  m.matched_author_count = authors;
  m.matched_doi = std::move(doi);
  return m;
}

struct Oracle {
  std::size_t n = 0;
  std::vector<std::size_t> covered;
};

}  // namespace

TEST_CASE("recall, precision and f1 on published retrieval counts") {
  CHECK(std::abs(recall(48231, 91215) - 0.529) <= 0.001);
  CHECK(std::abs(recall(46697, 91215) - 0.512) <= 0.001);
  CHECK(std::abs(precision(46697, 52067) - 0.897) <= 0.001);
  CHECK(std::abs(precision(45990, 66771) - 0.689) <= 0.001);
  CHECK(std::abs(f1(0.879, 0.512) - 0.647) <= 0.001);
  // exact arithmetic of the harmonic mean at these inputs
  CHECK(f1(0.689, 0.514) == doctest::Approx(2 * 0.689 * 0.514 / (0.689 + 0.514)));
  CHECK(std::abs(f1(0.689, 0.514) - 0.5888) <= 0.0001);
  CHECK(recall(0, 7) == 0.0);
  CHECK(precision(13, 13) == 1.0);
  CHECK(precision(0, 0) == 0.0);
  CHECK(f1(0, 0) == 0.0);
  CHECK_THROWS_AS(recall(1, 0), std::domain_error);
  CHECK_THROWS_AS(recall(8, 7), std::domain_error);
  CHECK_THROWS_AS(precision(3, 0), std::domain_error);

  auto s = retrieval_score("ti_ex", 46697, 45775, 52067, 91215);
  CHECK(std::abs(s.precision_corrected - 0.879) <= 0.001);
  CHECK(std::abs(s.f1_corrected - 0.647) <= 0.001);
  CHECK_THROWS_AS(retrieval_score("x", 3, 4, 10, 10), std::domain_error);
}

TEST_CASE("f1 lies between its arguments and is symmetric") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    double p = u(rng), r = u(rng);
    double f = f1(p, r);
    CHECK(f >= std::min(p, r) - 1e-15);
    CHECK(f <= std::max(p, r) + 1e-15);
    CHECK(f == f1(r, p));
    CHECK(f1(p, p) == doctest::Approx(p).epsilon(1e-14));
  }
}

TEST_CASE("recall is monotone in matched") {
  for (std::size_t m = 1; m <= 500; ++m) CHECK(recall(m, 500) >= recall(m - 1, 500));
}

TEST_CASE("percent formatting rounds half up") {
  CHECK(format_percent(35557, 62791) == "56.6");
  CHECK(format_percent(2781, 62791) == "4.4");
  CHECK(format_percent(508, 62791) == "0.8");
  CHECK(format_percent(1, 8) == "12.5");
  CHECK(format_percent(1, 16) == "6.3");  // 6.25
  CHECK(format_percent(1, 2000) == "0.1");  // 0.05
  CHECK(format_percent(1, 2001) == "0.0");
  CHECK(format_percent(5, 5) == "100.0");
  CHECK(format_percent(0, 5) == "0.0");
  CHECK(format_percent(1, 0).empty());
  CHECK_THROWS_AS(percent_tenths(1, 0), std::domain_error);
  CHECK(format_fixed(0.6465, 3) == "0.647");
  CHECK(format_fixed(-0.0004, 3) == "0.000");
  CHECK(format_fixed(18.3386, 2) == "18.34");

  std::mt19937_64 rng(5);
  for (int i = 0; i < 20000; ++i) {
    std::size_t den = std::uniform_int_distribution<std::size_t>(1, 100000)(rng);
    std::size_t num = std::uniform_int_distribution<std::size_t>(0, den)(rng);
    // integer oracle: floor((1000 num / den) + 1/2)
    long long q = static_cast<long long>((1000 * num) / den);
    long long rem = static_cast<long long>((1000 * num) % den);
    if (2 * rem >= static_cast<long long>(den)) ++q;
    CHECK(percent_tenths(num, den) == q);
  }
}

TEST_CASE("language classes") {
  LanguageClassifier c;
  CHECK(c.classify(std::string("EN")) == "English");
  CHECK(c.classify(std::string(" eng ")) == "English");
  CHECK(c.classify(std::string("de")) == "Non-English");
  CHECK(c.classify(std::string("  ")) == "Missing");
  CHECK(c.classify(std::nullopt) == "Missing");
  LanguageClassifier custom({"en-GB"});
  CHECK(custom.classify(std::string("EN-gb")) == "English");
  CHECK(custom.classify(std::string("en")) == "Non-English");
}

TEST_CASE("coverage breakdown equals a group-by tally") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> langs = {"en", "de", "fr", "", "ENG"};
  const std::vector<std::string> majors = {"Humanities", "Natural Sciences", "Social Sciences"};
  for (int round = 0; round < 20; ++round) {
    const std::size_t n = 400;
    auto rs = blank_records(n);
    FieldAssignedCorpus fields;
    fields.fields.resize(n);
    CoverageMatrix m;
    m.databases = {"MA", "Scopus", "WoS"};
    m.covered.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& r = rs[i];
      r.document_type = kAllDocumentTypes[rng() % 5];
      if (rng() % 5) r.language = langs[rng() % langs.size()];
      r.access_status = kAllAccessStatuses[rng() % 3];
      if (rng() % 10) r.publication_year = 2008 + static_cast<int>(rng() % 8);
      for (int k = static_cast<int>(rng() % 3); k > 0; --k)
        fields.fields[i].push_back(
            {majors[rng() % majors.size()], "sub" + std::to_string(rng() % 2)});
      std::sort(fields.fields[i].begin(), fields.fields[i].end());
      fields.fields[i].erase(std::unique(fields.fields[i].begin(), fields.fields[i].end()),
                             fields.fields[i].end());
      for (int d = 0; d < 3; ++d) m.covered[i].push_back(rng() % 2 == 0);
    }
    Corpus corpus(rs);
    LanguageClassifier lc;

    auto keys_of = [&](std::size_t i, Dimension dim) {
      const auto& r = corpus[i];
      std::set<std::string> ks;
      switch (dim) {
        case Dimension::overall: ks.insert("All"); break;
        case Dimension::document_type: ks.insert(std::string(to_string(r.document_type))); break;
        case Dimension::language_class: {
          std::string t = r.language.value_or("");
          for (auto& ch : t) ch = static_cast<char>(std::tolower(ch));
          ks.insert(t.empty() ? "Missing" : (t == "en" || t == "eng") ? "English" : "Non-English");
          break;
        }
        case Dimension::access_status: ks.insert(std::string(to_string(r.access_status))); break;
        case Dimension::year:
          ks.insert(r.publication_year ? std::to_string(*r.publication_year) : "Missing");
          break;
        case Dimension::fos_major:
          for (const auto& f : fields.fields[i]) ks.insert(f.major);
          if (ks.empty()) ks.insert("Other");
          break;
        case Dimension::fos_sub:
          for (const auto& f : fields.fields[i]) ks.insert(f.major + "/" + f.sub);
          if (ks.empty()) ks.insert("Other");
          break;
      }
      return ks;
    };

    for (auto dim : {Dimension::overall, Dimension::document_type, Dimension::language_class,
                     Dimension::access_status, Dimension::year, Dimension::fos_major,
                     Dimension::fos_sub}) {
      std::map<std::string, Oracle> expected;
      for (std::size_t i = 0; i < n; ++i)
        for (const auto& k : keys_of(i, dim)) {
          auto& o = expected[k];
          o.covered.resize(3);
          ++o.n;
          for (int d = 0; d < 3; ++d) o.covered[d] += m.covered[i][d];
        }
      auto t = coverage_breakdown(corpus, m, dim, &fields, lc);
      CHECK(t.databases == m.databases);
      REQUIRE(t.rows.size() == expected.size());
      for (const auto& row : t.rows) {
        REQUIRE(expected.count(row.category));
        CHECK(row.n == expected[row.category].n);
        CHECK(row.covered == expected[row.category].covered);
        CHECK(row.n > 0);
      }
      if (dim == Dimension::year && expected.count("Missing"))
        CHECK(t.rows.back().category == "Missing");
    }
  }
}

TEST_CASE("coverage breakdown input checks") {
  Corpus corpus(blank_records(2));
  CoverageMatrix m{{"MA"}, {{true}}};
  CHECK_THROWS_AS(coverage_breakdown(corpus, m, Dimension::overall), Error);
  m.covered.push_back({false});
  CHECK_THROWS_AS(coverage_breakdown(corpus, m, Dimension::fos_major), Error);
  auto t = coverage_breakdown(corpus, m, Dimension::overall);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].n == 2);
  CHECK(t.rows[0].covered == std::vector<std::size_t>{1});
  CHECK(m.index_of("MA") == 0);
  CHECK_THROWS_AS(m.index_of("WoS"), Error);
  CHECK(parse_dimension("fos_sub") == Dimension::fos_sub);
  CHECK_FALSE(parse_dimension("nope"));
}

TEST_CASE("unique coverage equals a per-record scan") {
  std::mt19937_64 rng(13);
  for (int round = 0; round < 30; ++round) {
    std::size_t ndb = 2 + rng() % 3;
    CoverageMatrix m;
    for (std::size_t d = 0; d < ndb; ++d) m.databases.push_back("D" + std::to_string(d));
    std::vector<std::size_t> overall(ndb, 0), expected(ndb, 0);
    for (int i = 0; i < 1000; ++i) {
      std::vector<bool> row;
      for (std::size_t d = 0; d < ndb; ++d) row.push_back(rng() % 3 == 0);
      for (std::size_t d = 0; d < ndb; ++d) {
        overall[d] += row[d];
        bool alone = row[d];
        for (std::size_t e = 0; e < ndb; ++e)
          if (e != d && row[e]) alone = false;
        expected[d] += alone;
      }
      m.covered.push_back(row);
    }
    auto got = unique_coverage(m);
    CHECK(got == expected);
    for (std::size_t d = 0; d < ndb; ++d) CHECK(got[d] <= overall[d]);
  }
  CoverageMatrix all{{"A", "B"}, {{true, true}}};
  CHECK(unique_coverage(all) == std::vector<std::size_t>{0, 0});
  CHECK_THROWS_AS(unique_coverage(CoverageMatrix{{"A"}, {{true}}}), Error);
}

TEST_CASE("histogram buckets") {
  QualityHistogram h;
  for (long long d : {0, 0, 1, -1, 2, 7, -2, -10}) h.add(d);
  CHECK(h.exact == 2);
  CHECK(h.plus_one == 1);
  CHECK(h.minus_one == 1);
  CHECK(h.greater_plus_one == 2);
  CHECK(h.less_minus_one == 2);
  CHECK(h.total() == 8);
}

TEST_CASE("year and author deltas over matched records") {
  std::mt19937_64 rng(19);
  const std::size_t n = 2000;
  auto rs = blank_records(n);
  std::vector<MergedMatch> merged;
  std::map<std::string, std::size_t> years, authors;
  std::size_t year_pairs = 0, author_pairs = 0;
  auto bucket = [](long long d) {
    return d == 0 ? "exact" : d == 1 ? "+1" : d == -1 ? "-1" : d > 1 ? ">+1" : "<-1";
  };
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = rs[i];
    r.document_type = rng() % 2 ? DocumentType::journal_article : DocumentType::monograph;
    if (rng() % 8) r.publication_year = 2000 + static_cast<int>(rng() % 15);
    if (rng() % 6) r.author_count = 1 + static_cast<int>(rng() % 60);
    const bool matched = rng() % 3 != 0;
    std::optional<int> y;
    if (rng() % 8) y = 1998 + static_cast<int>(rng() % 19);
    std::size_t a = rng() % 7 == 0 ? 0 : 1 + rng() % 50;
    if (matched) {
      merged.push_back(merge_mode_results(r.record_id, hit(r.record_id, y, a), std::nullopt));
      if (y && r.publication_year) {
        ++year_pairs;
        ++years[bucket(*y - *r.publication_year)];
      }
      if (r.document_type == DocumentType::journal_article && r.author_count && a > 0) {
        ++author_pairs;
        ++authors[bucket(static_cast<long long>(a) - *r.author_count)];
      }
    } else {
      merged.push_back(merge_mode_results(r.record_id, std::nullopt, std::nullopt));
    }
  }
  Corpus corpus(rs);
  auto check = [](const QualityHistogram& h, std::map<std::string, std::size_t>& e,
                  std::size_t total) {
    CHECK(h.exact == e["exact"]);
    CHECK(h.plus_one == e["+1"]);
    CHECK(h.minus_one == e["-1"]);
    CHECK(h.greater_plus_one == e[">+1"]);
    CHECK(h.less_minus_one == e["<-1"]);
    CHECK(h.total() == total);
  };
  check(year_delta_histogram(corpus, merged), years, year_pairs);
  check(author_delta_histogram(corpus, merged), authors, author_pairs);

  // truncated author list: 50 on the entity, 60 locally
  auto one = blank_records(1);
  one[0].document_type = DocumentType::journal_article;
  one[0].author_count = 60;
  auto h = author_delta_histogram(
      Corpus(one), {merge_mode_results("R0", hit("R0", std::nullopt, 50), std::nullopt)});
  CHECK(h.less_minus_one == 1);
  CHECK_THROWS_AS(year_delta_histogram(Corpus(one), {}), Error);
}

TEST_CASE("doi availability equals a group-by tally") {
  std::mt19937_64 rng(23);
  const std::size_t n = 1500;
  auto rs = blank_records(n);
  FieldAssignedCorpus fields;
  fields.fields.resize(n);
  std::vector<MergedMatch> merged;
  const std::vector<std::string> majors = {"Humanities", "Medical & Health Sciences"};
  std::map<std::string, DoiAvailabilityRow> expected;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng() % 2) rs[i].doi = rng() % 10 ? "10.1/x" + std::to_string(i) : "  ";
    std::set<std::string> ms;
    for (const auto& m : majors)
      if (rng() % 3 == 0) {
        fields.fields[i].push_back({m, "s"});
        ms.insert(m);
      }
    if (ms.empty()) ms.insert("Other");
    ms.insert("Total");
    const bool matched = rng() % 2;
    std::optional<std::string> edoi;
    if (matched && rng() % 4) edoi = rng() % 10 ? "10.1/e" : "doi:bad";
    merged.push_back(matched ? merge_mode_results(rs[i].record_id,
                                                  hit(rs[i].record_id, 2010, 1, edoi),
                                                  std::nullopt)
                             : merge_mode_results(rs[i].record_id, std::nullopt, std::nullopt));
    const bool local = rs[i].doi && rs[i].doi->find_first_not_of(' ') != std::string::npos;
    for (const auto& k : ms) {
      auto& row = expected[k];
      ++row.n;
      row.local_doi += local;
      row.matched += matched;
      row.matched_entity_doi += matched && edoi.has_value();
      row.matched_entity_doi_valid += matched && edoi && edoi->rfind("10", 0) == 0;
      row.matched_local_doi += matched && local;
      row.matched_local_doi_entity_missing += matched && local && !edoi;
    }
  }
  auto rows = doi_availability(Corpus(rs), merged, fields);
  REQUIRE(rows.size() == expected.size());
  CHECK(rows.front().category == "Total");
  CHECK(rows.back().category == "Other");
  for (const auto& row : rows) {
    const auto& e = expected.at(row.category);
    CHECK(row.n == e.n);
    CHECK(row.local_doi == e.local_doi);
    CHECK(row.matched == e.matched);
    CHECK(row.matched_entity_doi == e.matched_entity_doi);
    CHECK(row.matched_entity_doi_valid == e.matched_entity_doi_valid);
    CHECK(row.matched_local_doi == e.matched_local_doi);
    CHECK(row.matched_local_doi_entity_missing == e.matched_local_doi_entity_missing);
  }
}
